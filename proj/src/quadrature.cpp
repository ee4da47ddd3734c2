#include "tyurin/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "tyurin/errors.hpp"

namespace tyurin {

const GaussRule& gauss_legendre(int order) {
    static std::map<int, GaussRule> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(order);
    if (it != cache.end()) return it->second;

    MatR J = MatR::Zero(order, order);
    for (int k = 1; k < order; ++k) {
        const double b = k / std::sqrt(4.0 * k * k - 1.0);
        J(k, k - 1) = J(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<MatR> es(J);
    GaussRule rule;
    rule.nodes = es.eigenvalues();
    rule.weights = 2.0 * es.eigenvectors().row(0).transpose().array().square();
    // Polish nodes with Newton on P_n to full precision.
    for (int i = 0; i < order; ++i) {
        double x = rule.nodes(i);
        for (int it2 = 0; it2 < 3; ++it2) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= order; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double dp = order * (x * p1 - p0) / (x * x - 1.0);
            x -= p1 / dp;
            if (it2 == 2) rule.weights(i) = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        rule.nodes(i) = x;
    }
    return cache.emplace(order, std::move(rule)).first->second;
}

namespace {

// Dormand-Prince tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

MatC Dopri5::advance(const Rhs& f, MatC y, double s0, double s1, double& h, OdeStats& stats) const {
    const double span = s1 - s0;
    if (span == 0.0) return y;
    const double dir = span > 0 ? 1.0 : -1.0;
    if (!(h > 0.0)) h = std::abs(span) * 0.05;
    double s = s0;
    double err_prev = 1e-4;
    MatC k1 = f(s, y);
    ++stats.evaluations;
    while (dir * (s1 - s) > 0.0) {
        double step = std::min(h, std::abs(s1 - s));
        if (step < 1e-14 * std::max(1.0, std::abs(s)))
            throw IntegratorStall("step size underflow at s = " + std::to_string(s));
        const double hs = dir * step;
        const MatC k2 = f(s + c2 * hs, y + hs * a21 * k1);
        const MatC k3 = f(s + c3 * hs, y + hs * (a31 * k1 + a32 * k2));
        const MatC k4 = f(s + c4 * hs, y + hs * (a41 * k1 + a42 * k2 + a43 * k3));
        const MatC k5 = f(s + c5 * hs, y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const MatC k6 = f(s + hs, y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        const MatC y5 = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const MatC k7 = f(s + hs, y5);
        stats.evaluations += 6;
        const MatC err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        double en = 0.0;
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            const double sc = atol_ + rtol_ * std::max(std::abs(y.data()[i]), std::abs(y5.data()[i]));
            en = std::max(en, std::abs(err.data()[i]) / sc);
        }
        if (en <= 1.0) {
            s = (std::abs(s1 - s) <= step) ? s1 : s + hs;
            y = y5;
            k1 = k7;
            ++stats.steps;
            const double fac = 0.9 * std::pow(std::max(en, 1e-10), -0.7 / 5) * std::pow(err_prev, 0.4 / 5);
            h = step * std::clamp(fac, 0.2, 5.0);
            err_prev = std::max(en, 1e-4);
        } else {
            ++stats.rejected;
            h = step * std::max(0.2, 0.9 * std::pow(en, -0.2));
        }
    }
    return y;
}

}  // namespace tyurin
