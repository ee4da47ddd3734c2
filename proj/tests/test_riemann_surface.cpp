#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "tyurin/errors.hpp"
#include "tyurin/quadrature.hpp"
#include "tyurin/riemann_surface.hpp"

using namespace tyurin;

TEST_CASE("gauss-legendre integrates polynomials exactly") {
    const auto& r = gauss_legendre(64);
    for (int k = 0; k < 127; ++k) {
        double s = 0;
        for (int i = 0; i < 64; ++i) s += r.weights(i) * std::pow(r.nodes(i), k);
        const double exact = (k % 2) ? 0.0 : 2.0 / (k + 1);
        CHECK(std::abs(s - exact) < 1e-14);
    }
}

TEST_CASE("series arithmetic against closed forms") {
    using S = Series<cplx>;
    const S one_plus_s = S::linear(1.0, 8);
    const S r = one_plus_s.sqrt(1.0);
    // binomial(1/2, k)
    double c = 1.0;
    for (int k = 0; k < 8; ++k) {
        CHECK(std::abs(r[k] - c) < 1e-15);
        c *= (0.5 - k) / (k + 1);
    }
    const S inv = one_plus_s.inverse();
    for (int k = 0; k < 8; ++k) CHECK(std::abs(inv[k] - std::pow(-1.0, k)) < 1e-15);
    const S sq = r * r;
    for (int k = 0; k < 8; ++k) CHECK(std::abs(sq[k] - one_plus_s[k]) < 1e-15);
}

TEST_CASE("curve model and charts") {
    const Curve C = test::reference_curve();
    CHECK(C.genus() == 2);
    REQUIRE(C.branch_points().size() == 5);
    for (auto e : C.branch_points()) CHECK(std::abs(C.Qval(e)) < 1e-13);
    for (cplx x : {cplx(0.3, 0.2), cplx(-2.1, 0.7), cplx(3.0, 0.0)}) {
        const cplx y = C.yref(x);
        CHECK(std::abs(y * y - C.Qval(x)) < 1e-12 * std::abs(y * y));
    }
    CHECK(C.yref(3.0).real() > 0);
    CHECK_THROWS_AS(Curve({0, 0, 0, 0, 0, 1}), DegenerateCurve);
    CHECK_THROWS_AS(Curve({-1, 0, 1}), DegenerateCurve);

    const Chart d = C.disk_chart(cplx(-2.5, 0.3), -1, 0.6);
    const Chart b = C.branch_chart(0, 0.7);
    const Chart inf = C.infinity_chart(0.5);
    for (const Chart* ch : {&d, &b, &inf}) {
        for (cplx z : {cplx(0.11, -0.2), cplx(-0.3, 0.25)}) {
            const ChartPoint p = C.at(*ch, z);
            CHECK(std::abs(p.y * p.y - C.Qval(p.x)) < 1e-11 * (1 + std::abs(p.y * p.y)));
            CHECK(std::abs(p.w - p.dxdz / p.y) < 1e-12 * std::abs(p.w));
            // Local series against finite differences of the chart maps.
            const LocalSeries ls = C.local_series(*ch, z, 3);
            const double h = 1e-5;
            const ChartPoint pp = C.at(*ch, z + h), pm = C.at(*ch, z - h);
            CHECK(std::abs(ls.X[0] - p.x) < 1e-13 * (1 + std::abs(p.x)));
            CHECK(std::abs(ls.Y[0] - p.y) < 1e-12 * (1 + std::abs(p.y)));
            CHECK(std::abs(ls.Y[1] - (pp.y - pm.y) / (2 * h)) < 1e-6 * (1 + std::abs(ls.Y[1])));
            CHECK(std::abs(ls.W[1] - (pp.w - pm.w) / (2 * h)) < 1e-6 * (1 + std::abs(ls.W[1])));
            // Affine term is (1/2) d/dz ln w.
            const cplx fd = 0.5 * (std::log(pp.w) - std::log(pm.w)) / (2 * h);
            CHECK(std::abs(C.affine_term(*ch, z) - fd) < 1e-6 * (1 + std::abs(fd)));
            // Round trip through surface points.
            const SurfacePoint sp = C.from_chart(*ch, z);
            CHECK(std::abs(C.to_chart(*ch, sp) - z) < 1e-12);
        }
    }
}

TEST_CASE("periods: symmetry, positivity and self-convergence") {
    const CurveContext& ctx = test::reference_context();
    const MatC& tau = ctx.tau();
    CHECK((tau - tau.transpose()).cwiseAbs().maxCoeff() < 1e-10);
    Eigen::SelfAdjointEigenSolver<MatR> es(tau.imag());
    CHECK(es.eigenvalues().minCoeff() > 0);

    QuadratureConfig fine = ctx.config();
    fine.order = 128;
    const CurveContext ctx2(ctx.curve(), ctx.infinity(), fine);
    CHECK((ctx2.A() - ctx.A()).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((ctx2.B() - ctx.B()).cwiseAbs().maxCoeff() < 1e-9);

    // b-periods of the normalized basis by an independent quadrature order.
    for (int j = 0; j < 2; ++j) {
        const VecC bj = integrate<VecC>(
            ctx.b_cycles()[j], [&](const ChartPoint& p) -> VecC { return ctx.omega(p); }, 96, 0.3);
        const VecC aj = integrate<VecC>(
            ctx.a_cycles()[j], [&](const ChartPoint& p) -> VecC { return ctx.omega(p); }, 96, 0.3);
        for (int k = 0; k < 2; ++k) {
            CHECK(std::abs(bj(k) - tau(j, k)) < 1e-8);
            CHECK(std::abs(aj(k) - (j == k ? 1.0 : 0.0)) < 1e-10);
        }
    }
}

TEST_CASE("differential basis is odd under the involution") {
    const CurveContext& ctx = test::reference_context();
    const Curve& C = ctx.curve();
    for (cplx x : {cplx(0.4, 0.9), cplx(-1.7, -0.2)}) {
        const SurfacePoint p = C.point(x, 1);
        CHECK((ctx.omega(p) + ctx.omega(C.involution(p))).norm() < 1e-10 * ctx.omega(p).norm());
    }
    CHECK_THROWS_AS(ctx.omega(C.branch_point(1)), ChartError);
}

namespace {

// y continued from (x0, y0) to x by the ratio of reference branches, valid on small disks.
using test::y_near;

}  // namespace

TEST_CASE("third kind differentials: residues and normalization") {
    const CurveContext& ctx = test::reference_context();
    const Curve& C = ctx.curve();
    const SurfacePoint p = C.point(cplx(0.35, 0.62), -1);
    for (auto mode : {ThirdKindMode::ANormalized, ThirdKindMode::ImaginaryPeriods}) {
        const ThirdKind w = ctx.third_kind(p, ctx.infinity(), mode);
        for (int which = 0; which < 2; ++which) {
            const SurfacePoint& c = which ? ctx.infinity() : p;
            const cplx res = circle_residue<cplx>(
                [&](cplx x) {
                    const cplx y = y_near(C, c.x, c.y, x);
                    return ctx.eval(w, ChartPoint{x, x, y, 1.0, 1.0 / y});
                },
                c.x, 1e-2);
            CHECK(std::abs(res - (which ? -1.0 : 1.0)) < 1e-8);
        }
        auto [a, b] = ctx.periods([&](const ChartPoint& z) { return ctx.eval(w, z); }, {p.x, ctx.infinity().x}, 96);
        if (mode == ThirdKindMode::ANormalized) {
            CHECK(a.cwiseAbs().maxCoeff() < 1e-8);
        } else {
            CHECK(a.real().cwiseAbs().maxCoeff() < 1e-8);
            CHECK(b.real().cwiseAbs().maxCoeff() < 1e-8);
        }
    }
    CHECK_THROWS_AS(ctx.third_kind(p, p, ThirdKindMode::ANormalized), InvalidDivisor);
}

TEST_CASE("third kind differential jumps by 2 pi i omega when its pole crosses an a-cycle") {
    // Continuing p along b_l crosses a_l once. With a-periods taken on fixed
    // contours, the continuation shows up as the jump across a_l, extracted
    // by Richardson extrapolation in the distance to the contour.
    const CurveContext& ctx = test::reference_context();
    const Curve& C = ctx.curve();
    const SurfacePoint q = C.point(cplx(-0.4, 1.7), 1);
    const ChartPoint qc{q.x, q.x, q.y, 1.0, 1.0 / q.y};
    const VecC om = ctx.omega(qc);
    for (int l = 0; l < 2; ++l) {
        const LiftedPath& a = ctx.a_cycles()[l];
        // Arc of the first lasso in a_l, opposite to its stem.
        const ChartPoint mid = a.at(1, 0.5);
        const Segment& arc = a.path().segments[1];
        REQUIRE(arc.shape == Segment::Shape::Arc);
        const cplx n = (mid.x - arc.a) / std::abs(mid.x - arc.a);
        auto f = [&](double s) {
            const cplx x = mid.x + s * n;
            const SurfacePoint p = C.point_with_y(x, y_near(C, mid.x, mid.y, x));
            return ctx.eval(ctx.third_kind(p, ctx.infinity(), ThirdKindMode::ANormalized), qc);
        };
        auto D = [&](double d) { return f(d) - f(-d); };
        // D(d) = J + c1 d + c3 d^3 + c5 d^5 + ...
        const double d = 0.02;
        const cplx D1 = D(d), D2 = D(d / 2), D4 = D(d / 4), D8 = D(d / 8);
        const cplx R1 = 2.0 * D2 - D1, R2 = 2.0 * D4 - D2, R3 = 2.0 * D8 - D4;
        const cplx S1 = (4.0 * R2 - R1) / 3.0, S2 = (4.0 * R3 - R2) / 3.0;
        const cplx J = (16.0 * S2 - S1) / 15.0;
        const cplx expect = two_pi_i * om(l);
        CHECK(std::min(std::abs(J - expect), std::abs(J + expect)) < 1e-6);
    }
}

TEST_CASE("abel map") {
    const CurveContext& ctx = test::reference_context();
    const Curve& C = ctx.curve();
    CHECK(ctx.abel(ctx.infinity(), ctx.infinity()).norm() == 0.0);
    const VecC ae = ctx.abel(C.branch_point(2));
    for (cplx x : {cplx(0.3, 0.4), cplx(-2.2, 1.1), cplx(1.9, -0.6), cplx(0.02, -0.97)}) {
        const SurfacePoint p = C.point(x, 1);
        const VecC s = ctx.reduce(ctx.abel(p) + ctx.abel(C.involution(p)) - 2.0 * ae);
        CHECK(s.norm() < 1e-9);
    }
    // Straight path from the base point, independent of the lasso system.
    const cplx x1(2.4, 1.3);
    Path line;
    line.segments.push_back(Segment::line(Chart{}, ctx.infinity().x, x1));
    const LiftedPath lp = ctx.lift(line);
    const SurfacePoint p = C.point_with_y(x1, lp.y_end());
    const VecC direct = integrate<VecC>(lp, [&](const ChartPoint& c) -> VecC { return ctx.omega(c); }, 64, 0.5);
    CHECK(ctx.reduce(direct - ctx.abel(p)).norm() < 1e-10);
    // Points inside lasso disks go through branch charts.
    const SurfacePoint pd = C.point(C.branch_points()[3] + cplx(0.01, 0.02), -1);
    const VecC s = ctx.reduce(ctx.abel(pd) + ctx.abel(C.involution(pd)) - 2.0 * ae);
    CHECK(s.norm() < 1e-9);
}

TEST_CASE("theta function identities") {
    const CurveContext& ctx = test::reference_context();
    const MatC& tau = ctx.tau();
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> U(-0.6, 0.6);
    for (int t = 0; t < 5; ++t) {
        VecC z(2);
        z << cplx(U(rng), U(rng)), cplx(U(rng), U(rng));
        const cplx th = ctx.theta(z);
        CHECK(std::abs(ctx.theta(-z) - th) < 1e-12 * (1 + std::abs(th)));
        for (int k = 0; k < 2; ++k) {
            VecC e = VecC::Zero(2);
            e(k) = 1.0;
            CHECK(std::abs(ctx.theta(z + e) - th) < 1e-10 * (1 + std::abs(th)));
            const cplx shifted = ctx.theta(z + tau.col(k));
            const cplx expect = std::exp(-I * pi * tau(k, k) - two_pi_i * z(k)) * th;
            CHECK(std::abs(shifted - expect) < 1e-10 * (1 + std::abs(expect)));
        }
        const ThetaValue tg = ctx.theta_grad(z);
        for (int k = 0; k < 2; ++k) {
            const double h = 1e-5;
            VecC e = VecC::Zero(2);
            e(k) = h;
            const cplx fd = (ctx.theta(z + e) - ctx.theta(z - e)) / (2 * h);
            CHECK(std::abs(fd - tg.gradient(k)) < 1e-6 * (1 + std::abs(tg.gradient(k))));
        }
    }
}

TEST_CASE("riemann constants: theta vanishing at the divisor") {
    const CurveContext& ctx = test::reference_context();
    const Curve& C = ctx.curve();
    const VecC& K = ctx.riemann_constants();
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    int tried = 0;
    for (int t = 0; t < 6; ++t) {
        const SurfacePoint d1 = C.point(cplx(U(rng), U(rng)), 1), d2 = C.point(cplx(U(rng), U(rng)), -1);
        if (C.branch_distance(d1.x) < 0.1 || C.branch_distance(d2.x) < 0.1) continue;
        ++tried;
        const VecC AD = ctx.abel(d1) + ctx.abel(d2);
        auto f = [&](const SurfacePoint& p) { return ctx.theta(ctx.reduce(ctx.abel(p) - AD - K)); };
        CHECK(std::abs(f(d1)) < 1e-7);
        CHECK(std::abs(f(d2)) < 1e-7);
        CHECK(std::abs(f(C.point(cplx(U(rng), U(rng)), 1))) > 1e-4);
    }
    CHECK(tried >= 4);
    // Conjugate pair: special divisor, theta vanishes identically.
    const SurfacePoint c = C.point(cplx(0.7, -1.2), 1);
    const VecC AD = ctx.abel(c) + ctx.abel(C.involution(c));
    for (cplx x : {cplx(1.5, 0.5), cplx(-0.3, -0.8), cplx(-1.9, 1.4)}) {
        const SurfacePoint p = C.point(x, 1);
        CHECK(std::abs(ctx.theta(ctx.reduce(ctx.abel(p) - AD - K))) < 1e-9);
    }
}
