#pragma once

#include <random>

#include "tyurin/normal_form.hpp"
#include "tyurin/riemann_surface.hpp"

namespace tyurin::test {

// y^2 = x^5 - x with base point (3, +)
inline const Curve& reference_curve() {
    static const Curve c({0.0, -1.0, 0.0, 0.0, 0.0, 1.0});
    return c;
}

inline const CurveContext& reference_context() {
    static const CurveContext ctx(reference_curve(), reference_curve().point(3.0, 1));
    return ctx;
}

// x-chart disk in the lower left, away from the lassos and the base point.
inline DiskSpec reference_disk() { return DiskSpec{cplx(-1.6, -1.6), 0.9, 1, -1}; }

// Branch chart at e = -1 (index 0), with z = +-a conjugate under the involution.
inline DiskSpec branch_disk() { return DiskSpec{0.0, 0.9, 1, 0}; }

// y continued from (x0, y0) to a nearby x.
inline cplx y_near(const Curve& C, cplx x0, cplx y0, cplx x) { return y0 * std::sqrt(C.Qval(x) / C.Qval(x0)); }

// x-chart evaluation point.
inline ChartPoint plane_point(const SurfacePoint& p) { return ChartPoint{p.x, p.x, p.y, 1.0, 1.0 / p.y}; }

struct Rng {
    std::mt19937 rng;
    std::uniform_real_distribution<double> U{-1.0, 1.0};
    explicit Rng(unsigned seed) : rng(seed) {}
    double u() { return U(rng); }
    cplx c() { return {u(), u()}; }
    cplx in_disk(double r) {
        cplx z;
        do z = c(); while (std::abs(z) > 1.0);
        return r * z;
    }
    Poly poly(int deg, double scale = 1.0) {
        Poly p;
        for (int k = 0; k <= deg; ++k) p.push_back(scale * c());
        return p;
    }
};

}  // namespace tyurin::test
