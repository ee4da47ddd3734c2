#pragma once

#include <functional>
#include <vector>

#include "tyurin/types.hpp"

namespace tyurin {

struct GaussRule {
    VecR nodes;    // on [-1, 1]
    VecR weights;
};

// Golub-Welsch; rules are cached per order.
const GaussRule& gauss_legendre(int order);

// (1/2 pi i) \oint f(z) dz over |z - center| = radius, N-point trapezoid.
template <typename Value, typename F>
Value circle_residue(F&& f, cplx center, double radius, int nodes = 256) {
    Value acc{};
    bool first = true;
    for (int k = 0; k < nodes; ++k) {
        const cplx e = std::polar(1.0, 2.0 * pi * (k + 0.5) / nodes);
        const cplx z = center + radius * e;
        Value term = f(z) * (radius * e / double(nodes));
        if (first) {
            acc = term;
            first = false;
        } else {
            acc += term;
        }
    }
    return acc;
}

struct OdeStats {
    long steps = 0;
    long rejected = 0;
    long evaluations = 0;
};

// Dormand-Prince 5(4) with PI step control for dY/ds = f(s, Y), Y a complex matrix.
class Dopri5 {
public:
    using Rhs = std::function<MatC(double, const MatC&)>;

    explicit Dopri5(double rtol = 1e-11, double atol = 1e-12) : rtol_(rtol), atol_(atol) {}

    // Advances Y from s0 to s1; `h` carries the step size between calls.
    MatC advance(const Rhs& f, MatC y, double s0, double s1, double& h, OdeStats& stats) const;

private:
    double rtol_, atol_;
};

}  // namespace tyurin
