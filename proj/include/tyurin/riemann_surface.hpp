#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "tyurin/curve.hpp"

namespace tyurin {

struct QuadratureConfig {
    int order = 64;              // Gauss-Legendre nodes per piece
    double piece_factor = 0.5;   // piece length / distance to nearest singularity
    int residue_nodes = 256;     // trapezoid nodes on residue circles
    double residue_radius = 1e-2;
};

// Lasso around one finite branch point, based at the hub.
struct Lasso {
    int branch = 0;
    cplx entry{};
    double radius = 0;
    double theta = 0;  // arg(entry - e)
    Path path(const Curve& c, int orientation) const;
};

enum class ThirdKindMode { ANormalized, ImaginaryPeriods };

// Omega_{P,Q} - sum_k d_k omega_k with poles P (res +1) and Q (res -1).
struct ThirdKind {
    SurfacePoint plus, minus;
    VecC d;
};

struct ThetaValue {
    cplx value;
    VecC gradient;
};

class CurveContext {
public:
    CurveContext(Curve curve, SurfacePoint infinity, QuadratureConfig cfg = {});

    const Curve& curve() const { return curve_; }
    int genus() const { return curve_.genus(); }
    const SurfacePoint& infinity() const { return inf_; }
    const QuadratureConfig& config() const { return cfg_; }
    cplx hub() const { return hub_; }
    const std::vector<Lasso>& lassos() const { return lassos_; }
    int orientation() const { return orientation_; }

    // Generator loops alpha_k, beta_k based at infinity.
    const std::vector<Path>& alpha() const { return alpha_; }
    const std::vector<Path>& beta() const { return beta_; }
    LiftedPath lift(const Path& p) const { return LiftedPath(curve_, p, inf_.y); }
    // The same cycles based at the hub (used for periods).
    const std::vector<LiftedPath>& a_cycles() const { return a_cyc_; }
    const std::vector<LiftedPath>& b_cycles() const { return b_cyc_; }
    // Distance from x to the hub-based period cycles.
    double cycle_distance(cplx x) const;

    const MatC& A() const { return A_; }  // A(j,k) = \oint_{a_j} x^{k-1} dx/y
    const MatC& B() const { return B_; }
    const MatC& tau() const { return tau_; }
    const MatC& Ainv() const { return Ainv_; }

    VecC u(const ChartPoint& p) const;      // x^{k-1} dx/dz / y
    VecC omega(const ChartPoint& p) const;  // a-normalized basis
    VecC omega(const SurfacePoint& p) const;  // x-chart value; ChartError at branch points

    // Periods over all a- and b-cycles of f(ChartPoint) dz.
    std::pair<VecC, VecC> periods(const std::function<cplx(const ChartPoint&)>& f,
                                  const std::vector<cplx>& poles = {}, int order = 0) const;

    // Unnormalized third kind: (1/2)[(y+y_P)/(x-x_P) - (y+y_Q)/(x-x_Q)] dx/y.
    // Q with branch == -2 is the branch point at x = infinity.
    cplx Omega(const SurfacePoint& P, const SurfacePoint& Q, const ChartPoint& z) const;
    ThirdKind third_kind(const SurfacePoint& plus, const SurfacePoint& minus, ThirdKindMode mode) const;
    cplx eval(const ThirdKind& w, const ChartPoint& z) const;

    // Path from infinity to p within the lasso system.
    Path path_to(const SurfacePoint& p) const;
    VecC abel(const SurfacePoint& p) const;
    VecC abel(const SurfacePoint& p, const SurfacePoint& base) const;
    // Representative of z modulo Z^g + tau Z^g with Re, Im(tau^-1) coordinates in [-1/2, 1/2).
    VecC reduce(const VecC& z) const;

    cplx theta(const VecC& z) const;
    ThetaValue theta_grad(const VecC& z) const;
    const VecC& riemann_constants() const { return K_; }

    SurfacePoint branch_infinity() const { return SurfacePoint{0.0, 0.0, -2}; }

private:
    void build_loops(double radius_factor);
    void compute_periods();
    void compute_riemann_constants();

    Curve curve_;
    SurfacePoint inf_;
    QuadratureConfig cfg_;
    int orientation_ = 1;
    cplx hub_{};
    cplx y_hub_{};
    std::vector<Lasso> lassos_;  // ordered s_1..s_{2g+1}
    std::vector<Path> alpha_, beta_;
    std::vector<LiftedPath> a_cyc_, b_cyc_;
    MatC A_, B_, tau_, Ainv_;
    MatR Y_, Yinv_;
    VecC K_;
};

}  // namespace tyurin
