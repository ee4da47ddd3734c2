#pragma once

// Matrix Cauchy kernel C(q, p): a differential in q, a function in p.

#include <Eigen/LU>

#include "tyurin/tyurin.hpp"

namespace tyurin {

// (1/2)(Y + y_R)/(X - x_R) at the expansion point of ls; a common zero over
// the other sheet is cancelled.
Series<cplx> half_term(const LocalSeries& ls, const SurfacePoint& R);

class KernelEvaluator {
public:
    // Throws OnThetaDivisor when the Brill-Noether-Tyurin matrix is degenerate.
    KernelEvaluator(const CurveContext& ctx, TyurinData data, double corank_threshold = 1e-7);

    const CurveContext& ctx() const { return *ctx_; }
    const TyurinData& data() const { return data_; }
    const Chart& chart() const { return data_.chart; }
    int n() const { return data_.n(); }
    double condition_number() const { return cond_; }

    // Taylor coefficients at each Tyurin point of Omega_{p,inf}, the unnormalized
    // third kind differential with residues +1 at p and -1 at infinity.
    std::vector<std::vector<cplx>> omega_p_series(const SurfacePoint& p) const;
    // sum_t res v_r Omega_{p,inf}: ng x n.
    MatC R(const SurfacePoint& p) const;
    // The same for an arbitrary scalar differential given by its Taylor data.
    MatC R_from_series(const std::vector<std::vector<cplx>>& f) const;
    // (omega(q) (x) 1): n x ng.
    MatC W(const ChartPoint& q) const;
    MatC solve(const MatC& rhs) const { return lu_.solve(rhs); }

    MatC eval(const ChartPoint& q, const SurfacePoint& p) const;
    MatC eval(const SurfacePoint& q, const SurfacePoint& p) const;  // x-chart in q
    // Same kernel from the a-normalized third kind differential.
    MatC eval_normalized(const ChartPoint& q, const SurfacePoint& p) const;
    // C(q, p) P(p) for p = chart point zp of the disk, regular across the Tyurin points.
    MatC eval_regularized(const ChartPoint& q, cplx zp) const;

    ChartPoint disk_point(cplx z) const { return ctx_->curve().at(data_.chart, z); }
    // Radius of the circle used around Tyurin point i.
    double tyurin_radius(int i) const;

private:
    const CurveContext* ctx_;
    TyurinData data_;
    Eigen::PartialPivLU<MatC> lu_;
    double cond_ = 0;
};

struct KernelReport {
    double residue_p = 0;        // |res_{q=p} C - 1|
    double residue_inf = 0;      // |res_{q=inf} C + 1|
    double regular_q = 0;        // circle moments of P^{-1}(q) C(q,p) at the Tyurin points
    double regular_p = 0;        // circle moments of C(q,p) P(p) at the Tyurin points
    double tyurin_vectors = 0;   // |h^t C(t, p)| at simple points
    double vanishing_inf = 0;    // |C(q, p)| / |p - inf| as p approaches infinity
    double condition = 0;
    double max_defect() const;
};

KernelReport verify_kernel_axioms(const KernelEvaluator& K);

// Moments (1/2 pi i) \oint f(z) (z - c)^m dz, m < order, of a matrix function on a chart circle.
double circle_moments(const std::function<MatC(cplx)>& f, cplx c, double radius, int order, int nodes = 256);

}  // namespace tyurin
