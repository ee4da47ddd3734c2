#pragma once

// Fay differential, the half-differential d ln h_D, Higgs fields and connection forms.

#include <optional>

#include "tyurin/cauchy_kernel.hpp"

namespace tyurin {

struct DivisorPoint {
    SurfacePoint point;
    int mult = 1;
};
using Divisor = std::vector<DivisorPoint>;

int degree(const Divisor& D);

// Chart centered at a point: disk chart, or branch chart at a finite branch point.
Chart centered_chart(const Curve& C, const SurfacePoint& p, double radius);

// F(w) = lim (C(w, z) - dw/(w - z)), exact diagonal limit, in chart coordinates.
MatC fay_differential(const KernelEvaluator& K, const Chart& chart, cplx z);

struct FayEstimate {
    MatC value;
    double error = 0;
};
// The same limit by symmetric differences at h and h/2 with one Richardson step.
FayEstimate fay_richardson(const KernelEvaluator& K, const Chart& chart, cplx z, double h = 1e-3);

// Unitary: third kind parts with purely imaginary periods (U(1) multipliers).
// ATrivial: every a-period of d ln h_D vanishes; this is the normalization under
// which F_D takes the theta function form for line bundles.
enum class HalfPin { Unitary, ATrivial };

// d ln h_D = (1/2) d ln(dx/y) + sum n_q w_{q,inf_W} - w_{inf,inf_W} - s . omega.
class DlogHalf {
public:
    DlogHalf(const CurveContext& ctx, Divisor D, HalfPin pin = HalfPin::Unitary);

    const Divisor& divisor() const { return D_; }
    // Third kind part only: a genuine meromorphic differential.
    cplx tilde(const ChartPoint& p) const;
    cplx eval(const Chart& chart, cplx z) const;
    // sum n_q w_{q,inf_W} + d_inf . omega, the scalar part of -F_D.
    cplx scalar_part(const ChartPoint& p) const;
    const CurveContext& ctx() const { return *ctx_; }
    HalfPin pin() const { return pin_; }

private:
    const CurveContext* ctx_;
    Divisor D_;
    HalfPin pin_;
    VecC s_;
    std::vector<ThirdKind> wq_;
    ThirdKind winf_;
};

// Phi(q) = sum_t res_{p=t} C(q,p) P(p) phi_t(p) P^{-1}(p).
class HiggsField {
public:
    HiggsField() = default;
    // germs[t][k]: coefficient of s^k, s = z - z_t, of the dz-component.
    HiggsField(const KernelEvaluator& K, std::vector<std::vector<MatC>> germs);

    bool empty() const { return K_ == nullptr; }
    const std::vector<std::vector<MatC>>& germs() const { return germs_; }
    MatC eval(const ChartPoint& q) const;
    // sum_t res_t Phi = -res_inf Phi.
    MatC residue_sum() const;

private:
    const KernelEvaluator* K_ = nullptr;
    std::vector<std::vector<MatC>> germs_;
    std::vector<std::vector<MatC>> Mneg_;  // Mneg_[t][k] = [s^{-k-1}] P phi_t P^{-1}
    MatC X_;                                // T^{-1} sum_t res R(p) P phi_t P^{-1}
};

// Germ data of P^{-1} Phi P at each Tyurin point, degree `order` - 1.
std::vector<std::vector<MatC>> higgs_germs(const KernelEvaluator& K, const std::function<MatC(const ChartPoint&)>& phi,
                                           int order);
// Adjusts germs (least norm) so that Phi has no pole at infinity.
std::vector<std::vector<MatC>> holomorphic_germs(const KernelEvaluator& K, std::vector<std::vector<MatC>> germs);

class ConnectionForm {
public:
    ConnectionForm(const KernelEvaluator& K, const DlogHalf& h, HiggsField phi = {});

    const KernelEvaluator& kernel() const { return *K_; }
    const DlogHalf& half() const { return *h_; }
    const HiggsField& higgs() const { return phi_; }
    int n() const { return K_->n(); }

    MatC reference(const ChartPoint& q) const;  // F_D
    MatC eval(const ChartPoint& q) const;       // F_D + Phi
    MatC eval(const Chart& c, cplx z) const { return eval(K_->ctx().curve().at(c, z)); }
    // I(A) = nabla_D - nabla = A - F_D, the Higgs part.
    MatC cotangent(const ChartPoint& q) const { return eval(q) - reference(q); }

private:
    const KernelEvaluator* K_;
    const DlogHalf* h_;
    HiggsField phi_;
};

// delta F_D(p) = sum_t res_{q=t} C(p,q) dP P^{-1}(q) C(q,p) along a moduli direction.
MatC fay_variation(const KernelEvaluator& K, const ModuliTangent& v, const ChartPoint& p);

struct ConnectionReport {
    double tyurin = 0;    // moments of P^{-1} A P - P^{-1} P' at T
    double divisor = 0;   // |res A + n_p| and higher moments at D
    double infinity = 0;  // moments of A at infinity
    double max_defect() const { return std::max({tyurin, divisor, infinity}); }
};

ConnectionReport verify_connection(const ConnectionForm& A);

// Throws ConnectionAxiomViolation when the report exceeds tol.
ConnectionForm reference_connection(const KernelEvaluator& K, const DlogHalf& h, double tol = 1e-6);
ConnectionForm assemble_connection(const ConnectionForm& F, HiggsField phi, double tol = 1e-6);

}  // namespace tyurin
