#pragma once

// Flat sections of d Psi = A Psi, monodromy based at infinity, and jump matrices
// on the canonical dissection.

#include <memory>

#include "tyurin/connection.hpp"
#include "tyurin/quadrature.hpp"

namespace tyurin {

using Differential = std::function<MatC(const ChartPoint&)>;

struct TransportOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    double clearance = 1e-3;  // minimal distance from T and D in the chart of each segment
};

// Optional integrand carried along the path: f(q, T) dz with T the transport so far.
using PathIntegrand = std::function<MatC(const ChartPoint&, const MatC&)>;

struct TransportResult {
    MatC T;         // Psi(end) = T Psi(start)
    MatC integral;  // \int f(q, T(q)) dz, empty without an integrand
    OdeStats stats;
};

TransportResult transport(const Differential& A, const LiftedPath& path, const TransportOptions& opt = {},
                          const PathIntegrand& f = {}, int rows = 0, int cols = 0);
// Checks clearance from the Tyurin points and the divisor first (PathTooClose).
TransportResult transport(const ConnectionForm& A, const LiftedPath& path, const TransportOptions& opt = {},
                          const PathIntegrand& f = {}, int rows = 0, int cols = 0);

// Points a transport path must avoid: the Tyurin points and the divisor.
std::vector<SurfacePoint> singular_points(const ConnectionForm& A);
void check_clearance(const Curve& C, const LiftedPath& path, const std::vector<SurfacePoint>& pts, double clearance);

// Psi(gamma p) = Psi(p) M_gamma^{-1}, so M_gamma is the inverse transport and
// M_{gamma_1 gamma_2} = M_{gamma_1} M_{gamma_2}.
struct MonodromyRep {
    std::vector<MatC> M_alpha, M_beta;
    std::vector<MatC> J_alpha, J_beta;  // Psi_+ = Psi_- J on alpha_k, beta_k
    std::vector<MatC> J;                // half edges at infinity, counterclockwise from beta_g
    double relation_defect = 0;         // |[M_a1, M_b1] ... [M_ag, M_bg] - 1|
    double vertex_defect = 0;           // |J_1 ... J_4g - 1|
    OdeStats stats;

    int genus() const { return static_cast<int>(M_alpha.size()); }
    // Psi at the start of alpha_k, beta_k on the right (-) side.
    MatC vertex_alpha(int k) const;
    MatC vertex_beta(int k) const;
};

// Fills J_alpha, J_beta, J and the defects from M_alpha, M_beta.
void fill_jumps(MonodromyRep& rep);

// Derivatives of J_alpha, J_beta and the half-edge jumps J along a tangent
// direction of the monodromy.
struct JumpTangent {
    std::vector<MatC> dJ_alpha, dJ_beta, dJ;
};
JumpTangent jump_tangent(const MonodromyRep& rep, const std::vector<MatC>& dM_alpha, const std::vector<MatC>& dM_beta);

MonodromyRep monodromy_rep(const CurveContext& ctx, const Differential& A, const TransportOptions& opt = {});
MonodromyRep monodromy_rep(const ConnectionForm& A, const TransportOptions& opt = {});

struct ApparentReport {
    double tyurin_loops = 0;   // max |M - 1| for small loops around the Tyurin points
    double divisor_loops = 0;  // the same around the divisor points
    double analyticity = 0;    // circle moments of P^{-1} A P - P^{-1} P' at T
    double max_defect() const { return std::max({tyurin_loops, divisor_loops, analyticity}); }
};

// Loops and moments use the singular points of `geometry`; `A` may be any differential.
ApparentReport apparent_singularity_report(const ConnectionForm& geometry, const Differential& A,
                                           const TransportOptions& opt = {});
// Throws ApparentSingularityViolation when the defect exceeds tol.
ApparentReport verify_apparent_singularities(const ConnectionForm& A, double tol = 1e-6,
                                             const TransportOptions& opt = {});

struct CharacterReport {
    std::vector<cplx> alpha, beta;  // scalars s_gamma with M'_gamma = s_gamma M_gamma
    double scalar_defect = 0;       // max |M'_gamma M_gamma^{-1} - s_gamma 1|
    double modulus_defect = 0;      // max ||s_gamma| - 1|
    double period_defect = 0;       // max |s_gamma - exp \oint_gamma (d ln h' - d ln h)|
};

// Same bundle and Higgs field with two divisors; throws CharacterMismatch when
// the ratios are not scalar to tol.
CharacterReport compare_characters(const ConnectionForm& A, const ConnectionForm& B, double tol = 1e-6,
                                   const TransportOptions& opt = {});

// A connection that owns its kernel and half-differential, for families over moduli.
struct OwnedConnection {
    std::shared_ptr<const KernelEvaluator> K;
    std::shared_ptr<const DlogHalf> h;
    ConnectionForm A;
};

// A(P + eps v) = F_D + Phi, Phi from the fixed germs projected to holomorphic ones
// (no Higgs part when germs is empty).
using ConnectionFamily = std::function<OwnedConnection(cplx eps)>;
ConnectionFamily connection_family(const CurveContext& ctx, const NormalForm& P, const ModuliTangent& v,
                                   std::shared_ptr<const DlogHalf> h, std::vector<std::vector<MatC>> germs = {});

// Right side of the variational formula for Psi at p:
// (1/2 pi i) \int_Sigma Psi_- dJ J^{-1} Psi_-^{-1} C(q, p), with dJ from the given
// monodromy derivatives along the family.
MatC psi_variation_contour(const ConnectionForm& A, const MonodromyRep& rep, const std::vector<MatC>& dM_alpha,
                           const std::vector<MatC>& dM_beta, const SurfacePoint& p, const TransportOptions& opt = {});
// d Psi Psi^{-1} at p by central differences along the family; p reached by the
// straight segment from infinity.
MatC psi_variation_fd(const ConnectionFamily& fam, const SurfacePoint& p, double step,
                      const TransportOptions& opt = {});

}  // namespace tyurin
