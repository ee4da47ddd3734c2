#pragma once

// Liouville pairing, the Malgrange-Fay one-form, graph two-forms and the
// behaviour of the one-form across the theta divisor.

#include "tyurin/monodromy.hpp"

namespace tyurin {

enum class FormMethod { Residue, Contour, Graph, FiniteDifference };

struct FormValue {
    cplx value{};
    FormMethod method = FormMethod::Residue;
    double error = 0;  // estimate, 0 when the method is exact up to quadrature
};

const char* to_string(FormMethod m);

// sum_t res_t tr(X dP P^{-1}) with X the dz-component in the Tyurin chart.
// Circles shrink away from `avoid`; ContourError when that leaves no room.
FormValue liouville_pairing(const KernelEvaluator& K, const Differential& X, const ModuliTangent& v,
                            const std::vector<SurfacePoint>& avoid = {});
FormValue liouville_pairing(const HiggsField& phi, const KernelEvaluator& K, const ModuliTangent& v);

// Xi(v) = lambda(A - F_D, v).
FormValue xi_residue(const ConnectionForm& A, const ModuliTangent& v);

// A direction in the space of connections: the bundle moves by dP, the Higgs
// germs by dgerms (empty: germs fixed).
struct ConnectionTangent {
    ModuliTangent v;
    std::vector<std::vector<MatC>> dgerms;
};

// A(P + sum e_i v_i) = F_D + Phi(germs + sum e_i dgerms_i), germs projected to holomorphic ones.
using ConnectionPlane = std::function<OwnedConnection(cplx e1, cplx e2)>;
ConnectionPlane connection_plane(const CurveContext& ctx, const NormalForm& P, std::shared_ptr<const DlogHalf> h,
                                 std::vector<std::vector<MatC>> germs, ConnectionTangent t1, ConnectionTangent t2);

// d/de of the monodromy at e = 0 by the 4-point stencil.
struct MonodromyDerivative {
    MonodromyRep rep;                   // at e = 0
    std::vector<MatC> dM_alpha, dM_beta;
    double stencil_gap = 0;             // |4-point - 2-point| / |4-point|
};
MonodromyDerivative monodromy_derivative(const ConnectionFamily& fam, double step, const TransportOptions& opt = {});

// (1/2 pi i) \int_Sigma tr(Psi_-^{-1} nabla_D Psi_- dJ J^{-1}) along the family at e = 0.
FormValue xi_contour(const ConnectionFamily& fam, double fd_step = 1e-5, const TransportOptions& opt = {});
FormValue xi_contour(const ConnectionForm& A, const MonodromyDerivative& d, const TransportOptions& opt = {});
// The same for a connection A and Higgs part phi given as differentials, with d
// the monodromy derivative of A.
FormValue xi_contour(const CurveContext& ctx, const Differential& A, const Differential& phi,
                     const MonodromyDerivative& d, const TransportOptions& opt = {});

// Graph with jump matrices on oriented edges. Each vertex lists its outgoing
// half edges counterclockwise; twin is the same edge seen from the other end.
struct JumpGraph {
    struct HalfEdge {
        MatC J;
        std::vector<MatC> dJ;  // one per tangent direction
        int twin_vertex = -1, twin_slot = -1;
    };
    std::vector<std::vector<HalfEdge>> vertices;
};

struct GraphReport {
    FormValue omega;             // Omega(Sigma) on tangents (a, b)
    double admissibility = 0;    // max of |J(e) J(-e) - 1|, |prod at v - 1|, and the derivatives
    double cyclic_defect = 0;    // spread of the value over cyclic relabelings
};

// Throws AdmissibilityError when the jumps violate the requirements beyond tol.
GraphReport graph_two_form(const JumpGraph& G, int a = 0, int b = 1, double tol = 1e-7);

// The canonical dissection: one vertex at infinity, half edges beta_g, alpha_g^{-1}, ...
JumpGraph canonical_graph(const MonodromyRep& rep, const std::vector<JumpTangent>& d);
// Krichever's graph: a centre joined to g figure-eight vertices whose loops
// carry A_k = M_{beta_k}^{-1}, B_k = M_{alpha_k}^{-1}; the spokes carry
// J_k = B_k^{-1} A_k^{-1} B_k A_k, in the order k = 1..g at the centre.
JumpGraph krichever_graph(const MonodromyRep& rep, const std::vector<std::vector<MatC>>& dM_alpha,
                          const std::vector<std::vector<MatC>>& dM_beta);

struct ClosureReport {
    FormValue dxi;     // delta Xi (t1, t2)
    FormValue omega;   // Omega(Sigma) (t1, t2)
    cplx lhs{};        // -4 pi i delta Xi
    double relative_defect = 0;
    double closedness = 0;  // |2-point - 4-point| / |4-point| for delta Xi
    double admissibility = 0;
};

// Both sides of -4 pi i dXi = Omega(Sigma) along two directions. StepSizeError
// outside [1e-6, 1e-2].
ClosureReport check_dxi_equals_omega(const ConnectionPlane& plane, const ConnectionTangent& t1,
                                     const ConnectionTangent& t2, double fd_step = 1e-5,
                                     const TransportOptions& opt = {});

// Local connection P' P^{-1} of the Tyurin chart: holomorphic in the moduli and
// with the apparent singularities of every connection on the bundle.
MatC frame_connection(const KernelEvaluator& K, const ChartPoint& q);

struct ThetaProbeOptions {
    double ring_radius = 0.05;
    int ring_nodes = 32;
    double fd_step = 1e-6;        // for d ln det T along the ring, relative to the radius
    double rank_threshold = 1e-6; // singular values of the residue kernel below this times the largest
    // Connection A_eps on the family; empty: frame_connection.
    std::function<MatC(cplx eps, const KernelEvaluator& K, const ChartPoint& q)> connection;
    std::vector<cplx> q_samples{cplx(0.5, 0.8), cplx(-0.9, -0.3), cplx(2.0, 0.5), cplx(0.1, -1.3), cplx(1.6, -0.7)};
    std::vector<cplx> p_samples{cplx(-0.4, 1.1), cplx(1.2, 1.4), cplx(-1.5, -0.9), cplx(2.4, -0.3), cplx(0.9, -1.6)};
};

struct ThetaProbeReport {
    int corank = 0;             // h^1 of P_0
    cplx det_residue{};         // (1/2 pi i) \oint d ln det T_eps
    cplx xi_residue{};          // (1/2 pi i) \oint Xi_eps
    int kernel_rank = 0;        // rank of lim eps C(q, p; eps) on the sample grid
    VecR kernel_singular_values;
    double kernel_gap = 0;      // sigma_k / sigma_{k+1}
    MatC Q;                     // <r_a, eta_b>_0
    double Q_condition = 0;
    double lemma_defect = 0;    // |Q + U^* S V| / |Q|: the residue kernel is -eta Q^{-1} r^t
};

// The family P_eps = P_0 + eps v; NonTransversalFamily when res d ln det T is
// not an integer or differs from the corank of P_0.
ThetaProbeReport theta_divisor_probe(const CurveContext& ctx, const NormalForm& P0, const ModuliTangent& v,
                                     const DlogHalf& h, const ThetaProbeOptions& opt = {});

// lim eps C(q, p; eps) by ring quadrature (x-chart q and p).
MatC residue_kernel(const CurveContext& ctx, const NormalForm& P0, const ModuliTangent& v, const SurfacePoint& q,
                    const SurfacePoint& p, const ThetaProbeOptions& opt = {});

// Random shape-preserving directions until one is transversal.
ModuliTangent transversal_direction(const CurveContext& ctx, const NormalForm& P0, unsigned seed, int tries = 20,
                                    const ThetaProbeOptions& opt = {});

}  // namespace tyurin
