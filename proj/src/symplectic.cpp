#include "tyurin/symplectic.hpp"

#include <random>

#include <Eigen/SVD>

#include "tyurin/errors.hpp"
#include "tyurin/parallel.hpp"

namespace tyurin {

const char* to_string(FormMethod m) {
    switch (m) {
        case FormMethod::Residue: return "residue";
        case FormMethod::Contour: return "contour";
        case FormMethod::Graph: return "graph";
        case FormMethod::FiniteDifference: return "finite-difference";
    }
    return "";
}

namespace {

double chart_distance(const Curve& C, const Chart& ch, cplx z, const SurfacePoint& p) {
    try {
        return std::abs(C.to_chart(ch, p) - z);
    } catch (const ChartError&) {
        return std::numeric_limits<double>::infinity();
    }
}

// Radius of the pairing circle around Tyurin point t.
double pairing_radius(const KernelEvaluator& K, int t, const std::vector<SurfacePoint>& avoid) {
    const Curve& C = K.ctx().curve();
    const cplx zt = K.data().points()[t].z;
    double r = K.tyurin_radius(t);
    for (const auto& p : avoid) r = std::min(r, 0.5 * chart_distance(C, K.chart(), zt, p));
    if (!(r > 1e-8)) throw ContourError("pairing circle around a Tyurin point leaves no room");
    return r;
}

constexpr int kCircleNodes = 256;

}  // namespace

FormValue liouville_pairing(const KernelEvaluator& K, const Differential& X, const ModuliTangent& v,
                            const std::vector<SurfacePoint>& avoid) {
    const TyurinData& D = K.data();
    cplx s = 0;
    for (int t = 0; t < static_cast<int>(D.points().size()); ++t) {
        const cplx zt = D.points()[t].z;
        const double r = pairing_radius(K, t, avoid);
        for (int j = 0; j < kCircleNodes; ++j) {
            const cplx d = r * std::exp(I * (2.0 * pi * j / kCircleNodes));
            const cplx z = zt + d;
            const MatC m = X(K.disk_point(z)) * v.dP.eval(z) * D.P.eval(z).inverse();
            s += m.trace() * d;
        }
    }
    return {s / double(kCircleNodes), FormMethod::Residue, 0.0};
}

FormValue liouville_pairing(const HiggsField& phi, const KernelEvaluator& K, const ModuliTangent& v) {
    if (phi.empty()) return {0.0, FormMethod::Residue, 0.0};
    return liouville_pairing(K, [&](const ChartPoint& q) { return phi.eval(q); }, v);
}

FormValue xi_residue(const ConnectionForm& A, const ModuliTangent& v) {
    std::vector<SurfacePoint> avoid;
    for (const auto& d : A.half().divisor()) avoid.push_back(d.point);
    return liouville_pairing(A.kernel(), [&](const ChartPoint& q) { return A.cotangent(q); }, v, avoid);
}

ConnectionPlane connection_plane(const CurveContext& ctx, const NormalForm& P, std::shared_ptr<const DlogHalf> h,
                                 std::vector<std::vector<MatC>> germs, ConnectionTangent t1, ConnectionTangent t2) {
    return [&ctx, P, h, germs, t1, t2](cplx e1, cplx e2) {
        auto K = std::make_shared<const KernelEvaluator>(ctx, bnt_matrix(displaced(displaced(P, t1.v, e1), t2.v, e2), ctx));
        HiggsField phi;
        if (!germs.empty()) {
            auto g = germs;
            for (std::size_t t = 0; t < g.size(); ++t)
                for (std::size_t k = 0; k < g[t].size(); ++k) {
                    if (!t1.dgerms.empty()) g[t][k] += e1 * t1.dgerms[t][k];
                    if (!t2.dgerms.empty()) g[t][k] += e2 * t2.dgerms[t][k];
                }
            phi = HiggsField(*K, holomorphic_germs(*K, g));
        }
        return OwnedConnection{K, h, ConnectionForm(*K, *h, std::move(phi))};
    };
}

namespace {

// f'(0) from f(-2h), f(-h), f(h), f(2h): 4-point and 2-point stencils.
template <class T>
std::pair<T, T> stencil(const T& m2, const T& m1, const T& p1, const T& p2, double h) {
    const T four = (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h);
    const T two = (p1 - m1) / (2.0 * h);
    return {four, two};
}

void check_step(double h) {
    if (!(h >= 1e-6 && h <= 1e-2)) throw StepSizeError("finite-difference step outside [1e-6, 1e-2]");
}

}  // namespace

MonodromyDerivative monodromy_derivative(const ConnectionFamily& fam, double step, const TransportOptions& opt) {
    check_step(step);
    MonodromyDerivative out;
    out.rep = monodromy_rep(fam(0.0).A, opt);
    std::vector<MonodromyRep> r;
    for (const double e : {-2 * step, -step, step, 2 * step}) r.push_back(monodromy_rep(fam(e).A, opt));
    double gap = 0, scale = 0;
    for (int k = 0; k < out.rep.genus(); ++k) {
        for (const bool is_a : {true, false}) {
            auto M = [&](int i) -> const MatC& { return is_a ? r[i].M_alpha[k] : r[i].M_beta[k]; };
            const auto [four, two] = stencil<MatC>(M(0), M(1), M(2), M(3), step);
            (is_a ? out.dM_alpha : out.dM_beta).push_back(four);
            gap = std::max(gap, max_abs(four - two));
            scale = std::max(scale, max_abs(four));
        }
    }
    out.stencil_gap = scale > 0 ? gap / scale : 0.0;
    return out;
}

namespace {

using Transporter = std::function<TransportResult(const LiftedPath&, const PathIntegrand&)>;

FormValue xi_contour_impl(const CurveContext& ctx, const Differential& phi, const MonodromyDerivative& d,
                          const Transporter& move) {
    const MonodromyRep& rep = d.rep;
    const int g = ctx.genus();
    const JumpTangent dj = jump_tangent(rep, d.dM_alpha, d.dM_beta);
    // The integrand is closed away from infinity, so each edge may be replaced
    // by the whole loop from infinity with Psi_- = T V.
    std::vector<cplx> parts(2 * g);
    parallel_for(2 * g, [&](int i) {
        const bool is_a = i < g;
        const int k = is_a ? i : i - g;
        const MatC V = is_a ? rep.vertex_alpha(k) : rep.vertex_beta(k);
        const MatC J = is_a ? rep.J_alpha[k] : rep.J_beta[k];
        const MatC dJ = is_a ? dj.dJ_alpha[k] : dj.dJ_beta[k];
        const MatC X = V * dJ * J.inverse() * V.inverse();
        auto f = [&](const ChartPoint& q, const MatC& T) -> MatC {
            MatC out(1, 1);
            out(0, 0) = (phi(q) * T * X * T.inverse()).trace();
            return out;
        };
        parts[i] = move(ctx.lift(is_a ? ctx.alpha()[k] : ctx.beta()[k]), f).integral(0, 0);
    });
    cplx s = 0;
    for (const cplx p : parts) s += p;
    const cplx xi = s / two_pi_i;
    return {xi, FormMethod::Contour, d.stencil_gap * std::abs(xi)};
}

}  // namespace

FormValue xi_contour(const ConnectionForm& A, const MonodromyDerivative& d, const TransportOptions& opt) {
    const HiggsField& phi = A.higgs();
    if (phi.empty()) return {0.0, FormMethod::Contour, 0.0};
    return xi_contour_impl(
        A.kernel().ctx(), [&](const ChartPoint& q) { return phi.eval(q); }, d,
        [&](const LiftedPath& lp, const PathIntegrand& f) { return transport(A, lp, opt, f, 1, 1); });
}

FormValue xi_contour(const CurveContext& ctx, const Differential& A, const Differential& phi,
                     const MonodromyDerivative& d, const TransportOptions& opt) {
    return xi_contour_impl(ctx, phi, d,
                           [&](const LiftedPath& lp, const PathIntegrand& f) { return transport(A, lp, opt, f, 1, 1); });
}

FormValue xi_contour(const ConnectionFamily& fam, double fd_step, const TransportOptions& opt) {
    const MonodromyDerivative d = monodromy_derivative(fam, fd_step, opt);
    const OwnedConnection a = fam(0.0);
    return xi_contour(a.A, d, opt);
}

GraphReport graph_two_form(const JumpGraph& G, int a, int b, double tol) {
    GraphReport rep;
    double adm = 0;
    for (std::size_t v = 0; v < G.vertices.size(); ++v) {
        const auto& es = G.vertices[v];
        for (const auto& e : es) {
            const auto& tw = G.vertices.at(e.twin_vertex).at(e.twin_slot);
            const int n = static_cast<int>(e.J.rows());
            const double sc = 1.0 + max_abs(e.J) * max_abs(tw.J);
            adm = std::max(adm, max_abs(e.J * tw.J - MatC::Identity(n, n)) / sc);
            for (int c : {a, b}) adm = std::max(adm, max_abs(e.dJ[c] * tw.J + e.J * tw.dJ[c]) / (sc * (1 + max_abs(e.dJ[c]))));
        }
    }
    auto vertex_value = [&](const std::vector<JumpGraph::HalfEdge>& es, std::size_t start, double& product_defect) {
        const int n = static_cast<int>(es[0].J.rows());
        MatC K = MatC::Identity(n, n), dKa = MatC::Zero(n, n), dKb = MatC::Zero(n, n);
        cplx s = 0;
        double scale = 1;
        for (std::size_t l = 0; l < es.size(); ++l) {
            const auto& e = es[(start + l) % es.size()];
            dKa = dKa * e.J + K * e.dJ[a];
            dKb = dKb * e.J + K * e.dJ[b];
            K = K * e.J;
            scale = std::max(scale, max_abs(K));
            const MatC Ki = K.inverse(), Ji = e.J.inverse();
            s += (Ki * dKa * Ji * e.dJ[b]).trace() - (Ki * dKb * Ji * e.dJ[a]).trace();
        }
        product_defect = max_abs(K - MatC::Identity(n, n)) / scale;
        return s;
    };
    cplx total = 0;
    for (const auto& es : G.vertices) {
        double pd = 0;
        const cplx v0 = vertex_value(es, 0, pd);
        adm = std::max(adm, pd);
        total += v0;
        for (std::size_t s = 1; s < es.size(); ++s) {
            double dummy = 0;
            rep.cyclic_defect = std::max(rep.cyclic_defect, std::abs(vertex_value(es, s, dummy) - v0));
        }
    }
    rep.admissibility = adm;
    rep.omega = {total, FormMethod::Graph, rep.cyclic_defect};
    if (!(adm < tol)) throw AdmissibilityError("jump data is not admissible: defect " + std::to_string(adm));
    return rep;
}

JumpGraph canonical_graph(const MonodromyRep& rep, const std::vector<JumpTangent>& d) {
    const int g = rep.genus();
    JumpGraph G;
    G.vertices.resize(1);
    for (int l = 0; l < 4 * g; ++l) {
        JumpGraph::HalfEdge e;
        e.J = rep.J[l];
        for (const auto& t : d) e.dJ.push_back(t.dJ[l]);
        // Slots 4m, 4m+2 are one edge, as are 4m+1, 4m+3.
        e.twin_vertex = 0;
        e.twin_slot = l % 4 < 2 ? l + 2 : l - 2;
        G.vertices[0].push_back(e);
    }
    return G;
}

namespace {

struct DualN {
    MatC v;
    std::vector<MatC> d;
    DualN operator*(const DualN& o) const {
        DualN r{v * o.v, {}};
        for (std::size_t i = 0; i < d.size(); ++i) r.d.push_back(d[i] * o.v + v * o.d[i]);
        return r;
    }
    DualN inv() const {
        const MatC vi = v.inverse();
        DualN r{vi, {}};
        for (const auto& x : d) r.d.push_back(-vi * x * vi);
        return r;
    }
};

JumpGraph::HalfEdge half_edge(const DualN& x, int tv, int ts) { return {x.v, x.d, tv, ts}; }

}  // namespace

JumpGraph krichever_graph(const MonodromyRep& rep, const std::vector<std::vector<MatC>>& dM_alpha,
                          const std::vector<std::vector<MatC>>& dM_beta) {
    const int g = rep.genus();
    JumpGraph G;
    G.vertices.resize(g + 1);
    for (int k = 0; k < g; ++k) {
        // The jump across alpha_k is the monodromy around beta_k and vice versa.
        DualN Ma{rep.M_alpha[k], {}}, Mb{rep.M_beta[k], {}};
        for (std::size_t t = 0; t < dM_alpha.size(); ++t) {
            Ma.d.push_back(dM_alpha[t][k]);
            Mb.d.push_back(dM_beta[t][k]);
        }
        const DualN A = Mb.inv(), B = Ma.inv();
        const DualN Jk = B.inv() * A.inv() * B * A;
        const int v = k + 1;
        G.vertices[0].push_back(half_edge(Jk, v, 0));
        // Around v: the spoke, then the two loops interleaved.
        G.vertices[v] = {half_edge(Jk.inv(), 0, k), half_edge(B.inv(), v, 3), half_edge(A.inv(), v, 4),
                         half_edge(B, v, 1), half_edge(A, v, 2)};
    }
    return G;
}

ClosureReport check_dxi_equals_omega(const ConnectionPlane& plane, const ConnectionTangent& t1,
                                     const ConnectionTangent& t2, double h, const TransportOptions& opt) {
    check_step(h);
    ClosureReport rep;
    // delta Xi (1, 2) = d_1 Xi(v_2) - d_2 Xi(v_1)
    std::vector<cplx> x2, x1;
    const std::vector<double> es{-2 * h, -h, h, 2 * h};
    for (const double e : es) x2.push_back(xi_residue(plane(e, 0.0).A, t2.v).value);
    for (const double e : es) x1.push_back(xi_residue(plane(0.0, e).A, t1.v).value);
    const auto [d12, d12two] = stencil<cplx>(x2[0], x2[1], x2[2], x2[3], h);
    const auto [d21, d21two] = stencil<cplx>(x1[0], x1[1], x1[2], x1[3], h);
    const cplx dxi = d12 - d21, dxi2 = d12two - d21two;
    rep.closedness = std::abs(dxi - dxi2) / std::max(std::abs(dxi), 1e-300);
    rep.dxi = {dxi, FormMethod::FiniteDifference, std::abs(dxi - dxi2)};
    rep.lhs = -2.0 * two_pi_i * dxi;

    const MonodromyDerivative m1 = monodromy_derivative([&](cplx e) { return plane(e, 0.0); }, h, opt);
    const MonodromyDerivative m2 = monodromy_derivative([&](cplx e) { return plane(0.0, e); }, h, opt);
    const JumpGraph G = canonical_graph(
        m1.rep, {jump_tangent(m1.rep, m1.dM_alpha, m1.dM_beta), jump_tangent(m1.rep, m2.dM_alpha, m2.dM_beta)});
    const GraphReport gr = graph_two_form(G, 0, 1, 1e-6);
    rep.omega = gr.omega;
    rep.omega.error = std::max(m1.stencil_gap, m2.stencil_gap) * std::abs(gr.omega.value);
    rep.admissibility = gr.admissibility;
    rep.relative_defect = std::abs(rep.lhs - rep.omega.value) / std::max({std::abs(rep.lhs), std::abs(rep.omega.value), 1e-300});
    return rep;
}

MatC frame_connection(const KernelEvaluator& K, const ChartPoint& q) {
    const PolyMatrix& P = K.data().P.P;
    return P.eval_derivative(q.z) * P.eval(q.z).inverse();
}

namespace {

// d/d eps ln det T at eps on the family by a central difference.
cplx dlog_det(const CurveContext& ctx, const NormalForm& P0, const ModuliTangent& v, cplx eps, double h) {
    const MatC T0 = bnt_matrix(displaced(P0, v, eps), ctx).T;
    const MatC Tp = bnt_matrix(displaced(P0, v, eps + h), ctx).T;
    const MatC Tm = bnt_matrix(displaced(P0, v, eps - h), ctx).T;
    return (T0.partialPivLu().solve((Tp - Tm) / (2 * h))).trace();
}

std::vector<cplx> ring(const ThetaProbeOptions& opt) {
    std::vector<cplx> e;
    for (int j = 0; j < opt.ring_nodes; ++j) e.push_back(opt.ring_radius * std::exp(I * (2.0 * pi * (j + 0.5) / opt.ring_nodes)));
    return e;
}

cplx det_residue(const CurveContext& ctx, const NormalForm& P0, const ModuliTangent& v, const ThetaProbeOptions& opt) {
    const auto es = ring(opt);
    std::vector<cplx> terms(es.size());
    parallel_for(static_cast<int>(es.size()), [&](int j) {
        terms[j] = dlog_det(ctx, P0, v, es[j], opt.fd_step * opt.ring_radius) * es[j];
    });
    cplx s = 0;
    for (const cplx t : terms) s += t;
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
        throw NonTransversalFamily("T stays degenerate along the family");
    return s / double(es.size());
}

}  // namespace

MatC residue_kernel(const CurveContext& ctx, const NormalForm& P0, const ModuliTangent& v, const SurfacePoint& q,
                    const SurfacePoint& p, const ThetaProbeOptions& opt) {
    const auto es = ring(opt);
    MatC s = MatC::Zero(P0.n, P0.n);
    for (const cplx e : es) s += KernelEvaluator(ctx, bnt_matrix(displaced(P0, v, e), ctx)).eval(q, p) * e;
    return s / double(es.size());
}

ModuliTangent transversal_direction(const CurveContext& ctx, const NormalForm& P0, unsigned seed, int tries,
                                    const ThetaProbeOptions& opt) {
    const int k = coranks(bnt_matrix(P0, ctx)).h1;
    if (k == 0) throw NonTransversalFamily("the base point is not on the theta divisor");
    const auto basis = tangent_basis(P0);
    std::mt19937 rng(seed);
    std::normal_distribution<double> N;
    for (int i = 0; i < tries; ++i) {
        VecC c(basis.size());
        for (auto& x : c) x = cplx(N(rng), N(rng));
        const ModuliTangent v = combine(basis, c);
        try {
            const cplx r = det_residue(ctx, P0, v, opt);
            if (std::abs(r - double(k)) < 1e-3) return v;
        } catch (const Error&) {
        }
    }
    throw NonTransversalFamily("no transversal direction found in " + std::to_string(tries) + " tries");
}

ThetaProbeReport theta_divisor_probe(const CurveContext& ctx, const NormalForm& P0, const ModuliTangent& v,
                                     const DlogHalf& h, const ThetaProbeOptions& opt) {
    const Curve& C = ctx.curve();
    const int n = P0.n;
    ThetaProbeReport rep;
    const TyurinData D0 = bnt_matrix(P0, ctx);
    rep.corank = coranks(D0).h1;
    if (rep.corank == 0) throw NonTransversalFamily("the base point is not on the theta divisor");
    rep.det_residue = det_residue(ctx, P0, v, opt);
    const double nearest = std::round(rep.det_residue.real());
    if (std::abs(rep.det_residue - nearest) > 1e-3 || static_cast<int>(nearest) != rep.corank)
        throw NonTransversalFamily("res d ln det T = (" + std::to_string(rep.det_residue.real()) + ", " +
                                   std::to_string(rep.det_residue.imag()) + "), corank " + std::to_string(rep.corank));

    // Pairing circles around the Tyurin points of P_0; the points of P_eps must
    // stay well inside them along the ring.
    const auto& pts0 = D0.points();
    std::vector<double> radius(pts0.size());
    for (std::size_t t = 0; t < pts0.size(); ++t) {
        double r = 0.8 * (P0.disk.radius - std::abs(pts0[t].z));
        for (std::size_t u = 0; u < pts0.size(); ++u)
            if (u != t) r = std::min(r, 0.45 * std::abs(pts0[u].z - pts0[t].z));
        radius[t] = r;
    }

    const auto es = ring(opt);
    std::vector<SurfacePoint> qs, ps;
    for (const cplx x : opt.q_samples) qs.push_back(C.point(x, 1));
    for (const cplx x : opt.p_samples) ps.push_back(C.point(x, 1));
    std::vector<SurfacePoint> avoid;
    for (const auto& d : h.divisor()) avoid.push_back(d.point);

    const int nq = static_cast<int>(qs.size()), np = static_cast<int>(ps.size());
    const int T = static_cast<int>(pts0.size());
    const int N = kCircleNodes / 2;
    auto circle = [&](int t, int j) { return pts0[t].z + radius[t] * std::exp(I * (2.0 * pi * j / N)); };

    // Everything below is a ring average of f(eps) eps, i.e. (1/2 pi i) \oint f deps.
    struct Acc {
        cplx xi = 0;
        MatC S;                // C(q_i, p_j) on the sample grid
        std::vector<MatC> Eq;  // C(circle, p_j), per (t, node)
        std::vector<MatC> Rp;  // C(q_i, circle), per (t, node)
    };
    std::vector<Acc> acc(es.size());
    parallel_for(static_cast<int>(es.size()), [&](int r) {
        const cplx e = es[r];
        const KernelEvaluator K(ctx, bnt_matrix(displaced(P0, v, e), ctx));
        for (const auto& pt : K.data().points()) {
            int u0 = 0;
            for (int u = 1; u < T; ++u)
                if (std::abs(pt.z - pts0[u].z) < std::abs(pt.z - pts0[u0].z)) u0 = u;
            if (std::abs(pt.z - pts0[u0].z) > 0.5 * radius[u0])
                throw ContourError("Tyurin points leave the pairing circles along the ring; use a smaller ring");
        }
        const ConnectionForm F(K, h);
        Acc& a = acc[r];
        auto X = [&](const ChartPoint& q) -> MatC {
            return (opt.connection ? opt.connection(e, K, q) : frame_connection(K, q)) - F.reference(q);
        };
        a.xi = liouville_pairing(K, X, v, avoid).value * e;
        a.S = MatC(n * nq, n * np);
        for (int i = 0; i < nq; ++i)
            for (int j = 0; j < np; ++j) a.S.block(i * n, j * n, n, n) = K.eval(qs[i], ps[j]) * e;
        for (int t = 0; t < T; ++t)
            for (int m = 0; m < N; ++m) {
                const ChartPoint cq = K.disk_point(circle(t, m));
                const SurfacePoint cp = C.from_chart(K.chart(), cq.z);
                MatC eq(n, n * np), rp(n * nq, n);
                for (int j = 0; j < np; ++j) eq.block(0, j * n, n, n) = K.eval(cq, ps[j]) * e;
                for (int i = 0; i < nq; ++i) rp.block(i * n, 0, n, n) = K.eval(qs[i], cp) * e;
                a.Eq.push_back(eq);
                a.Rp.push_back(rp);
            }
    });

    const double R = double(es.size());
    MatC S = MatC::Zero(n * nq, n * np);
    std::vector<MatC> Eq(T * N, MatC::Zero(n, n * np)), Rp(T * N, MatC::Zero(n * nq, n));
    for (const auto& a : acc) {
        rep.xi_residue += a.xi / R;
        S += a.S / R;
        for (int i = 0; i < T * N; ++i) {
            Eq[i] += a.Eq[i] / R;
            Rp[i] += a.Rp[i] / R;
        }
    }

    Eigen::JacobiSVD<MatC> svd(S, Eigen::ComputeThinU | Eigen::ComputeThinV);
    rep.kernel_singular_values = svd.singularValues();
    const VecR& sv = rep.kernel_singular_values;
    int k = 0;
    while (k < sv.size() && sv(k) > opt.rank_threshold * sv(0)) ++k;
    rep.kernel_rank = k;
    rep.kernel_gap = k == 0 ? 0.0 : k < sv.size() ? sv(k - 1) / std::max(sv(k), 1e-300)
                                                   : std::numeric_limits<double>::infinity();
    if (k == 0) return rep;

    // eta_b(q) = C_{-1}(q, p) V_b and r_a(p)^t = U_a^* C_{-1}(q, p) span the
    // images of the residue kernel; pair them around the Tyurin points of P_0.
    const MatC U = svd.matrixU().leftCols(k), V = svd.matrixV().leftCols(k);
    rep.Q = MatC::Zero(k, k);
    for (int t = 0; t < T; ++t)
        for (int m = 0; m < N; ++m) {
            const cplx z = circle(t, m);
            const MatC eta = Eq[t * N + m] * V;              // n x k
            const MatC r = U.adjoint() * Rp[t * N + m];      // k x n
            rep.Q += r * v.dP.eval(z) * P0.P.eval(z).inverse() * eta * ((z - pts0[t].z) / double(N));
        }
    Eigen::JacobiSVD<MatC> qs_svd(rep.Q);
    const VecR& qsv = qs_svd.singularValues();
    rep.Q_condition = qsv(0) / std::max(qsv(k - 1), 1e-300);
    const MatC pred = U.adjoint() * S * V;
    rep.lemma_defect = max_abs(rep.Q + pred) / std::max(max_abs(rep.Q), 1e-300);
    return rep;
}

}  // namespace tyurin
