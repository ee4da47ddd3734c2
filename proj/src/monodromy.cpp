#include "tyurin/monodromy.hpp"

#include <Eigen/LU>

#include "tyurin/errors.hpp"
#include "tyurin/parallel.hpp"

namespace tyurin {

namespace {

MatC unflatten(const MatC& v, int offset, int rows, int cols) {
    return Eigen::Map<const MatC>(v.data() + offset, rows, cols);
}

// Parameter of the point of a segment nearest to zp (chart coordinate).
double nearest_parameter(const Segment& sg, cplx zp) {
    if (sg.shape == Segment::Shape::Line) {
        const cplx d = sg.b - sg.a;
        const double L2 = std::norm(d);
        if (L2 == 0.0) return 0.0;
        return std::clamp(std::real((zp - sg.a) * std::conj(d)) / L2, 0.0, 1.0);
    }
    if (std::abs(zp - sg.a) == 0.0) return 0.0;
    // Angle of zp measured along the arc direction from th0.
    double t = (std::arg(zp - sg.a) - sg.th0) / sg.dth;
    const double period = 2.0 * pi / std::abs(sg.dth);
    t -= period * std::floor(t / period);
    if (t <= 1.0) return t;
    // Outside the swept angle: the nearer end.
    return std::abs(sg.z(0) - zp) < std::abs(sg.z(1) - zp) ? 0.0 : 1.0;
}

std::vector<cplx> chart_images(const Chart& c, const SurfacePoint& p) {
    switch (c.kind) {
        case ChartKind::Plane:
            return {p.x};
        case ChartKind::Disk:
            return {p.x - c.center};
        case ChartKind::Branch: {
            const cplx r = sqrt_principal(p.x - c.center);
            return {r, -r};
        }
        case ChartKind::Infinity: {
            if (p.branch == -2) return {0.0};
            const cplx r = 1.0 / sqrt_principal(p.x);
            return {r, -r};
        }
    }
    return {};
}

bool same_sheet(const ChartPoint& q, const SurfacePoint& p) {
    return p.is_branch() || std::abs(q.y - p.y) < 1e-6 * (1.0 + std::abs(p.y));
}

// The sub-path from the hub back to the hub (drops the stem from infinity).
LiftedPath middle(const Curve& C, const LiftedPath& loop) {
    Path p;
    for (int i = 1; i + 1 < loop.size(); ++i) p.segments.push_back(loop.path().segments[i]);
    return LiftedPath(C, p, loop.at(1, 0.0).y);
}

LiftedPath stem(const Curve& C, const LiftedPath& loop) {
    Path p;
    p.segments.push_back(loop.path().segments.front());
    return LiftedPath(C, p, loop.y_start());
}

MatC commutator(const MatC& a, const MatC& b) { return a * b * a.inverse() * b.inverse(); }

}  // namespace

TransportResult transport(const Differential& A, const LiftedPath& path, const TransportOptions& opt,
                          const PathIntegrand& f, int rows, int cols) {
    const ChartPoint p0 = path.at(0, 0.0);
    const int n = static_cast<int>(A(p0).rows());
    const int nT = n * n, nG = f ? rows * cols : 0;
    MatC y = MatC::Zero(nT + nG, 1);
    Eigen::Map<MatC>(y.data(), n, n) = MatC::Identity(n, n);
    const Dopri5 ode(opt.rtol, opt.atol);
    TransportResult out;
    double h = 0;
    for (int seg = 0; seg < path.size(); ++seg) {
        auto rhs = [&](double s, const MatC& Y) -> MatC {
            const ChartPoint q = path.at(seg, s);
            const cplx dz = path.dz(seg, s);
            const MatC T = unflatten(Y, 0, n, n);
            MatC d(nT + nG, 1);
            Eigen::Map<MatC>(d.data(), n, n) = A(q) * T * dz;
            if (nG) Eigen::Map<MatC>(d.data() + nT, rows, cols) = f(q, T) * dz;
            return d;
        };
        h = 0;  // segments differ in scale
        y = ode.advance(rhs, y, 0.0, 1.0, h, out.stats);
    }
    out.T = unflatten(y, 0, n, n);
    if (nG) out.integral = unflatten(y, nT, rows, cols);
    return out;
}

std::vector<SurfacePoint> singular_points(const ConnectionForm& A) {
    std::vector<SurfacePoint> pts;
    for (const auto& t : A.kernel().data().points()) pts.push_back(t.point);
    for (const auto& d : A.half().divisor()) pts.push_back(d.point);
    return pts;
}

void check_clearance(const Curve& C, const LiftedPath& path, const std::vector<SurfacePoint>& pts, double clearance) {
    for (int seg = 0; seg < path.size(); ++seg) {
        const Segment& sg = path.path().segments[seg];
        for (const auto& p : pts)
            for (const cplx zp : chart_images(sg.chart, p)) {
                const double s = nearest_parameter(sg, zp);
                if (std::abs(sg.z(s) - zp) >= clearance) continue;
                if (same_sheet(path.at(seg, s), p))
                    throw PathTooClose("transport path passes within " + std::to_string(clearance) +
                                       " of a singular point at x = (" + std::to_string(p.x.real()) + ", " +
                                       std::to_string(p.x.imag()) + ")");
            }
    }
    (void)C;
}

TransportResult transport(const ConnectionForm& A, const LiftedPath& path, const TransportOptions& opt,
                          const PathIntegrand& f, int rows, int cols) {
    check_clearance(A.kernel().ctx().curve(), path, singular_points(A), opt.clearance);
    return transport([&](const ChartPoint& q) { return A.eval(q); }, path, opt, f, rows, cols);
}

MatC MonodromyRep::vertex_alpha(int k) const {
    // Psi_- on alpha_k starts at the vertex reached by gamma_1 .. gamma_{k-1} alpha_k beta_k alpha_k^{-1}.
    const int n = static_cast<int>(M_alpha[0].rows());
    MatC w = MatC::Identity(n, n);
    for (int j = 0; j < k; ++j) w = w * commutator(M_alpha[j], M_beta[j]);
    w = w * M_alpha[k] * M_beta[k] * M_alpha[k].inverse();
    return w.inverse();
}

MatC MonodromyRep::vertex_beta(int k) const {
    const int n = static_cast<int>(M_alpha[0].rows());
    MatC w = MatC::Identity(n, n);
    for (int j = 0; j <= k; ++j) w = w * commutator(M_alpha[j], M_beta[j]);
    return w.inverse();
}

void fill_jumps(MonodromyRep& rep) {
    const int g = rep.genus();
    const int n = static_cast<int>(rep.M_alpha[0].rows());
    rep.J_alpha.assign(g, MatC());
    rep.J_beta.assign(g, MatC());
    MatC w = MatC::Identity(n, n);  // M_{gamma_1 .. gamma_{k-1}}
    for (int k = 0; k < g; ++k) {
        const MatC& a = rep.M_alpha[k];
        const MatC& b = rep.M_beta[k];
        const MatC c = commutator(a, b);
        const MatC wi = w.inverse();
        rep.J_alpha[k] = w * c * b * wi;
        rep.J_beta[k] = w * c * a.inverse() * wi;
        w = w * c;
    }
    rep.relation_defect = max_abs(w - MatC::Identity(n, n));
    rep.J.assign(4 * g, MatC());
    for (int l = 1; l <= g; ++l) {
        const int base = 4 * (g - l);
        rep.J[base + 0] = rep.J_beta[l - 1];
        rep.J[base + 1] = rep.J_alpha[l - 1].inverse();
        rep.J[base + 2] = rep.J_beta[l - 1].inverse();
        rep.J[base + 3] = rep.J_alpha[l - 1];
    }
    MatC prod = MatC::Identity(n, n);
    for (const auto& j : rep.J) prod = prod * j;
    rep.vertex_defect = max_abs(prod - MatC::Identity(n, n));
}

namespace {

// A matrix with its derivative along one direction.
struct Dual {
    MatC v, d;
    Dual operator*(const Dual& o) const { return {v * o.v, d * o.v + v * o.d}; }
    Dual inv() const {
        const MatC vi = v.inverse();
        return {vi, -vi * d * vi};
    }
};

}  // namespace

JumpTangent jump_tangent(const MonodromyRep& rep, const std::vector<MatC>& dM_alpha, const std::vector<MatC>& dM_beta) {
    const int g = rep.genus();
    const int n = static_cast<int>(rep.M_alpha[0].rows());
    JumpTangent out;
    Dual w{MatC::Identity(n, n), MatC::Zero(n, n)};
    std::vector<Dual> Ja, Jb;
    for (int k = 0; k < g; ++k) {
        const Dual a{rep.M_alpha[k], dM_alpha[k]}, b{rep.M_beta[k], dM_beta[k]};
        const Dual c = a * b * a.inv() * b.inv();
        const Dual wi = w.inv();
        Ja.push_back(w * c * b * wi);
        Jb.push_back(w * c * a.inv() * wi);
        out.dJ_alpha.push_back(Ja.back().d);
        out.dJ_beta.push_back(Jb.back().d);
        w = w * c;
    }
    out.dJ.assign(4 * g, MatC());
    for (int l = 1; l <= g; ++l) {
        const int base = 4 * (g - l);
        out.dJ[base + 0] = Jb[l - 1].d;
        out.dJ[base + 1] = Ja[l - 1].inv().d;
        out.dJ[base + 2] = Jb[l - 1].inv().d;
        out.dJ[base + 3] = Ja[l - 1].d;
    }
    return out;
}

namespace {

MonodromyRep monodromy_impl(const CurveContext& ctx, const std::function<TransportResult(const LiftedPath&)>& run) {
    const int g = ctx.genus();
    std::vector<TransportResult> res(2 * g);
    parallel_for(2 * g, [&](int i) {
        const Path& p = i < g ? ctx.alpha()[i] : ctx.beta()[i - g];
        res[i] = run(ctx.lift(p));
    });
    MonodromyRep rep;
    for (int i = 0; i < 2 * g; ++i) {
        (i < g ? rep.M_alpha : rep.M_beta).push_back(res[i].T.inverse());
        rep.stats.steps += res[i].stats.steps;
        rep.stats.rejected += res[i].stats.rejected;
        rep.stats.evaluations += res[i].stats.evaluations;
    }
    fill_jumps(rep);
    return rep;
}

}  // namespace

MonodromyRep monodromy_rep(const CurveContext& ctx, const Differential& A, const TransportOptions& opt) {
    return monodromy_impl(ctx, [&](const LiftedPath& lp) { return transport(A, lp, opt); });
}

MonodromyRep monodromy_rep(const ConnectionForm& A, const TransportOptions& opt) {
    return monodromy_impl(A.kernel().ctx(), [&](const LiftedPath& lp) { return transport(A, lp, opt); });
}

ApparentReport apparent_singularity_report(const ConnectionForm& geometry, const Differential& A,
                                           const TransportOptions& opt) {
    const KernelEvaluator& K = geometry.kernel();
    const Curve& C = K.ctx().curve();
    const TyurinData& D = K.data();
    const Divisor& Dv = geometry.half().divisor();
    const int n = geometry.n();
    const auto pts = singular_points(geometry);
    ApparentReport rep;

    auto loop_defect = [&](const Chart& ch, cplx center, double radius) {
        Path p;
        p.segments.push_back(Segment::arc(ch, center, radius, 0.0, 2.0 * pi));
        const LiftedPath lp(C, p, C.at(ch, center + radius).y);
        check_clearance(C, lp, pts, std::min(opt.clearance, 0.5 * radius));
        return max_abs(transport(A, lp, opt).T - MatC::Identity(n, n));
    };

    std::vector<cplx> xs{K.ctx().infinity().x};
    for (const auto& t : D.points()) xs.push_back(t.point.x);
    for (const auto& d : Dv) xs.push_back(d.point.x);

    for (int i = 0; i < static_cast<int>(D.points().size()); ++i) {
        const auto& t = D.points()[i];
        double rho = K.tyurin_radius(i);
        for (const auto& d : Dv) {
            try {
                rho = std::min(rho, 0.4 * std::abs(C.to_chart(D.chart, d.point) - t.z));
            } catch (const ChartError&) {
            }
        }
        rep.tyurin_loops = std::max(rep.tyurin_loops, loop_defect(D.chart, t.z, 0.5 * rho));
        auto f = [&](cplx z) -> MatC {
            const MatC Pz = D.P.eval(z), Pi = Pz.inverse();
            return MatC(Pi * A(C.at(D.chart, z)) * Pz - Pi * D.P.eval_derivative(z));
        };
        rep.analyticity = std::max(rep.analyticity, circle_moments(f, t.z, rho, 2 * t.mult + 1));
    }
    for (const auto& d : Dv) {
        double rx = C.branch_distance(d.point.x);
        for (cplx o : xs)
            if (std::abs(o - d.point.x) > 1e-12) rx = std::min(rx, std::abs(o - d.point.x));
        rx *= 0.4;
        const double rz = d.point.is_branch() ? std::sqrt(rx) : rx;
        rep.divisor_loops = std::max(rep.divisor_loops, loop_defect(centered_chart(C, d.point, 2 * rz), 0.0, rz));
    }
    return rep;
}

ApparentReport verify_apparent_singularities(const ConnectionForm& A, double tol, const TransportOptions& opt) {
    const ApparentReport r = apparent_singularity_report(A, [&](const ChartPoint& q) { return A.eval(q); }, opt);
    if (!(r.max_defect() < tol))
        throw ApparentSingularityViolation("apparent singularity defect " + std::to_string(r.max_defect()));
    return r;
}

CharacterReport compare_characters(const ConnectionForm& A, const ConnectionForm& B, double tol,
                                   const TransportOptions& opt) {
    const CurveContext& ctx = A.kernel().ctx();
    const MonodromyRep ra = monodromy_rep(A, opt), rb = monodromy_rep(B, opt);
    const int g = ctx.genus(), n = A.n();
    std::vector<cplx> poles;
    for (const auto& d : A.half().divisor()) poles.push_back(d.point.x);
    for (const auto& d : B.half().divisor()) poles.push_back(d.point.x);
    const auto& cfg = ctx.config();
    CharacterReport rep;
    for (int i = 0; i < 2 * g; ++i) {
        const bool is_a = i < g;
        const int k = is_a ? i : i - g;
        const MatC R = (is_a ? rb.M_alpha[k] : rb.M_beta[k]) * (is_a ? ra.M_alpha[k] : ra.M_beta[k]).inverse();
        const cplx s = R.trace() / double(n);
        rep.scalar_defect = std::max(rep.scalar_defect, max_abs(R - s * MatC::Identity(n, n)));
        rep.modulus_defect = std::max(rep.modulus_defect, std::abs(std::abs(s) - 1.0));
        const LiftedPath lp = ctx.lift(is_a ? ctx.alpha()[k] : ctx.beta()[k]);
        const cplx per = integrate<cplx>(
            lp, [&](const ChartPoint& q) { return B.half().tilde(q) - A.half().tilde(q); }, cfg.order,
            cfg.piece_factor, poles);
        rep.period_defect = std::max(rep.period_defect, std::abs(s - std::exp(per)));
        (is_a ? rep.alpha : rep.beta).push_back(s);
    }
    if (!(rep.scalar_defect < tol))
        throw CharacterMismatch("monodromy ratio is not scalar: " + std::to_string(rep.scalar_defect));
    return rep;
}

ConnectionFamily connection_family(const CurveContext& ctx, const NormalForm& P, const ModuliTangent& v,
                                   std::shared_ptr<const DlogHalf> h, std::vector<std::vector<MatC>> germs) {
    return [&ctx, P, v, h, germs](cplx eps) {
        auto K = std::make_shared<const KernelEvaluator>(ctx, bnt_matrix(displaced(P, v, eps), ctx));
        HiggsField phi;
        if (!germs.empty()) phi = HiggsField(*K, holomorphic_germs(*K, germs));
        return OwnedConnection{K, h, ConnectionForm(*K, *h, std::move(phi))};
    };
}


MatC psi_variation_contour(const ConnectionForm& A, const MonodromyRep& rep, const std::vector<MatC>& dM_alpha,
                           const std::vector<MatC>& dM_beta, const SurfacePoint& p, const TransportOptions& opt) {
    const CurveContext& ctx = A.kernel().ctx();
    const Curve& C = ctx.curve();
    const KernelEvaluator& K = A.kernel();
    const int g = ctx.genus(), n = A.n();
    const JumpTangent dj = jump_tangent(rep, dM_alpha, dM_beta);
    // The stems from infinity carry no net jump: every loop crosses them twice
    // and the vertex relation cancels the sum, so only the part from the hub on
    // is integrated.
    std::vector<MatC> parts(2 * g);
    parallel_for(2 * g, [&](int i) {
        const bool is_a = i < g;
        const int k = is_a ? i : i - g;
        const LiftedPath loop = ctx.lift(is_a ? ctx.alpha()[k] : ctx.beta()[k]);
        const MatC V = (is_a ? rep.vertex_alpha(k) : rep.vertex_beta(k));
        const MatC J = is_a ? rep.J_alpha[k] : rep.J_beta[k];
        const MatC dJ = is_a ? dj.dJ_alpha[k] : dj.dJ_beta[k];
        const MatC Tin = transport(A, stem(C, loop), opt).T;
        const MatC X = Tin * V * dJ * J.inverse() * V.inverse() * Tin.inverse();
        auto f = [&](const ChartPoint& q, const MatC& T) -> MatC { return T * X * T.inverse() * K.eval(q, p); };
        parts[i] = transport(A, middle(C, loop), opt, f, n, n).integral;
    });
    MatC out = MatC::Zero(n, n);
    for (const auto& m : parts) out += m;
    return out / two_pi_i;
}

MatC psi_variation_fd(const ConnectionFamily& fam, const SurfacePoint& p, double step, const TransportOptions& opt) {
    const OwnedConnection a0 = fam(0.0), ap = fam(step), am = fam(-step);
    const CurveContext& ctx = a0.K->ctx();
    Path path;
    path.segments.push_back(Segment::line(Chart{}, ctx.infinity().x, p.x));
    const LiftedPath lp(ctx.curve(), path, ctx.infinity().y);
    if (std::abs(lp.y_end() - p.y) > 1e-6 * (1 + std::abs(p.y)))
        throw PathError("the straight segment from infinity reaches the other sheet");
    const MatC T0 = transport(a0.A, lp, opt).T;
    const MatC Tp = transport(ap.A, lp, opt).T, Tm = transport(am.A, lp, opt).T;
    return (Tp - Tm) / (2 * step) * T0.inverse();
}

}  // namespace tyurin
