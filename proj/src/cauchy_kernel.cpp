#include "tyurin/cauchy_kernel.hpp"

#include <Eigen/SVD>

#include "tyurin/errors.hpp"

namespace tyurin {

Series<cplx> half_term(const LocalSeries& ls, const SurfacePoint& R) {
    const int K = ls.X.order();
    if (R.branch == -2) return Series<cplx>(K);
    std::vector<cplx> num(K), den(K);
    for (int k = 0; k < K; ++k) {
        num[k] = ls.Y[k] + (k == 0 ? R.y : cplx(0));
        den[k] = ls.X[k] - (k == 0 ? R.x : cplx(0));
    }
    const double scale = 1.0 + std::abs(R.x);
    int shift = 0;
    while (shift < 2 && std::abs(den[shift]) < 1e-12 * scale) {
        if (std::abs(num[shift]) > 1e-9 * (1.0 + std::abs(R.y)))
            throw SingularEvaluation("pole of the kernel at a Tyurin point");
        ++shift;
    }
    if (std::abs(den[shift]) < 1e-12 * scale) throw SingularEvaluation("pole of the kernel at a Tyurin point");
    Series<cplx> N(std::vector<cplx>(num.begin() + shift, num.end()));
    Series<cplx> D(std::vector<cplx>(den.begin() + shift, den.end()));
    Series<cplx> r = N / D;
    Series<cplx> out(K);
    for (int k = 0; k < r.order(); ++k) out[k] = 0.5 * r[k];
    return out;
}

namespace {

bool same_point(const SurfacePoint& a, cplx x, cplx y) {
    const double s = 1.0 + std::abs(a.x);
    if (std::abs(a.x - x) > 1e-12 * s) return false;
    if (a.branch >= 0) return true;
    return std::abs(a.y - y) < 1e-6 * (1.0 + std::abs(a.y));
}

}  // namespace

KernelEvaluator::KernelEvaluator(const CurveContext& ctx, TyurinData data, double corank_threshold)
    : ctx_(&ctx), data_(std::move(data)) {
    const Coranks k = coranks(data_, corank_threshold);
    if (k.h1 > 0) throw OnThetaDivisor(k.h1, "Brill-Noether-Tyurin matrix has corank " + std::to_string(k.h1));
    lu_.compute(data_.T);
    const VecR& s = data_.singular_values;
    cond_ = s(0) / s(s.size() - 1);
}

std::vector<std::vector<cplx>> KernelEvaluator::omega_p_series(const SurfacePoint& p) const {
    std::vector<std::vector<cplx>> out;
    for (const auto& ls : data_.local) {
        const Series<cplx> w = (half_term(ls, p) - half_term(ls, ctx_->infinity())) * ls.W;
        out.push_back(w.coeffs());
    }
    return out;
}

MatC KernelEvaluator::R_from_series(const std::vector<std::vector<cplx>>& f) const {
    const int N = data_.size(), n = data_.n();
    MatC R = MatC::Zero(N, n);
    for (int r = 0; r < N; ++r)
        for (const auto& tail : data_.basis.v[r])
            for (std::size_t m = 0; m < tail.coeffs.size(); ++m) R.row(r) += f[tail.point][m] * tail.coeffs[m].transpose();
    return R;
}

MatC KernelEvaluator::R(const SurfacePoint& p) const { return R_from_series(omega_p_series(p)); }

MatC KernelEvaluator::W(const ChartPoint& q) const {
    const int n = data_.n(), g = ctx_->genus();
    const VecC om = ctx_->omega(q);
    MatC W = MatC::Zero(n, n * g);
    for (int i = 0; i < g; ++i)
        for (int a = 0; a < n; ++a) W(a, i * n + a) = om(i);
    return W;
}

MatC KernelEvaluator::eval(const ChartPoint& q, const SurfacePoint& p) const {
    if (same_point(p, q.x, q.y)) throw SingularEvaluation("q coincides with p");
    if (same_point(ctx_->infinity(), q.x, q.y)) throw SingularEvaluation("q coincides with infinity");
    const int n = data_.n();
    const MatC Rp = R(p);
    return ctx_->Omega(p, ctx_->infinity(), q) * MatC::Identity(n, n) - W(q) * lu_.solve(Rp);
}

MatC KernelEvaluator::eval(const SurfacePoint& q, const SurfacePoint& p) const {
    if (q.is_branch()) throw ChartError("x-chart value requested at a branch point");
    const Chart c = ctx_->curve().disk_chart(q.x, ctx_->curve().sheet_of(q), 0.5 * ctx_->curve().branch_distance(q.x));
    return eval(ctx_->curve().at(c, 0.0), p);
}

MatC KernelEvaluator::eval_normalized(const ChartPoint& q, const SurfacePoint& p) const {
    if (same_point(p, q.x, q.y)) throw SingularEvaluation("q coincides with p");
    if (same_point(ctx_->infinity(), q.x, q.y)) throw SingularEvaluation("q coincides with infinity");
    const ThirdKind w = ctx_->third_kind(p, ctx_->infinity(), ThirdKindMode::ANormalized);
    auto f = omega_p_series(p);
    for (std::size_t t = 0; t < f.size(); ++t)
        for (std::size_t m = 0; m < f[t].size(); ++m) f[t][m] -= data_.omega[t][m].cwiseProduct(w.d).sum();
    const int n = data_.n();
    return ctx_->eval(w, q) * MatC::Identity(n, n) - W(q) * lu_.solve(R_from_series(f));
}

double KernelEvaluator::tyurin_radius(int i) const {
    const auto& pts = data_.points();
    double r = data_.P.disk.radius - std::abs(pts[i].z);
    for (int j = 0; j < static_cast<int>(pts.size()); ++j)
        if (j != i) r = std::min(r, std::abs(pts[j].z - pts[i].z));
    return 0.4 * r;
}

MatC KernelEvaluator::eval_regularized(const ChartPoint& q, cplx zp) const {
    const Curve& C = ctx_->curve();
    const auto& pts = data_.points();
    auto direct = [&](cplx z) -> MatC { return eval(q, C.from_chart(data_.chart, z)) * data_.P.eval(z); };
    int near = -1;
    for (int i = 0; i < static_cast<int>(pts.size()); ++i)
        if (std::abs(zp - pts[i].z) < 0.5 * tyurin_radius(i)) near = i;
    if (near < 0) return direct(zp);

    const cplx zt = pts[near].z;
    const double rho = tyurin_radius(near);
    try {
        const cplx zq = C.to_chart(data_.chart, C.point_with_y(q.x, q.y));
        if (std::abs(zq - zt) < 1.05 * rho) throw SingularEvaluation("q lies inside the regularization circle");
    } catch (const ChartError&) {
    }
    const int N = 256;
    MatC acc = MatC::Zero(data_.n(), data_.n());
    for (int k = 0; k < N; ++k) {
        const cplx d = rho * std::exp(I * (2.0 * pi * k / N));
        acc += direct(zt + d) * (d / (zt + d - zp));
    }
    return acc / double(N);
}

double circle_moments(const std::function<MatC(cplx)>& f, cplx c, double radius, int order, int nodes) {
    std::vector<MatC> M;
    double fmax = 0;
    for (int k = 0; k < nodes; ++k) {
        const cplx d = radius * std::exp(I * (2.0 * pi * k / nodes));
        const MatC v = f(c + d);
        if (M.empty()) M.assign(order, MatC::Zero(v.rows(), v.cols()));
        fmax = std::max(fmax, v.cwiseAbs().maxCoeff());
        cplx dm = d;
        for (int m = 0; m < order; ++m) {
            M[m] += v * dm;
            dm *= d;
        }
    }
    double worst = 0;
    for (int m = 0; m < order; ++m)
        worst = std::max(worst, (M[m] / double(nodes)).cwiseAbs().maxCoeff() / (fmax * std::pow(radius, m + 1)));
    return worst;
}

double KernelReport::max_defect() const {
    return std::max({residue_p, residue_inf, regular_q, regular_p, tyurin_vectors, vanishing_inf});
}

KernelReport verify_kernel_axioms(const KernelEvaluator& K) {
    const CurveContext& ctx = K.ctx();
    const Curve& C = ctx.curve();
    const TyurinData& D = K.data();
    const auto& pts = D.points();
    const double R = D.P.disk.radius;
    const int n = K.n();
    KernelReport rep;
    rep.condition = K.condition_number();

    // p: a disk point far from the Tyurin points.
    cplx zp = 0;
    double best = -1;
    for (int k = 0; k < 16; ++k) {
        const cplx z = 0.55 * R * std::exp(I * (0.3 + 2.0 * pi * k / 16));
        double d = R;
        for (const auto& t : pts) d = std::min(d, std::abs(z - t.z));
        if (d > best) best = d, zp = z;
    }
    const SurfacePoint p = C.from_chart(D.chart, zp);

    // q0: a point off the disk, away from branch points and infinity.
    cplx xq = 0;
    double bq = -1;
    for (int k = 0; k < 24; ++k) {
        const cplx x = 1.7 * std::exp(I * (0.1 + 2.0 * pi * k / 24));
        double d = std::min(C.branch_distance(x), std::abs(x - ctx.infinity().x));
        try {
            d = std::min(d, std::abs(C.to_chart(D.chart, C.point(x, 1))) - R);
            d = std::min(d, std::abs(C.to_chart(D.chart, C.point(x, -1))) - R);
        } catch (const ChartError&) {
        }
        if (d > bq) bq = d, xq = x;
    }
    const Chart cq = C.disk_chart(xq, 1, 0.5 * C.branch_distance(xq));
    const ChartPoint q0 = C.at(cq, 0.0);

    auto residue = [&](const Chart& ch, cplx c, double rho, const SurfacePoint& pp) {
        const int N = 256;
        MatC acc = MatC::Zero(n, n);
        for (int k = 0; k < N; ++k) {
            const cplx d = rho * std::exp(I * (2.0 * pi * k / N));
            acc += K.eval(C.at(ch, c + d), pp) * d;
        }
        return MatC(acc / double(N));
    };
    rep.residue_p = (residue(D.chart, zp, 0.4 * best, p) - MatC::Identity(n, n)).cwiseAbs().maxCoeff();
    const SurfacePoint& inf = ctx.infinity();
    const double rinf = 0.4 * C.branch_distance(inf.x);
    const Chart ci = C.disk_chart(inf.x, C.sheet_of(inf), 2 * rinf);
    rep.residue_inf = (residue(ci, 0.0, rinf, p) + MatC::Identity(n, n)).cwiseAbs().maxCoeff();

    for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
        const double rho = std::min(K.tyurin_radius(i), 0.4 * std::abs(pts[i].z - zp));
        auto fq = [&](cplx z) -> MatC { return D.P.eval(z).inverse() * K.eval(K.disk_point(z), p); };
        rep.regular_q = std::max(rep.regular_q, circle_moments(fq, pts[i].z, rho, pts[i].mult));
        auto fp = [&](cplx z) -> MatC { return K.eval(q0, C.from_chart(D.chart, z)) * D.P.eval(z); };
        rep.regular_p = std::max(rep.regular_p, circle_moments(fp, pts[i].z, rho, pts[i].mult));
        if (pts[i].mult == 1) {
            Eigen::JacobiSVD<MatC> svd(D.P.eval(pts[i].z).transpose(), Eigen::ComputeFullV);
            const VecC h = svd.matrixV().col(n - 1);
            const MatC Ct = K.eval(K.disk_point(pts[i].z), p);
            const double v = (h.transpose() * Ct).cwiseAbs().maxCoeff() / Ct.cwiseAbs().maxCoeff();
            rep.tyurin_vectors = std::max(rep.tyurin_vectors, v);
        }
    }

    const double eps = 1e-6;
    const cplx xe = inf.x + eps;
    const SurfacePoint pe = C.point_with_y(xe, C.continue_y(inf.x, inf.y, xe));
    rep.vanishing_inf = K.eval(q0, pe).cwiseAbs().maxCoeff() / K.eval(q0, p).cwiseAbs().maxCoeff();
    return rep;
}

}  // namespace tyurin
