#include "tyurin/connection.hpp"

#include <Eigen/SVD>

#include "tyurin/errors.hpp"

namespace tyurin {

int degree(const Divisor& D) {
    int d = 0;
    for (const auto& p : D) d += p.mult;
    return d;
}

Chart centered_chart(const Curve& C, const SurfacePoint& p, double radius) {
    if (p.branch >= 0) return C.branch_chart(p.branch, radius);
    if (p.branch == -2) return C.infinity_chart(radius);
    return C.disk_chart(p.x, C.sheet_of(p), radius);
}

namespace {

SurfacePoint surface(const Curve& C, const ChartPoint& q) { return C.point_with_y(q.x, q.y); }

// Raw moments (1/2 pi i) \oint f (z - c)^m dz, m = 0 .. order - 1.
std::vector<MatC> moments(const std::function<MatC(cplx)>& f, cplx c, double r, int order, int nodes = 256) {
    std::vector<MatC> M;
    for (int k = 0; k < nodes; ++k) {
        const cplx d = r * std::exp(I * (2.0 * pi * k / nodes));
        const MatC v = f(c + d);
        if (M.empty()) M.assign(order, MatC::Zero(v.rows(), v.cols()));
        cplx dm = d;
        for (int m = 0; m < order; ++m, dm *= d) M[m] += v * dm;
    }
    for (auto& m : M) m /= double(nodes);
    return M;
}

// Largest radius around x keeping other special x-values outside, scaled by f.
double clearance(const Curve& C, cplx x, const std::vector<cplx>& others, double f) {
    double r = C.branch_distance(x);
    for (cplx o : others)
        if (std::abs(o - x) > 1e-12) r = std::min(r, std::abs(o - x));
    return f * r;
}

}  // namespace

MatC fay_differential(const KernelEvaluator& K, const Chart& chart, cplx z) {
    const CurveContext& ctx = K.ctx();
    const Curve& C = ctx.curve();
    const ChartPoint w = C.at(chart, z);
    const SurfacePoint wp = C.from_chart(chart, z);
    const SurfacePoint& inf = ctx.infinity();
    if (std::abs(wp.x - inf.x) < 1e-12 * (1 + std::abs(inf.x)) && std::abs(wp.y - inf.y) < 1e-6 * (1 + std::abs(inf.y)))
        throw SingularEvaluation("Fay differential at infinity");
    const int n = K.n();
    const cplx reg = C.affine_term(chart, z) + ctx.Omega(ctx.branch_infinity(), inf, w);
    return reg * MatC::Identity(n, n) - K.W(w) * K.solve(K.R(wp));
}

FayEstimate fay_richardson(const KernelEvaluator& K, const Chart& chart, cplx z, double h) {
    const Curve& C = K.ctx().curve();
    const int n = K.n();
    const ChartPoint w = C.at(chart, z);
    auto S = [&](double d) {
        auto G = [&](double e) { return MatC(K.eval(w, C.from_chart(chart, z + e)) + MatC::Identity(n, n) / e); };
        return MatC(0.5 * (G(d) + G(-d)));
    };
    const MatC S1 = S(h), S2 = S(h / 2);
    FayEstimate out{(4.0 * S2 - S1) / 3.0, max_abs(S2 - S1) / 3.0};
    if (!(out.error < 1e-4 * (1 + max_abs(out.value))))
        throw NumericalLimitFailure("Fay limit did not settle: error " + std::to_string(out.error));
    return out;
}

DlogHalf::DlogHalf(const CurveContext& ctx, Divisor D, HalfPin pin) : ctx_(&ctx), D_(std::move(D)), pin_(pin) {
    const int g = ctx.genus();
    if (degree(D_) != g) throw InvalidDivisor("divisor degree must equal the genus");
    const SurfacePoint& inf = ctx.infinity();
    VecC a = VecC::Zero(g);
    for (const auto& q : D_) {
        if (q.mult < 1) throw InvalidDivisor("multiplicities must be positive");
        if (q.point.branch == -2) throw InvalidDivisor("divisor contains the branch point at x = infinity");
        if (std::abs(q.point.x - inf.x) < 1e-12 * (1 + std::abs(inf.x)) && std::abs(q.point.y - inf.y) < 1e-6 * (1 + std::abs(inf.y)))
            throw InvalidDivisor("divisor contains the marked point infinity");
        a += double(q.mult) * ctx.abel(q.point);
    }
    if (std::abs(ctx.theta(ctx.reduce(a + ctx.riemann_constants()))) < 1e-6)
        throw SpecialDivisor("theta vanishes at the image of the divisor");
    const ThirdKindMode mode = pin == HalfPin::Unitary ? ThirdKindMode::ImaginaryPeriods : ThirdKindMode::ANormalized;
    for (const auto& q : D_) wq_.push_back(ctx.third_kind(q.point, ctx.branch_infinity(), mode));
    winf_ = ctx.third_kind(inf, ctx.branch_infinity(), mode);
    s_ = VecC::Zero(g);
    if (pin == HalfPin::ATrivial) {
        // a-periods of (1/2) d ln(dx/y); odd multiples of pi i.
        const Curve& C = ctx.curve();
        s_ = ctx.periods([&](const ChartPoint& p) { return -0.25 * C.dQval(p.x) / C.Qval(p.x) * p.dxdz; }).first;
    }
}

cplx DlogHalf::tilde(const ChartPoint& p) const {
    cplx s = -ctx_->eval(winf_, p) - ctx_->omega(p).cwiseProduct(s_).sum();
    for (std::size_t i = 0; i < D_.size(); ++i) s += double(D_[i].mult) * ctx_->eval(wq_[i], p);
    return s;
}

cplx DlogHalf::eval(const Chart& chart, cplx z) const {
    return ctx_->curve().affine_term(chart, z) + tilde(ctx_->curve().at(chart, z));
}

cplx DlogHalf::scalar_part(const ChartPoint& p) const {
    cplx s = ctx_->omega(p).cwiseProduct(winf_.d - s_).sum();
    for (std::size_t i = 0; i < D_.size(); ++i) s += double(D_[i].mult) * ctx_->eval(wq_[i], p);
    return s;
}

HiggsField::HiggsField(const KernelEvaluator& K, std::vector<std::vector<MatC>> germs) : K_(&K), germs_(std::move(germs)) {
    const TyurinData& D = K.data();
    const auto& pts = D.points();
    const int n = K.n();
    if (germs_.size() != pts.size()) throw InvalidDivisor("one germ per Tyurin point is required");
    X_ = MatC::Zero(D.size(), n);
    for (std::size_t t = 0; t < pts.size(); ++t) {
        const MatLaurent& Pi = D.basis.Pinv[t];
        const MatLaurent& Pt = D.basis.Ptaylor[t];
        const auto& phi = germs_[t];
        const int depth = -Pi.val;
        std::vector<MatC> m(std::max(depth, 0), MatC::Zero(n, n));
        for (int k = 0; k < depth; ++k) {
            const int e = -k - 1;
            for (int b = 0; b < static_cast<int>(phi.size()); ++b)
                for (int c = Pi.val; c <= e - b; ++c) {
                    const int a = e - b - c;
                    if (a < 0 || a >= static_cast<int>(Pt.c.size())) continue;
                    m[k] += Pt.c[a] * phi[b] * Pi.coeff(c);
                }
        }
        Mneg_.push_back(m);

        const cplx zt = pts[t].z;
        const double rho = K.tyurin_radius(static_cast<int>(t));
        auto integrand = [&](cplx z) -> MatC {
            MatC ph = MatC::Zero(n, n);
            cplx s = 1.0;
            for (const auto& c : phi) ph += c * s, s *= (z - zt);
            const MatC Pz = D.P.eval(z);
            return K.R(K.ctx().curve().from_chart(D.chart, z)) * (Pz * ph * Pz.inverse());
        };
        const int N = 256;
        for (int j = 0; j < N; ++j) {
            const cplx d = rho * std::exp(I * (2.0 * pi * j / N));
            X_ += integrand(zt + d) * (d / double(N));
        }
    }
    X_ = K.solve(X_);
}

MatC HiggsField::eval(const ChartPoint& q) const {
    if (!K_) return MatC();
    const int n = K_->n();
    const CurveContext& ctx = K_->ctx();
    const SurfacePoint qp = surface(ctx.curve(), q);
    const SurfacePoint& inf = ctx.infinity();
    MatC out = MatC::Zero(n, n);
    for (std::size_t t = 0; t < Mneg_.size(); ++t) {
        if (Mneg_[t].empty()) continue;
        const Series<cplx> h = half_term(K_->data().local[t], qp);
        for (std::size_t k = 0; k < Mneg_[t].size(); ++k) out -= h[static_cast<int>(k)] * Mneg_[t][k];
    }
    // At infinity itself only the finite part is kept; the pole has zero
    // residue for holomorphic germs.
    if (q.x != inf.x) out -= 0.5 * (q.y + inf.y) / (q.x - inf.x) * residue_sum();
    return q.w * out - K_->W(q) * X_;
}

MatC HiggsField::residue_sum() const {
    MatC s = MatC::Zero(K_->n(), K_->n());
    for (const auto& m : Mneg_)
        if (!m.empty()) s += m[0];
    return s;
}

std::vector<std::vector<MatC>> higgs_germs(const KernelEvaluator& K, const std::function<MatC(const ChartPoint&)>& phi,
                                           int order) {
    const TyurinData& D = K.data();
    std::vector<std::vector<MatC>> out;
    for (std::size_t t = 0; t < D.points().size(); ++t) {
        const cplx zt = D.points()[t].z;
        const double rho = K.tyurin_radius(static_cast<int>(t));
        auto f = [&](cplx z) -> MatC {
            const MatC Pz = D.P.eval(z);
            return Pz.inverse() * phi(K.disk_point(z)) * Pz;
        };
        // Taylor coefficient k is the moment of f (z - zt)^{-k-1}.
        const int N = 256;
        std::vector<MatC> c(order, MatC::Zero(K.n(), K.n()));
        for (int j = 0; j < N; ++j) {
            const cplx d = rho * std::exp(I * (2.0 * pi * j / N));
            const MatC v = f(zt + d);
            cplx dk = 1.0;
            for (int k = 0; k < order; ++k, dk /= d) c[k] += v * dk;
        }
        for (auto& m : c) m /= double(N);
        out.push_back(c);
    }
    return out;
}

std::vector<std::vector<MatC>> holomorphic_germs(const KernelEvaluator& K, std::vector<std::vector<MatC>> germs) {
    const int n = K.n();
    // residue_sum is linear in the germs: probe it on unit germs.
    std::vector<std::tuple<int, int, int, int>> dirs;
    for (std::size_t t = 0; t < germs.size(); ++t)
        for (std::size_t b = 0; b < germs[t].size(); ++b)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) dirs.emplace_back(static_cast<int>(t), static_cast<int>(b), i, j);
    auto zero_like = [&]() {
        auto z = germs;
        for (auto& g : z)
            for (auto& m : g) m.setZero();
        return z;
    };
    MatC L(n * n, static_cast<int>(dirs.size()));
    for (std::size_t d = 0; d < dirs.size(); ++d) {
        auto [t, b, i, j] = dirs[d];
        auto e = zero_like();
        e[t][b](i, j) = 1.0;
        const HiggsField h(K, e);
        const MatC r = h.residue_sum();
        L.col(static_cast<int>(d)) = Eigen::Map<const VecC>(r.data(), n * n);
    }
    const MatC r0 = HiggsField(K, germs).residue_sum();
    const VecC rhs = -Eigen::Map<const VecC>(r0.data(), n * n);
    // The residue theorem forces some of these residues (all of them for n = 1,
    // the trace for any n) to vanish; they come out as rounding noise and must
    // not be solved for.
    Eigen::JacobiSVD<MatC> svd(L, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const VecR& sv = svd.singularValues();
    const double cut = std::max(1e-10 * (sv.size() ? sv(0) : 0.0), 1e-12);
    VecC coef = svd.matrixU().adjoint() * rhs;
    for (int i = 0; i < sv.size(); ++i) coef(i) = sv(i) > cut ? coef(i) / sv(i) : 0.0;
    const VecC delta = svd.matrixV() * coef;
    for (std::size_t d = 0; d < dirs.size(); ++d) {
        auto [t, b, i, j] = dirs[d];
        germs[t][b](i, j) += delta(static_cast<int>(d));
    }
    return germs;
}

ConnectionForm::ConnectionForm(const KernelEvaluator& K, const DlogHalf& h, HiggsField phi)
    : K_(&K), h_(&h), phi_(std::move(phi)) {
    for (const auto& d : h.divisor())
        for (const auto& t : K.data().points())
            if (d.point.branch == t.point.branch && std::abs(d.point.x - t.point.x) < 1e-9 &&
                (d.point.branch >= 0 || std::abs(d.point.y - t.point.y) < 1e-6))
                throw InvalidDivisor("divisor meets the Tyurin divisor");
}

MatC ConnectionForm::reference(const ChartPoint& q) const {
    const int n = K_->n();
    const SurfacePoint p = surface(K_->ctx().curve(), q);
    return -h_->scalar_part(q) * MatC::Identity(n, n) - K_->W(q) * K_->solve(K_->R(p));
}

MatC ConnectionForm::eval(const ChartPoint& q) const {
    MatC A = reference(q);
    if (!phi_.empty()) A += phi_.eval(q);
    return A;
}

MatC fay_variation(const KernelEvaluator& K, const ModuliTangent& v, const ChartPoint& p) {
    const TyurinData& D = K.data();
    const Curve& C = K.ctx().curve();
    const SurfacePoint ps = surface(C, p);
    const int n = K.n(), N = 256;
    MatC out = MatC::Zero(n, n);
    for (int t = 0; t < static_cast<int>(D.points().size()); ++t) {
        const cplx zt = D.points()[t].z;
        const double rho = K.tyurin_radius(t);
        for (int j = 0; j < N; ++j) {
            const cplx d = rho * std::exp(I * (2.0 * pi * j / N));
            const cplx z = zt + d;
            const MatC Pz = D.P.eval(z);
            // C(q, p) carries dz; the 1/(2 pi i) and dz = i d dtheta combine to d / N.
            out += K.eval(p, C.from_chart(D.chart, z)) * v.dP.eval(z) * Pz.inverse() * K.eval(K.disk_point(z), ps) * (d / double(N));
        }
    }
    return out;
}

ConnectionReport verify_connection(const ConnectionForm& A) {
    const KernelEvaluator& K = A.kernel();
    const CurveContext& ctx = K.ctx();
    const Curve& C = ctx.curve();
    const TyurinData& D = K.data();
    const Divisor& Dv = A.half().divisor();
    const int n = A.n();
    ConnectionReport rep;

    std::vector<cplx> xs{ctx.infinity().x};
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
        auto f = [&](cplx z) -> MatC {
            const MatC Pz = D.P.eval(z), Pi = Pz.inverse();
            return MatC(Pi * A.eval(D.chart, z) * Pz - Pi * D.P.eval_derivative(z));
        };
        rep.tyurin = std::max(rep.tyurin, circle_moments(f, t.z, rho, 2 * t.mult + 1));
    }

    for (const auto& d : Dv) {
        const double rx = clearance(C, d.point.x, xs, 0.4);
        const double rz = d.point.branch >= 0 ? std::sqrt(rx) : rx;
        const Chart ch = centered_chart(C, d.point, 2 * rz);
        auto f = [&](cplx z) { return A.eval(ch, z); };
        const auto M = moments(f, 0.0, rz, d.mult + 2);
        double fmax = 0;
        for (int k = 0; k < 64; ++k) fmax = std::max(fmax, max_abs(f(rz * std::exp(I * (2.0 * pi * k / 64)))));
        double v = max_abs(M[0] + double(d.mult) * MatC::Identity(n, n));
        for (std::size_t m = 1; m < M.size(); ++m) v = std::max(v, max_abs(M[m]) / (fmax * std::pow(rz, m + 1)));
        rep.divisor = std::max(rep.divisor, v);
    }

    const SurfacePoint& inf = ctx.infinity();
    const double ri = clearance(C, inf.x, xs, 0.4);
    const Chart ci = centered_chart(C, inf, 2 * ri);
    rep.infinity = circle_moments([&](cplx z) { return A.eval(ci, z); }, 0.0, ri, 2);
    return rep;
}

ConnectionForm reference_connection(const KernelEvaluator& K, const DlogHalf& h, double tol) {
    ConnectionForm F(K, h);
    const ConnectionReport r = verify_connection(F);
    if (!(r.max_defect() < tol))
        throw ConnectionAxiomViolation("reference connection defect " + std::to_string(r.max_defect()));
    return F;
}

ConnectionForm assemble_connection(const ConnectionForm& F, HiggsField phi, double tol) {
    ConnectionForm A(F.kernel(), F.half(), std::move(phi));
    const ConnectionReport r = verify_connection(A);
    if (!(r.max_defect() < tol)) throw ConnectionAxiomViolation("connection defect " + std::to_string(r.max_defect()));
    return A;
}

}  // namespace tyurin
