#include "tyurin/riemann_surface.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "tyurin/errors.hpp"

namespace tyurin {

namespace {

double segment_distance(cplx p, cplx a, cplx b) {
    const cplx d = b - a;
    const double L2 = std::norm(d);
    if (L2 == 0.0) return std::abs(p - a);
    const double t = std::clamp(((p - a) * std::conj(d)).real() / L2, 0.0, 1.0);
    return std::abs(p - (a + t * d));
}

Chart plane() { return Chart{}; }

}  // namespace

Path Lasso::path(const Curve& c, int orientation) const {
    (void)c;
    const cplx e = entry - radius * std::polar(1.0, theta);
    Path p;
    p.segments.push_back(Segment::line(plane(), cplx{}, entry));  // start fixed by caller
    p.segments.push_back(Segment::arc(plane(), e, radius, theta, 2.0 * pi * orientation));
    p.segments.push_back(Segment::line(plane(), entry, cplx{}));
    return p;
}

CurveContext::CurveContext(Curve curve, SurfacePoint infinity, QuadratureConfig cfg)
    : curve_(std::move(curve)), inf_(infinity), cfg_(cfg) {
    if (inf_.is_branch() || curve_.branch_distance(inf_.x) < 1e-8)
        throw InvalidDivisor("the marked point infinity must not be a branch point");
    if (std::abs(inf_.y * inf_.y - curve_.Qval(inf_.x)) > 1e-8 * (1 + std::abs(inf_.y * inf_.y)))
        throw InvalidDivisor("the marked point infinity is not on the curve");
    if (curve_.genus() != 2)
        throw PeriodComputationFailed("canonical generator loops are constructed for genus 2 only");

    std::string last = "no admissible hub";
    for (int orientation : {1, -1}) {
        for (double rf : {0.45, 0.35, 0.25, 0.15}) {
            orientation_ = orientation;
            try {
                build_loops(rf);
            } catch (const PathError& err) {
                last = err.what();
                continue;
            }
            compute_periods();
            Eigen::SelfAdjointEigenSolver<MatR> es(Y_);
            const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
            if (lo > 0) {
                compute_riemann_constants();
                return;
            }
            last = "Im tau not positive definite (eigenvalues " + std::to_string(lo) + ", " + std::to_string(hi) + ")";
            if (hi < 0) break;  // mirror orientation
        }
    }
    throw PeriodComputationFailed(last);
}

void CurveContext::build_loops(double radius_factor) {
    const auto& e = curve_.branch_points();
    const int m = static_cast<int>(e.size());
    cplx centroid = 0;
    for (auto v : e) centroid += v;
    centroid /= double(m);
    double rmax = 0;
    for (auto v : e) rmax = std::max(rmax, std::abs(v - centroid));
    rmax = std::max(rmax, 1e-3);

    std::vector<double> r(m);
    for (int i = 0; i < m; ++i) {
        double d = std::numeric_limits<double>::infinity();
        for (int j = 0; j < m; ++j)
            if (j != i) d = std::min(d, std::abs(e[i] - e[j]));
        r[i] = radius_factor * d;
    }
    const cplx x0 = inf_.x;
    for (int i = 0; i < m; ++i)
        if (std::abs(x0 - e[i]) < 1.2 * r[i]) throw PathError("infinity lies inside a lasso disk");

    double best = -1;
    cplx bestH{};
    for (double rf : {1.3, 1.6, 2.0, 2.5, 3.2, 4.0}) {
        for (int k = 0; k < 96; ++k) {
            const cplx H = centroid + rf * (rmax + *std::max_element(r.begin(), r.end())) *
                                          std::polar(1.0, 2.0 * pi * k / 96.0);
            if (std::abs(H - x0) < 0.25 * rmax) continue;
            double score = std::numeric_limits<double>::infinity();
            for (int j = 0; j < m; ++j) score = std::min(score, segment_distance(e[j], x0, H) / r[j]);
            for (int i = 0; i < m; ++i) {
                const cplx entry = e[i] + r[i] * (H - e[i]) / std::abs(H - e[i]);
                for (int j = 0; j < m; ++j)
                    if (j != i) score = std::min(score, segment_distance(e[j], H, entry) / r[j]);
            }
            if (score > best + 1e-12) {
                best = score;
                bestH = H;
            }
        }
    }
    if (best < 1.15) throw PathError("no hub with clear stems at lasso radius factor " + std::to_string(radius_factor));
    hub_ = bestH;

    const double kappa = std::arg(hub_ - centroid);
    std::vector<std::pair<double, Lasso>> order;
    for (int i = 0; i < m; ++i) {
        Lasso L;
        L.branch = i;
        L.radius = r[i];
        L.theta = std::arg(hub_ - e[i]);
        L.entry = e[i] + std::polar(r[i], L.theta);
        double d = std::arg(L.entry - hub_) - kappa;
        while (d <= 0) d += 2 * pi;
        while (d > 2 * pi) d -= 2 * pi;
        order.push_back({d, L});
    }
    std::sort(order.begin(), order.end(), [&](const auto& a, const auto& b) {
        return orientation_ > 0 ? a.first < b.first : a.first > b.first;
    });
    lassos_.clear();
    for (auto& [d, L] : order) lassos_.push_back(L);

    auto lasso_path = [&](int i) {
        Path p = lassos_[i].path(curve_, orientation_);
        p.segments.front().a = hub_;
        p.segments.back().b = hub_;
        return p;
    };
    std::vector<Path> s;
    for (int i = 0; i < m; ++i) s.push_back(lasso_path(i));
    Path s6;
    for (int i = m - 1; i >= 0; --i) s6 += s[i].reversed();
    s.push_back(s6);

    // Words with [a1,b1][a2,b2] = (s1 s2 s3)^2 (s4 s5 s6)^2 = 1.
    const std::vector<std::array<int, 2>> aw{{0, 1}, {3, 4}}, bw{{2, 1}, {5, 4}};
    Path in, out;
    in.segments.push_back(Segment::line(plane(), x0, hub_));
    out.segments.push_back(Segment::line(plane(), hub_, x0));
    alpha_.clear();
    beta_.clear();
    for (int k = 0; k < 2; ++k) {
        alpha_.push_back((in + s[aw[k][0]] + s[aw[k][1]] + out).simplified());
        beta_.push_back((in + s[bw[k][0]] + s[bw[k][1]] + out).simplified());
    }
}

void CurveContext::compute_periods() {
    const int g = genus();
    Path in;
    in.segments.push_back(Segment::line(plane(), inf_.x, hub_));
    y_hub_ = LiftedPath(curve_, in, inf_.y).y_end();
    auto hub_based = [&](const Path& p) {
        Path q;
        q.segments.assign(p.segments.begin() + 1, p.segments.end() - 1);
        LiftedPath lp(curve_, q, y_hub_);
        if (std::abs(lp.y_end() - y_hub_) > 1e-8 * (1 + std::abs(y_hub_)))
            throw PeriodComputationFailed("generator loop does not close on the surface");
        return lp;
    };
    a_cyc_.clear();
    b_cyc_.clear();
    for (int k = 0; k < g; ++k) {
        a_cyc_.push_back(hub_based(alpha_[k]));
        b_cyc_.push_back(hub_based(beta_[k]));
    }
    A_.resize(g, g);
    B_.resize(g, g);
    for (int j = 0; j < g; ++j) {
        auto f = [&](const ChartPoint& p) -> VecC { return u(p); };
        A_.row(j) = integrate<VecC>(a_cyc_[j], f, cfg_.order, cfg_.piece_factor).transpose();
        B_.row(j) = integrate<VecC>(b_cyc_[j], f, cfg_.order, cfg_.piece_factor).transpose();
    }
    Ainv_ = A_.inverse();
    tau_ = B_ * Ainv_;
    Y_ = (0.5 * (tau_ + tau_.transpose())).imag();
    Yinv_ = Y_.inverse();
}

double CurveContext::cycle_distance(cplx x) const {
    double d = std::numeric_limits<double>::infinity();
    auto scan = [&](const Path& p) {
        for (const auto& s : p.segments) {
            if (s.shape == Segment::Shape::Line && s.chart.kind == ChartKind::Plane) {
                d = std::min(d, segment_distance(x, s.a, s.b));
            } else {
                for (int k = 0; k <= 256; ++k) {
                    cplx z = s.z(k / 256.0);
                    if (s.chart.kind != ChartKind::Plane) z = curve_.at(s.chart, z).x;
                    d = std::min(d, std::abs(x - z));
                }
            }
        }
    };
    for (const auto& c : a_cyc_) scan(c.path());
    for (const auto& c : b_cyc_) scan(c.path());
    return d;
}

VecC CurveContext::u(const ChartPoint& p) const {
    const int g = genus();
    VecC v(g);
    cplx xp = 1.0;
    for (int k = 0; k < g; ++k) {
        v(k) = xp * p.w;
        xp *= p.x;
    }
    return v;
}

VecC CurveContext::omega(const ChartPoint& p) const { return Ainv_.transpose() * u(p); }

VecC CurveContext::omega(const SurfacePoint& p) const {
    if (p.is_branch()) throw ChartError("x-chart differential values are undefined at branch points");
    ChartPoint c{p.x, p.x, p.y, 1.0, 1.0 / p.y};
    return omega(c);
}

std::pair<VecC, VecC> CurveContext::periods(const std::function<cplx(const ChartPoint&)>& f,
                                            const std::vector<cplx>& poles, int order) const {
    const int g = genus();
    const int n = order > 0 ? order : cfg_.order;
    VecC a(g), b(g);
    for (int j = 0; j < g; ++j) {
        a(j) = integrate<cplx>(a_cyc_[j], f, n, cfg_.piece_factor, poles);
        b(j) = integrate<cplx>(b_cyc_[j], f, n, cfg_.piece_factor, poles);
    }
    return {a, b};
}

cplx CurveContext::Omega(const SurfacePoint& P, const SurfacePoint& Q, const ChartPoint& z) const {
    auto term = [&](const SurfacePoint& R) -> cplx {
        if (R.branch == -2) return 0.0;
        return 0.5 * (z.y + R.y) / (z.x - R.x);
    };
    return (term(P) - term(Q)) * z.w;
}

ThirdKind CurveContext::third_kind(const SurfacePoint& plus, const SurfacePoint& minus, ThirdKindMode mode) const {
    if (plus.branch == minus.branch && std::abs(plus.x - minus.x) < 1e-14 && std::abs(plus.y - minus.y) < 1e-12)
        throw InvalidDivisor("third-kind differential needs two distinct poles");
    std::vector<cplx> poles;
    for (const auto* p : {&plus, &minus}) {
        if (p->branch == -2) continue;
        if (cycle_distance(p->x) < 1e-3) throw PathError("pole too close to the homology cycles");
        poles.push_back(p->x);
    }
    auto [a, b] = periods([&](const ChartPoint& z) { return Omega(plus, minus, z); }, poles);
    ThirdKind w{plus, minus, VecC::Zero(genus())};
    if (mode == ThirdKindMode::ANormalized) {
        w.d = a;
    } else {
        const VecR ur = a.real();
        const VecR vr = Yinv_ * (tau_.real() * ur - b.real());
        w.d = ur.cast<cplx>() + I * vr.cast<cplx>();
    }
    return w;
}

cplx CurveContext::eval(const ThirdKind& w, const ChartPoint& z) const {
    return Omega(w.plus, w.minus, z) - omega(z).cwiseProduct(w.d).sum();
}

Path CurveContext::path_to(const SurfacePoint& p) const {
    const auto& e = curve_.branch_points();
    const int m = static_cast<int>(e.size());
    Path base;
    base.segments.push_back(Segment::line(plane(), inf_.x, hub_));

    int disk = -1;
    if (p.branch >= 0) {
        disk = p.branch;
    } else if (p.branch == -2) {
        throw PathError("no finite path to the branch point at infinity");
    } else {
        for (const auto& L : lassos_)
            if (std::abs(p.x - e[L.branch]) < L.radius) disk = L.branch;
    }

    if (disk >= 0) {
        const Lasso* L = nullptr;
        for (const auto& l : lassos_)
            if (l.branch == disk) L = &l;
        Path q = base;
        q.segments.push_back(Segment::line(plane(), hub_, L->entry));
        const cplx y_entry = LiftedPath(curve_, q, inf_.y).y_end();
        double lim = std::numeric_limits<double>::infinity();
        for (int j = 0; j < m; ++j)
            if (j != disk) lim = std::min(lim, std::abs(e[j] - e[disk]));
        const Chart bc = curve_.branch_chart(disk, 0.999 * std::sqrt(lim));
        const cplx z0 = curve_.to_chart(bc, SurfacePoint{L->entry, y_entry, -1});
        const cplx z1 = curve_.to_chart(bc, p);
        q.segments.push_back(Segment::line(bc, z0, z1));
        return q;
    }

    auto clear = [&](cplx a, cplx b) {
        for (const auto& L : lassos_)
            if (segment_distance(e[L.branch], a, b) < 0.3 * L.radius) return false;
        return true;
    };
    Path tail;
    if (clear(hub_, p.x)) {
        tail.segments.push_back(Segment::line(plane(), hub_, p.x));
    } else {
        cplx centroid = 0;
        for (auto v : e) centroid += v;
        centroid /= double(m);
        double rmax = 0;
        for (auto v : e) rmax = std::max(rmax, std::abs(v - centroid));
        bool found = false;
        for (double rf : {1.2, 1.6, 2.2, 3.0}) {
            for (int k = 0; k < 72 && !found; ++k) {
                const cplx W = centroid + rf * (rmax + lassos_[0].radius) * std::polar(1.0, 2 * pi * k / 72.0);
                if (clear(hub_, W) && clear(W, p.x)) {
                    tail.segments.push_back(Segment::line(plane(), hub_, W));
                    tail.segments.push_back(Segment::line(plane(), W, p.x));
                    found = true;
                }
            }
            if (found) break;
        }
        if (!found) throw PathError("no clear path to the requested point");
    }
    Path q = base + tail;
    const cplx y = LiftedPath(curve_, q, inf_.y).y_end();
    if (std::abs(y - p.y) > std::abs(y + p.y)) {
        Path l = lassos_[0].path(curve_, orientation_);
        l.segments.front().a = hub_;
        l.segments.back().b = hub_;
        q = (base + l + tail).simplified();
    }
    return q;
}

VecC CurveContext::abel(const SurfacePoint& p) const {
    if (p.branch == -1 && std::abs(p.x - inf_.x) < 1e-15 && std::abs(p.y - inf_.y) < 1e-12)
        return VecC::Zero(genus());
    const LiftedPath lp = lift(path_to(p));
    const cplx ye = lp.y_end();
    if (p.branch == -1 && std::abs(ye - p.y) > 1e-7 * (1 + std::abs(p.y)))
        throw PathError("Abel path ends on the wrong sheet");
    return integrate<VecC>(lp, [&](const ChartPoint& c) -> VecC { return omega(c); }, cfg_.order, cfg_.piece_factor);
}

VecC CurveContext::abel(const SurfacePoint& p, const SurfacePoint& base) const { return abel(p) - abel(base); }

VecC CurveContext::reduce(const VecC& z) const {
    const VecR n = Yinv_ * z.imag();
    VecR nr = n.array().round();
    VecC w = z - tau_ * nr.cast<cplx>();
    const VecR n2 = Yinv_ * w.imag();
    const VecR mr = (w.real() - tau_.real() * n2).array().round();
    return w - mr.cast<cplx>();
}

ThetaValue CurveContext::theta_grad(const VecC& z) const {
    const int g = genus();
    const VecR c = Yinv_ * z.imag();
    const double R2 = (std::log(1e12) + 10.0) / pi;
    std::vector<int> lo(g), hi(g);
    for (int i = 0; i < g; ++i) {
        const double w = std::sqrt(R2 * Yinv_(i, i));
        lo[i] = static_cast<int>(std::floor(-c(i) - w));
        hi[i] = static_cast<int>(std::ceil(-c(i) + w));
        if (hi[i] - lo[i] > 80) throw TruncationError("theta lattice box exceeds the configured truncation");
    }
    // Collect exponents first to factor out the largest modulus.
    std::vector<VecR> ns;
    std::vector<cplx> ex;
    std::vector<int> n(lo);
    double emax = -std::numeric_limits<double>::infinity();
    while (true) {
        VecR nv(g);
        for (int i = 0; i < g; ++i) nv(i) = n[i];
        const VecR d = nv + c;
        if (d.dot(Y_ * d) <= R2) {
            const VecC nc = nv.cast<cplx>();
            const cplx E = I * pi * nc.dot(tau_ * nc) + two_pi_i * nc.dot(z);
            ns.push_back(nv);
            ex.push_back(E);
            emax = std::max(emax, E.real());
        }
        int i = 0;
        while (i < g && ++n[i] > hi[i]) {
            n[i] = lo[i];
            ++i;
        }
        if (i == g) break;
    }
    ThetaValue out{0.0, VecC::Zero(g)};
    for (std::size_t k = 0; k < ex.size(); ++k) {
        const cplx t = std::exp(ex[k] - emax);
        out.value += t;
        out.gradient += two_pi_i * t * ns[k].cast<cplx>();
    }
    const double s = std::exp(emax);
    out.value *= s;
    out.gradient *= s;
    return out;
}

cplx CurveContext::theta(const VecC& z) const { return theta_grad(z).value; }

void CurveContext::compute_riemann_constants() {
    const int g = genus();
    const VecC ae = abel(curve_.branch_point(0));
    const auto& e = curve_.branch_points();
    cplx centroid = 0;
    for (auto v : e) centroid += v;
    centroid /= double(e.size());
    // Test points of W_{g-1}.
    std::vector<SurfacePoint> qs{curve_.point(centroid + cplx(0.31, 1.43), 1), curve_.point(centroid + cplx(-1.62, 0.27), -1),
                                 curve_.point(centroid + cplx(0.55, -1.91), 1)};
    std::vector<VecC> aq;
    for (const auto& q : qs) aq.push_back(abel(q));
    double best = std::numeric_limits<double>::infinity();
    for (int mask = 0; mask < (1 << (2 * g)); ++mask) {
        VecC eta = VecC::Zero(g);
        for (int i = 0; i < g; ++i) {
            if (mask & (1 << i)) eta(i) += 0.5;
            if (mask & (1 << (g + i))) eta += 0.5 * tau_.col(i);
        }
        const VecC K = -ae + eta;
        double worst = 0;
        for (std::size_t k = 0; k < qs.size(); ++k) {
            const VecC z = reduce(aq[k] + K);
            const ThetaValue t = theta_grad(z);
            worst = std::max(worst, std::abs(t.value) / (1.0 + t.gradient.norm()));
        }
        if (worst < best) {
            best = worst;
            K_ = reduce(K);
        }
    }
    if (best > 1e-6) throw PeriodComputationFailed("Riemann constants not identified (residual " + std::to_string(best) + ")");
}

}  // namespace tyurin
