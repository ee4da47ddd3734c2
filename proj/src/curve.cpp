#include "tyurin/curve.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "tyurin/errors.hpp"
#include "tyurin/poly.hpp"
#include "tyurin/quadrature.hpp"

namespace tyurin {

namespace {

// p(x) / (x - a), remainder dropped.
std::vector<cplx> deflate(const std::vector<cplx>& p, cplx a) {
    const int n = static_cast<int>(p.size()) - 1;
    std::vector<cplx> q(n);
    cplx carry = 0;
    for (int k = n; k >= 1; --k) {
        carry = p[k] + carry * a;
        q[k - 1] = carry;
    }
    return q;
}

}  // namespace

Curve::Curve(std::vector<cplx> Q) : Q_(std::move(Q)) {
    while (Q_.size() > 1 && Q_.back() == cplx(0)) Q_.pop_back();
    const int d = static_cast<int>(Q_.size()) - 1;
    if (d < 5 || d % 2 == 0)
        throw DegenerateCurve("Q must have odd degree 2g+1 with g >= 2, got degree " + std::to_string(d));
    g_ = (d - 1) / 2;
    dQ_ = poly::derivative(Q_);
    e_ = poly::roots(Q_);
    double scale = 1.0;
    for (auto r : e_) scale = std::max(scale, std::abs(r));
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j)
            if (std::abs(e_[i] - e_[j]) < 1e-6 * scale)
                throw DegenerateCurve("Q is not squarefree (repeated root near " + std::to_string(e_[i].real()) +
                                      (e_[i].imag() < 0 ? "" : "+") + std::to_string(e_[i].imag()) + "i)");
    for (auto& r : e_) {
        if (std::abs(r.real()) < 1e-14 * scale) r.real(0.0);
        if (std::abs(r.imag()) < 1e-14 * scale) r.imag(0.0);
    }
    std::sort(e_.begin(), e_.end(), [](cplx a, cplx b) {
        if (std::abs(a.real() - b.real()) > 1e-9) return a.real() < b.real();
        return a.imag() < b.imag();
    });
}

cplx Curve::Qval(cplx x) const { return poly::eval(Q_, x); }
cplx Curve::dQval(cplx x) const { return poly::eval(dQ_, x); }

cplx Curve::yref(cplx x) const {
    cplx y = sqrt_principal(leading());
    for (auto e : e_) y *= sqrt_principal(x - e);
    return y;
}

double Curve::branch_distance(cplx x) const {
    double d = std::numeric_limits<double>::infinity();
    for (auto e : e_) d = std::min(d, std::abs(x - e));
    return d;
}

SurfacePoint Curve::point(cplx x, int sheet) const {
    for (int i = 0; i < static_cast<int>(e_.size()); ++i)
        if (std::abs(x - e_[i]) < 1e-13 * (1 + std::abs(x))) return branch_point(i);
    return SurfacePoint{x, (sheet >= 0 ? 1.0 : -1.0) * yref(x), -1};
}

SurfacePoint Curve::point_with_y(cplx x, cplx y) const {
    for (int i = 0; i < static_cast<int>(e_.size()); ++i)
        if (std::abs(x - e_[i]) < 1e-13 * (1 + std::abs(x))) return branch_point(i);
    return SurfacePoint{x, y, -1};
}

SurfacePoint Curve::branch_point(int i) const { return SurfacePoint{e_[i], 0.0, i}; }

SurfacePoint Curve::involution(const SurfacePoint& p) const {
    SurfacePoint q = p;
    q.y = -p.y;
    return q;
}

int Curve::sheet_of(const SurfacePoint& p) const {
    const cplx r = yref(p.x);
    return std::abs(p.y - r) <= std::abs(p.y + r) ? 1 : -1;
}

Chart Curve::disk_chart(cplx center, int sheet, double radius) const {
    const double lim = branch_distance(center);
    if (!(radius > 0) || radius >= lim)
        throw ChartError("disk radius " + std::to_string(radius) + " must be below branch distance " +
                         std::to_string(lim));
    Chart c;
    c.kind = ChartKind::Disk;
    c.center = center;
    c.y_center = (sheet >= 0 ? 1.0 : -1.0) * yref(center);
    c.radius = radius;
    return c;
}

Chart Curve::branch_chart(int i, double radius) const {
    double lim = std::numeric_limits<double>::infinity();
    for (int j = 0; j < static_cast<int>(e_.size()); ++j)
        if (j != i) lim = std::min(lim, std::abs(e_[i] - e_[j]));
    lim = std::sqrt(lim);
    if (!(radius > 0) || radius >= lim)
        throw ChartError("branch chart radius " + std::to_string(radius) + " must be below " + std::to_string(lim));
    Chart c;
    c.kind = ChartKind::Branch;
    c.branch = i;
    c.center = e_[i];
    c.y_center = sqrt_principal(dQval(e_[i]));
    c.radius = radius;
    return c;
}

Chart Curve::infinity_chart(double radius) const {
    double m = 0;
    for (auto e : e_) m = std::max(m, std::abs(e));
    const double lim = m > 0 ? 1.0 / std::sqrt(m) : 1e300;
    if (!(radius > 0) || radius >= lim) throw ChartError("infinity chart radius too large");
    Chart c;
    c.kind = ChartKind::Infinity;
    c.branch = -2;
    c.radius = radius;
    return c;
}

ChartPoint Curve::at(const Chart& c, cplx z) const {
    ChartPoint p;
    p.z = z;
    switch (c.kind) {
        case ChartKind::Plane:
            throw ChartError("plane chart points need a lifted path");
        case ChartKind::Disk: {
            p.x = c.center + z;
            cplx y = c.y_center;
            for (auto e : e_) y *= sqrt_principal((p.x - e) / (c.center - e));
            p.y = y;
            p.dxdz = 1.0;
            p.w = 1.0 / y;
            break;
        }
        case ChartKind::Branch: {
            const cplx e0 = c.center;
            p.x = e0 + z * z;
            cplx G = c.y_center;
            for (int j = 0; j < static_cast<int>(e_.size()); ++j)
                if (j != c.branch) G *= sqrt_principal((p.x - e_[j]) / (e0 - e_[j]));
            p.y = z * G;
            p.dxdz = 2.0 * z;
            p.w = 2.0 / G;
            break;
        }
        case ChartKind::Infinity: {
            if (z == cplx(0)) throw ChartError("x = infinity has no finite chart data");
            p.x = 1.0 / (z * z);
            cplx H = sqrt_principal(leading());
            for (auto e : e_) H *= sqrt_principal(1.0 - e * z * z);
            p.y = H * std::pow(z, -(2 * g_ + 1));
            p.dxdz = -2.0 / (z * z * z);
            p.w = -2.0 * std::pow(z, 2 * g_ - 2) / H;
            break;
        }
    }
    return p;
}

cplx Curve::to_chart(const Chart& c, const SurfacePoint& p) const {
    cplx z;
    switch (c.kind) {
        case ChartKind::Plane:
            return p.x;
        case ChartKind::Disk: {
            if (p.is_branch()) throw ChartError("branch point outside disk chart");
            z = p.x - c.center;
            if (std::abs(z) >= c.radius) throw ChartError("point outside disk chart");
            const cplx y = at(c, z).y;
            if (std::abs(y - p.y) > 1e-8 * (1 + std::abs(y))) throw ChartError("point on the other sheet of disk chart");
            return z;
        }
        case ChartKind::Branch: {
            if (p.branch == c.branch) return 0.0;
            z = sqrt_principal(p.x - c.center);
            if (std::abs(z) >= c.radius) throw ChartError("point outside branch chart");
            const cplx y = at(c, z).y;
            return std::abs(y - p.y) <= std::abs(y + p.y) ? z : -z;
        }
        case ChartKind::Infinity: {
            if (p.branch == -2) return 0.0;
            z = 1.0 / sqrt_principal(p.x);
            if (std::abs(z) >= c.radius) throw ChartError("point outside infinity chart");
            const cplx y = at(c, z).y;
            return std::abs(y - p.y) <= std::abs(y + p.y) ? z : -z;
        }
    }
    return z;
}

SurfacePoint Curve::from_chart(const Chart& c, cplx z) const {
    if (c.kind == ChartKind::Branch && z == cplx(0)) return branch_point(c.branch);
    if (c.kind == ChartKind::Infinity && z == cplx(0)) return SurfacePoint{0.0, 0.0, -2};
    const ChartPoint p = at(c, z);
    return SurfacePoint{p.x, p.y, -1};
}

LocalSeries Curve::local_series(const Chart& c, cplx z0, int order) const {
    using S = Series<cplx>;
    const S Z = S::linear(z0, order);
    const ChartPoint p0 = at(c, z0);
    LocalSeries out;
    switch (c.kind) {
        case ChartKind::Plane:
        case ChartKind::Disk: {
            out.X = S::linear(p0.x, order);
            out.Y = compose(Q_, out.X).sqrt(p0.y);
            out.W = out.Y.inverse();
            break;
        }
        case ChartKind::Branch: {
            out.X = Z * Z + c.center;
            const S Qt = compose(deflate(Q_, c.center), out.X);
            const S G = Qt.sqrt(2.0 / p0.w);
            out.Y = Z * G;
            out.W = 2.0 * G.inverse();
            break;
        }
        case ChartKind::Infinity: {
            const S Zi = Z.inverse();
            out.X = Zi * Zi;
            S H2 = S::constant(leading(), order);
            for (auto e : e_) H2 = H2 * (S::constant(1.0, order) - e * (Z * Z));
            const S H = H2.sqrt(-2.0 * std::pow(z0, 2 * g_ - 2) / p0.w);
            S Zp = S::constant(1.0, order);
            for (int k = 0; k < 2 * g_ + 1; ++k) Zp = Zp * Zi;
            out.Y = Zp * H;
            S Zq = S::constant(1.0, order);
            for (int k = 0; k < 2 * g_ - 2; ++k) Zq = Zq * Z;
            out.W = -2.0 * (Zq * H.inverse());
            break;
        }
    }
    return out;
}

cplx Curve::affine_term(const Chart& c, cplx z) const {
    switch (c.kind) {
        case ChartKind::Plane:
        case ChartKind::Disk: {
            const cplx x = c.kind == ChartKind::Disk ? c.center + z : z;
            return -dQval(x) / (4.0 * Qval(x));
        }
        case ChartKind::Branch: {
            const cplx x = c.center + z * z;
            cplx s = 0;
            for (int j = 0; j < static_cast<int>(e_.size()); ++j)
                if (j != c.branch) s += 1.0 / (x - e_[j]);
            return -0.5 * z * s;
        }
        case ChartKind::Infinity: {
            cplx s = double(g_ - 1) / z;
            for (auto e : e_) s += 0.5 * e * z / (1.0 - e * z * z);
            return s;
        }
    }
    return 0;
}

cplx Curve::continue_y(cplx x0, cplx y0, cplx x1) const {
    cplx y = y0;
    for (auto e : e_) y *= sqrt_principal((x1 - e) / (x0 - e));
    return y;
}

// ---------------------------------------------------------------- segments

Segment Segment::line(const Chart& c, cplx from, cplx to) {
    Segment s;
    s.shape = Shape::Line;
    s.chart = c;
    s.a = from;
    s.b = to;
    return s;
}

Segment Segment::arc(const Chart& c, cplx center, double radius, double theta0, double dtheta) {
    Segment s;
    s.shape = Shape::Arc;
    s.chart = c;
    s.a = center;
    s.r = radius;
    s.th0 = theta0;
    s.dth = dtheta;
    return s;
}

cplx Segment::z(double s) const {
    if (shape == Shape::Line) return a + s * (b - a);
    return a + std::polar(r, th0 + dth * s);
}

cplx Segment::dz(double s) const {
    if (shape == Shape::Line) return b - a;
    return I * dth * std::polar(r, th0 + dth * s);
}

double Segment::length() const { return shape == Shape::Line ? std::abs(b - a) : r * std::abs(dth); }

Segment Segment::reversed() const {
    Segment s = *this;
    if (shape == Shape::Line) {
        std::swap(s.a, s.b);
    } else {
        s.th0 = th0 + dth;
        s.dth = -dth;
    }
    return s;
}

bool Segment::cancels(const Segment& next) const {
    if (shape != next.shape || chart.kind != next.chart.kind || chart.branch != next.chart.branch) return false;
    if (std::abs(chart.center - next.chart.center) > 1e-14) return false;
    const double tol = 1e-12 * (1 + length());
    if (shape == Shape::Line) return std::abs(a - next.b) < tol && std::abs(b - next.a) < tol;
    return std::abs(a - next.a) < tol && std::abs(r - next.r) < tol && std::abs(dth + next.dth) < tol &&
           std::abs(std::polar(1.0, th0 + dth) - std::polar(1.0, next.th0)) < tol;
}

Path& Path::operator+=(const Path& o) {
    segments.insert(segments.end(), o.segments.begin(), o.segments.end());
    return *this;
}

Path operator+(Path a, const Path& b) { return a += b; }

Path Path::reversed() const {
    Path p;
    for (auto it = segments.rbegin(); it != segments.rend(); ++it) p.segments.push_back(it->reversed());
    return p;
}

Path Path::simplified() const {
    Path p;
    for (const auto& s : segments) {
        if (!p.segments.empty() && p.segments.back().cancels(s))
            p.segments.pop_back();
        else
            p.segments.push_back(s);
    }
    return p;
}

// ------------------------------------------------------------ lifted paths

LiftedPath::LiftedPath(const Curve& curve, Path path, cplx y_start)
    : curve_(&curve), path_(std::move(path)), y_start_(y_start) {
    cplx y = y_start;
    bool have_prev = false;
    cplx prev_x{};
    for (const auto& seg : path_.segments) {
        Grid grid;
        if (seg.chart.kind == ChartKind::Plane) {
            if (have_prev && std::abs(seg.z(0) - prev_x) > 1e-10 * (1 + std::abs(prev_x)))
                throw PathError("path is not continuous");
            double s = 0;
            cplx x = seg.z(0);
            grid.s.push_back(0);
            grid.y.push_back(y);
            const double len = std::max(seg.length(), 1e-300);
            while (s < 1.0) {
                const double d = curve.branch_distance(x);
                if (d < 1e-9) throw PathError("path passes through a branch point");
                double ds = std::min(0.2 * d / len, 1.0 - s);
                ds = std::min(ds, 0.02);
                const cplx x1 = seg.z(s + ds);
                y = curve.continue_y(x, y, x1);
                s += ds;
                x = x1;
                grid.s.push_back(s);
                grid.y.push_back(y);
            }
            grid.s.back() = 1.0;
            prev_x = x;
        } else {
            const ChartPoint p0 = curve.at(seg.chart, seg.z(0));
            if (have_prev) {
                if (std::abs(p0.x - prev_x) > 1e-10 * (1 + std::abs(prev_x)) ||
                    std::abs(p0.y - y) > 1e-8 * (1 + std::abs(y)))
                    throw PathError("chart segment does not continue the path");
            } else if (std::abs(p0.y - y) > 1e-8 * (1 + std::abs(y))) {
                throw PathError("start value of y disagrees with chart");
            }
            const ChartPoint p1 = curve.at(seg.chart, seg.z(1));
            y = p1.y;
            prev_x = p1.x;
        }
        have_prev = true;
        grids_.push_back(std::move(grid));
    }
    y_end_ = y;
}

cplx LiftedPath::x_start() const {
    const auto& s = path_.segments.front();
    return s.chart.kind == ChartKind::Plane ? s.z(0) : curve_->at(s.chart, s.z(0)).x;
}

cplx LiftedPath::x_end() const {
    const auto& s = path_.segments.back();
    return s.chart.kind == ChartKind::Plane ? s.z(1) : curve_->at(s.chart, s.z(1)).x;
}

ChartPoint LiftedPath::at(int seg, double s) const {
    const Segment& sg = path_.segments[seg];
    if (sg.chart.kind != ChartKind::Plane) return curve_->at(sg.chart, sg.z(s));
    const Grid& gr = grids_[seg];
    auto it = std::upper_bound(gr.s.begin(), gr.s.end(), s);
    std::size_t k = (it == gr.s.begin()) ? 0 : static_cast<std::size_t>(it - gr.s.begin()) - 1;
    if (k + 1 < gr.s.size() && (gr.s[k + 1] - s) < (s - gr.s[k])) ++k;
    ChartPoint p;
    p.z = sg.z(s);
    p.x = p.z;
    p.y = curve_->continue_y(sg.z(gr.s[k]), gr.y[k], p.x);
    p.dxdz = 1.0;
    p.w = 1.0 / p.y;
    return p;
}

std::vector<LiftedPath::Node> LiftedPath::nodes(int order, double factor, const std::vector<cplx>& poles) const {
    const GaussRule& rule = gauss_legendre(order);
    std::vector<Node> out;
    for (int si = 0; si < size(); ++si) {
        const Segment& sg = path_.segments[si];
        // Singularities in this segment's chart coordinate.
        std::vector<cplx> sing;
        auto add_x = [&](cplx xs) {
            switch (sg.chart.kind) {
                case ChartKind::Plane:
                    sing.push_back(xs);
                    break;
                case ChartKind::Disk:
                    sing.push_back(xs - sg.chart.center);
                    break;
                case ChartKind::Branch: {
                    const cplx r = sqrt_principal(xs - sg.chart.center);
                    sing.push_back(r);
                    sing.push_back(-r);
                    break;
                }
                case ChartKind::Infinity: {
                    if (xs == cplx(0)) break;
                    const cplx r = 1.0 / sqrt_principal(xs);
                    sing.push_back(r);
                    sing.push_back(-r);
                    break;
                }
            }
        };
        const auto& e = curve_->branch_points();
        for (int j = 0; j < static_cast<int>(e.size()); ++j)
            if (!(sg.chart.kind == ChartKind::Branch && j == sg.chart.branch)) add_x(e[j]);
        for (auto q : poles) add_x(q);

        const double total = sg.length();
        std::vector<std::pair<double, double>> stack{{0.0, 1.0}}, pieces;
        while (!stack.empty()) {
            auto [s0, s1] = stack.back();
            stack.pop_back();
            const cplx zm = sg.z(0.5 * (s0 + s1));
            double d = std::numeric_limits<double>::infinity();
            for (auto z : sing) d = std::min(d, std::abs(zm - z));
            const double len = total * (s1 - s0);
            if (len > factor * d && (s1 - s0) > 1e-9) {
                const double sm = 0.5 * (s0 + s1);
                stack.push_back({sm, s1});
                stack.push_back({s0, sm});
            } else {
                pieces.push_back({s0, s1});
            }
        }
        std::sort(pieces.begin(), pieces.end());
        for (auto [s0, s1] : pieces) {
            const double h = 0.5 * (s1 - s0), m = 0.5 * (s1 + s0);
            for (int k = 0; k < order; ++k) out.push_back({si, m + h * rule.nodes(k), h * rule.weights(k)});
        }
    }
    return out;
}

}  // namespace tyurin
