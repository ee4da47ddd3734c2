#pragma once

// Hyperelliptic curve y^2 = Q(x), deg Q = 2g+1, with local charts and
// paths lifted to the surface.

#include <optional>
#include <vector>

#include "tyurin/series.hpp"
#include "tyurin/types.hpp"

namespace tyurin {

// A point of the curve. y is stored explicitly; `branch` >= 0 marks a finite
// branch point, `branch == -2` the branch point at x = infinity.
struct SurfacePoint {
    cplx x{};
    cplx y{};
    int branch = -1;
    bool is_branch() const { return branch != -1; }
};

enum class ChartKind {
    Plane,     // x itself; y carried by continuation along a path
    Disk,      // z = x - center on a disk free of branch points
    Branch,    // x = e + z^2 at a finite branch point
    Infinity,  // x = z^-2 at the branch point at infinity
};

struct Chart {
    ChartKind kind = ChartKind::Plane;
    cplx center{};      // Disk: center; Branch: the branch point
    cplx y_center{};    // Disk: y(center); Branch: G(0)
    int branch = -1;    // Branch: index into the branch point list
    double radius = 0;  // validity radius in z
};

// Evaluation data of a point in a chart: x(z), y(z), dx/dz and (dx/dz)/y.
struct ChartPoint {
    cplx z{}, x{}, y{}, dxdz{}, w{};
};

struct LocalSeries {
    Series<cplx> X, Y, W;  // x, y and (dx/dz)/y at z0 + s
};

class Curve {
public:
    explicit Curve(std::vector<cplx> Q);

    int genus() const { return g_; }
    const std::vector<cplx>& Q() const { return Q_; }
    const std::vector<cplx>& branch_points() const { return e_; }
    cplx leading() const { return Q_.back(); }

    cplx Qval(cplx x) const;
    cplx dQval(cplx x) const;
    // Reference branch sqrt(lc) * prod sqrt_principal(x - e).
    cplx yref(cplx x) const;
    double branch_distance(cplx x) const;

    SurfacePoint point(cplx x, int sheet) const;
    SurfacePoint point_with_y(cplx x, cplx y) const;
    SurfacePoint branch_point(int i) const;
    SurfacePoint involution(const SurfacePoint& p) const;
    int sheet_of(const SurfacePoint& p) const;

    Chart disk_chart(cplx center, int sheet, double radius) const;
    Chart branch_chart(int i, double radius) const;
    Chart infinity_chart(double radius) const;

    ChartPoint at(const Chart& c, cplx z) const;
    // Chart coordinate of p; throws ChartError if outside the chart.
    cplx to_chart(const Chart& c, const SurfacePoint& p) const;
    SurfacePoint from_chart(const Chart& c, cplx z) const;
    LocalSeries local_series(const Chart& c, cplx z0, int order) const;
    // (1/2) d/dz ln((dx/dz)/y): the affine part shared by F and d ln h.
    cplx affine_term(const Chart& c, cplx z) const;

    // Continue y from (x0, y0) to x1 along the straight segment (short step).
    cplx continue_y(cplx x0, cplx y0, cplx x1) const;

private:
    std::vector<cplx> Q_, dQ_;
    std::vector<cplx> e_;
    int g_ = 0;
};

// Straight line or circular arc in a chart; s runs over [0, 1].
struct Segment {
    enum class Shape { Line, Arc } shape = Shape::Line;
    Chart chart;
    cplx a{}, b{};            // Line: endpoints. Arc: a is the center.
    double r = 0, th0 = 0, dth = 0;

    static Segment line(const Chart& c, cplx from, cplx to);
    static Segment arc(const Chart& c, cplx center, double radius, double theta0, double dtheta);

    cplx z(double s) const;
    cplx dz(double s) const;
    double length() const;
    Segment reversed() const;
    bool cancels(const Segment& next) const;
};

struct Path {
    std::vector<Segment> segments;
    Path& operator+=(const Path& o);
    Path reversed() const;
    // Drops adjacent segment pairs that retrace each other.
    Path simplified() const;
};
Path operator+(Path a, const Path& b);

// A path together with the branch of y along it.
class LiftedPath {
public:
    LiftedPath() = default;
    LiftedPath(const Curve& curve, Path path, cplx y_start);

    const Path& path() const { return path_; }
    int size() const { return static_cast<int>(path_.segments.size()); }
    ChartPoint at(int seg, double s) const;
    // z'(s) for segment seg.
    cplx dz(int seg, double s) const { return path_.segments[seg].dz(s); }
    cplx y_end() const { return y_end_; }
    cplx y_start() const { return y_start_; }
    cplx x_start() const;
    cplx x_end() const;

    // Composite Gauss-Legendre nodes (segment, s, weight) with pieces no
    // longer than `factor` times the distance to branch points and `poles`.
    struct Node {
        int seg;
        double s, weight;
    };
    std::vector<Node> nodes(int order, double factor, const std::vector<cplx>& poles = {}) const;

private:
    const Curve* curve_ = nullptr;
    Path path_;
    cplx y_start_{}, y_end_{};
    struct Grid {
        std::vector<double> s;
        std::vector<cplx> y;
    };
    std::vector<Grid> grids_;
};

// Integral along a lifted path of f(ChartPoint) * dz.
template <typename Value, typename F>
Value integrate(const LiftedPath& lp, F&& f, int order, double factor, const std::vector<cplx>& poles = {}) {
    Value acc{};
    bool first = true;
    for (const auto& nd : lp.nodes(order, factor, poles)) {
        const ChartPoint cp = lp.at(nd.seg, nd.s);
        Value term = f(cp) * (nd.weight * lp.dz(nd.seg, nd.s));
        if (first) {
            acc = term;
            first = false;
        } else {
            acc += term;
        }
    }
    return acc;
}

}  // namespace tyurin
