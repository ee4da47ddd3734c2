#include "tyurin/tyurin.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "tyurin/errors.hpp"
#include "tyurin/quadrature.hpp"

namespace tyurin {

Chart disk_chart(const Curve& curve, const DiskSpec& d) {
    try {
        if (d.branch >= 0) return curve.branch_chart(d.branch, d.radius);
        return curve.disk_chart(d.center, d.sheet, d.radius);
    } catch (const ChartError& e) {
        throw InvalidDisk(e.what());
    }
}

MatC MatLaurent::coeff(int e) const {
    const int k = e - val;
    if (k >= 0 && k < static_cast<int>(c.size())) return c[k];
    const int n = c.empty() ? 0 : static_cast<int>(c[0].rows());
    return MatC::Zero(n, n);
}

VecC LaurentTail::eval(cplx z, cplx zt) const {
    const cplx s = z - zt;
    VecC r = VecC::Zero(coeffs.empty() ? 0 : coeffs[0].size());
    cplx sp = 1.0 / s;
    for (const auto& c : coeffs) {
        r += c * sp;
        sp /= s;
    }
    return r;
}

std::vector<TyurinPoint> tyurin_points(const NormalForm& P, const TyurinOptions& opt) {
    struct Root {
        cplx z;
        int row;
    };
    std::vector<Root> all;
    for (int j = 0; j < P.n; ++j) {
        auto r = poly::roots(P.p(j), false);
        const Poly dp = poly::derivative(P.p(j));
        for (std::size_t a = 0; a < r.size(); ++a) {
            double sep = std::numeric_limits<double>::infinity();
            for (std::size_t b = 0; b < r.size(); ++b)
                if (a != b) sep = std::min(sep, std::abs(r[a] - r[b]));
            if (sep > 1e-3)
                for (int it = 0; it < 3; ++it) r[a] -= poly::eval(P.p(j), r[a]) / poly::eval(dp, r[a]);
            all.push_back({r[a], j});
        }
    }
    // Single-linkage clustering.
    const int m = static_cast<int>(all.size());
    std::vector<int> parent(m);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    for (int a = 0; a < m; ++a)
        for (int b = a + 1; b < m; ++b)
            if (std::abs(all[a].z - all[b].z) < opt.cluster_radius * std::max(1.0, std::abs(all[a].z)))
                parent[find(a)] = find(b);
    std::vector<TyurinPoint> pts;
    std::vector<int> id(m, -1);
    for (int a = 0; a < m; ++a) {
        const int r = find(a);
        if (id[r] < 0) {
            id[r] = static_cast<int>(pts.size());
            pts.push_back(TyurinPoint{0.0, 0, std::vector<int>(P.n, 0), {}});
        }
        TyurinPoint& t = pts[id[r]];
        t.z += all[a].z;
        t.mult += 1;
        t.row_mult[all[a].row] += 1;
    }
    for (auto& t : pts) t.z /= double(t.mult);
    std::sort(pts.begin(), pts.end(), [](const TyurinPoint& a, const TyurinPoint& b) {
        return a.z.real() != b.z.real() ? a.z.real() < b.z.real() : a.z.imag() < b.z.imag();
    });
    return pts;
}

namespace {

using L = Laurent<cplx>;

L taylor(const Poly& p, cplx at, int len) {
    if (p.empty()) return L(0, std::vector<cplx>(len, 0.0));
    return L(0, taylor_shift(p, at, len).coeffs());
}

MatLaurent assemble(const std::vector<std::vector<L>>& e, int top) {
    const int n = static_cast<int>(e.size());
    int val = 0;
    for (const auto& row : e)
        for (const auto& x : row) val = std::min(val, x.val());
    MatLaurent M;
    M.val = val;
    M.c.assign(std::max(top - val + 1, 0), MatC::Zero(n, n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = val; k <= top; ++k) {
                if (k > e[i][j].top()) throw TruncationError("Laurent expansion of P^{-1} lost too many orders");
                M.c[k - val](i, j) = e[i][j].coeff(k);
            }
    return M;
}

}  // namespace

TyurinBasis tyurin_basis(const NormalForm& P, const TyurinOptions& opt) {
    const int n = P.n;
    const int N = P.total_degree();
    for (int j = 0; j < n; ++j)
        for (auto z : poly::roots(P.p(j), false))
            if (std::abs(std::abs(z) - P.disk.radius) < 1e-8 * P.disk.radius)
                throw InvalidDisk("zero of det P on the disk boundary");
    TyurinBasis B;
    B.points = tyurin_points(P, opt);
    B.top = N + opt.extra_orders;
    const int W = B.top + 2 * N + 2;

    for (const auto& t : B.points) {
        std::vector<std::vector<L>> inv(n, std::vector<L>(n, L(0, {0.0}))), tay(n, std::vector<L>(n));
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) tay[j][k] = taylor(P.P(j, k), t.z, W + 1);
        for (int j = 0; j < n; ++j) {
            const L pj = L::from_series(Series<cplx>(taylor_shift(P.p(j), t.z, W + 1)), t.row_mult[j], W);
            const L ip = pj.inverse();
            inv[j][j] = ip;
            for (int k = 0; k < j; ++k) {
                L acc(0, {0.0});
                bool first = true;
                for (int l = k; l < j; ++l) {
                    if (P.P(j, l).empty()) continue;
                    const L term = tay[j][l] * inv[l][k];
                    acc = first ? term : acc + term;
                    first = false;
                }
                inv[j][k] = first ? L(0, std::vector<cplx>(W + 1, 0.0)) : -(ip * acc);
            }
            for (int k = j + 1; k < n; ++k) inv[j][k] = L(0, std::vector<cplx>(W + 1, 0.0));
        }
        B.Pinv.push_back(assemble(inv, B.top));
        B.Ptaylor.push_back(assemble(tay, B.top));
    }

    // v = C_-[z^k e_j^t P^{-1}]
    for (int j = 0; j < n; ++j) {
        const int dj = poly::degree(P.p(j));
        for (int k = 0; k < dj; ++k) {
            TyurinVector v;
            for (int ti = 0; ti < static_cast<int>(B.points.size()); ++ti) {
                const auto& t = B.points[ti];
                const MatLaurent& M = B.Pinv[ti];
                // (z_t + s)^k
                Poly zk(k + 1, 0.0);
                zk[k] = 1.0;
                const Series<cplx> zs = taylor_shift(zk, t.z, k + 1);
                LaurentTail tail{ti, {}};
                for (int m = 1; m <= -M.val; ++m) {
                    VecC c = VecC::Zero(n);
                    for (int i = 0; i <= k; ++i) c += zs[i] * M.coeff(-m - i).row(j).transpose();
                    tail.coeffs.push_back(c);
                }
                double scale = 0;
                for (const auto& c : tail.coeffs) scale = std::max(scale, c.cwiseAbs().maxCoeff());
                while (!tail.coeffs.empty() && tail.coeffs.back().cwiseAbs().maxCoeff() <= 1e-13 * scale)
                    tail.coeffs.pop_back();
                v.push_back(tail);
            }
            B.v.push_back(v);
            B.index.push_back({j, k});
        }
    }
    return B;
}

std::vector<LaurentTail> cauchy_minus(const std::function<VecC(cplx)>& f, const std::vector<std::pair<cplx, int>>& poles,
                                      double disk_radius, int nodes) {
    std::vector<LaurentTail> out;
    for (std::size_t i = 0; i < poles.size(); ++i) {
        const auto [a, order] = poles[i];
        if (std::abs(a) >= disk_radius * (1 - 1e-10)) throw InvalidDisk("pole on or outside the disk boundary");
        double rho = 0.45 * (disk_radius - std::abs(a));
        for (std::size_t j = 0; j < poles.size(); ++j)
            if (j != i) rho = std::min(rho, 0.45 * std::abs(poles[j].first - a));
        LaurentTail tail{static_cast<int>(i), {}};
        double scale = 0;
        for (int m = 1; m <= order; ++m) {
            const VecC c = circle_residue<VecC>([&](cplx z) -> VecC { return f(z) * std::pow(z - a, m - 1); }, a, rho, nodes);
            scale = std::max(scale, c.cwiseAbs().maxCoeff());
            tail.coeffs.push_back(c);
        }
        while (!tail.coeffs.empty() && tail.coeffs.back().cwiseAbs().maxCoeff() <= 1e-11 * std::max(scale, 1.0))
            tail.coeffs.pop_back();
        if (!tail.coeffs.empty()) out.push_back(tail);
    }
    return out;
}

cplx pair_tail(const TyurinVector& v, const std::vector<std::vector<VecC>>& nu) {
    cplx acc = 0;
    for (const auto& tail : v)
        for (std::size_t m = 0; m < tail.coeffs.size(); ++m) acc += tail.coeffs[m].cwiseProduct(nu[tail.point][m]).sum();
    return acc;
}

TyurinData bnt_matrix(const NormalForm& P, const CurveContext& ctx, const TyurinOptions& opt) {
    const Curve& C = ctx.curve();
    const int n = P.n, g = ctx.genus();
    TyurinData D;
    D.P = P;
    D.chart = disk_chart(C, P.disk);
    bool inf_inside = true;
    try {
        const cplx zi = C.to_chart(D.chart, ctx.infinity());
        inf_inside = std::abs(zi) < P.disk.radius;
    } catch (const ChartError&) {
        inf_inside = false;
    }
    if (inf_inside) throw InvalidDisk("the marked point infinity lies in the disk");
    D.basis = tyurin_basis(P, opt);
    for (auto& t : D.basis.points) {
        if (!(std::abs(t.z) < P.disk.radius)) throw InvalidDisk("Tyurin point outside the disk");
        t.point = C.from_chart(D.chart, t.z);
    }
    const int K = D.basis.top + 1;
    for (const auto& t : D.basis.points) {
        const LocalSeries ls = C.local_series(D.chart, t.z, K);
        std::vector<Series<cplx>> u;
        Series<cplx> xp = Series<cplx>::constant(1.0, K);
        for (int k = 0; k < g; ++k) {
            u.push_back(xp * ls.W);
            xp = xp * ls.X;
        }
        std::vector<VecC> om(K, VecC(g));
        for (int m = 0; m < K; ++m) {
            VecC um(g);
            for (int k = 0; k < g; ++k) um(k) = u[k][m];
            om[m] = ctx.Ainv().transpose() * um;
        }
        D.local.push_back(ls);
        D.u_series.push_back(u);
        D.omega.push_back(om);
    }
    const int N = D.size();
    if (N != n * g) throw InvalidDivisor("Tyurin divisor has degree " + std::to_string(N) + ", expected n g");
    D.T = MatC::Zero(N, N);
    for (int r = 0; r < N; ++r)
        for (const auto& tail : D.basis.v[r])
            for (std::size_t m = 0; m < tail.coeffs.size(); ++m)
                for (int i = 0; i < g; ++i)
                    for (int a = 0; a < n; ++a) D.T(r, i * n + a) += tail.coeffs[m](a) * D.omega[tail.point][m](i);
    Eigen::JacobiSVD<MatC> svd(D.T);
    D.singular_values = svd.singularValues();
    return D;
}

Coranks coranks(const TyurinData& data, double threshold) {
    const VecR& s = data.singular_values;
    const double smax = s.size() ? s(0) : 0.0;
    int k = 0;
    for (int i = 0; i < s.size(); ++i) {
        const double r = smax > 0 ? s(i) / smax : 0.0;
        if (r > 0.1 * threshold && r < 10 * threshold)
            throw AmbiguousCorank("singular value ratio " + std::to_string(r) + " straddles the corank threshold");
        if (r < threshold) ++k;
    }
    return Coranks{data.n() + k, k};
}

}  // namespace tyurin
