#include "tyurin/normal_form.hpp"

#include <algorithm>
#include <cmath>

#include "tyurin/errors.hpp"
#include "tyurin/quadrature.hpp"

namespace tyurin {

PolyMatrix PolyMatrix::identity(int n) {
    PolyMatrix m(n);
    for (int i = 0; i < n; ++i) m(i, i) = Poly{1.0};
    return m;
}

int PolyMatrix::max_degree() const {
    int d = -1;
    for (const auto& p : e_) d = std::max(d, poly::degree(p));
    return d;
}

MatC PolyMatrix::eval(cplx z) const {
    MatC m(n_, n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) m(i, j) = poly::eval((*this)(i, j), z);
    return m;
}

MatC PolyMatrix::eval_derivative(cplx z) const {
    MatC m(n_, n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) m(i, j) = poly::eval(poly::derivative((*this)(i, j)), z);
    return m;
}

Poly PolyMatrix::det() const {
    if (n_ == 0) return {1.0};
    if (n_ == 1) return e_[0];
    Poly d;
    for (int j = 0; j < n_; ++j) {
        PolyMatrix minor(n_ - 1);
        for (int i = 1; i < n_; ++i)
            for (int k = 0, c = 0; k < n_; ++k)
                if (k != j) minor(i - 1, c++) = (*this)(i, k);
        Poly t = poly::mul((*this)(0, j), minor.det());
        d = (j % 2) ? poly::sub(d, t) : poly::add(d, t);
    }
    return poly::trim(d);
}

PolyMatrix operator*(const PolyMatrix& a, const PolyMatrix& b) {
    const int n = a.n();
    PolyMatrix r(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) r(i, j) = poly::add(r(i, j), poly::mul(a(i, k), b(k, j)));
    return r;
}

std::vector<int> NormalForm::degrees() const {
    std::vector<int> d(n);
    for (int j = 0; j < n; ++j) d[j] = poly::degree(p(j));
    return d;
}

int NormalForm::total_degree() const {
    int s = 0;
    for (int d : degrees()) s += d;
    return s;
}

Poly NormalForm::det() const {
    Poly d{1.0};
    for (int j = 0; j < n; ++j) d = poly::mul(d, p(j));
    return d;
}

NormalForm generic_normal_form(const DiskSpec& disk, const std::vector<Poly>& h, const Poly& p) {
    const int n = static_cast<int>(h.size()) + 1;
    NormalForm P{n, disk, PolyMatrix(n)};
    for (int j = 0; j + 1 < n; ++j) {
        P.P(j, j) = Poly{1.0};
        P.P(n - 1, j) = h[j];
    }
    P.P(n - 1, n - 1) = p;
    return P;
}

int zeros_in_disk(const Poly& p, double radius, int nodes) {
    const double scale = poly::norm(p) * std::max(1.0, std::pow(radius, std::max(poly::degree(p), 0)));
    for (int attempt = 0; attempt < 6; ++attempt, nodes *= 2) {
        double total = 0;
        bool smooth = true;
        cplx prev = poly::eval(p, radius);
        for (int k = 1; k <= nodes; ++k) {
            const cplx v = poly::eval(p, std::polar(radius, 2 * pi * k / nodes));
            if (std::abs(v) < 1e-13 * scale) throw InvalidDisk("polynomial vanishes on the disk boundary");
            const double d = std::arg(v / prev);
            if (std::abs(d) > pi / 2) smooth = false;
            total += d;
            prev = v;
        }
        if (smooth) return static_cast<int>(std::lround(total / (2 * pi)));
    }
    throw InvalidDisk("zero of a polynomial too close to the disk boundary");
}

namespace {

struct Factor {
    Poly p;  // monic, zeros inside the disk
    Poly a;  // zeros outside
    int count = 0;
};

Factor split(const Poly& f, double radius) {
    const auto r = poly::roots(f, false);
    std::vector<cplx> in;
    for (auto x : r) {
        if (std::abs(std::abs(x) - radius) < 1e-8 * radius)
            throw InvalidDisk("zero at distance " + std::to_string(std::abs(x)) + " on the disk boundary");
        if (std::abs(x) < radius) in.push_back(x);
    }
    Factor out;
    out.count = static_cast<int>(in.size());
    if (zeros_in_disk(f, radius) != out.count)
        throw IllConditionedReduction("root count and argument principle disagree");
    out.p = poly::from_roots(in);
    auto [a, rem] = poly::divmod(f, out.p);
    if (poly::norm(rem) > 1e-8 * poly::norm(f)) throw IllConditionedReduction("in-disk factor does not divide the pivot");
    out.a = a;
    return out;
}

class Reducer {
public:
    Reducer(PolyMatrix G, const DiskSpec& disk, const ReduceOptions& opt) : W_(std::move(G)), disk_(disk), opt_(opt) {}

    NormalForm run() {
        const int n = W_.n();
        std::vector<Poly> p(n), a(n);
        for (int r = 0; r < n; ++r) {
            while (true) {
                clean_row(r);
                int best = -1, best_count = 0, best_deg = 0;
                std::vector<int> counts(n, 0);
                for (int c = r; c < n; ++c) {
                    if (W_(r, c).empty()) continue;
                    counts[c] = split(W_(r, c), disk_.radius).count;
                    const int d = poly::degree(W_(r, c));
                    if (best < 0 || counts[c] < best_count || (counts[c] == best_count && d < best_deg)) {
                        best = c;
                        best_count = counts[c];
                        best_deg = d;
                    }
                }
                if (best < 0) throw SingularInput("det G vanishes identically");
                swap_columns(r, best);
                const Factor F = split(W_(r, r), disk_.radius);
                bool done = true;
                for (int c = r + 1; c < n; ++c) {
                    if (W_(r, c).empty()) continue;
                    done = false;
                    auto [q, rem] = poly::divmod(W_(r, c), F.p);
                    // col_c <- a col_c - q col_r; row r becomes a * rem exactly.
                    for (int i = 0; i < n; ++i) {
                        if (i == r) continue;
                        W_(i, c) = poly::sub(poly::mul(F.a, W_(i, c)), poly::mul(q, W_(i, r)));
                    }
                    W_(r, c) = poly::mul(F.a, rem);
                }
                if (done) {
                    p[r] = F.p;
                    a[r] = F.a;
                    break;
                }
            }
            for (int i = r + 1; i < n; ++i) clean_entry(i, r, row_scale(i));
        }

        // Lower entries: column k carries the unit 1/a_k; all of row j is
        // only needed modulo prod_{i >= j} p_i, which divides M.
        Poly M{1.0};
        for (const auto& pj : p) M = poly::mul(M, pj);
        std::vector<std::vector<Poly>> E(n, std::vector<Poly>(n));
        for (int k = 0; k < n; ++k) {
            const Poly ainv = poly::inverse_mod(a[k], M);
            for (int i = k + 1; i < n; ++i) E[i][k] = poly::mod(poly::mul(W_(i, k), ainv), M);
        }
        for (int j = 1; j < n; ++j) {
            for (int k = 0; k < j; ++k) {
                const Poly rem = poly::mod(E[j][k], p[j]);
                const Poly q = poly::divmod(poly::sub(E[j][k], rem), p[j]).first;
                for (int i = j + 1; i < n; ++i) E[i][k] = poly::mod(poly::sub(E[i][k], poly::mul(q, E[i][j])), M);
                E[j][k] = rem;
            }
        }

        NormalForm out{n, disk_, PolyMatrix(n)};
        for (int j = 0; j < n; ++j) {
            out.P(j, j) = p[j];
            for (int k = 0; k < j; ++k) {
                Poly f = E[j][k];
                const double s = std::max(poly::norm(f), 1.0);
                for (auto& c : f)
                    if (std::abs(c) < 1e-14 * s) c = 0;
                out.P(j, k) = poly::trim(f);
            }
        }
        return out;
    }

private:
    double row_scale(int r) const {
        double s = 0;
        for (int c = 0; c < W_.n(); ++c) s = std::max(s, poly::norm(W_(r, c)));
        return s;
    }

    // Drops leading coefficients below the zero band; ambiguous ones throw.
    void clean_entry(int i, int c, double scale) {
        Poly& e = W_(i, c);
        while (!e.empty()) {
            const double v = std::abs(e.back());
            if (v < opt_.ill_tol * scale) {
                e.pop_back();
            } else if (v < opt_.zero_tol * scale) {
                throw IllConditionedReduction("coefficient " + std::to_string(v / scale) +
                                              " (relative) inside the zero-tolerance band");
            } else {
                break;
            }
        }
    }

    void clean_row(int r) {
        const double s = row_scale(r);
        for (int c = 0; c < W_.n(); ++c) clean_entry(r, c, s);
    }

    void swap_columns(int a, int b) {
        if (a == b) return;
        for (int i = 0; i < W_.n(); ++i) std::swap(W_(i, a), W_(i, b));
    }

    PolyMatrix W_;
    DiskSpec disk_;
    ReduceOptions opt_;
};

}  // namespace

Reduction reduce(const PolyMatrix& G, const DiskSpec& disk, const ReduceOptions& opt) {
    if (!(disk.radius > 0)) throw InvalidDisk("disk radius must be positive");
    const int n = G.n();
    // det G at a few points as a cheap check for identically vanishing det.
    double dmax = 0, gmax = 0;
    for (int k = 0; k < 7; ++k) {
        const MatC g = G.eval(std::polar(disk.radius * (0.3 + 0.1 * k), 0.7 + 1.3 * k));
        dmax = std::max(dmax, std::abs(g.determinant()));
        gmax = std::max(gmax, max_abs(g));
    }
    if (dmax <= 1e-14 * std::pow(std::max(gmax, 1e-300), n)) throw SingularInput("det G vanishes identically");

    Reduction out;
    out.P = Reducer(G, disk, opt).run();

    // H = P^{-1} G is analytic across the closed disk: Taylor coefficients
    // from the boundary circle.
    const int N = opt.h_nodes, K = opt.h_order;
    std::vector<MatC> coef(K, MatC::Zero(n, n));
    out.h_residual = 0;
    std::vector<MatC> samples(N);
    for (int k = 0; k < N; ++k) {
        const cplx e = std::polar(1.0, 2 * pi * k / N);
        const cplx z = disk.radius * e;
        samples[k] = out.P.eval(z).partialPivLu().solve(G.eval(z));
        for (int m = 0; m < K; ++m) coef[m] += samples[k] * std::pow(std::conj(e), m) / double(N);
    }
    out.H = PolyMatrix(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Poly h(K);
            for (int m = 0; m < K; ++m) h[m] = coef[m](i, j) / std::pow(disk.radius, m);
            out.H(i, j) = h;
        }
    out.min_det_H = std::numeric_limits<double>::infinity();
    for (int k = 0; k < N; ++k) {
        const cplx z = std::polar(disk.radius, 2 * pi * k / N);
        out.h_residual = std::max(out.h_residual, max_abs(G.eval(z) - out.P.eval(z) * out.H.eval(z)));
        for (double rho : {0.0, 0.5, 1.0}) out.min_det_H = std::min(out.min_det_H, std::abs(out.H.eval(rho * z).determinant()));
    }
    return out;
}

ShapeReport validate_shape(const NormalForm& P, int genus) {
    ShapeReport r;
    auto fail = [&](std::string s) {
        r.ok = false;
        r.problems.push_back(std::move(s));
    };
    const auto d = P.degrees();
    for (int j = 0; j < P.n; ++j) {
        const std::string at = "p_" + std::to_string(j + 1);
        if (d[j] < 0) {
            fail(at + " is zero");
            continue;
        }
        if (std::abs(P.p(j)[d[j]] - 1.0) > 1e-12) fail(at + " is not monic");
        if (d[j] > 0) {
            for (auto z : poly::roots(P.p(j)))
                if (!(std::abs(z) < P.disk.radius)) fail(at + " has a zero outside the disk");
        }
        for (int k = 0; k < P.n; ++k) {
            if (k == j) continue;
            const std::string e = "(" + std::to_string(j + 1) + "," + std::to_string(k + 1) + ")";
            const int dk = poly::degree(P.P(j, k));
            if (k > j && dk >= 0) fail("upper entry " + e + " is nonzero");
            if (k < j && dk > d[j] - 1) fail("f_" + e + " has degree " + std::to_string(dk) + " > d_j - 1");
        }
    }
    if (P.total_degree() != P.n * genus)
        fail("sum of degrees is " + std::to_string(P.total_degree()) + ", expected n g = " + std::to_string(P.n * genus));
    return r;
}

std::vector<bool> semistability_flags(const NormalForm& P, int genus) {
    const auto d = P.degrees();
    std::vector<bool> flags;
    int s = 0;
    for (int r = 1; r < P.n; ++r) {
        s += d[r - 1];
        flags.push_back(s <= r * genus);
    }
    return flags;
}

bool shape_preserving(const NormalForm& P, const ModuliTangent& v) {
    if (v.dP.n() != P.n) return false;
    const auto d = P.degrees();
    for (int j = 0; j < P.n; ++j)
        for (int k = 0; k < P.n; ++k) {
            const int dk = poly::degree(v.dP(j, k));
            if (dk < 0) continue;
            if (k > j || dk >= d[j]) return false;
        }
    return true;
}

std::vector<ModuliTangent> tangent_basis(const NormalForm& P) {
    std::vector<ModuliTangent> out;
    const auto d = P.degrees();
    for (int j = 0; j < P.n; ++j)
        for (int k = 0; k <= j; ++k)
            for (int m = 0; m < d[j]; ++m) {
                ModuliTangent v{PolyMatrix(P.n)};
                v.dP(j, k).assign(m + 1, 0.0);
                v.dP(j, k)[m] = 1.0;
                out.push_back(std::move(v));
            }
    return out;
}

ModuliTangent combine(const std::vector<ModuliTangent>& basis, const VecC& c) {
    const int n = basis.empty() ? 0 : basis[0].dP.n();
    ModuliTangent v{PolyMatrix(n)};
    for (std::size_t b = 0; b < basis.size(); ++b)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) v.dP(i, j) = poly::add(v.dP(i, j), poly::scale(basis[b].dP(i, j), c(b)));
    return v;
}

NormalForm displaced(const NormalForm& P, const ModuliTangent& v, cplx eps) {
    if (!shape_preserving(P, v)) throw InvalidTangent("tangent direction changes the normal form shape");
    NormalForm Q = P;
    for (int i = 0; i < P.n; ++i)
        for (int j = 0; j < P.n; ++j) Q.P(i, j) = poly::add(P.P(i, j), poly::scale(v.dP(i, j), eps));
    return Q;
}

}  // namespace tyurin
