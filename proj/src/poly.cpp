#include "tyurin/poly.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tyurin::poly {

cplx eval(const Poly& p, cplx x) {
    cplx acc = 0;
    for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
    return acc;
}

Poly derivative(const Poly& p) {
    Poly d;
    for (std::size_t k = 1; k < p.size(); ++k) d.push_back(double(k) * p[k]);
    return d;
}

int degree(const Poly& p) {
    for (int k = static_cast<int>(p.size()) - 1; k >= 0; --k)
        if (p[k] != cplx(0)) return k;
    return -1;
}

double norm(const Poly& p) {
    double m = 0;
    for (auto c : p) m = std::max(m, std::abs(c));
    return m;
}

Poly add(const Poly& a, const Poly& b) {
    Poly r(std::max(a.size(), b.size()), 0.0);
    for (std::size_t k = 0; k < a.size(); ++k) r[k] += a[k];
    for (std::size_t k = 0; k < b.size(); ++k) r[k] += b[k];
    return r;
}

Poly sub(const Poly& a, const Poly& b) { return add(a, scale(b, -1.0)); }

Poly mul(const Poly& a, const Poly& b) {
    if (a.empty() || b.empty()) return {};
    Poly r(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

Poly scale(Poly a, cplx s) {
    for (auto& c : a) c *= s;
    return a;
}

Poly trim(Poly p, double tol) {
    while (!p.empty() && std::abs(p.back()) <= tol) p.pop_back();
    return p;
}

std::pair<Poly, Poly> divmod(const Poly& a, const Poly& b) {
    const int db = degree(b);
    if (db < 0) throw std::domain_error("polynomial division by zero");
    Poly r = trim(a);
    const int da = static_cast<int>(r.size()) - 1;
    if (da < db) return {{}, r};
    Poly q(da - db + 1, 0.0);
    for (int k = da; k >= db; --k) {
        const cplx c = r[k] / b[db];
        q[k - db] = c;
        for (int j = 0; j <= db; ++j) r[k - db + j] -= c * b[j];
        r[k] = 0;
    }
    r.resize(db);
    return {q, r};
}

Poly mod(const Poly& a, const Poly& m) { return divmod(a, m).second; }

Poly inverse_mod(const Poly& a, const Poly& m) {
    const int d = degree(m);
    if (d < 1) return {};
    // Columns: z^k a mod m, k < d.
    MatC A(d, d);
    Poly zk{1.0};
    for (int k = 0; k < d; ++k) {
        Poly c = mod(mul(zk, a), m);
        c.resize(d, 0.0);
        for (int i = 0; i < d; ++i) A(i, k) = c[i];
        zk.insert(zk.begin(), 0.0);
    }
    VecC rhs = VecC::Zero(d);
    rhs(0) = 1.0;
    const VecC x = A.fullPivLu().solve(rhs);
    return Poly(x.data(), x.data() + d);
}

Poly from_roots(const std::vector<cplx>& r) {
    Poly p{1.0};
    for (auto x : r) p = mul(p, Poly{-x, 1.0});
    return p;
}

std::vector<cplx> roots(const Poly& p0, bool polish) {
    const Poly p = trim(p0);
    const int n = static_cast<int>(p.size()) - 1;
    if (n < 1) return {};
    MatC C = MatC::Zero(n, n);
    for (int i = 1; i < n; ++i) C(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) C(i, n - 1) = -p[i] / p[n];
    Eigen::ComplexEigenSolver<MatC> es(C, false);
    std::vector<cplx> r(es.eigenvalues().data(), es.eigenvalues().data() + n);
    if (polish) {
        const Poly dp = derivative(p);
        for (auto& x : r) {
            for (int it = 0; it < 4; ++it) {
                const cplx d = eval(dp, x);
                if (std::abs(d) < 1e-300) break;
                x -= eval(p, x) / d;
            }
        }
    }
    std::sort(r.begin(), r.end(), [](cplx a, cplx b) { return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag(); });
    return r;
}

}  // namespace tyurin::poly
