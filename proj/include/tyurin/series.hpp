#pragma once

// Truncated power series and Laurent series in a local parameter s.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "tyurin/types.hpp"

namespace tyurin {

template <typename Scalar>
class Series {
public:
    Series() = default;
    explicit Series(int order) : c_(order, Scalar(0)) {}
    Series(std::vector<Scalar> c) : c_(std::move(c)) {}

    static Series constant(Scalar a, int order) {
        Series r(order);
        if (order > 0) r.c_[0] = a;
        return r;
    }
    // a + s
    static Series linear(Scalar a, int order) {
        Series r = constant(a, order);
        if (order > 1) r.c_[1] = Scalar(1);
        return r;
    }

    int order() const { return static_cast<int>(c_.size()); }
    Scalar operator[](int k) const { return k < order() ? c_[k] : Scalar(0); }
    Scalar& operator[](int k) { return c_[k]; }
    const std::vector<Scalar>& coeffs() const { return c_; }

    Series operator-() const {
        Series r(*this);
        for (auto& v : r.c_) v = -v;
        return r;
    }
    Series& operator+=(const Series& o) {
        const int n = std::min(order(), o.order());
        c_.resize(n);
        for (int k = 0; k < n; ++k) c_[k] += o.c_[k];
        return *this;
    }
    Series& operator-=(const Series& o) { return *this += -o; }
    Series& operator*=(Scalar a) {
        for (auto& v : c_) v *= a;
        return *this;
    }
    Series& operator+=(Scalar a) {
        if (order()) c_[0] += a;
        return *this;
    }

    friend Series operator+(Series a, const Series& b) { return a += b; }
    friend Series operator-(Series a, const Series& b) { return a -= b; }
    friend Series operator+(Series a, Scalar b) { return a += b; }
    friend Series operator-(Series a, Scalar b) { return a += -b; }
    friend Series operator*(Series a, Scalar b) { return a *= b; }
    friend Series operator*(Scalar b, Series a) { return a *= b; }

    friend Series operator*(const Series& a, const Series& b) {
        const int n = std::min(a.order(), b.order());
        Series r(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; i + j < n; ++j) r.c_[i + j] += a.c_[i] * b.c_[j];
        return r;
    }

    Series inverse() const {
        if (!order() || c_[0] == Scalar(0)) throw std::domain_error("series inverse: zero constant term");
        Series r(order());
        r.c_[0] = Scalar(1) / c_[0];
        for (int k = 1; k < order(); ++k) {
            Scalar acc(0);
            for (int j = 1; j <= k; ++j) acc += c_[j] * r.c_[k - j];
            r.c_[k] = -acc * r.c_[0];
        }
        return r;
    }
    friend Series operator/(const Series& a, const Series& b) { return a * b.inverse(); }

    // Square root whose constant term is the prescribed root0 (root0^2 = c_0).
    Series sqrt(Scalar root0) const {
        Series r(order());
        if (!order()) return r;
        r.c_[0] = root0;
        for (int k = 1; k < order(); ++k) {
            Scalar acc = c_[k];
            for (int j = 1; j < k; ++j) acc -= r.c_[j] * r.c_[k - j];
            r.c_[k] = acc / (Scalar(2) * root0);
        }
        return r;
    }

    Series derivative() const {
        Series r(std::max(order() - 1, 0));
        for (int k = 1; k < order(); ++k) r.c_[k - 1] = Scalar(k) * c_[k];
        return r;
    }

    Scalar eval(Scalar s) const {
        Scalar acc(0);
        for (int k = order() - 1; k >= 0; --k) acc = acc * s + c_[k];
        return acc;
    }

private:
    std::vector<Scalar> c_;
};

// Polynomial (coefficients low to high) evaluated on a series argument.
template <typename Scalar>
Series<Scalar> compose(const std::vector<Scalar>& poly, const Series<Scalar>& x) {
    Series<Scalar> r = Series<Scalar>::constant(Scalar(0), x.order());
    for (int k = static_cast<int>(poly.size()) - 1; k >= 0; --k) r = r * x + poly[k];
    return r;
}

// Taylor coefficients of a polynomial at a point, truncated to `order`.
template <typename Scalar>
Series<Scalar> taylor_shift(const std::vector<Scalar>& poly, Scalar at, int order) {
    return compose(poly, Series<Scalar>::linear(at, order));
}

// sum_k c_k s^(val+k), with absolute exponents kept up to `top` inclusive.
template <typename Scalar>
class Laurent {
public:
    Laurent() = default;
    Laurent(int val, std::vector<Scalar> c) : val_(val), c_(std::move(c)) {}

    // Series with a zero of known order m: drops the first m coefficients
    // (numerically tiny) and keeps exponents up to `top`.
    static Laurent from_series(const Series<Scalar>& s, int m, int top) {
        std::vector<Scalar> c;
        for (int k = m; k <= top && k < s.order(); ++k) c.push_back(s[k]);
        return Laurent(m, std::move(c));
    }

    int val() const { return val_; }
    int top() const { return val_ + static_cast<int>(c_.size()) - 1; }
    Scalar coeff(int e) const {
        const int k = e - val_;
        return (k >= 0 && k < static_cast<int>(c_.size())) ? c_[k] : Scalar(0);
    }

    Laurent inverse() const {
        if (c_.empty() || c_[0] == Scalar(0)) throw std::domain_error("laurent inverse: zero leading term");
        Series<Scalar> s(c_);
        Series<Scalar> r = s.inverse();
        return Laurent(-val_, r.coeffs());
    }

    friend Laurent operator*(const Laurent& a, const Laurent& b) {
        const int v = a.val_ + b.val_;
        const int t = std::min(a.top() + b.val_, b.top() + a.val_);
        std::vector<Scalar> c(std::max(t - v + 1, 0), Scalar(0));
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j) {
                const std::size_t k = i + j;
                if (k < c.size()) c[k] += a.c_[i] * b.c_[j];
            }
        return Laurent(v, std::move(c));
    }
    friend Laurent operator+(const Laurent& a, const Laurent& b) {
        const int v = std::min(a.val_, b.val_);
        const int t = std::min(a.top(), b.top());
        std::vector<Scalar> c(std::max(t - v + 1, 0));
        for (int e = v; e <= t; ++e) c[e - v] = a.coeff(e) + b.coeff(e);
        return Laurent(v, std::move(c));
    }
    friend Laurent operator*(Scalar a, Laurent b) {
        for (auto& v : b.c_) v *= a;
        return b;
    }
    Laurent operator-() const { return Scalar(-1) * (*this); }

private:
    int val_ = 0;
    std::vector<Scalar> c_;
};

}  // namespace tyurin
