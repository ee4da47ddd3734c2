#pragma once

// Tyurin divisor, Tyurin space and the Brill-Noether-Tyurin matrix.

#include <functional>
#include <vector>

#include "tyurin/normal_form.hpp"
#include "tyurin/riemann_surface.hpp"

namespace tyurin {

Chart disk_chart(const Curve& curve, const DiskSpec& disk);

// sum_e c_e s^e for a matrix-valued function, exponents val .. val + c.size() - 1.
struct MatLaurent {
    int val = 0;
    std::vector<MatC> c;
    MatC coeff(int e) const;
    int top() const { return val + static_cast<int>(c.size()) - 1; }
};

struct TyurinPoint {
    cplx z{};                   // chart coordinate
    int mult = 0;               // n_t
    std::vector<int> row_mult;  // multiplicity of t as a zero of p_j
    SurfacePoint point;         // filled when a curve is attached
};

// Principal part at one Tyurin point: coeffs[m-1] multiplies (z - z_t)^{-m}.
struct LaurentTail {
    int point = 0;
    std::vector<VecC> coeffs;
    VecC eval(cplx z, cplx zt) const;
};

// An element of the Tyurin space: one tail per Tyurin point.
using TyurinVector = std::vector<LaurentTail>;

struct TyurinOptions {
    double cluster_radius = 1e-6;
    int extra_orders = 4;  // Laurent exponents kept beyond n g
};

struct TyurinBasis {
    std::vector<TyurinPoint> points;
    std::vector<TyurinVector> v;     // v_{d_1+..+d_{j-1}+k} = C_-[z^k e_j^t P^{-1}]
    std::vector<std::pair<int, int>> index;  // (j, k) for each basis element
    std::vector<MatLaurent> Pinv;    // P^{-1}(z_t + s) at each point
    std::vector<MatLaurent> Ptaylor; // P(z_t + s) at each point
    int top = 0;
};

// Zeros of det P clustered into points with multiplicities.
std::vector<TyurinPoint> tyurin_points(const NormalForm& P, const TyurinOptions& opt = {});
TyurinBasis tyurin_basis(const NormalForm& P, const TyurinOptions& opt = {});

// Principal parts of a meromorphic row vector on the disk by circle quadrature
// around each listed pole.
std::vector<LaurentTail> cauchy_minus(const std::function<VecC(cplx)>& f, const std::vector<std::pair<cplx, int>>& poles,
                                      double disk_radius, int nodes = 256);

struct TyurinData {
    NormalForm P;
    Chart chart;
    TyurinBasis basis;
    std::vector<std::vector<VecC>> omega;  // Taylor coefficients of omega(z_t + s), dz-components
    std::vector<std::vector<Series<cplx>>> u_series;  // per point: x^{k} dx/dz / y, k < g
    std::vector<LocalSeries> local;
    MatC T;  // rows: basis elements; column i*n + a pairs omega_i with component a
    VecR singular_values;

    int n() const { return P.n; }
    int size() const { return static_cast<int>(basis.v.size()); }
    const std::vector<TyurinPoint>& points() const { return basis.points; }
};

TyurinData bnt_matrix(const NormalForm& P, const CurveContext& ctx, const TyurinOptions& opt = {});

// sum_t res v^t nu for a column vector differential given by its Taylor
// coefficients at each Tyurin point.
cplx pair_tail(const TyurinVector& v, const std::vector<std::vector<VecC>>& nu);

struct Coranks {
    int h0 = 0, h1 = 0;
};
// corank = number of singular values below threshold * largest.
Coranks coranks(const TyurinData& data, double threshold = 1e-7);

}  // namespace tyurin
