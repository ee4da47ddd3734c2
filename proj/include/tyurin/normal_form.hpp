#pragma once

// Lower-triangular polynomial normal form of a transition matrix on a disk.

#include <string>
#include <vector>

#include "tyurin/poly.hpp"

namespace tyurin {

// The disk |z| < radius in the chart coordinate z. An x-chart disk has
// z = x - center on the given sheet; with branch >= 0 the chart is
// x = e_branch + z^2 and center/sheet are unused.
struct DiskSpec {
    cplx center{};
    double radius = 1.0;
    int sheet = 1;
    int branch = -1;
};

class PolyMatrix {
public:
    PolyMatrix() = default;
    explicit PolyMatrix(int n) : n_(n), e_(n * n) {}
    static PolyMatrix identity(int n);

    int n() const { return n_; }
    Poly& operator()(int i, int j) { return e_[i * n_ + j]; }
    const Poly& operator()(int i, int j) const { return e_[i * n_ + j]; }
    int max_degree() const;

    MatC eval(cplx z) const;
    MatC eval_derivative(cplx z) const;
    Poly det() const;  // exact for n <= 3, by Laplace expansion

    friend PolyMatrix operator*(const PolyMatrix& a, const PolyMatrix& b);

private:
    int n_ = 0;
    std::vector<Poly> e_;
};

struct NormalForm {
    int n = 0;
    DiskSpec disk;
    // Row j: diagonal p_j (monic) at (j,j), f_jk for k < j; upper part empty.
    PolyMatrix P;

    const Poly& p(int j) const { return P(j, j); }
    const Poly& f(int j, int k) const { return P(j, k); }
    std::vector<int> degrees() const;
    int total_degree() const;
    Poly det() const;  // product of the diagonal
    MatC eval(cplx z) const { return P.eval(z); }
    MatC eval_derivative(cplx z) const { return P.eval_derivative(z); }
};

// Generic stratum d = (0, ..., 0, ng): identity rows above [h_1 ... h_{n-1} p].
NormalForm generic_normal_form(const DiskSpec& disk, const std::vector<Poly>& h, const Poly& p);

struct Reduction {
    NormalForm P;
    PolyMatrix H;       // Taylor polynomial of H = P^{-1} G at z = 0
    double h_residual;  // max |G - P H| on the boundary circle
    double min_det_H;   // min |det H| over sample circles up to the boundary
};

struct ReduceOptions {
    double zero_tol = 1e-10;   // relative to the largest coefficient in the row
    double ill_tol = 1e-12;    // coefficients in (ill_tol, zero_tol) are ambiguous
    int h_order = 48;
    int h_nodes = 256;
};

Reduction reduce(const PolyMatrix& G, const DiskSpec& disk, const ReduceOptions& opt = {});

struct ShapeReport {
    bool ok = true;
    std::vector<std::string> problems;
};
ShapeReport validate_shape(const NormalForm& P, int genus);

// Flag r (r = 1..n-1) holds iff d_1 + ... + d_r <= r g.
std::vector<bool> semistability_flags(const NormalForm& P, int genus);

// A direction in the coefficient space of a normal form. Row j may move
// below degree d_j, which keeps the p_j monic and the shape fixed.
struct ModuliTangent {
    PolyMatrix dP;
};

bool shape_preserving(const NormalForm& P, const ModuliTangent& v);
// Unit coefficient directions, row by row: sum_j (j + 1) d_j of them.
std::vector<ModuliTangent> tangent_basis(const NormalForm& P);
ModuliTangent combine(const std::vector<ModuliTangent>& basis, const VecC& c);
// P + eps dP; throws InvalidTangent when v changes the shape.
NormalForm displaced(const NormalForm& P, const ModuliTangent& v, cplx eps);

// Number of zeros of p in |z| < radius by the argument principle.
int zeros_in_disk(const Poly& p, double radius, int nodes = 512);

}  // namespace tyurin
