#pragma once

// Dense univariate polynomials, coefficients from low to high degree.

#include <utility>
#include <vector>

#include "tyurin/types.hpp"

namespace tyurin {

using Poly = std::vector<cplx>;

namespace poly {

cplx eval(const Poly& p, cplx x);
Poly derivative(const Poly& p);
int degree(const Poly& p);  // -1 for the zero polynomial
double norm(const Poly& p);  // max |coefficient|

Poly add(const Poly& a, const Poly& b);
Poly sub(const Poly& a, const Poly& b);
Poly mul(const Poly& a, const Poly& b);
Poly scale(Poly a, cplx s);

// Drops leading coefficients with modulus <= tol.
Poly trim(Poly p, double tol = 0.0);
// Quotient and remainder; b must have a nonzero leading coefficient.
std::pair<Poly, Poly> divmod(const Poly& a, const Poly& b);
Poly mod(const Poly& a, const Poly& m);
// b with a*b = 1 mod m; a and m coprime.
Poly inverse_mod(const Poly& a, const Poly& m);

Poly from_roots(const std::vector<cplx>& r);
// Companion-matrix eigenvalues, optionally Newton-polished (simple roots only).
std::vector<cplx> roots(const Poly& p, bool polish = true);

}  // namespace poly
}  // namespace tyurin
