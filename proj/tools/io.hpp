#pragma once

// JSON encoding of curves, bundles, divisors, germs and tangents. Complex
// numbers are [re, im]; a bare number is read as real.

#include <filesystem>
#include <memory>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "tyurin/symplectic.hpp"

namespace tyurin::cli {

using Json = nlohmann::ordered_json;
using Germs = std::vector<std::vector<MatC>>;

// Missing or malformed input; the message carries the file and location.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Json read_json(const std::filesystem::path& file);
// Indented JSON with arrays of scalars kept on one line.
std::string dump(const Json& j);

Json to_json(cplx z);
Json to_json(const MatC& m);
Json to_json(const VecC& v);
Json to_json(const VecR& v);
Json to_json(const Poly& p);
Json to_json(const PolyMatrix& m);
Json to_json(const SurfacePoint& p);
Json to_json(const Germs& g);

cplx read_cplx(const Json& j, const std::string& where);
double read_double(const Json& j, const std::string& where);
int read_int(const Json& j, const std::string& where);
MatC read_matrix(const Json& j, const std::string& where);
Poly read_poly(const Json& j, const std::string& where);
PolyMatrix read_poly_matrix(const Json& j, int n, const std::string& where);
// {"x": c, "sheet": +-1}, {"x": c, "y": c} or {"branch": i}.
SurfacePoint read_point(const Curve& C, const Json& j, const std::string& where);
DiskSpec read_disk(const Json& j, const std::string& where);
Json disk_json(const DiskSpec& d);

// {"Q": [...], "infinity": point, "quadrature": {...}}; resolution > 0 overrides the order.
std::unique_ptr<CurveContext> read_curve(const Json& j, const std::string& where, int resolution = 0);
Json curve_json(const Curve& C, const SurfacePoint& infinity, const QuadratureConfig& q);

// {"n": n, "disk": {...}, "P": rows of polynomials}; "G" instead of "P" for an
// arbitrary transition matrix.
NormalForm read_bundle(const Json& j, const std::string& where);
PolyMatrix read_transition(const Json& j, const std::string& where, DiskSpec& disk);
Json bundle_json(const NormalForm& P);

struct DivisorSpec {
    Divisor D;
    HalfPin pin = HalfPin::Unitary;
};
// {"pin": "unitary" | "a-trivial", "points": [{point..., "mult": m}]}
DivisorSpec read_divisor(const Curve& C, const Json& j, const std::string& where);
Json divisor_json(const DivisorSpec& d);

// {"germs": [[M_0, M_1, ...] per Tyurin point]}: Taylor coefficients of the
// dz-component of P^{-1} Phi P, projected to a Higgs field without pole at infinity.
Germs read_germs(const Json& j, int n, const std::string& where);
Json germs_json(const Germs& g);

// {"tangents": [{"dP": rows, "dgerms": [...]}]}
std::vector<ConnectionTangent> read_tangents(const Json& j, int n, const std::string& where);
Json tangents_json(const std::vector<ConnectionTangent>& t);

}  // namespace tyurin::cli
