#include "io.hpp"

#include <fstream>
#include <sstream>

#include "tyurin/errors.hpp"

namespace tyurin::cli {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) { throw InputError(where + ": " + what); }

const Json& field(const Json& j, const char* key, const std::string& where) {
    if (!j.is_object()) fail(where, "expected an object");
    const auto it = j.find(key);
    if (it == j.end()) fail(where, std::string("missing \"") + key + "\"");
    return *it;
}

const Json& array(const Json& j, const std::string& where) {
    if (!j.is_array()) fail(where, "expected an array");
    return j;
}

std::string at(const std::string& where, const std::string& key) { return where + "/" + key; }
std::string at(const std::string& where, std::size_t i) { return where + "/" + std::to_string(i); }

}  // namespace

Json read_json(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw InputError(file.string() + ": cannot open file");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return Json::parse(ss.str());
    } catch (const Json::parse_error& e) {
        // The parser message carries line and column.
        throw InputError(file.string() + ": " + e.what());
    }
}

namespace {

void dump_to(const Json& j, int indent, std::string& out) {
    const std::string pad(indent + 2, ' ');
    if (j.is_object() && !j.empty()) {
        out += "{\n";
        bool first = true;
        for (const auto& [k, v] : j.items()) {
            if (!first) out += ",\n";
            first = false;
            out += pad + Json(k).dump() + ": ";
            dump_to(v, indent + 2, out);
        }
        out += "\n" + std::string(indent, ' ') + "}";
    } else if (j.is_array() && !j.empty()) {
        bool flat = true;
        for (const auto& v : j) flat = flat && !v.is_structured();
        if (flat) {
            out += "[";
            for (std::size_t i = 0; i < j.size(); ++i) out += (i ? ", " : "") + j[i].dump();
            out += "]";
            return;
        }
        out += "[\n";
        for (std::size_t i = 0; i < j.size(); ++i) {
            out += pad;
            dump_to(j[i], indent + 2, out);
            out += i + 1 < j.size() ? ",\n" : "\n";
        }
        out += std::string(indent, ' ') + "]";
    } else {
        out += j.dump();
    }
}

}  // namespace

std::string dump(const Json& j) {
    std::string out;
    dump_to(j, 0, out);
    return out + "\n";
}

Json to_json(cplx z) { return Json::array({z.real(), z.imag()}); }

Json to_json(const MatC& m) {
    Json rows = Json::array();
    for (int i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
        rows.push_back(row);
    }
    return rows;
}

Json to_json(const VecC& v) {
    Json a = Json::array();
    for (const cplx& z : v) a.push_back(to_json(z));
    return a;
}

Json to_json(const VecR& v) {
    Json a = Json::array();
    for (double x : v) a.push_back(x);
    return a;
}

Json to_json(const Poly& p) {
    Json a = Json::array();
    for (const cplx& z : p) a.push_back(to_json(z));
    return a;
}

Json to_json(const PolyMatrix& m) {
    Json rows = Json::array();
    for (int i = 0; i < m.n(); ++i) {
        Json row = Json::array();
        for (int j = 0; j < m.n(); ++j) row.push_back(to_json(m(i, j)));
        rows.push_back(row);
    }
    return rows;
}

Json to_json(const SurfacePoint& p) {
    Json j;
    j["x"] = to_json(p.x);
    j["y"] = to_json(p.y);
    if (p.is_branch()) j["branch"] = p.branch;
    return j;
}

Json to_json(const Germs& g) {
    Json a = Json::array();
    for (const auto& gt : g) {
        Json b = Json::array();
        for (const auto& m : gt) b.push_back(to_json(m));
        a.push_back(b);
    }
    return a;
}

cplx read_cplx(const Json& j, const std::string& where) {
    if (j.is_number()) return j.get<double>();
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    fail(where, "expected a complex number [re, im]");
}

double read_double(const Json& j, const std::string& where) {
    if (!j.is_number()) fail(where, "expected a number");
    return j.get<double>();
}

int read_int(const Json& j, const std::string& where) {
    if (!j.is_number_integer()) fail(where, "expected an integer");
    return j.get<int>();
}

MatC read_matrix(const Json& j, const std::string& where) {
    array(j, where);
    const int rows = static_cast<int>(j.size());
    const int cols = rows ? static_cast<int>(array(j[0], at(where, 0)).size()) : 0;
    MatC m(rows, cols);
    for (int r = 0; r < rows; ++r) {
        const Json& row = array(j[r], at(where, r));
        if (static_cast<int>(row.size()) != cols) fail(at(where, r), "ragged matrix");
        for (int c = 0; c < cols; ++c) m(r, c) = read_cplx(row[c], at(at(where, r), c));
    }
    return m;
}

Poly read_poly(const Json& j, const std::string& where) {
    array(j, where);
    Poly p;
    for (std::size_t k = 0; k < j.size(); ++k) p.push_back(read_cplx(j[k], at(where, k)));
    return p;
}

PolyMatrix read_poly_matrix(const Json& j, int n, const std::string& where) {
    array(j, where);
    if (static_cast<int>(j.size()) != n) fail(where, "expected " + std::to_string(n) + " rows");
    PolyMatrix m(n);
    for (int r = 0; r < n; ++r) {
        const Json& row = array(j[r], at(where, r));
        if (static_cast<int>(row.size()) != n) fail(at(where, r), "expected " + std::to_string(n) + " entries");
        for (int c = 0; c < n; ++c) m(r, c) = read_poly(row[c], at(at(where, r), c));
    }
    return m;
}

SurfacePoint read_point(const Curve& C, const Json& j, const std::string& where) {
    if (!j.is_object()) fail(where, "expected a point object");
    try {
        if (j.contains("branch")) {
            const int b = read_int(j["branch"], at(where, "branch"));
            if (b < 0 || b >= static_cast<int>(C.branch_points().size())) fail(where, "branch index out of range");
            return C.branch_point(b);
        }
        const cplx x = read_cplx(field(j, "x", where), at(where, "x"));
        if (j.contains("y")) return C.point_with_y(x, read_cplx(j["y"], at(where, "y")));
        const int s = read_int(field(j, "sheet", where), at(where, "sheet"));
        if (s != 1 && s != -1) fail(at(where, "sheet"), "sheet must be 1 or -1");
        return C.point(x, s);
    } catch (const Error& e) {
        fail(where, e.what());
    }
}

DiskSpec read_disk(const Json& j, const std::string& where) {
    DiskSpec d;
    if (!j.is_object()) fail(where, "expected a disk object");
    if (j.contains("branch")) d.branch = read_int(j["branch"], at(where, "branch"));
    if (d.branch < 0) {
        d.center = read_cplx(field(j, "center", where), at(where, "center"));
        d.sheet = j.contains("sheet") ? read_int(j["sheet"], at(where, "sheet")) : 1;
    }
    d.radius = read_double(field(j, "radius", where), at(where, "radius"));
    if (!(d.radius > 0)) fail(at(where, "radius"), "radius must be positive");
    return d;
}

Json disk_json(const DiskSpec& d) {
    Json j;
    if (d.branch >= 0) {
        j["branch"] = d.branch;
    } else {
        j["center"] = to_json(d.center);
        j["sheet"] = d.sheet;
    }
    j["radius"] = d.radius;
    return j;
}

std::unique_ptr<CurveContext> read_curve(const Json& j, const std::string& where, int resolution) {
    const Poly Q = read_poly(field(j, "Q", where), at(where, "Q"));
    QuadratureConfig q;
    if (j.contains("quadrature")) {
        const Json& c = j["quadrature"];
        const std::string w = at(where, "quadrature");
        if (c.contains("order")) q.order = read_int(c["order"], at(w, "order"));
        if (c.contains("piece_factor")) q.piece_factor = read_double(c["piece_factor"], at(w, "piece_factor"));
        if (c.contains("residue_nodes")) q.residue_nodes = read_int(c["residue_nodes"], at(w, "residue_nodes"));
        if (c.contains("residue_radius")) q.residue_radius = read_double(c["residue_radius"], at(w, "residue_radius"));
    }
    if (resolution > 0) q.order = resolution;
    if (q.order < 4 || !(q.piece_factor > 0) || q.residue_nodes < 8 || !(q.residue_radius > 0))
        fail(at(where, "quadrature"), "invalid quadrature settings");
    // Curve errors (degenerate Q, even degree) are validation failures, not input errors.
    Curve C(Q);
    const SurfacePoint inf = read_point(C, field(j, "infinity", where), at(where, "infinity"));
    return std::make_unique<CurveContext>(std::move(C), inf, q);
}

Json curve_json(const Curve& C, const SurfacePoint& infinity, const QuadratureConfig& q) {
    Json j;
    j["Q"] = to_json(C.Q());
    j["infinity"] = {{"x", to_json(infinity.x)}, {"sheet", C.sheet_of(infinity)}};
    j["quadrature"] = {{"order", q.order},
                       {"piece_factor", q.piece_factor},
                       {"residue_nodes", q.residue_nodes},
                       {"residue_radius", q.residue_radius}};
    return j;
}

NormalForm read_bundle(const Json& j, const std::string& where) {
    NormalForm P;
    P.n = read_int(field(j, "n", where), at(where, "n"));
    if (P.n < 1) fail(at(where, "n"), "rank must be positive");
    P.disk = read_disk(field(j, "disk", where), at(where, "disk"));
    P.P = read_poly_matrix(field(j, "P", where), P.n, at(where, "P"));
    return P;
}

PolyMatrix read_transition(const Json& j, const std::string& where, DiskSpec& disk) {
    const int n = read_int(field(j, "n", where), at(where, "n"));
    if (n < 1) fail(at(where, "n"), "rank must be positive");
    disk = read_disk(field(j, "disk", where), at(where, "disk"));
    const char* key = j.contains("G") ? "G" : "P";
    return read_poly_matrix(field(j, key, where), n, at(where, key));
}

Json bundle_json(const NormalForm& P) {
    Json j;
    j["n"] = P.n;
    j["disk"] = disk_json(P.disk);
    j["P"] = to_json(P.P);
    return j;
}

DivisorSpec read_divisor(const Curve& C, const Json& j, const std::string& where) {
    DivisorSpec d;
    if (j.contains("pin")) {
        const Json& p = j["pin"];
        if (p == "unitary")
            d.pin = HalfPin::Unitary;
        else if (p == "a-trivial")
            d.pin = HalfPin::ATrivial;
        else
            fail(at(where, "pin"), "expected \"unitary\" or \"a-trivial\"");
    }
    const Json& pts = array(field(j, "points", where), at(where, "points"));
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const std::string w = at(at(where, "points"), i);
        DivisorPoint q{read_point(C, pts[i], w), 1};
        if (pts[i].contains("mult")) q.mult = read_int(pts[i]["mult"], at(w, "mult"));
        d.D.push_back(q);
    }
    return d;
}

Json divisor_json(const DivisorSpec& d) {
    Json j;
    j["pin"] = d.pin == HalfPin::Unitary ? "unitary" : "a-trivial";
    Json pts = Json::array();
    for (const auto& q : d.D) {
        Json p;
        if (q.point.is_branch()) {
            p["branch"] = q.point.branch;
        } else {
            p["x"] = to_json(q.point.x);
            p["y"] = to_json(q.point.y);
        }
        p["mult"] = q.mult;
        pts.push_back(p);
    }
    j["points"] = pts;
    return j;
}

namespace {

Germs read_germ_list(const Json& j, int n, const std::string& where) {
    array(j, where);
    Germs g;
    for (std::size_t t = 0; t < j.size(); ++t) {
        const std::string wt = at(where, t);
        std::vector<MatC> gt;
        for (std::size_t k = 0; k < array(j[t], wt).size(); ++k) {
            MatC m = read_matrix(j[t][k], at(wt, k));
            if (m.rows() != n || m.cols() != n) fail(at(wt, k), "expected an n x n matrix");
            gt.push_back(std::move(m));
        }
        g.push_back(std::move(gt));
    }
    return g;
}

}  // namespace

Germs read_germs(const Json& j, int n, const std::string& where) {
    return read_germ_list(field(j, "germs", where), n, at(where, "germs"));
}

Json germs_json(const Germs& g) { return Json{{"germs", to_json(g)}}; }

std::vector<ConnectionTangent> read_tangents(const Json& j, int n, const std::string& where) {
    const Json& list = array(field(j, "tangents", where), at(where, "tangents"));
    std::vector<ConnectionTangent> out;
    for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string w = at(at(where, "tangents"), i);
        ConnectionTangent t;
        t.v.dP = read_poly_matrix(field(list[i], "dP", w), n, at(w, "dP"));
        if (list[i].contains("dgerms")) t.dgerms = read_germ_list(list[i]["dgerms"], n, at(w, "dgerms"));
        out.push_back(std::move(t));
    }
    return out;
}

Json tangents_json(const std::vector<ConnectionTangent>& t) {
    Json list = Json::array();
    for (const auto& x : t) {
        Json e;
        e["dP"] = to_json(x.v.dP);
        if (!x.dgerms.empty()) e["dgerms"] = to_json(x.dgerms);
        list.push_back(e);
    }
    return Json{{"tangents", list}};
}

}  // namespace tyurin::cli
