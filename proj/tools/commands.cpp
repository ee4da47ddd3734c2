#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "CLI11.hpp"
#include "cli.hpp"
#include "tyurin/errors.hpp"

namespace tyurin::cli {

namespace fs = std::filesystem;

// ---------------------------------------------------------------- session

fs::path Session::require(const fs::path& p, const char* what) {
    if (p.empty()) throw InputError(std::string("no ") + what + " file given (--" + what + " or \"" + what + "\" in --config)");
    return p;
}

const CurveContext& Session::ctx() {
    if (!ctx_) {
        const fs::path f = require(cfg_.curve, "curve");
        ctx_ = read_curve(read_json(f), f.string(), cfg_.resolution);
    }
    return *ctx_;
}

NormalForm Session::bundle() {
    const fs::path f = require(cfg_.bundle, "bundle");
    return read_bundle(read_json(f), f.string());
}

DivisorSpec Session::divisor() {
    const fs::path f = require(cfg_.divisor, "divisor");
    return read_divisor(ctx().curve(), read_json(f), f.string());
}

std::optional<DivisorSpec> Session::divisor_alt() {
    if (cfg_.divisor_alt.empty()) return std::nullopt;
    return read_divisor(ctx().curve(), read_json(cfg_.divisor_alt), cfg_.divisor_alt.string());
}

Germs Session::germs(int n) {
    if (cfg_.germs.empty()) return {};
    return read_germs(read_json(cfg_.germs), n, cfg_.germs.string());
}

std::vector<ConnectionTangent> Session::tangents(int n, std::size_t at_least) {
    const fs::path f = require(cfg_.tangents, "tangents");
    auto t = read_tangents(read_json(f), n, f.string());
    if (t.size() < at_least)
        throw InputError(f.string() + ": expected at least " + std::to_string(at_least) + " tangents");
    return t;
}

// ---------------------------------------------------------------- report

Report::Report(std::string kind, std::string name, std::optional<double> tol_override)
    : kind_(std::move(kind)), name_(std::move(name)), tol_(tol_override) {}

void Report::add(Json check, bool ok) {
    check["pass"] = ok;
    checks_.push_back(std::move(check));
    pass_ = pass_ && ok;
}

void Report::below(const std::string& name, double value, double bound) {
    if (tol_) bound = *tol_;
    add(Json{{"name", name}, {"value", value}, {"relation", "<="}, {"bound", bound}}, value <= bound);
}

void Report::above(const std::string& name, double value, double bound) {
    add(Json{{"name", name}, {"value", value}, {"relation", ">="}, {"bound", bound}}, value >= bound);
}

void Report::positive(const std::string& name, double value) {
    add(Json{{"name", name}, {"value", value}, {"relation", ">"}, {"bound", 0.0}}, value > 0);
}

void Report::equal(const std::string& name, long value, long expected) {
    add(Json{{"name", name}, {"value", value}, {"relation", "=="}, {"bound", expected}}, value == expected);
}

void Report::error(const std::string& name, const std::exception& e) {
    Json c{{"name", name}, {"error", e.what()}};
    if (const auto* te = dynamic_cast<const Error*>(&e)) c["kind"] = te->kind();
    if (const auto* th = dynamic_cast<const OnThetaDivisor*>(&e)) c["corank"] = th->corank;
    add(std::move(c), false);
}

Json Report::json() const {
    Json j;
    j[kind_] = name_;
    j["results"] = results;
    j["checks"] = checks_;
    j["pass"] = pass_;
    return j;
}

// ---------------------------------------------------------------- helpers

namespace {

double rel(cplx a, cplx b) {
    const double s = std::max(std::abs(a), std::abs(b));
    return s > 0 ? std::abs(a - b) / s : 0.0;
}

Json tyurin_points_json(const std::vector<TyurinPoint>& pts) {
    Json a = Json::array();
    for (const auto& t : pts) a.push_back(Json{{"z", to_json(t.z)}, {"mult", t.mult}, {"point", to_json(t.point)}});
    return a;
}

void require_shape(const NormalForm& P, int genus) {
    const ShapeReport s = validate_shape(P, genus);
    if (s.ok) return;
    std::string msg = "invalid normal form:";
    for (const auto& p : s.problems) msg += " " + p + ";";
    throw ValidationError(msg);
}

const Json& option(const Json& opts, const char* key) {
    static const Json null;
    const auto it = opts.find(key);
    return it == opts.end() ? null : *it;
}

double option_double(const Json& opts, const char* key, double fallback) {
    const Json& j = option(opts, key);
    return j.is_null() ? fallback : read_double(j, std::string("options/") + key);
}

std::vector<SurfacePoint> option_points(const Curve& C, const Json& opts, const char* key,
                                        const std::vector<SurfacePoint>& fallback) {
    const Json& j = option(opts, key);
    if (j.is_null()) return fallback;
    if (!j.is_array()) throw InputError(std::string("options/") + key + ": expected an array of points");
    std::vector<SurfacePoint> pts;
    for (std::size_t i = 0; i < j.size(); ++i)
        pts.push_back(read_point(C, j[i], std::string("options/") + key + "/" + std::to_string(i)));
    return pts;
}

// "re,im,sheet"
SurfacePoint parse_point_flag(const Curve& C, const std::string& s, const char* flag) {
    std::stringstream ss(s);
    double re, im;
    int sheet;
    char c1, c2;
    if (!(ss >> re >> c1 >> im >> c2 >> sheet) || c1 != ',' || c2 != ',' || (sheet != 1 && sheet != -1))
        throw InputError(std::string(flag) + ": expected re,im,sheet with sheet 1 or -1");
    return C.point(cplx(re, im), sheet);
}

struct Connection {
    std::unique_ptr<KernelEvaluator> K;
    std::unique_ptr<DlogHalf> h;
    std::unique_ptr<ConnectionForm> F, A;
};

Connection build_connection(Session& s, const NormalForm& P, const DivisorSpec& d, const Germs& g) {
    const CurveContext& ctx = s.ctx();
    Connection c;
    c.K = std::make_unique<KernelEvaluator>(ctx, bnt_matrix(P, ctx));
    if (!g.empty() && g.size() != c.K->data().points().size())
        throw InputError(s.config().germs.string() + ": expected one germ list per Tyurin point (" +
                         std::to_string(c.K->data().points().size()) + ")");
    c.h = std::make_unique<DlogHalf>(ctx, d.D, d.pin);
    c.F = std::make_unique<ConnectionForm>(*c.K, *c.h);
    c.A = std::make_unique<ConnectionForm>(*c.K, *c.h, g.empty() ? HiggsField{} : HiggsField(*c.K, holomorphic_germs(*c.K, g)));
    return c;
}

Json connection_report_json(const ConnectionReport& r) {
    return Json{{"tyurin", r.tyurin}, {"divisor", r.divisor}, {"infinity", r.infinity}};
}

// ---------------------------------------------------------------- commands

void cmd_periods(Session& s, Report& r) {
    const CurveContext& ctx = s.ctx();
    const MatC& tau = ctx.tau();
    r.results["genus"] = ctx.genus();
    r.results["branch_points"] = to_json(VecC(Eigen::Map<const VecC>(ctx.curve().branch_points().data(),
                                                                      ctx.curve().branch_points().size())));
    r.results["A"] = to_json(ctx.A());
    r.results["B"] = to_json(ctx.B());
    r.results["tau"] = to_json(tau);
    r.results["riemann_constants"] = to_json(ctx.riemann_constants());

    r.below("tau_symmetry", max_abs(tau - tau.transpose()), 1e-8);
    Eigen::SelfAdjointEigenSolver<MatR> es(MatR(tau.imag()));
    r.positive("im_tau_min_eigenvalue", es.eigenvalues().minCoeff());

    QuadratureConfig fine = ctx.config();
    fine.order *= 2;
    const CurveContext ctx2(ctx.curve(), ctx.infinity(), fine);
    r.results["doubled_order"] = fine.order;
    r.below("period_self_convergence", std::max(max_abs(ctx2.A() - ctx.A()), max_abs(ctx2.B() - ctx.B())), 1e-9);
}

void cmd_normalform(Session& s, Report& r) {
    const fs::path f = s.config().bundle;
    if (f.empty()) throw InputError("no bundle file given (--bundle or \"bundle\" in --config)");
    DiskSpec disk;
    const PolyMatrix G = read_transition(read_json(f), f.string(), disk);
    const Reduction red = reduce(G, disk);
    r.results["normal_form"] = bundle_json(red.P);
    r.results["degrees"] = red.P.degrees();
    r.results["h_residual"] = red.h_residual;
    r.results["min_det_H"] = red.min_det_H;
    r.below("transition_residual", red.h_residual, 1e-9);
    r.above("unit_determinant", red.min_det_H, 1e-8);

    const Reduction again = reduce(red.P.P, disk);
    double idem = 0, det = 0;
    for (int i = 0; i < red.P.n; ++i)
        for (int j = 0; j < red.P.n; ++j)
            idem = std::max(idem, poly::norm(poly::sub(again.P.P(i, j), red.P.P(i, j))));
    for (int k = 0; k < 8; ++k) {
        const cplx z = 0.7 * disk.radius * std::polar(1.0, 2.0 * pi * k / 8.0 + 0.3);
        const cplx d = poly::eval(red.P.det(), z);
        det = std::max(det, std::abs(red.P.eval(z).determinant() - d) / (1 + std::abs(d)));
    }
    r.below("idempotence", idem, 1e-10);
    r.below("determinant_product", det, 1e-10);

    if (!s.config().curve.empty()) {
        const int g = s.ctx().genus();
        const ShapeReport shape = validate_shape(red.P, g);
        r.results["shape_problems"] = shape.problems;
        std::vector<int> flags;
        for (bool b : semistability_flags(red.P, g)) flags.push_back(b);
        r.results["semistability_flags"] = flags;
        r.equal("shape_valid", shape.ok, 1);
    }
}

void cmd_bnt(Session& s, Report& r) {
    const CurveContext& ctx = s.ctx();
    const NormalForm P = s.bundle();
    require_shape(P, ctx.genus());
    const TyurinData D = bnt_matrix(P, ctx);
    const Coranks c = coranks(D, option_double(s.config().options, "corank_threshold", 1e-7));
    const VecR& sv = D.singular_values;
    r.results["n"] = P.n;
    r.results["degrees"] = P.degrees();
    r.results["tyurin_points"] = tyurin_points_json(D.points());
    r.results["T"] = to_json(D.T);
    r.results["singular_values"] = to_json(sv);
    r.results["h0"] = c.h0;
    r.results["h1"] = c.h1;
    r.results["on_theta_divisor"] = c.h1 > 0;
    int deg = 0;
    for (const auto& t : D.points()) deg += t.mult;
    r.equal("tyurin_degree", deg, P.n * ctx.genus());
}

void cmd_cauchy_eval(Session& s, Report& r, const std::string& qflag, const std::string& pflag) {
    const CurveContext& ctx = s.ctx();
    const Curve& C = ctx.curve();
    const NormalForm P = s.bundle();
    require_shape(P, ctx.genus());
    const KernelEvaluator K(ctx, bnt_matrix(P, ctx));
    const Json& opts = s.config().options;
    std::vector<SurfacePoint> qs = option_points(C, opts, "q", {C.point(cplx(0.5, 0.8), 1)});
    std::vector<SurfacePoint> ps = option_points(C, opts, "p", {C.point(cplx(-0.4, 1.1), -1)});
    if (!qflag.empty()) qs = {parse_point_flag(C, qflag, "--q")};
    if (!pflag.empty()) ps = {parse_point_flag(C, pflag, "--p")};

    Json values = Json::array();
    for (const auto& q : qs)
        for (const auto& p : ps)
            values.push_back(Json{{"q", to_json(q)}, {"p", to_json(p)}, {"C", to_json(K.eval(q, p))}});
    r.results["kernel"] = values;
    r.results["condition"] = K.condition_number();

    const KernelReport a = verify_kernel_axioms(K);
    r.below("residue_at_p", a.residue_p, 1e-7);
    r.below("residue_at_infinity", a.residue_inf, 1e-7);
    r.below("regular_in_q_at_tyurin", a.regular_q, 1e-7);
    r.below("regular_in_p_at_tyurin", a.regular_p, 1e-7);
    r.below("tyurin_vectors", a.tyurin_vectors, 1e-7);
    r.below("vanishing_at_infinity", a.vanishing_inf, 1e-4);
}

void cmd_monodromy(Session& s, Report& r) {
    const CurveContext& ctx = s.ctx();
    const NormalForm P = s.bundle();
    require_shape(P, ctx.genus());
    const DivisorSpec d = s.divisor();
    const Connection c = build_connection(s, P, d, s.germs(P.n));
    r.below("reference_connection_axioms", verify_connection(*c.F).max_defect(), 1e-6);
    const ConnectionReport cr = verify_connection(*c.A);
    r.results["connection_axioms"] = connection_report_json(cr);
    r.below("connection_axioms", cr.max_defect(), 1e-6);

    const MonodromyRep rep = monodromy_rep(*c.A);
    Json ma = Json::array(), mb = Json::array();
    for (int k = 0; k < rep.genus(); ++k) {
        ma.push_back(to_json(rep.M_alpha[k]));
        mb.push_back(to_json(rep.M_beta[k]));
    }
    r.results["M_alpha"] = ma;
    r.results["M_beta"] = mb;
    r.results["relation_defect"] = rep.relation_defect;
    r.results["vertex_defect"] = rep.vertex_defect;
    r.below("surface_relation", rep.relation_defect, 1e-7);
    r.below("dissection_vertex", rep.vertex_defect, 1e-7);

    const ConnectionForm& A = *c.A;
    const ApparentReport ap = apparent_singularity_report(A, [&](const ChartPoint& q) { return A.eval(q); });
    r.below("local_monodromy_tyurin", ap.tyurin_loops, 1e-6);
    r.below("local_monodromy_divisor", ap.divisor_loops, 1e-6);
    r.below("apparent_analyticity", ap.analyticity, 1e-6);

    if (const auto alt = s.divisor_alt()) {
        const Connection c2 = build_connection(s, P, *alt, s.germs(P.n));
        const CharacterReport ch = compare_characters(*c.A, *c2.A, std::numeric_limits<double>::infinity());
        Json sa = Json::array(), sb = Json::array();
        for (const cplx& x : ch.alpha) sa.push_back(to_json(x));
        for (const cplx& x : ch.beta) sb.push_back(to_json(x));
        r.results["character_alpha"] = sa;
        r.results["character_beta"] = sb;
        r.below("character_scalar", ch.scalar_defect, 1e-6);
        r.below("character_unimodular", ch.modulus_defect, 1e-6);
        r.below("character_periods", ch.period_defect, 1e-6);
    }
}

void cmd_xi(Session& s, Report& r) {
    const CurveContext& ctx = s.ctx();
    const NormalForm P = s.bundle();
    require_shape(P, ctx.genus());
    const DivisorSpec d = s.divisor();
    const Germs g = s.germs(P.n);
    const ConnectionTangent t = s.tangents(P.n, 1)[0];
    if (!shape_preserving(P, t.v)) throw ValidationError("tangent 0 changes the shape of the normal form");
    const auto h = std::make_shared<const DlogHalf>(ctx, d.D, d.pin);
    const ConnectionFamily fam = connection_family(ctx, P, t.v, h, g);
    const OwnedConnection a = fam(0.0);
    const cplx res = xi_residue(a.A, t.v).value;
    const cplx lv = a.A.higgs().empty() ? cplx(0) : liouville_pairing(a.A.higgs(), *a.K, t.v).value;
    const MonodromyDerivative md = monodromy_derivative(fam, s.fd_step(1e-5));
    const cplx con = xi_contour(a.A, md).value;
    r.results["xi_residue"] = to_json(res);
    r.results["xi_contour"] = to_json(con);
    r.results["liouville_pairing"] = to_json(lv);
    r.results["stencil_gap"] = md.stencil_gap;
    r.below("contour_vs_residue", rel(con, res), 1e-3);
    r.below("residue_vs_liouville", rel(res, lv), 1e-10);
}

void cmd_goldman(Session& s, Report& r) {
    const CurveContext& ctx = s.ctx();
    const NormalForm P = s.bundle();
    require_shape(P, ctx.genus());
    const DivisorSpec d = s.divisor();
    const Germs g = s.germs(P.n);
    const auto ts = s.tangents(P.n, 2);
    for (int i = 0; i < 2; ++i)
        if (!shape_preserving(P, ts[i].v))
            throw ValidationError("tangent " + std::to_string(i) + " changes the shape of the normal form");
    const auto h = std::make_shared<const DlogHalf>(ctx, d.D, d.pin);
    const ConnectionPlane plane = connection_plane(ctx, P, h, g, ts[0], ts[1]);
    const double step = s.fd_step(1e-5);
    const ClosureReport cr = check_dxi_equals_omega(plane, ts[0], ts[1], step);
    r.results["dxi"] = to_json(cr.dxi.value);
    r.results["minus_4_pi_i_dxi"] = to_json(cr.lhs);
    r.results["omega"] = to_json(cr.omega.value);
    r.results["relative_defect"] = cr.relative_defect;
    r.results["closedness"] = cr.closedness;
    r.results["admissibility"] = cr.admissibility;
    r.below("central_identity", cr.relative_defect, P.n == 1 ? 1e-3 : 5e-3);

    const MonodromyDerivative m1 = monodromy_derivative([&](cplx e) { return plane(e, 0.0); }, step);
    const MonodromyDerivative m2 = monodromy_derivative([&](cplx e) { return plane(0.0, e); }, step);
    const GraphReport kr =
        graph_two_form(krichever_graph(m1.rep, {m1.dM_alpha, m2.dM_alpha}, {m1.dM_beta, m2.dM_beta}), 0, 1, 1e-6);
    r.results["omega_krichever"] = to_json(kr.omega.value);
    r.results["krichever_cyclic_defect"] = kr.cyclic_defect;
    r.below("krichever_vs_canonical", rel(kr.omega.value, cr.omega.value), 1e-6);
}

void cmd_theta_scan(Session& s, Report& r, int seed_flag) {
    const CurveContext& ctx = s.ctx();
    const NormalForm P0 = s.bundle();
    require_shape(P0, ctx.genus());
    const DivisorSpec d = s.divisor();
    const DlogHalf h(ctx, d.D, d.pin);
    const Json& opts = s.config().options;
    ThetaProbeOptions opt;
    opt.ring_radius = option_double(opts, "ring_radius", opt.ring_radius);

    ModuliTangent v;
    if (!s.config().tangents.empty()) {
        v = s.tangents(P0.n, 1)[0].v;
        r.results["direction"] = "tangent 0";
    } else {
        const Json& js = option(opts, "seed");
        const int seed = seed_flag >= 0 ? seed_flag : js.is_null() ? 7 : read_int(js, "options/seed");
        v = transversal_direction(ctx, P0, static_cast<unsigned>(seed), 20, opt);
        r.results["direction"] = "search, seed " + std::to_string(seed);
    }
    r.results["dP"] = to_json(v.dP);

    Json scan = Json::array();
    for (const double f : {-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0}) {
        const double eps = f * opt.ring_radius;
        const VecR sv = bnt_matrix(displaced(P0, v, eps), ctx).singular_values;
        scan.push_back(Json{{"eps", eps}, {"sigma_min_ratio", sv(sv.size() - 1) / sv(0)}});
    }
    r.results["scan"] = scan;

    const ThetaProbeReport p = theta_divisor_probe(ctx, P0, v, h, opt);
    r.results["corank"] = p.corank;
    r.results["det_residue"] = to_json(p.det_residue);
    r.results["xi_residue"] = to_json(p.xi_residue);
    r.results["kernel_rank"] = p.kernel_rank;
    r.results["kernel_singular_values"] = to_json(p.kernel_singular_values);
    r.results["kernel_gap"] = p.kernel_gap;
    r.results["Q"] = to_json(p.Q);
    r.results["Q_condition"] = p.Q_condition;
    const double k = std::round(p.det_residue.real());
    r.below("det_residue_integer", std::abs(p.det_residue - k), 1e-3);
    r.equal("det_residue_equals_corank", static_cast<long>(k), p.corank);
    r.below("xi_residue_equals_corank", std::abs(p.xi_residue - double(p.corank)), 1e-2);
    r.equal("kernel_rank_equals_corank", p.kernel_rank, p.corank);
    r.above("kernel_gap", p.kernel_gap, 1e3);
    r.below("residue_kernel_factorization", p.lemma_defect, 1e-6);
}

// ---------------------------------------------------------------- config

fs::path relative_to(const fs::path& base, const Json& j, const std::string& where) {
    if (!j.is_string()) throw InputError(where + ": expected a path string");
    const fs::path p = j.get<std::string>();
    return p.is_absolute() ? p : base / p;
}

RunConfig read_run_config(const fs::path& file) {
    const Json j = read_json(file);
    const std::string w = file.string();
    if (!j.is_object()) throw InputError(w + ": expected an object");
    RunConfig c;
    const fs::path base = file.parent_path();
    const std::pair<const char*, fs::path*> paths[] = {
        {"curve", &c.curve},     {"bundle", &c.bundle},     {"divisor", &c.divisor}, {"divisor_alt", &c.divisor_alt},
        {"germs", &c.germs},     {"tangents", &c.tangents}, {"output", &c.output},   {"fixtures", &c.fixtures}};
    for (const auto& [key, dst] : paths)
        if (j.contains(key)) *dst = relative_to(base, j[key], w + "/" + key);
    if (j.contains("options")) {
        const Json& o = j["options"];
        if (!o.is_object()) throw InputError(w + "/options: expected an object");
        c.options = o;
        if (o.contains("tol")) c.tol = read_double(o["tol"], w + "/options/tol");
        if (o.contains("fd_step")) c.fd_step = read_double(o["fd_step"], w + "/options/fd_step");
        if (o.contains("resolution")) c.resolution = read_int(o["resolution"], w + "/options/resolution");
    }
    return c;
}

}  // namespace

// ---------------------------------------------------------------- entry

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Numerical laboratory for vector bundles on hyperelliptic curves.", "tyurin-lab"};
    std::string config, curve, bundle, divisor, divisor_alt, germs, tangents, output, fixtures, suite, qflag, pflag;
    double tol = 0, fd_step = 0;
    int resolution = 0, seed = -1;
    auto* o_config = app.add_option("--config", config, "Run config (JSON) naming the input files and options");
    auto* o_curve = app.add_option("--curve", curve, "Curve file");
    auto* o_bundle = app.add_option("--bundle", bundle, "Bundle file (normal form, or transition matrix for normalform)");
    auto* o_divisor = app.add_option("--divisor", divisor, "Divisor file for the half-differential");
    auto* o_alt = app.add_option("--divisor-alt", divisor_alt, "Second divisor (character comparison)");
    auto* o_germs = app.add_option("--germs", germs, "Higgs germ file");
    auto* o_tangents = app.add_option("--tangents", tangents, "Tangent directions file");
    auto* o_output = app.add_option("--output", output, "Write the report here instead of stdout");
    auto* o_fixtures = app.add_option("--fixtures", fixtures, "Fixture directory for verify");
    auto* o_tol = app.add_option("--tol", tol, "Replace the bound of every defect check");
    auto* o_fd = app.add_option("--fd-step", fd_step, "Finite-difference step in the moduli");
    auto* o_res = app.add_option("--resolution", resolution, "Gauss-Legendre order per quadrature piece");
    app.require_subcommand(1, 1);

    const std::vector<std::pair<std::string, std::string>> commands{
        {"periods", "Period matrices, tau and their self-convergence"},
        {"normalform", "Reduce a transition matrix to its polynomial normal form"},
        {"bnt", "Tyurin points and the Brill-Noether-Tyurin matrix; reports h0, h1"},
        {"cauchy-eval", "Evaluate the matrix Cauchy kernel and check its axioms"},
        {"monodromy", "Monodromy of the connection F_D + Phi and its checks"},
        {"xi", "The one-form Xi by residues and along the dissection"},
        {"goldman", "-4 pi i dXi against the graph two-form"},
        {"theta-scan", "Residues of Xi and of the kernel across the theta divisor"},
        {"verify", "Run a module's invariants on the reference fixtures"}};
    std::map<std::string, CLI::App*> subs;
    for (const auto& [name, help] : commands) subs[name] = app.add_subcommand(name, help)->fallthrough();
    subs["verify"]->add_option("--suite", suite, "periods|normalform|kernel|connection|monodromy|symplectic|theta")->required();
    subs["cauchy-eval"]->add_option("--q", qflag, "Differential argument q as re,im,sheet");
    subs["cauchy-eval"]->add_option("--p", pflag, "Function argument p as re,im,sheet");
    subs["theta-scan"]->add_option("--seed", seed, "Seed of the transversal direction search");

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(std::move(rev));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    std::string command;
    for (const auto& [name, sub] : subs)
        if (sub->parsed()) command = name;

    RunConfig cfg;
    try {
        if (o_config->count()) cfg = read_run_config(config);
        const std::pair<CLI::Option*, std::pair<const std::string*, fs::path*>> flags[] = {
            {o_curve, {&curve, &cfg.curve}},          {o_bundle, {&bundle, &cfg.bundle}},
            {o_divisor, {&divisor, &cfg.divisor}},    {o_alt, {&divisor_alt, &cfg.divisor_alt}},
            {o_germs, {&germs, &cfg.germs}},          {o_tangents, {&tangents, &cfg.tangents}},
            {o_output, {&output, &cfg.output}},       {o_fixtures, {&fixtures, &cfg.fixtures}}};
        for (const auto& [opt, v] : flags)
            if (opt->count()) *v.second = *v.first;
        if (o_tol->count()) cfg.tol = tol;
        if (o_fd->count()) cfg.fd_step = fd_step;
        if (o_res->count()) cfg.resolution = resolution;
        if (cfg.tol && !(*cfg.tol > 0)) throw InputError("--tol must be positive");
        if (cfg.fd_step && !(*cfg.fd_step > 0)) throw InputError("--fd-step must be positive");
        if (cfg.resolution < 0) throw InputError("--resolution must be positive");
        if (command == "verify") {
            const auto& names = suite_names();
            if (std::find(names.begin(), names.end(), suite) == names.end())
                throw InputError("unknown suite \"" + suite + "\"");
#ifdef TYURIN_FIXTURES_DIR
            if (cfg.fixtures.empty()) cfg.fixtures = TYURIN_FIXTURES_DIR;
#endif
            if (cfg.fixtures.empty()) throw InputError("no fixture directory (--fixtures)");
        }
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }

    Session session(cfg);
    Report report(command == "verify" ? "suite" : "command", command == "verify" ? suite : command, cfg.tol);
    try {
        if (command == "periods") cmd_periods(session, report);
        else if (command == "normalform") cmd_normalform(session, report);
        else if (command == "bnt") cmd_bnt(session, report);
        else if (command == "cauchy-eval") cmd_cauchy_eval(session, report, qflag, pflag);
        else if (command == "monodromy") cmd_monodromy(session, report);
        else if (command == "xi") cmd_xi(session, report);
        else if (command == "goldman") cmd_goldman(session, report);
        else if (command == "theta-scan") cmd_theta_scan(session, report, seed);
        else report = verify_suite(suite, cfg.fixtures, cfg.resolution);
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        report.error(command, e);
    }

    const std::string text = dump(report.json());
    if (cfg.output.empty()) {
        out << text;
    } else {
        std::ofstream f(cfg.output);
        if (!(f << text)) {
            err << "error: " << cfg.output.string() << ": cannot write report\n";
            return 1;
        }
    }
    return report.pass() ? 0 : 2;
}

}  // namespace tyurin::cli
