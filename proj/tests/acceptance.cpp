// Acceptance criteria on the genus two curve y^2 = x^5 - x with n in {1, 2}.
// Prints one PASS/FAIL line per criterion; exits nonzero if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "fixtures.hpp"
#include "tyurin/errors.hpp"
#include "tyurin/symplectic.hpp"

using namespace tyurin;

namespace {

using Germs = std::vector<std::vector<MatC>>;

// Collects named measurements against bounds for one criterion.
class Criterion {
public:
    void below(const std::string& name, double value, double bound) { add(name, value, "<", bound, value < bound); }
    void above(const std::string& name, double value, double bound) { add(name, value, ">=", bound, value >= bound); }
    void equal(const std::string& name, long value, long expected) {
        add(name, double(value), "==", double(expected), value == expected);
    }
    void positive(const std::string& name, double value) { add(name, value, ">", 0.0, value > 0); }
    void note(const std::string& text) { details_ << "; " << text; }
    bool pass() const { return pass_; }
    std::string details() const { return details_.str(); }

private:
    void add(const std::string& name, double value, const char* rel, double bound, bool ok) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s%s %.3g %s %.3g%s", first_ ? "" : "; ", name.c_str(), value, rel, bound,
                      ok ? "" : " [violated]");
        details_ << buf;
        first_ = false;
        pass_ = pass_ && ok;
    }

    std::ostringstream details_;
    bool first_ = true, pass_ = true;
};

int failures = 0;

void run(int id, double time_limit, const std::function<void(Criterion&)>& body) {
    Criterion c;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(c);
    } catch (const std::exception& e) {
        c.note(std::string("exception: ") + e.what());
        c.below("exception", 1, 0);
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (time_limit > 0) c.below("runtime_s", secs, time_limit);
    else {
        char buf[48];
        std::snprintf(buf, sizeof buf, "runtime %.3g s", secs);
        c.note(buf);
    }
    std::printf("criterion %d: %s  %s\n", id, c.pass() ? "PASS" : "FAIL", c.details().c_str());
    std::fflush(stdout);
    if (!c.pass()) ++failures;
}

NormalForm scalar(const DiskSpec& d, const std::vector<cplx>& roots) {
    NormalForm P{1, d, PolyMatrix(1)};
    P.P(0, 0) = poly::from_roots(roots);
    return P;
}

ModuliTangent scalar_tangent(const Poly& p) {
    ModuliTangent v{PolyMatrix(1)};
    v.dP(0, 0) = p;
    return v;
}

NormalForm generic2(test::Rng& r, const DiskSpec& d) {
    std::vector<cplx> roots;
    for (int k = 0; k < 4; ++k) roots.push_back(r.in_disk(0.7 * d.radius));
    return generic_normal_form(d, {r.poly(3)}, poly::from_roots(roots));
}

ModuliTangent random_tangent(test::Rng& r, const NormalForm& P) {
    const auto basis = tangent_basis(P);
    VecC c(basis.size());
    for (auto& x : c) x = r.c();
    return combine(basis, c);
}

Germs random_germs(test::Rng& r, int points, int n, double scale) {
    Germs g(points);
    for (auto& gt : g)
        for (int k = 0; k < 2; ++k) {
            MatC m(n, n);
            for (int i = 0; i < n * n; ++i) m.data()[i] = scale * r.c();
            gt.push_back(m);
        }
    return g;
}

Divisor divisor1(const Curve& C) { return {{C.point(cplx(0.7, -1.4), 1), 1}, {C.point(cplx(-1.9, 1.2), -1), 1}}; }
Divisor divisor2(const Curve& C) { return {{C.point(cplx(1.5, 0.6), -1), 1}, {C.point(cplx(-0.6, -1.7), 1), 1}}; }

std::vector<ChartPoint> probes(const Curve& C) {
    std::vector<ChartPoint> q;
    for (const cplx x : {cplx(0.5, 0.8), cplx(-0.9, -0.3), cplx(2.0, 0.5), cplx(0.1, -0.7), cplx(1.1, -0.2)})
        for (int s : {1, -1}) q.push_back(test::plane_point(C.point(x, s)));
    return q;
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

template <class F>
auto derivative(F&& f, double h) {
    using T = std::decay_t<decltype(f(0.0))>;
    return T((f(-2 * h) - 8.0 * f(-h) + 8.0 * f(h) - f(2 * h)) / (12.0 * h));
}

double coeff_defect(const NormalForm& a, const NormalForm& b) {
    double d = 0;
    for (int i = 0; i < a.n; ++i)
        for (int j = 0; j < a.n; ++j) {
            const Poly &p = a.P(i, j), &q = b.P(i, j);
            for (std::size_t k = 0; k < std::max(p.size(), q.size()); ++k)
                d = std::max(d, std::abs((k < p.size() ? p[k] : 0.0) - (k < q.size() ? q[k] : 0.0)));
        }
    return d;
}

// ------------------------------------------------------------------ criteria

void periods(Criterion& c) {
    const CurveContext& ctx = test::reference_context();
    const MatC& tau = ctx.tau();
    c.below("tau_symmetry", max_abs(tau - tau.transpose()), 1e-8);
    Eigen::SelfAdjointEigenSolver<MatR> es(MatR(tau.imag()));
    c.positive("im_tau_min_eigenvalue", es.eigenvalues().minCoeff());
    QuadratureConfig fine = ctx.config();
    fine.order *= 2;
    const CurveContext ctx2(ctx.curve(), ctx.infinity(), fine);
    c.below("doubled_order_shift", std::max(max_abs(ctx2.A() - ctx.A()), max_abs(ctx2.B() - ctx.B())), 1e-9);
}

void normal_form_round_trip(Criterion& c) {
    test::Rng r(2024);
    auto unit = [&](int n) {
        MatC C;
        do {
            C = MatC::Zero(n, n);
            for (int i = 0; i < n * n; ++i) C.data()[i] = r.u();
        } while (std::abs(C.determinant()) < 0.2);
        PolyMatrix N(n), Cm(n);
        for (int i = 0; i < n; ++i) {
            N(i, i) = Poly{1.0};
            for (int j = i + 1; j < n; ++j) N(i, j) = Poly{0.0, r.c()};
            for (int j = 0; j < n; ++j) Cm(i, j) = Poly{C(i, j)};
        }
        return Cm * N;
    };
    const std::vector<std::vector<int>> strata{{0, 4}, {1, 3}, {2, 2}, {3, 1}, {4, 0}, {2, 1, 3}, {0, 3, 3}};
    double round_trip = 0, idem = 0;
    for (int t = 0; t < 100; ++t) {
        const auto& d = strata[t % strata.size()];
        const int n = static_cast<int>(d.size());
        NormalForm P0{n, DiskSpec{0.0, 1.0, 1, -1}, PolyMatrix(n)};
        for (int j = 0; j < n; ++j) {
            std::vector<cplx> roots;
            for (int k = 0; k < d[j]; ++k) roots.push_back(r.in_disk(0.8));
            P0.P(j, j) = poly::from_roots(roots);
            for (int k = 0; k < j; ++k)
                if (d[j] > 0) P0.P(j, k) = r.poly(d[j] - 1);
        }
        const Reduction red = reduce(P0.P * unit(n), P0.disk);
        round_trip = std::max(round_trip, coeff_defect(red.P, P0));
        idem = std::max(idem, coeff_defect(reduce(red.P.P, P0.disk).P, red.P));
    }
    c.below("round_trip_defect", round_trip, 1e-8);
    c.below("idempotence_defect", idem, 1e-10);
}

void theta_divisor_detection(Criterion& c) {
    const CurveContext& ctx = test::reference_context();
    const Curve& C = ctx.curve();
    // n = 1: the BNT matrix is V times the Brill-Noether matrix [omega_i(t_j)].
    {
        const DiskSpec disk = test::reference_disk();
        const Chart ch = disk_chart(C, disk);
        test::Rng r(11);
        double d = 0;
        for (int rep = 0; rep < 10; ++rep) {
            const TyurinData D = bnt_matrix(scalar(disk, {r.in_disk(0.6), r.in_disk(0.6)}), ctx);
            const auto& pts = D.points();
            MatC BN(2, 2), V(2, 2);
            for (int j = 0; j < 2; ++j) {
                const VecC om = ctx.omega(C.at(ch, pts[j].z));
                for (int i = 0; i < 2; ++i) BN(j, i) = om(i);
                const cplx dp = poly::eval(poly::derivative(D.P.p(0)), pts[j].z);
                for (int k = 0; k < 2; ++k) V(k, j) = std::pow(pts[j].z, k) / dp;
            }
            d = std::max(d, max_abs(D.T - V * BN) / (1 + max_abs(D.T)));
        }
        c.below("bnt_vs_brill_noether", d, 1e-9);
    }
    // Corank 1 exactly when theta vanishes at A(T) + K.
    const DiskSpec bd = test::branch_disk();
    const Chart ch = disk_chart(C, bd);
    int agree_special = 0, agree_random = 0, specials = 0;
    auto agrees = [&](cplx a, cplx b) {
        const TyurinData D = bnt_matrix(scalar(bd, {a, b}), ctx);
        const VecC AT = ctx.abel(C.from_chart(ch, a)) + ctx.abel(C.from_chart(ch, b));
        const bool special = std::abs(ctx.theta(ctx.reduce(AT + ctx.riemann_constants()))) < 1e-6;
        specials += special;
        return (coranks(D).h1 == 1) == special;
    };
    for (int k = 0; k < 10; ++k) {
        const cplx a = (0.55 + 0.02 * k) * std::polar(1.0, pi * (0.45 + 0.03 * k));
        agree_special += agrees(a, -a);
    }
    test::Rng r(3);
    for (int k = 0; k < 50; ++k) {
        cplx a, b;
        do {
            a = r.in_disk(0.85);
            b = r.in_disk(0.85);
        } while (std::abs(a) < 0.55 || std::abs(b) < 0.55 || std::abs(a + b) < 0.05 || std::abs(a - b) < 0.05);
        agree_random += agrees(a, b);
    }
    c.equal("special_cases_agreeing", agree_special, 10);
    c.equal("random_cases_agreeing", agree_random, 50);
    c.equal("theta_vanishing_cases", specials, 10);
}

void cauchy_kernel_axioms(Criterion& c) {
    const CurveContext& ctx = test::reference_context();
    const Curve& C = ctx.curve();
    test::Rng r(21);
    KernelReport worst;
    auto absorb = [&](const KernelReport& k) {
        worst.residue_p = std::max(worst.residue_p, k.residue_p);
        worst.residue_inf = std::max(worst.residue_inf, k.residue_inf);
        worst.regular_q = std::max(worst.regular_q, k.regular_q);
        worst.regular_p = std::max(worst.regular_p, k.regular_p);
    };
    for (int rep = 0; rep < 3; ++rep) absorb(verify_kernel_axioms(KernelEvaluator(ctx, bnt_matrix(generic2(r, test::reference_disk()), ctx))));
    absorb(verify_kernel_axioms(KernelEvaluator(ctx, bnt_matrix(generic2(r, test::branch_disk()), ctx))));
    c.below("residue_at_p", worst.residue_p, 1e-7);
    c.below("residue_at_infinity", worst.residue_inf, 1e-7);
    c.below("regular_across_tyurin", std::max(worst.regular_q, worst.regular_p), 1e-7);

    // Single-valuedness in p: Richardson-extrapolated jump across each a-cycle.
    {
        test::Rng r9(9);
        const KernelEvaluator K(ctx, bnt_matrix(generic2(r9, test::reference_disk()), ctx));
        const ChartPoint q = test::plane_point(C.point(cplx(-0.4, 1.7), 1));
        double jump = 0;
        for (int l = 0; l < ctx.genus(); ++l) {
            const LiftedPath& a = ctx.a_cycles()[l];
            const ChartPoint mid = a.at(1, 0.5);
            const Segment& arc = a.path().segments[1];
            const cplx nrm = (mid.x - arc.a) / std::abs(mid.x - arc.a);
            auto f = [&](double s) {
                const cplx x = mid.x + s * nrm;
                return K.eval_normalized(q, C.point_with_y(x, test::y_near(C, mid.x, mid.y, x)));
            };
            auto D = [&](double d) { return MatC(f(d) - f(-d)); };
            const double d = 0.02;
            const MatC D1 = D(d), D2 = D(d / 2), D4 = D(d / 4), D8 = D(d / 8);
            const MatC R1 = 2.0 * D2 - D1, R2 = 2.0 * D4 - D2, R3 = 2.0 * D8 - D4;
            const MatC S1 = (4.0 * R2 - R1) / 3.0, S2 = (4.0 * R3 - R2) / 3.0;
            jump = std::max(jump, max_abs(MatC((16.0 * S2 - S1) / 15.0)));
        }
        c.below("p_single_valuedness", jump, 1e-6);
    }

    // n = 1 against the bordered determinant of omegas and a third kind differential.
    {
        const std::vector<cplx> ts{cplx(0.3, -0.2), cplx(-0.25, 0.35)};
        const KernelEvaluator K(ctx, bnt_matrix(scalar(test::reference_disk(), ts), ctx));
        double d = 0;
        for (const cplx xp : {cplx(0.4, 1.5), cplx(-2.1, 0.3)}) {
            const SurfacePoint p = C.point(xp, -1);
            const ThirdKind w = ctx.third_kind(p, ctx.infinity(), ThirdKindMode::ANormalized);
            for (const cplx xq : {cplx(1.3, -1.2), cplx(-0.6, -0.9)}) {
                const ChartPoint q = test::plane_point(C.point(xq, 1));
                MatC M(3, 3);
                for (int j = 0; j < 2; ++j) {
                    const ChartPoint t = C.at(K.chart(), ts[j]);
                    const VecC om = ctx.omega(t);
                    M(j, 0) = om(0), M(j, 1) = om(1), M(j, 2) = ctx.eval(w, t);
                }
                const VecC oq = ctx.omega(q);
                M(2, 0) = oq(0), M(2, 1) = oq(1), M(2, 2) = ctx.eval(w, q);
                const cplx expect = M.determinant() / M.topLeftCorner(2, 2).determinant();
                d = std::max(d, std::abs(K.eval(q, p)(0, 0) - expect) / (1 + std::abs(expect)));
            }
        }
        c.below("classical_determinant_kernel", d, 1e-8);
    }
}

// Offset of the n = 1 reference connection from the theta closed form
// d ln[theta(A(p) - f) / theta(A(p) - A(D) - K)] + omega . grad ln theta(f), f = A(T) + K,
// which is itself defined modulo 2 pi i Z^g . omega. Returns the residual after
// removing the nearest lattice vector.
double theta_closed_form_residual(const CurveContext& ctx, const ConnectionForm& F, const Divisor& Dv, VecC* offset) {
    const Curve& C = ctx.curve();
    const KernelEvaluator& K = F.kernel();
    VecC f = ctx.riemann_constants(), AD = VecC::Zero(ctx.genus());
    for (const auto& t : K.data().points()) f += ctx.abel(t.point);
    for (const auto& q : Dv) AD += double(q.mult) * ctx.abel(q.point);
    const ThetaValue tf = ctx.theta_grad(f);
    const VecC gl = tf.gradient / tf.value;
    const std::vector<cplx> xs{cplx(0.5, 0.8), cplx(-0.9, -0.3), cplx(2.0, 0.5), cplx(0.1, -0.7), cplx(1.1, -0.2)};
    MatC M(xs.size(), ctx.genus());
    VecC b(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const SurfacePoint p = C.point(xs[i], 1);
        const ChartPoint cp = test::plane_point(p);
        const VecC om = ctx.omega(cp), a = ctx.abel(p);
        const ThetaValue g1 = ctx.theta_grad(a - f), g2 = ctx.theta_grad(a - AD - ctx.riemann_constants());
        const cplx closed = om.cwiseProduct(g1.gradient).sum() / g1.value -
                            om.cwiseProduct(g2.gradient).sum() / g2.value + om.cwiseProduct(gl).sum();
        M.row(i) = om.transpose();
        b(i) = F.eval(cp)(0, 0) - closed;
    }
    VecC m = M.colPivHouseholderQr().solve(b) / two_pi_i;
    if (offset) *offset = m;
    for (auto& x : m) x = std::round(x.real());
    return (b - M * m * two_pi_i).cwiseAbs().maxCoeff();
}

void connection_axioms(Criterion& c) {
    const CurveContext& ctx = test::reference_context();
    const Curve& C = ctx.curve();
    test::Rng r(33);
    const DlogHalf h(ctx, divisor1(C));
    std::vector<KernelEvaluator> Ks;
    Ks.emplace_back(ctx, bnt_matrix(scalar(test::reference_disk(), {cplx(0.3, -0.2), cplx(-0.25, 0.35)}), ctx));
    Ks.emplace_back(ctx, bnt_matrix(generic2(r, test::reference_disk()), ctx));
    Ks.emplace_back(ctx, bnt_matrix(generic2(r, test::branch_disk()), ctx));
    double ax = 0;
    for (const auto& K : Ks) ax = std::max(ax, verify_connection(ConnectionForm(K, h)).max_defect());
    c.below("axiom_defect", ax, 1e-6);

    // n = 1 theta closed form with the mandated unitary pin; the a-trivial pin is
    // reported alongside.
    double unitary = 0, a_trivial = 0;
    VecC m;
    const KernelEvaluator K1(ctx, bnt_matrix(scalar(test::branch_disk(), {cplx(0.3, -0.2), cplx(-0.25, 0.55)}), ctx));
    for (const Divisor& Dv : {divisor1(C), divisor2(C)}) {
        const DlogHalf hU(ctx, Dv), hA(ctx, Dv, HalfPin::ATrivial);
        unitary = std::max(unitary, theta_closed_form_residual(ctx, ConnectionForm(K1, hU), Dv, &m));
        a_trivial = std::max(a_trivial, theta_closed_form_residual(ctx, ConnectionForm(K1, hA), Dv, nullptr));
    }
    c.below("theta_closed_form", unitary, 1e-5);
    char buf[200];
    std::snprintf(buf, sizeof buf, "unitary pin offset m = (%.3f, %.3f) in omega . 2 pi i m; a-trivial pin residual %.2g",
                  m(0).real(), m(1).real(), a_trivial);
    c.note(buf);

    // Changing the divisor adds minus the imaginary-normalized third kind differentials.
    const Divisor D1 = divisor1(C), D2 = divisor2(C);
    const DlogHalf h1(ctx, D1), h2(ctx, D2);
    const ConnectionForm F1(Ks[1], h1), F2(Ks[1], h2);
    std::vector<ThirdKind> w;
    for (int i = 0; i < 2; ++i) w.push_back(ctx.third_kind(D2[i].point, D1[i].point, ThirdKindMode::ImaginaryPeriods));
    double dc = 0;
    for (const auto& q : probes(C)) {
        cplx expect = 0;
        for (const auto& wi : w) expect -= ctx.eval(wi, q);
        dc = std::max(dc, max_abs(MatC(F2.eval(q) - F1.eval(q) - expect * MatC::Identity(2, 2))) / (1 + std::abs(expect)));
    }
    c.below("divisor_change", dc, 1e-7);
}

void monodromy_validity(Criterion& c) {
    const CurveContext& ctx = test::reference_context();
    const Curve& C = ctx.curve();
    test::Rng r(52);
    const KernelEvaluator K(ctx, bnt_matrix(generic2(r, test::reference_disk()), ctx));
    const HiggsField phi(K, holomorphic_germs(K, random_germs(r, K.data().points().size(), 2, 0.003)));
    const DlogHalf h1(ctx, divisor1(C)), h2(ctx, divisor2(C));
    const ConnectionForm A1 = assemble_connection(ConnectionForm(K, h1), phi);
    const ConnectionForm A2 = assemble_connection(ConnectionForm(K, h2), phi);
    const MonodromyRep rep = monodromy_rep(A1);
    c.below("surface_relation", rep.relation_defect, 1e-7);
    const ApparentReport ap = apparent_singularity_report(A1, [&](const ChartPoint& q) { return A1.eval(q); });
    c.below("local_monodromy_tyurin", ap.tyurin_loops, 1e-6);
    c.below("local_monodromy_divisor", ap.divisor_loops, 1e-6);
    const CharacterReport ch = compare_characters(A1, A2, 1e-6);
    c.below("character_scalar", ch.scalar_defect, 1e-6);
    c.below("character_unimodular", ch.modulus_defect, 1e-6);
}

void central_identity(Criterion& c) {
    const CurveContext& ctx = test::reference_context();
    const Curve& C = ctx.curve();
    auto h = std::make_shared<const DlogHalf>(ctx, divisor1(C));
    {
        const NormalForm P = scalar(test::reference_disk(), {cplx(0.3, -0.2), cplx(-0.25, 0.45)});
        test::Rng r(67);
        const Germs g = random_germs(r, 2, 1, 0.03);
        const ConnectionTangent t1{scalar_tangent(Poly{cplx(0.1, 0.05), cplx(-0.05, 0.08)}), {}};
        const ConnectionTangent t2{scalar_tangent(Poly{cplx(-0.07, 0.02), cplx(0.04, 0.1)}), random_germs(r, 2, 1, 0.03)};
        c.below("rank_one_relative_defect", check_dxi_equals_omega(connection_plane(ctx, P, h, g, t1, t2), t1, t2).relative_defect, 1e-3);
    }
    test::Rng r(41);
    std::vector<cplx> roots;
    for (int k = 0; k < 4; ++k) roots.push_back(r.in_disk(0.63));
    const NormalForm P = generic_normal_form(test::reference_disk(), {r.poly(3)}, poly::from_roots(roots));
    const ModuliTangent v1 = random_tangent(r, P), v2 = random_tangent(r, P);
    const KernelEvaluator K(ctx, bnt_matrix(P, ctx));
    test::Rng rg(65);
    const int T = static_cast<int>(K.data().points().size());
    const Germs g = random_germs(rg, T, 2, 0.003);
    const ConnectionTangent t1{v1, {}}, t2{v2, random_germs(rg, T, 2, 0.003)};
    c.below("rank_two_relative_defect", check_dxi_equals_omega(connection_plane(ctx, P, h, g, t1, t2), t1, t2).relative_defect, 5e-3);
    const ConnectionFamily fam = connection_family(ctx, P, v1, h, g);
    const cplx res = xi_residue(fam(0.0).A, v1).value;
    c.below("xi_contour_vs_residue", rel(xi_contour(fam).value, res), 1e-3);
}

void rank_one_closed_forms(Criterion& c) {
    const CurveContext& ctx = test::reference_context();
    const Curve& C = ctx.curve();
    const DlogHalf h(ctx, divisor1(C));
    const NormalForm P = scalar(test::reference_disk(), {cplx(0.3, -0.2), cplx(-0.25, 0.45)});
    const ModuliTangent v = scalar_tangent(Poly{cplx(0.4, 0.1), cplx(-0.2, 0.3)});
    const KernelEvaluator K(ctx, bnt_matrix(P, ctx));
    const ConnectionForm F = reference_connection(K, h);
    auto theta_argument = [&](double e) {
        VecC f = ctx.riemann_constants();
        for (const auto& t : bnt_matrix(displaced(P, v, e), ctx).points()) f += ctx.abel(t.point);
        return f;
    };
    const double step = 1e-4;
    const VecC df = derivative(theta_argument, step);
    const cplx dlog_theta = derivative([&](double e) { return std::log(ctx.theta(theta_argument(e))); }, step);
    const ThetaValue tf = ctx.theta_grad(theta_argument(0.0));
    const VecC cvec = (VecC(2) << cplx(0.6, -0.3), cplx(-0.2, 0.9)).finished();
    auto section = [&](const VecC& coeff) {
        const auto germs = higgs_germs(K, [&](const ChartPoint& q) {
            return MatC::Constant(1, 1, ctx.omega(q).cwiseProduct(coeff).sum());
        }, 6);
        return assemble_connection(F, HiggsField(K, holomorphic_germs(K, germs)));
    };
    const cplx pure = xi_residue(section(cvec), v).value;
    c.below("pure_higgs_section", std::abs(pure + cvec.cwiseProduct(df).sum()), 1e-6);
    const cplx theta = xi_residue(section(cvec - tf.gradient / tf.value), v).value;
    c.below("theta_section", std::abs(theta - (dlog_theta - cvec.cwiseProduct(df).sum())), 1e-5);
}

void theta_divisor_residue(Criterion& c) {
    const CurveContext& ctx = test::reference_context();
    const Curve& C = ctx.curve();
    const DlogHalf h(ctx, divisor1(C));
    const cplx a(0.35, 0.2);
    const NormalForm P0 = scalar(test::branch_disk(), {a, -a});
    const ThetaProbeReport rep = theta_divisor_probe(ctx, P0, scalar_tangent(Poly{0.0, 1.0}), h);
    c.below("xi_loop_minus_one", std::abs(rep.xi_residue - 1.0), 1e-2);
    const cplx d = rep.det_residue;
    c.below("det_residue_integrality", std::abs(d - std::round(d.real())), 1e-3);
    c.equal("det_residue_equals_h1", std::lround(d.real()), rep.corank);
    c.equal("kernel_rank_equals_h1", rep.kernel_rank, rep.corank);
    c.above("kernel_gap", rep.kernel_gap, 1e3);
}

void variational_cross_checks(Criterion& c) {
    const CurveContext& ref = test::reference_context();
    QuadratureConfig low = ref.config();
    low.order /= 2;
    const CurveContext ctx(ref.curve(), ref.infinity(), low);
    const Curve& C = ctx.curve();
    test::Rng r(41);
    const NormalForm P = generic2(r, test::reference_disk());
    const ModuliTangent v = random_tangent(r, P);
    const KernelEvaluator K(ctx, bnt_matrix(P, ctx));
    const Germs g = random_germs(r, K.data().points().size(), 2, 0.003);
    const auto h1 = std::make_shared<const DlogHalf>(ctx, divisor1(C));
    const auto h2 = std::make_shared<const DlogHalf>(ctx, divisor2(C));

    // Variation of the flat section: jump contour formula against central differences.
    double psi = 0;
    const double eps = 1e-5;
    for (const auto& germs : {Germs{}, g}) {
        const auto fam = connection_family(ctx, P, v, h1, germs);
        const OwnedConnection a0 = fam(0.0);
        const MonodromyRep r0 = monodromy_rep(a0.A), rp = monodromy_rep(fam(eps).A), rm = monodromy_rep(fam(-eps).A);
        std::vector<MatC> dA, dB;
        for (int k = 0; k < ctx.genus(); ++k) {
            dA.push_back((rp.M_alpha[k] - rm.M_alpha[k]) / (2 * eps));
            dB.push_back((rp.M_beta[k] - rm.M_beta[k]) / (2 * eps));
        }
        for (const cplx x : {cplx(2.5, 0.8), cplx(1.2, 1.5)}) {
            const SurfacePoint p = C.point(x, 1);
            const MatC fd = psi_variation_fd(fam, p, eps);
            const MatC ct = psi_variation_contour(a0.A, r0, dA, dB, p);
            psi = std::max(psi, max_abs(MatC(fd - ct)) / (1 + max_abs(fd)));
        }
    }
    c.below("flat_section_variation", psi, 1e-4);

    // Variation of the reference connection: residue formula against central differences.
    double fay = 0;
    const double e2 = 1e-4;
    const KernelEvaluator Kp(ctx, bnt_matrix(displaced(P, v, e2), ctx)), Km(ctx, bnt_matrix(displaced(P, v, -e2), ctx));
    for (const auto& q : probes(C)) {
        const MatC expect = fay_variation(K, v, q);
        for (const auto& h : {h1, h2}) {
            const MatC fd = (ConnectionForm(Kp, *h).eval(q) - ConnectionForm(Km, *h).eval(q)) / (2 * e2);
            fay = std::max(fay, max_abs(MatC(fd - expect)) / (1 + max_abs(expect)));
        }
    }
    c.below("reference_connection_variation", fay, 1e-4);
    c.note("quadrature order " + std::to_string(low.order));
}

}  // namespace

int main() {
    run(1, 30, periods);
    run(2, 60, normal_form_round_trip);
    run(3, 0, theta_divisor_detection);
    run(4, 120, cauchy_kernel_axioms);
    run(5, 0, connection_axioms);
    run(6, 180, monodromy_validity);
    run(7, 600, central_identity);
    run(8, 0, rank_one_closed_forms);
    run(9, 0, theta_divisor_residue);
    run(10, 600, variational_cross_checks);
    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
