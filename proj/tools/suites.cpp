#include <random>

#include "cli.hpp"
#include "tyurin/errors.hpp"

namespace tyurin::cli {

namespace fs = std::filesystem;

namespace {

double rel(cplx a, cplx b) {
    const double s = std::max(std::abs(a), std::abs(b));
    return s > 0 ? std::abs(a - b) / s : 0.0;
}

struct Rng {
    std::mt19937 rng;
    std::uniform_real_distribution<double> U{-1.0, 1.0};
    explicit Rng(unsigned seed) : rng(seed) {}
    double u() { return U(rng); }
    cplx c() { return {u(), u()}; }
    cplx in_disk(double r) {
        cplx z;
        do z = c(); while (std::abs(z) > 1.0);
        return r * z;
    }
    Poly poly(int deg) {
        Poly p;
        for (int k = 0; k <= deg; ++k) p.push_back(c());
        return p;
    }
    MatC mat(int n, double scale) {
        MatC m(n, n);
        for (int i = 0; i < n * n; ++i) m.data()[i] = scale * c();
        return m;
    }
};

class Fixtures {
public:
    Fixtures(fs::path dir, int resolution) : dir_(std::move(dir)), resolution_(resolution) {}

    const CurveContext& ctx() {
        if (!ctx_) ctx_ = read_curve(read_json(dir_ / "curve.json"), (dir_ / "curve.json").string(), resolution_);
        return *ctx_;
    }
    NormalForm bundle(const char* name) { return read_bundle(read_json(dir_ / name), (dir_ / name).string()); }
    DivisorSpec divisor(const char* name) {
        return read_divisor(ctx().curve(), read_json(dir_ / name), (dir_ / name).string());
    }
    Germs germs(const char* name, int n) { return read_germs(read_json(dir_ / name), n, (dir_ / name).string()); }
    std::vector<ConnectionTangent> tangents(const char* name, int n) {
        return read_tangents(read_json(dir_ / name), n, (dir_ / name).string());
    }

private:
    fs::path dir_;
    int resolution_;
    std::unique_ptr<CurveContext> ctx_;
};

// Runs one group of checks; a failure inside is recorded, not propagated.
template <class F>
void group(Report& r, const std::string& name, F&& f) {
    try {
        f();
    } catch (const InputError&) {
        throw;
    } catch (const std::exception& e) {
        r.error(name, e);
    }
}

// d/d(conj e) of f at 0 relative to |df/de|, by central differences.
template <class F>
double conjugate_derivative(F&& f, double eps) {
    const MatC fx = (f(cplx(eps)) - f(cplx(-eps))) / (2 * eps);
    const MatC fy = (f(cplx(0, eps)) - f(cplx(0, -eps))) / (2 * eps);
    return max_abs(fx + I * fy) / (1 + max_abs(fx));
}

std::vector<ChartPoint> probes(const Curve& C) {
    std::vector<ChartPoint> q;
    for (const cplx x : {cplx(0.5, 0.8), cplx(-0.9, -0.3), cplx(2.0, 0.5), cplx(0.1, -0.7)})
        for (int s : {1, -1}) {
            const SurfacePoint p = C.point(x, s);
            q.push_back(ChartPoint{p.x, p.x, p.y, 1.0, 1.0 / p.y});
        }
    return q;
}

// ---------------------------------------------------------------- periods

void suite_periods(Fixtures& fx, Report& r) {
    const CurveContext& ctx = fx.ctx();
    const Curve& C = ctx.curve();
    group(r, "period_matrix", [&] {
        const MatC& tau = ctx.tau();
        r.below("tau_symmetry", max_abs(tau - tau.transpose()), 1e-8);
        Eigen::SelfAdjointEigenSolver<MatR> es(MatR(tau.imag()));
        r.positive("im_tau_min_eigenvalue", es.eigenvalues().minCoeff());
        QuadratureConfig fine = ctx.config();
        fine.order *= 2;
        const CurveContext ctx2(C, ctx.infinity(), fine);
        r.below("period_self_convergence", std::max(max_abs(ctx2.A() - ctx.A()), max_abs(ctx2.B() - ctx.B())), 1e-9);
    });
    group(r, "normalized_periods", [&] {
        double a = 0, b = 0;
        for (int j = 0; j < ctx.genus(); ++j) {
            auto om = [&](const ChartPoint& p) -> VecC { return ctx.omega(p); };
            const VecC aj = integrate<VecC>(ctx.a_cycles()[j], om, 96, 0.3);
            const VecC bj = integrate<VecC>(ctx.b_cycles()[j], om, 96, 0.3);
            for (int k = 0; k < ctx.genus(); ++k) {
                a = std::max(a, std::abs(aj(k) - (j == k ? 1.0 : 0.0)));
                b = std::max(b, std::abs(bj(k) - ctx.tau()(j, k)));
            }
        }
        r.below("a_normalization", a, 1e-10);
        r.below("b_periods_equal_tau", b, 1e-8);
    });
    group(r, "residues_on_shrinking_circles", [&] {
        // Third kind differential with residue +1 at P; the trapezoid rule on
        // circles is spectrally accurate, so every radius must give 1.
        const SurfacePoint P = C.point(cplx(0.4, 0.9), 1);
        const Chart ch = C.disk_chart(P.x, 1, 0.3);
        double worst = 0;
        for (const double rad : {0.2, 0.1, 0.05, 0.025}) {
            const cplx res = circle_residue<cplx>([&](cplx z) { return ctx.Omega(P, ctx.infinity(), C.at(ch, z)); }, 0.0,
                                                  rad, ctx.config().residue_nodes);
            worst = std::max(worst, std::abs(res - 1.0));
        }
        r.below("third_kind_residue", worst, 1e-10);
    });
}

// ---------------------------------------------------------------- normal form

double coeff_defect(const NormalForm& a, const NormalForm& b) {
    double d = 0;
    for (int i = 0; i < a.n; ++i)
        for (int j = 0; j < a.n; ++j) d = std::max(d, poly::norm(poly::sub(a.P(i, j), b.P(i, j))));
    return d;
}

NormalForm random_normal_form(Rng& g, const std::vector<int>& d) {
    const int n = static_cast<int>(d.size());
    NormalForm P{n, DiskSpec{0.0, 1.0, 1, -1}, PolyMatrix(n)};
    for (int j = 0; j < n; ++j) {
        std::vector<cplx> roots;
        for (int k = 0; k < d[j]; ++k) roots.push_back(g.in_disk(0.8));
        P.P(j, j) = poly::from_roots(roots);
        for (int k = 0; k < j; ++k)
            if (d[j] > 0) P.P(j, k) = g.poly(d[j] - 1);
    }
    return P;
}

// C (1 + z N), N strictly upper triangular: a polynomial unit.
PolyMatrix random_unit(Rng& g, int n) {
    MatC C;
    do C = g.mat(n, 1.0); while (std::abs(C.determinant()) < 0.2);
    PolyMatrix N(n), Cm(n);
    for (int i = 0; i < n; ++i) {
        N(i, i) = Poly{1.0};
        for (int j = i + 1; j < n; ++j) N(i, j) = Poly{0.0, g.c()};
        for (int j = 0; j < n; ++j) Cm(i, j) = Poly{C(i, j)};
    }
    return Cm * N;
}

void suite_normalform(Fixtures& fx, Report& r) {
    group(r, "random_pairs", [&] {
        Rng g(2024);
        const std::vector<std::vector<int>> strata{{0, 4}, {1, 3}, {2, 2}, {3, 1}, {4, 0}};
        double trip = 0, uniq = 0, idem = 0, det = 0;
        for (int t = 0; t < 20; ++t) {
            const NormalForm P0 = random_normal_form(g, strata[t % strata.size()]);
            const Reduction r1 = reduce(P0.P * random_unit(g, 2), P0.disk);
            const Reduction r2 = reduce(P0.P * random_unit(g, 2), P0.disk);
            trip = std::max(trip, coeff_defect(r1.P, P0));
            uniq = std::max(uniq, coeff_defect(r1.P, r2.P));
            idem = std::max(idem, coeff_defect(reduce(r1.P.P, P0.disk).P, r1.P));
            const cplx z(0.31, 0.17);
            det = std::max(det, std::abs(r1.P.eval(z).determinant() - poly::eval(r1.P.det(), z)));
        }
        r.below("round_trip", trip, 1e-8);
        r.below("uniqueness", uniq, 1e-8);
        r.below("idempotence", idem, 1e-10);
        r.below("determinant_product", det, 1e-10);
    });
    group(r, "fixture", [&] {
        const NormalForm P = fx.bundle("bundle_n2.json");
        const Reduction again = reduce(P.P, P.disk);
        r.below("fixture_idempotence", coeff_defect(again.P, P), 1e-10);
        r.equal("fixture_shape_valid", validate_shape(P, fx.ctx().genus()).ok, 1);
    });
}

// ---------------------------------------------------------------- kernel

void suite_kernel(Fixtures& fx, Report& r) {
    const CurveContext& ctx = fx.ctx();
    const Curve& C = ctx.curve();
    const NormalForm P = fx.bundle("bundle_n2.json");
    const ModuliTangent v = fx.tangents("tangents_n2.json", P.n).at(0).v;
    group(r, "axioms", [&] {
        const KernelEvaluator K(ctx, bnt_matrix(P, ctx));
        const KernelReport a = verify_kernel_axioms(K);
        r.below("residue_at_p", a.residue_p, 1e-7);
        r.below("residue_at_infinity", a.residue_inf, 1e-7);
        r.below("regular_in_q_at_tyurin", a.regular_q, 1e-7);
        r.below("regular_in_p_at_tyurin", a.regular_p, 1e-7);
        r.below("tyurin_vectors", a.tyurin_vectors, 1e-7);
        r.below("vanishing_at_infinity", a.vanishing_inf, 1e-4);
        // Unique solvability of the defining linear system.
        r.results["bnt_condition"] = K.condition_number();
        r.below("bnt_condition", K.condition_number(), 1e10);
        const VecR& sv = K.data().singular_values;
        r.above("bnt_min_singular_ratio", sv(sv.size() - 1) / sv(0), 1e-7);
    });
    group(r, "holomorphy_in_moduli", [&] {
        const SurfacePoint q = C.point(cplx(0.5, 0.8), 1), p = C.point(cplx(-0.4, 1.1), -1);
        const double eps = 1e-4;
        r.below("bnt_cauchy_riemann",
                conjugate_derivative([&](cplx e) { return bnt_matrix(displaced(P, v, e), ctx).T; }, eps), 1e-5);
        r.below("kernel_cauchy_riemann", conjugate_derivative([&](cplx e) {
                    return KernelEvaluator(ctx, bnt_matrix(displaced(P, v, e), ctx)).eval(q, p);
                }, eps), 1e-5);
    });
    group(r, "rank_one_determinant", [&] {
        const NormalForm P1 = fx.bundle("bundle_n1.json");
        const KernelEvaluator K(ctx, bnt_matrix(P1, ctx));
        double worst = 0;
        for (const cplx xp : {cplx(0.4, 1.5), cplx(-2.1, 0.3)}) {
            const SurfacePoint p = C.point(xp, -1);
            const ThirdKind w = ctx.third_kind(p, ctx.infinity(), ThirdKindMode::ANormalized);
            for (const cplx xq : {cplx(1.3, -1.2), cplx(-0.6, -0.9)}) {
                const SurfacePoint qs = C.point(xq, 1);
                const ChartPoint q{qs.x, qs.x, qs.y, 1.0, 1.0 / qs.y};
                const int g = ctx.genus();
                MatC M(g + 1, g + 1);
                for (int j = 0; j < g; ++j) {
                    const ChartPoint t = C.at(K.chart(), K.data().points()[j].z);
                    M.row(j).head(g) = ctx.omega(t).transpose();
                    M(j, g) = ctx.eval(w, t);
                }
                M.row(g).head(g) = ctx.omega(q).transpose();
                M(g, g) = ctx.eval(w, q);
                const cplx want = M.determinant() / M.topLeftCorner(g, g).determinant();
                worst = std::max(worst, std::abs(K.eval(q, p)(0, 0) - want) / (1 + std::abs(want)));
            }
        }
        r.below("bordered_determinant", worst, 1e-8);
    });
    group(r, "single_valued_in_p", [&] {
        const KernelEvaluator K(ctx, bnt_matrix(P, ctx));
        const SurfacePoint qs = C.point(cplx(-0.4, 1.7), 1);
        const ChartPoint q{qs.x, qs.x, qs.y, 1.0, 1.0 / qs.y};
        double worst = 0;
        for (int l = 0; l < ctx.genus(); ++l) {
            const LiftedPath& a = ctx.a_cycles()[l];
            const ChartPoint mid = a.at(1, 0.5);
            const cplx nrm = (mid.x - a.path().segments[1].a) / std::abs(mid.x - a.path().segments[1].a);
            auto f = [&](double s) {
                const cplx x = mid.x + s * nrm;
                return K.eval_normalized(q, C.point_with_y(x, mid.y * std::sqrt(C.Qval(x) / C.Qval(mid.x))));
            };
            // Jump across the a-cycle, extrapolated to zero width.
            auto D = [&](double d) { return MatC(f(d) - f(-d)); };
            const double d = 0.02;
            const MatC D1 = D(d), D2 = D(d / 2), D4 = D(d / 4), D8 = D(d / 8);
            const MatC R1 = 2.0 * D2 - D1, R2 = 2.0 * D4 - D2, R3 = 2.0 * D8 - D4;
            const MatC S1 = (4.0 * R2 - R1) / 3.0, S2 = (4.0 * R3 - R2) / 3.0;
            worst = std::max(worst, max_abs((16.0 * S2 - S1) / 15.0));
        }
        r.below("jump_across_a_cycles", worst, 1e-6);
    });
}

// ---------------------------------------------------------------- connection

void suite_connection(Fixtures& fx, Report& r) {
    const CurveContext& ctx = fx.ctx();
    const Curve& C = ctx.curve();
    const NormalForm P = fx.bundle("bundle_n2.json");
    const DivisorSpec d1 = fx.divisor("divisor.json"), d2 = fx.divisor("divisor_alt.json");
    const KernelEvaluator K(ctx, bnt_matrix(P, ctx));
    const DlogHalf h1(ctx, d1.D, d1.pin), h2(ctx, d2.D, d2.pin);
    const int n = P.n;
    group(r, "axioms", [&] {
        const ConnectionReport c = verify_connection(ConnectionForm(K, h1));
        r.below("apparent_at_tyurin", c.tyurin, 1e-6);
        r.below("residues_at_divisor", c.divisor, 1e-6);
        r.below("regular_at_infinity", c.infinity, 1e-6);
        double fay = 0;
        for (const cplx x : {cplx(0.4, 1.3), cplx(-0.8, -0.6), cplx(2.2, -0.4)}) {
            const Chart ch = C.disk_chart(x, 1, 0.2);
            const MatC F = fay_differential(K, ch, 0.0);
            fay = std::max(fay, max_abs(F - fay_richardson(K, ch, 0.0).value) / (1 + max_abs(F)));
        }
        r.below("fay_exact_vs_richardson", fay, 1e-7);
    });
    group(r, "pairing_nondegenerate", [&] {
        // Constant unit germs at the Tyurin points against the coefficient directions.
        const auto basis = tangent_basis(P);
        const int T = static_cast<int>(K.data().points().size());
        std::vector<HiggsField> fields;
        for (int t = 0; t < T; ++t)
            for (int a = 0; a < n * n; ++a) {
                Germs g(T, std::vector<MatC>{MatC::Zero(n, n)});
                g[t][0].data()[a] = 1.0;
                fields.emplace_back(K, g);
            }
        MatC L(fields.size(), basis.size());
        for (std::size_t i = 0; i < fields.size(); ++i)
            for (std::size_t j = 0; j < basis.size(); ++j) L(i, j) = liouville_pairing(fields[i], K, basis[j]).value;
        Eigen::JacobiSVD<MatC> svd(L);
        const VecR& sv = svd.singularValues();
        int rank = 0;
        for (int i = 0; i < sv.size(); ++i) rank += sv(i) > 1e-10 * sv(0);
        r.results["pairing_condition"] = sv(0) / sv(rank - 1);
        r.equal("pairing_rank", rank, n * n * ctx.genus());
    });
    group(r, "gauge_equivariance", [&] {
        MatC G(2, 2);
        G << cplx(1.0, 0.2), cplx(0.3, -0.5), cplx(-0.4, 0.1), cplx(0.8, 0.6);
        PolyMatrix Gp(2);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) Gp(i, j) = Poly{G(i, j)};
        const KernelEvaluator K2(ctx, bnt_matrix(reduce(Gp * P.P, P.disk).P, ctx));
        const ConnectionForm F(K, h1), F2(K2, h1);
        double worst = 0;
        for (const auto& q : probes(C)) {
            const MatC a = F2.eval(q);
            worst = std::max(worst, max_abs(a - G * F.eval(q) * G.inverse()) / (1 + max_abs(a)));
        }
        r.below("pgl_equivariance", worst, 1e-8);
    });
    group(r, "divisor_change", [&] {
        const ConnectionForm F1(K, h1), F2(K, h2);
        std::vector<ThirdKind> w;
        for (std::size_t i = 0; i < d1.D.size(); ++i)
            w.push_back(ctx.third_kind(d2.D[i].point, d1.D[i].point, ThirdKindMode::ImaginaryPeriods));
        double worst = 0;
        for (const auto& q : probes(C)) {
            cplx want = 0;
            for (const auto& wi : w) want -= ctx.eval(wi, q);
            worst = std::max(worst, max_abs(F2.eval(q) - F1.eval(q) - want * MatC::Identity(n, n)) / (1 + std::abs(want)));
        }
        r.below("scalar_third_kind_shift", worst, 1e-7);
    });
    group(r, "variation", [&] {
        const ModuliTangent v = fx.tangents("tangents_n2.json", n).at(0).v;
        const double eps = 1e-4;
        const KernelEvaluator Kp(ctx, bnt_matrix(displaced(P, v, eps), ctx));
        const KernelEvaluator Km(ctx, bnt_matrix(displaced(P, v, -eps), ctx));
        double worst = 0;
        for (const auto& q : probes(C)) {
            const MatC want = fay_variation(K, v, q);
            const MatC fd = (ConnectionForm(Kp, h1).eval(q) - ConnectionForm(Km, h1).eval(q)) / (2 * eps);
            worst = std::max(worst, max_abs(fd - want) / (1 + max_abs(want)));
        }
        r.below("reference_variation", worst, 1e-4);
    });
}

// ---------------------------------------------------------------- monodromy

void suite_monodromy(Fixtures& fx, Report& r) {
    const CurveContext& ctx = fx.ctx();
    const Curve& C = ctx.curve();
    const NormalForm P = fx.bundle("bundle_n2.json");
    const DivisorSpec d1 = fx.divisor("divisor.json"), d2 = fx.divisor("divisor_alt.json");
    const Germs g = fx.germs("germs_n2.json", P.n);
    const ModuliTangent v = fx.tangents("tangents_n2.json", P.n).at(0).v;
    const auto h1 = std::make_shared<const DlogHalf>(ctx, d1.D, d1.pin);
    const KernelEvaluator K(ctx, bnt_matrix(P, ctx));
    const HiggsField phi(K, holomorphic_germs(K, g));
    const ConnectionForm A(K, *h1, phi);
    group(r, "representation", [&] {
        const MonodromyRep rep = monodromy_rep(A);
        r.below("surface_relation", rep.relation_defect, 1e-7);
        r.below("dissection_vertex", rep.vertex_defect, 1e-7);
        const ApparentReport ap = apparent_singularity_report(A, [&](const ChartPoint& q) { return A.eval(q); });
        r.below("local_monodromy_tyurin", ap.tyurin_loops, 1e-6);
        r.below("local_monodromy_divisor", ap.divisor_loops, 1e-6);
    });
    group(r, "characters", [&] {
        const DlogHalf h2(ctx, d2.D, d2.pin);
        const CharacterReport ch =
            compare_characters(A, ConnectionForm(K, h2, phi), std::numeric_limits<double>::infinity());
        r.below("character_scalar", ch.scalar_defect, 1e-6);
        r.below("character_unimodular", ch.modulus_defect, 1e-6);
    });
    group(r, "holomorphy_in_moduli", [&] {
        const ConnectionFamily fam = connection_family(ctx, P, v, h1);
        const double eps = 1e-4;
        std::vector<MonodromyRep> reps;
        for (const cplx e : {cplx(eps), cplx(-eps), cplx(0, eps), cplx(0, -eps)}) reps.push_back(monodromy_rep(fam(e).A));
        double worst = 0;
        for (int k = 0; k < 2 * ctx.genus(); ++k) {
            auto tr = [&](int i) {
                const MonodromyRep& rep = reps[i];
                return k < ctx.genus() ? rep.M_alpha[k].trace() : rep.M_beta[k - ctx.genus()].trace();
            };
            const cplx dx = (tr(0) - tr(1)) / (2 * eps), dy = (tr(2) - tr(3)) / (2 * eps);
            worst = std::max(worst, std::abs(dx + I * dy) / (1 + std::abs(dx)));
        }
        r.below("trace_cauchy_riemann", worst, 1e-5);
    });
    group(r, "flat_section_variation", [&] {
        const ConnectionFamily fam = connection_family(ctx, P, v, h1, g);
        const double eps = 1e-5;
        const OwnedConnection a0 = fam(0.0);
        const MonodromyRep r0 = monodromy_rep(a0.A), rp = monodromy_rep(fam(eps).A), rm = monodromy_rep(fam(-eps).A);
        std::vector<MatC> dA, dB;
        for (int k = 0; k < ctx.genus(); ++k) {
            dA.push_back((rp.M_alpha[k] - rm.M_alpha[k]) / (2 * eps));
            dB.push_back((rp.M_beta[k] - rm.M_beta[k]) / (2 * eps));
        }
        double worst = 0;
        for (const cplx x : {cplx(2.5, 0.8), cplx(1.2, 1.5)}) {
            const SurfacePoint p = C.point(x, 1);
            const MatC fd = psi_variation_fd(fam, p, eps);
            worst = std::max(worst, max_abs(fd - psi_variation_contour(a0.A, r0, dA, dB, p)) / (1 + max_abs(fd)));
        }
        r.below("psi_variation_contour", worst, 1e-4);
    });
}

// ---------------------------------------------------------------- symplectic

void suite_symplectic(Fixtures& fx, Report& r) {
    const CurveContext& ctx = fx.ctx();
    const DivisorSpec d = fx.divisor("divisor.json");
    const auto h = std::make_shared<const DlogHalf>(ctx, d.D, d.pin);
    const NormalForm P2 = fx.bundle("bundle_n2.json"), P1 = fx.bundle("bundle_n1.json");
    const Germs g2 = fx.germs("germs_n2.json", 2), g1 = fx.germs("germs_n1.json", 1);
    const auto t2 = fx.tangents("tangents_n2.json", 2), t1 = fx.tangents("tangents_n1.json", 1);
    group(r, "pairing", [&] {
        const KernelEvaluator K(ctx, bnt_matrix(P2, ctx));
        const HiggsField phi(K, holomorphic_germs(K, g2));
        const cplx a(0.7, -0.4), b(-1.3, 0.2);
        const ModuliTangent w = combine({t2[0].v, t2[1].v}, (VecC(2) << a, b).finished());
        const cplx l1 = liouville_pairing(phi, K, t2[0].v).value, l2 = liouville_pairing(phi, K, t2[1].v).value;
        const cplx lw = liouville_pairing(phi, K, w).value;
        r.below("bilinearity", std::abs(lw - (a * l1 + b * l2)) / (std::abs(l1) + std::abs(l2)), 1e-9);
        const ConnectionForm A(K, *h, phi);
        r.below("xi_equals_liouville_of_higgs_part", rel(xi_residue(A, t2[0].v).value, l1), 1e-10);
    });
    group(r, "xi_contour", [&] {
        const ConnectionFamily fam = connection_family(ctx, P2, t2[0].v, h, g2);
        const OwnedConnection a = fam(0.0);
        const cplx res = xi_residue(a.A, t2[0].v).value;
        r.below("contour_vs_residue", rel(xi_contour(fam).value, res), 1e-3);
    });
    group(r, "central_identity_rank_one", [&] {
        const ConnectionPlane plane = connection_plane(ctx, P1, h, g1, t1[0], t1[1]);
        const ClosureReport fine = check_dxi_equals_omega(plane, t1[0], t1[1]);
        r.results["rank_one"] = Json{{"minus_4_pi_i_dxi", to_json(fine.lhs)}, {"omega", to_json(fine.omega.value)}};
        r.below("minus_4_pi_i_dxi_equals_omega_n1", fine.relative_defect, 1e-3);
        // The two stencils for delta Xi differ by O(h^2); steps well above rounding.
        const double c1 = check_dxi_equals_omega(plane, t1[0], t1[1], 1e-3).closedness;
        const double c2 = check_dxi_equals_omega(plane, t1[0], t1[1], 2e-3).closedness;
        const double order = std::log2(c2 / c1);
        r.results["closedness_order"] = order;
        r.below("closedness_stencil_order_defect", std::abs(order - 2.0), 0.5);
    });
    group(r, "characters_drop_out_rank_one", [&] {
        const ConnectionPlane plane = connection_plane(ctx, P1, h, g1, t1[0], t1[1]);
        const MonodromyDerivative m1 = monodromy_derivative([&](cplx e) { return plane(e, 0.0); }, 1e-5);
        const MonodromyDerivative m2 = monodromy_derivative([&](cplx e) { return plane(0.0, e); }, 1e-5);
        const GraphReport can = graph_two_form(canonical_graph(
            m1.rep, {jump_tangent(m1.rep, m1.dM_alpha, m1.dM_beta), jump_tangent(m1.rep, m2.dM_alpha, m2.dM_beta)}), 0,
            1, 1e-6);
        MonodromyRep tw = m1.rep;
        auto a1 = m1.dM_alpha, b1 = m1.dM_beta, a2 = m2.dM_alpha, b2 = m2.dM_beta;
        for (int k = 0; k < ctx.genus(); ++k) {
            const cplx ca = std::exp(I * (0.7 + k)), cb = std::exp(I * (-1.1 + 2.0 * k));
            tw.M_alpha[k] *= ca, tw.M_beta[k] *= cb;
            a1[k] *= ca, a2[k] *= ca, b1[k] *= cb, b2[k] *= cb;
        }
        fill_jumps(tw);
        const GraphReport twr =
            graph_two_form(canonical_graph(tw, {jump_tangent(tw, a1, b1), jump_tangent(tw, a2, b2)}), 0, 1, 1e-6);
        r.below("unimodular_character_invariance", rel(twr.omega.value, can.omega.value), 1e-9);
    });
    group(r, "central_identity_rank_two", [&] {
        const ConnectionPlane plane = connection_plane(ctx, P2, h, g2, t2[0], t2[1]);
        const ClosureReport c = check_dxi_equals_omega(plane, t2[0], t2[1]);
        r.results["rank_two"] = Json{{"minus_4_pi_i_dxi", to_json(c.lhs)}, {"omega", to_json(c.omega.value)}};
        r.below("minus_4_pi_i_dxi_equals_omega_n2", c.relative_defect, 5e-3);
        const MonodromyDerivative m1 = monodromy_derivative([&](cplx e) { return plane(e, 0.0); }, 1e-5);
        const MonodromyDerivative m2 = monodromy_derivative([&](cplx e) { return plane(0.0, e); }, 1e-5);
        const GraphReport kr = graph_two_form(
            krichever_graph(m1.rep, {m1.dM_alpha, m2.dM_alpha}, {m1.dM_beta, m2.dM_beta}), 0, 1, 1e-6);
        r.below("krichever_vs_canonical", rel(kr.omega.value, c.omega.value), 1e-6);
    });
}

// ---------------------------------------------------------------- theta

void suite_theta(Fixtures& fx, Report& r) {
    const CurveContext& ctx = fx.ctx();
    const Curve& C = ctx.curve();
    const DivisorSpec d = fx.divisor("divisor.json");
    const DlogHalf h(ctx, d.D, d.pin);
    auto probe = [&](const char* tag, const NormalForm& P, const ModuliTangent& v) {
        const ThetaProbeReport p = theta_divisor_probe(ctx, P, v, h);
        const std::string s = std::string("_") + tag;
        const double k = std::round(p.det_residue.real());
        r.below("det_residue_integer" + s, std::abs(p.det_residue - k), 1e-3);
        r.equal("det_residue_equals_corank" + s, static_cast<long>(k), p.corank);
        r.below("xi_residue_equals_corank" + s, std::abs(p.xi_residue - double(p.corank)), 1e-2);
        r.equal("kernel_rank_equals_corank" + s, p.kernel_rank, p.corank);
        r.above("kernel_gap" + s, p.kernel_gap, 1e3);
        r.below("residue_kernel_factorization" + s, p.lemma_defect, 1e-6);
    };
    group(r, "rank_one", [&] {
        const NormalForm P = fx.bundle("bundle_special_n1.json");
        probe("n1", P, fx.tangents("tangents_special_n1.json", 1).at(0).v);
    });
    group(r, "rank_two", [&] {
        const NormalForm P = fx.bundle("bundle_special_n2.json");
        probe("n2", P, transversal_direction(ctx, P, 7));
    });
    group(r, "right_kernel", [&] {
        // Holomorphic vector differentials from the right kernel of the matrix
        // satisfy: P^{-1} eta is analytic at the Tyurin points.
        const NormalForm P = fx.bundle("bundle_special_n1.json");
        const TyurinData D = bnt_matrix(P, ctx);
        const int h1 = coranks(D).h1, n = P.n, g = ctx.genus();
        r.equal("special_h1", h1, 1);
        Eigen::JacobiSVD<MatC> svd(D.T, Eigen::ComputeFullV);
        double worst = 0;
        for (int c = 0; c < h1; ++c) {
            const VecC k = svd.matrixV().col(D.T.cols() - 1 - c);
            auto f = [&](cplx z) -> MatC {
                const VecC om = ctx.omega(C.at(D.chart, z));
                VecC eta = VecC::Zero(n);
                for (int i = 0; i < g; ++i)
                    for (int a = 0; a < n; ++a) eta(a) += om(i) * k(i * n + a);
                return P.eval(z).inverse() * eta;
            };
            for (std::size_t t = 0; t < D.points().size(); ++t)
                worst = std::max(worst, circle_moments(f, D.points()[t].z, 0.05, 3));
        }
        r.below("eta_regular_at_tyurin", worst, 1e-7);
    });
    group(r, "theta_oracle", [&] {
        const NormalForm S = fx.bundle("bundle_special_n1.json");
        const Chart ch = disk_chart(C, S.disk);
        Rng g(3);
        int agree = 0, total = 0;
        auto run = [&](cplx a, cplx b) {
            NormalForm P = S;
            P.P(0, 0) = poly::from_roots({a, b});
            const VecC AT = ctx.abel(C.from_chart(ch, a)) + ctx.abel(C.from_chart(ch, b));
            const bool special = std::abs(ctx.theta(ctx.reduce(AT + ctx.riemann_constants()))) < 1e-6;
            agree += (coranks(bnt_matrix(P, ctx)).h1 == 1) == special;
            ++total;
        };
        for (int k = 0; k < 5; ++k) {
            const cplx a = (0.55 + 0.04 * k) * std::polar(1.0, pi * (0.45 + 0.05 * k));
            run(a, -a);
        }
        for (int k = 0; k < 5; ++k) {
            cplx a, b;
            do {
                a = g.in_disk(0.85);
                b = g.in_disk(0.85);
            } while (std::abs(a) < 0.55 || std::abs(b) < 0.55 || std::abs(a + b) < 0.05 || std::abs(a - b) < 0.05);
            run(a, b);
        }
        r.equal("corank_matches_theta_vanishing", agree, total);
    });
}

}  // namespace

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"periods", "normalform", "kernel", "connection",
                                                "monodromy", "symplectic", "theta"};
    return names;
}

Report verify_suite(const std::string& name, const fs::path& fixtures, int resolution) {
    Fixtures fx(fixtures, resolution);
    Report r("suite", name);
    if (name == "periods") suite_periods(fx, r);
    else if (name == "normalform") suite_normalform(fx, r);
    else if (name == "kernel") suite_kernel(fx, r);
    else if (name == "connection") suite_connection(fx, r);
    else if (name == "monodromy") suite_monodromy(fx, r);
    else if (name == "symplectic") suite_symplectic(fx, r);
    else if (name == "theta") suite_theta(fx, r);
    else throw InputError("unknown suite \"" + name + "\"");
    return r;
}

}  // namespace tyurin::cli
