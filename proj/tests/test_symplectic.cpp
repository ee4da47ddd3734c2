#include "doctest.h"
#include "fixtures.hpp"
#include "tyurin/errors.hpp"
#include "tyurin/symplectic.hpp"

using namespace tyurin;

namespace {

using Germs = std::vector<std::vector<MatC>>;

struct Setup {
    NormalForm P;
    ModuliTangent v1, v2;
};

// Rank two on the reference disk with two random directions.
Setup generic2(unsigned seed) {
    test::Rng r(seed);
    std::vector<cplx> roots;
    for (int k = 0; k < 4; ++k) roots.push_back(r.in_disk(0.63));
    Setup s{generic_normal_form(test::reference_disk(), {r.poly(3)}, poly::from_roots(roots)), {}, {}};
    const auto basis = tangent_basis(s.P);
    for (ModuliTangent* v : {&s.v1, &s.v2}) {
        VecC c(basis.size());
        for (auto& x : c) x = r.c();
        *v = combine(basis, c);
    }
    return s;
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

// A(T) + K along the family, for the n = 1 closed forms.
VecC theta_argument(const CurveContext& ctx, const NormalForm& P, const ModuliTangent& v, cplx eps) {
    VecC f = ctx.riemann_constants();
    for (const auto& t : bnt_matrix(displaced(P, v, eps), ctx).points()) f += ctx.abel(t.point);
    return f;
}

template <class F>
auto derivative(F&& f, double h) {
    using T = std::decay_t<decltype(f(0.0))>;
    return T((f(-2 * h) - 8.0 * f(-h) + 8.0 * f(h) - f(2 * h)) / (12.0 * h));
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

const cplx kSpecial(0.35, 0.2);

}  // namespace

TEST_CASE("liouville pairing") {
    const CurveContext& ctx = test::reference_context();
    const Setup s = generic2(61);
    const KernelEvaluator K(ctx, bnt_matrix(s.P, ctx));
    test::Rng r(62);
    const HiggsField zero;
    CHECK(liouville_pairing(zero, K, s.v1).value == cplx(0.0));

    const HiggsField phi(K, holomorphic_germs(K, random_germs(r, K.data().points().size(), 2, 0.3)));
    const cplx l1 = liouville_pairing(phi, K, s.v1).value;
    CHECK(std::abs(l1) > 1e-3);

    SUBCASE("germ form") {
        cplx germ = 0;
        const auto& g = phi.germs();
        for (int t = 0; t < static_cast<int>(g.size()); ++t) {
            const cplx zt = K.data().points()[t].z;
            const double rad = K.tyurin_radius(t);
            const int N = 256;
            for (int j = 0; j < N; ++j) {
                const cplx d = rad * std::exp(I * (2.0 * pi * j / N));
                MatC phit = MatC::Zero(2, 2);
                for (int k = static_cast<int>(g[t].size()) - 1; k >= 0; --k) phit = phit * d + g[t][k];
                germ += (phit * s.P.eval(zt + d).inverse() * s.v1.dP.eval(zt + d)).trace() * d / double(N);
            }
        }
        CHECK(std::abs(germ - l1) < 1e-9 * (1 + std::abs(l1)));
    }

    SUBCASE("framing directions pair to zero") {
        PolyMatrix G(2);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) G(i, j) = Poly{r.c()};
        const ModuliTangent framing{G * s.P.P};
        CHECK(std::abs(liouville_pairing(phi, K, framing).value) < 1e-9 * (1 + std::abs(l1)));
    }

    SUBCASE("bilinear") {
        const cplx a(0.7, -0.4), b(-1.3, 0.2);
        const ModuliTangent w = combine({s.v1, s.v2}, (VecC(2) << a, b).finished());
        const cplx l2 = liouville_pairing(phi, K, s.v2).value;
        CHECK(std::abs(liouville_pairing(phi, K, w).value - (a * l1 + b * l2)) < 1e-9 * (1 + std::abs(l1) + std::abs(l2)));

        const Germs g2 = random_germs(r, K.data().points().size(), 2, 0.3);
        const HiggsField psi(K, holomorphic_germs(K, g2));
        Germs sum = phi.germs();
        for (std::size_t t = 0; t < sum.size(); ++t)
            for (std::size_t k = 0; k < sum[t].size(); ++k) sum[t][k] = a * sum[t][k] + b * psi.germs()[t][k];
        const HiggsField mix(K, sum);
        CHECK(std::abs(liouville_pairing(mix, K, s.v1).value - (a * l1 + b * liouville_pairing(psi, K, s.v1).value)) <
              1e-9 * (1 + std::abs(l1)));
    }
}

TEST_CASE("xi by residues") {
    const CurveContext& ctx = test::reference_context();
    const Curve& C = ctx.curve();
    const DlogHalf h(ctx, divisor1(C));

    SUBCASE("rank two: zero section and the Higgs part") {
        const Setup s = generic2(63);
        const KernelEvaluator K(ctx, bnt_matrix(s.P, ctx));
        const ConnectionForm F = reference_connection(K, h);
        CHECK(std::abs(xi_residue(F, s.v1).value) < 1e-12);
        test::Rng r(64);
        const HiggsField phi(K, holomorphic_germs(K, random_germs(r, K.data().points().size(), 2, 0.3)));
        const ConnectionForm A = assemble_connection(F, phi);
        const cplx xi = xi_residue(A, s.v1).value;
        CHECK(std::abs(xi) > 1e-3);
        CHECK(std::abs(xi - liouville_pairing(phi, K, s.v1).value) < 1e-10 * std::abs(xi));
    }

    SUBCASE("rank one closed forms") {
        const NormalForm P = scalar(test::reference_disk(), {cplx(0.3, -0.2), cplx(-0.25, 0.45)});
        const ModuliTangent v = scalar_tangent(Poly{cplx(0.4, 0.1), cplx(-0.2, 0.3)});
        const KernelEvaluator K(ctx, bnt_matrix(P, ctx));
        const ConnectionForm F = reference_connection(K, h);
        const double step = 1e-4;
        const VecC df = derivative([&](double e) { return theta_argument(ctx, P, v, e); }, step);
        const cplx dlog_theta =
            derivative([&](double e) { return std::log(ctx.theta(theta_argument(ctx, P, v, e))); }, step);
        const VecC f = theta_argument(ctx, P, v, 0.0);
        const ThetaValue tf = ctx.theta_grad(f);
        const VecC c = (VecC(2) << cplx(0.6, -0.3), cplx(-0.2, 0.9)).finished();
        auto section = [&](const VecC& coeff) {
            const auto germs = higgs_germs(K, [&](const ChartPoint& q) {
                return MatC::Constant(1, 1, ctx.omega(q).cwiseProduct(coeff).sum());
            }, 6);
            return assemble_connection(F, HiggsField(K, holomorphic_germs(K, germs)));
        };
        // A = F + omega . c
        const cplx xi1 = xi_residue(section(c), v).value;
        const cplx want1 = -c.cwiseProduct(df).sum();
        CHECK(std::abs(xi1 - want1) < 1e-6);
        // A = F + omega . (c - grad ln theta(f))
        const cplx xi2 = xi_residue(section(c - tf.gradient / tf.value), v).value;
        const cplx want2 = dlog_theta - c.cwiseProduct(df).sum();
        CHECK(std::abs(xi2 - want2) < 1e-5);
    }
}

TEST_CASE("xi along the dissection") {
    const CurveContext& ctx = test::reference_context();
    const Curve& C = ctx.curve();
    const Setup s = generic2(41);
    auto h1 = std::make_shared<const DlogHalf>(ctx, divisor1(C));
    auto h2 = std::make_shared<const DlogHalf>(ctx, divisor2(C));
    const KernelEvaluator K(ctx, bnt_matrix(s.P, ctx));
    test::Rng r(65);
    const Germs g = random_germs(r, K.data().points().size(), 2, 0.003);

    const auto fam = connection_family(ctx, s.P, s.v1, h1, g);
    const OwnedConnection a = fam(0.0);
    const cplx res = xi_residue(a.A, s.v1).value;
    const MonodromyDerivative d = monodromy_derivative(fam, 1e-5);
    const FormValue con = xi_contour(a.A, d);
    CHECK(con.method == FormMethod::Contour);
    CHECK(std::abs(con.value - res) < 1e-3 * std::abs(res));
    CHECK(std::abs(xi_contour(connection_family(ctx, s.P, s.v1, h1), 1e-5).value) < 1e-14);

    SUBCASE("independent of the divisor") {
        const FormValue other = xi_contour(connection_family(ctx, s.P, s.v1, h2, g), 1e-5);
        CHECK(std::abs(other.value - con.value) < 1e-3 * std::abs(res));
    }

    SUBCASE("independent of the framing") {
        MatC G = MatC::Identity(2, 2);
        for (int i = 0; i < 4; ++i) G.data()[i] += 0.3 * r.c();
        const MatC Gi = G.inverse();
        const ConnectionForm& A = a.A;
        const Differential A2 = [&](const ChartPoint& q) { return MatC(G * A.eval(q) * Gi); };
        const Differential phi2 = [&](const ChartPoint& q) { return MatC(G * A.higgs().eval(q) * Gi); };
        MonodromyDerivative d2;
        d2.rep = monodromy_rep(ctx, A2);
        for (int k = 0; k < 2; ++k) {
            CHECK(max_abs(d2.rep.M_alpha[k] - G * d.rep.M_alpha[k] * Gi) < 1e-7 * max_abs(d.rep.M_alpha[k]));
            d2.dM_alpha.push_back(G * d.dM_alpha[k] * Gi);
            d2.dM_beta.push_back(G * d.dM_beta[k] * Gi);
        }
        const FormValue framed = xi_contour(ctx, A2, phi2, d2);
        CHECK(std::abs(framed.value - con.value) < 1e-6 * (1 + std::abs(con.value)));
    }

    CHECK_THROWS_AS(monodromy_derivative(fam, 0.1), StepSizeError);
}

namespace {

// Matrix with derivatives along two directions.
struct Dual {
    MatC v;
    std::vector<MatC> d;
    Dual operator*(const Dual& o) const {
        Dual r{v * o.v, {}};
        for (std::size_t i = 0; i < d.size(); ++i) r.d.push_back(d[i] * o.v + v * o.d[i]);
        return r;
    }
    Dual inv() const {
        const MatC vi = v.inverse();
        Dual r{vi, {}};
        for (const auto& x : d) r.d.push_back(-vi * x * vi);
        return r;
    }
};

// An exact genus two family of representations: with c = [b1, a1] and
// g = 1 + s c, the pair (g b1 g^-1, g a1 g^-1) has commutator c.
struct Family {
    MonodromyRep rep;
    std::vector<std::vector<MatC>> dA, dB;  // [direction][k]
};

Family synthetic_family(test::Rng& r, int n) {
    auto rnd = [&](double s) {
        MatC m(n, n);
        for (int i = 0; i < n * n; ++i) m.data()[i] = s * r.c();
        return m;
    };
    auto var = [&](MatC v) { return Dual{v, {rnd(1.0), rnd(1.0)}}; };
    const MatC one = MatC::Identity(n, n);
    const Dual a1 = var(one + rnd(0.5)), b1 = var(one + rnd(0.5));
    const Dual c = b1 * a1 * b1.inv() * a1.inv();
    const cplx s = 0.3 * r.c();
    const std::vector<cplx> ds{r.c(), r.c()};
    Dual g{one + s * c.v, {}};
    for (int i = 0; i < 2; ++i) g.d.push_back(ds[i] * c.v + s * c.d[i]);
    const Dual a2 = g * b1 * g.inv(), b2 = g * a1 * g.inv();
    Family f;
    f.rep.M_alpha = {a1.v, a2.v};
    f.rep.M_beta = {b1.v, b2.v};
    fill_jumps(f.rep);
    for (int i = 0; i < 2; ++i) {
        f.dA.push_back({a1.d[i], a2.d[i]});
        f.dB.push_back({b1.d[i], b2.d[i]});
    }
    return f;
}

}  // namespace

TEST_CASE("graph two-form") {
    test::Rng r(66);
    using HE = JumpGraph::HalfEdge;
    const int n = 2;

    SUBCASE("trivial jumps") {
        JumpGraph G;
        G.vertices.resize(1);
        for (int l = 0; l < 8; ++l)
            G.vertices[0].push_back(HE{MatC::Identity(n, n), {MatC::Zero(n, n), MatC::Zero(n, n)}, 0, l % 4 < 2 ? l + 2 : l - 2});
        const GraphReport g = graph_two_form(G);
        CHECK(g.omega.value == cplx(0.0));
        CHECK(g.omega.method == FormMethod::Graph);
    }

    SUBCASE("exact family: cyclic invariance, antisymmetry, Krichever's graph") {
        const Family f = synthetic_family(r, n);
        REQUIRE(f.rep.relation_defect < 1e-12);
        const std::vector<JumpTangent> jt{jump_tangent(f.rep, f.dA[0], f.dB[0]), jump_tangent(f.rep, f.dA[1], f.dB[1])};
        JumpGraph G = canonical_graph(f.rep, jt);
        const GraphReport ab = graph_two_form(G, 0, 1), ba = graph_two_form(G, 1, 0);
        CHECK(std::abs(ab.omega.value) > 1e-2);
        CHECK(ab.cyclic_defect < 1e-10);
        CHECK(ab.admissibility < 1e-12);
        CHECK(std::abs(ab.omega.value + ba.omega.value) < 1e-12);

        const GraphReport kr = graph_two_form(krichever_graph(f.rep, f.dA, f.dB));
        CHECK(kr.cyclic_defect < 1e-10);
        CHECK(std::abs(kr.omega.value - ab.omega.value) < 1e-10);

        G.vertices[0][1].J(0, 0) += 1e-3;
        CHECK_THROWS_AS(graph_two_form(G), AdmissibilityError);
        G = canonical_graph(f.rep, jt);
        G.vertices[0][1].dJ[0](0, 0) += 1e-3;
        CHECK_THROWS_AS(graph_two_form(G), AdmissibilityError);
    }
}

TEST_CASE("graph two-form on monodromy data") {
    const CurveContext& ctx = test::reference_context();
    const Curve& C = ctx.curve();
    auto h = std::make_shared<const DlogHalf>(ctx, divisor1(C));

    SUBCASE("rank two: canonical dissection and Krichever's graph") {
        const Setup s = generic2(41);
        const KernelEvaluator K(ctx, bnt_matrix(s.P, ctx));
        test::Rng r(65);
        const Germs g = random_germs(r, K.data().points().size(), 2, 0.003);
        const MonodromyDerivative m1 = monodromy_derivative(connection_family(ctx, s.P, s.v1, h, g), 1e-5);
        const MonodromyDerivative m2 = monodromy_derivative(connection_family(ctx, s.P, s.v2, h, g), 1e-5);
        const GraphReport can = graph_two_form(canonical_graph(
            m1.rep, {jump_tangent(m1.rep, m1.dM_alpha, m1.dM_beta), jump_tangent(m1.rep, m2.dM_alpha, m2.dM_beta)}));
        const GraphReport kr = graph_two_form(krichever_graph(m1.rep, {m1.dM_alpha, m2.dM_alpha}, {m1.dM_beta, m2.dM_beta}));
        CHECK(std::abs(can.omega.value) > 1e-2);
        // With finite-difference tangents the spread over starting edges is set
        // by the stencil error; it is exact for exact tangents (see above).
        CHECK(can.cyclic_defect < 1e-4 * std::abs(can.omega.value));
        CHECK(kr.cyclic_defect < 1e-4 * std::abs(can.omega.value));
        CHECK(std::abs(kr.omega.value - can.omega.value) < 1e-6 * std::abs(can.omega.value));
    }

    SUBCASE("rank one: periods, and constant characters drop out") {
        // Moving only the bundle with fixed germs is Lagrangian for n = 1, so the
        // second direction moves the Higgs field.
        const NormalForm P = scalar(test::reference_disk(), {cplx(0.3, -0.2), cplx(-0.25, 0.45)});
        test::Rng r(67);
        const Germs g = random_germs(r, 2, 1, 0.03);
        const ConnectionTangent t1{scalar_tangent(Poly{cplx(0.1, 0.05), cplx(-0.05, 0.08)}), {}};
        const ConnectionTangent t2{scalar_tangent(Poly{cplx(-0.07, 0.02), cplx(0.04, 0.1)}), random_germs(r, 2, 1, 0.03)};
        const ConnectionPlane plane = connection_plane(ctx, P, h, g, t1, t2);
        const MonodromyDerivative m1 = monodromy_derivative([&](cplx e) { return plane(e, 0.0); }, 1e-5);
        const MonodromyDerivative m2 = monodromy_derivative([&](cplx e) { return plane(0.0, e); }, 1e-5);
        const GraphReport can = graph_two_form(canonical_graph(
            m1.rep, {jump_tangent(m1.rep, m1.dM_alpha, m1.dM_beta), jump_tangent(m1.rep, m2.dM_alpha, m2.dM_beta)}));
        cplx periods = 0;
        for (int k = 0; k < 2; ++k) {
            const cplx a = m1.rep.M_alpha[k](0, 0), b = m1.rep.M_beta[k](0, 0);
            periods += 2.0 * (m1.dM_alpha[k](0, 0) / a * m2.dM_beta[k](0, 0) / b -
                              m2.dM_alpha[k](0, 0) / a * m1.dM_beta[k](0, 0) / b);
        }
        CHECK(std::abs(can.omega.value) > 1e-2);
        CHECK(rel(can.omega.value, periods) < 1e-9);

        MonodromyRep twisted = m1.rep;
        std::vector<MatC> t1a = m1.dM_alpha, t1b = m1.dM_beta, t2a = m2.dM_alpha, t2b = m2.dM_beta;
        for (int k = 0; k < 2; ++k) {
            const cplx ca = std::exp(I * (0.7 + k)), cb = std::exp(I * (-1.1 + 2.0 * k));
            twisted.M_alpha[k] *= ca;
            twisted.M_beta[k] *= cb;
            t1a[k] *= ca, t2a[k] *= ca, t1b[k] *= cb, t2b[k] *= cb;
        }
        fill_jumps(twisted);
        const GraphReport tw = graph_two_form(
            canonical_graph(twisted, {jump_tangent(twisted, t1a, t1b), jump_tangent(twisted, t2a, t2b)}));
        CHECK(rel(tw.omega.value, can.omega.value) < 1e-9);
    }
}

TEST_CASE("exterior derivative of xi against the graph form") {
    const CurveContext& ctx = test::reference_context();
    const Curve& C = ctx.curve();
    auto h = std::make_shared<const DlogHalf>(ctx, divisor1(C));

    SUBCASE("rank one") {
        const NormalForm P = scalar(test::reference_disk(), {cplx(0.3, -0.2), cplx(-0.25, 0.45)});
        test::Rng r(67);
        const Germs g = random_germs(r, 2, 1, 0.03);
        const ConnectionTangent t1{scalar_tangent(Poly{cplx(0.1, 0.05), cplx(-0.05, 0.08)}), {}};
        const ConnectionTangent t2{scalar_tangent(Poly{cplx(-0.07, 0.02), cplx(0.04, 0.1)}), random_germs(r, 2, 1, 0.03)};
        const ClosureReport ab = check_dxi_equals_omega(connection_plane(ctx, P, h, g, t1, t2), t1, t2);
        CHECK(std::abs(ab.omega.value) > 1e-2);
        CHECK(ab.relative_defect < 1e-3);
        const ClosureReport ba = check_dxi_equals_omega(connection_plane(ctx, P, h, g, t2, t1), t2, t1);
        CHECK(rel(ab.lhs, -ba.lhs) < 1e-6);
        CHECK(rel(ab.omega.value, -ba.omega.value) < 1e-6);
        CHECK_THROWS_AS(check_dxi_equals_omega(connection_plane(ctx, P, h, g, t1, t2), t1, t2, 1e-8), StepSizeError);
    }

    SUBCASE("rank two, moving the Higgs field too") {
        const Setup s = generic2(41);
        const KernelEvaluator K(ctx, bnt_matrix(s.P, ctx));
        test::Rng r(65);
        const Germs g = random_germs(r, K.data().points().size(), 2, 0.003);
        const ConnectionTangent t1{s.v1, {}}, t2{s.v2, random_germs(r, K.data().points().size(), 2, 0.003)};
        const ConnectionPlane plane = connection_plane(ctx, s.P, h, g, t1, t2);
        const ClosureReport fine = check_dxi_equals_omega(plane, t1, t2);
        CHECK(std::abs(fine.omega.value) > 1e-2);
        CHECK(fine.relative_defect < 5e-3);
        // The 2-point stencil error in delta Xi is O(h^2).
        const ClosureReport coarse = check_dxi_equals_omega(plane, t1, t2, 1e-4);
        const double order = coarse.closedness / fine.closedness;
        CHECK(order > 50);
        CHECK(order < 200);
    }
}

TEST_CASE("theta divisor probe") {
    const CurveContext& ctx = test::reference_context();
    const Curve& C = ctx.curve();
    const DlogHalf h(ctx, divisor1(C));
    const NormalForm P0 = scalar(test::branch_disk(), {kSpecial, -kSpecial});
    const ModuliTangent v = scalar_tangent(Poly{0.0, 1.0});
    REQUIRE(coranks(bnt_matrix(P0, ctx)).h1 == 1);

    SUBCASE("rank one through a special divisor") {
        const ThetaProbeReport rep = theta_divisor_probe(ctx, P0, v, h);
        CHECK(rep.corank == 1);
        CHECK(std::abs(rep.det_residue - 1.0) < 1e-3);
        CHECK(std::abs(rep.xi_residue - 1.0) < 1e-2);
        CHECK(rep.kernel_rank == 1);
        CHECK(rep.kernel_gap >= 1e3);
        CHECK(rep.Q_condition < 1e6);
        CHECK(rep.lemma_defect < 1e-6);

        // The same residue for the connection of the theta form.
        ThetaProbeOptions opt;
        opt.connection = [&](cplx, const KernelEvaluator& K, const ChartPoint& q) -> MatC {
            VecC f = ctx.riemann_constants();
            for (const auto& t : K.data().points()) f += ctx.abel(t.point);
            const ThetaValue tf = ctx.theta_grad(f);
            MatC m = ConnectionForm(K, h).reference(q);
            m(0, 0) -= ctx.omega(q).cwiseProduct(tf.gradient).sum() / tf.value;
            return m;
        };
        CHECK(std::abs(theta_divisor_probe(ctx, P0, v, h, opt).xi_residue - 1.0) < 1e-2);
    }

    SUBCASE("residue kernel against the explicit differentials") {
        // eta = (x - x_t) dx/y vanishes at t and its conjugate; r has its pole there
        // and vanishes at infinity.
        const cplx xt = -1.0 + kSpecial * kSpecial, xinf = ctx.infinity().x;
        auto r_of = [&](cplx x) { return 1.0 / (x - xt) - 1.0 / (xinf - xt); };
        const Chart ch = C.branch_chart(0, 0.9);
        cplx Q = 0;
        const int N = 256;
        for (const cplx zt : {kSpecial, -kSpecial})
            for (int j = 0; j < N; ++j) {
                const cplx d = 0.1 * std::exp(I * (2.0 * pi * j / N));
                const ChartPoint q = C.at(ch, zt + d);
                const cplx eta = (q.x - xt) * q.w;
                Q += r_of(q.x) * (zt + d) / ((zt + d) * (zt + d) - kSpecial * kSpecial) * eta * d / double(N);
            }
        for (const cplx qx : {cplx(0.5, 0.8), cplx(2.0, 0.5)})
            for (const cplx px : {cplx(-0.4, 1.1), cplx(1.6, -0.7)}) {
                const SurfacePoint q = C.point(qx, 1), p = C.point(px, -1);
                const cplx lim = residue_kernel(ctx, P0, v, q, p)(0, 0);
                const cplx want = -(qx - xt) / q.y * r_of(px) / Q;
                CHECK(std::abs(lim - want) < 1e-8 * std::abs(want));
            }
    }

    SUBCASE("rank two with a special line subbundle") {
        NormalForm P{2, test::branch_disk(), PolyMatrix(2)};
        P.P(0, 0) = poly::from_roots({kSpecial, -kSpecial});
        P.P(1, 1) = poly::from_roots({cplx(0.1, -0.5), cplx(-0.45, 0.3)});
        P.P(1, 0) = Poly{0.3, -0.2};
        REQUIRE(coranks(bnt_matrix(P, ctx)).h1 == 1);
        const ModuliTangent w = transversal_direction(ctx, P, 7);
        const ThetaProbeReport rep = theta_divisor_probe(ctx, P, w, h);
        CHECK(std::abs(rep.det_residue - 1.0) < 1e-3);
        CHECK(std::abs(rep.xi_residue - 1.0) < 1e-2);
        CHECK(rep.kernel_rank == 1);
        CHECK(rep.kernel_gap >= 1e3);
        CHECK(rep.lemma_defect < 1e-6);
    }

    SUBCASE("families that do not cross") {
        // Keeping the two points conjugate stays on the divisor.
        CHECK_THROWS_AS(theta_divisor_probe(ctx, P0, scalar_tangent(Poly{1.0}), h), NonTransversalFamily);
        const NormalForm generic = scalar(test::branch_disk(), {cplx(0.3, -0.2), cplx(-0.25, 0.45)});
        CHECK_THROWS_AS(theta_divisor_probe(ctx, generic, v, h), NonTransversalFamily);
        CHECK_THROWS_AS(transversal_direction(ctx, generic, 1), NonTransversalFamily);
    }
}
