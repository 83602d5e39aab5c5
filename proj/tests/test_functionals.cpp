#include "doctest.h"

#include <numbers>

#include "qnls/functionals.hpp"

using namespace qnls;

namespace {

// Gaussian pair u = A exp(-r^2/(2 s^2)), v = B exp(-r^2/(2 s^2)) on a d=4
// radial grid.  Closed forms (d = 4):
//   int exp(-a r^2) d^4x = (pi/a)^2
//   int r^2 exp(-a r^2) d^4x = 2 (pi/a)^2 / a
FieldPair gauss_pair(const RadialGrid& rg, double A, double B, double s) {
    ComplexField u(rg), v(rg);
    for (int j = 0; j < rg.nr; ++j) {
        const double e = std::exp(-rg.node(j) * rg.node(j) / (2.0 * s * s));
        u.val[j] = A * e;
        v.val[j] = B * e;
    }
    return {std::move(u), std::move(v)};
}

struct GaussExact {
    double M, K, P;
};

GaussExact gauss_exact(double A, double B, double s, double kappa) {
    const double pi = std::numbers::pi;
    const double a = 1.0 / (s * s);  // |u|^2 = A^2 exp(-a r^2)
    const double i0 = (pi / a) * (pi / a);
    const double i2 = 2.0 * i0 / a;
    // |grad u|^2 = A^2 (r/s^2)^2 exp(-a r^2)
    GaussExact ex;
    ex.M = (A * A + 2.0 * B * B) * i0;
    ex.K = (A * A + kappa * B * B) * i2 / (s * s * s * s);
    // P = Re <v, u^2> = A^2 B int exp(-3 r^2 / (2 s^2))
    const double a3 = 1.5 / (s * s);
    ex.P = A * A * B * (pi / a3) * (pi / a3);
    return ex;
}

} // namespace

TEST_SUITE("functionals") {

TEST_CASE("mass, kinetic and interaction match gaussian closed forms") {
    RadialGrid rg(4, 2048, 16.0);
    PhysicalParams pp(0.5);
    const double A = 1.2, B = 0.7, s = 1.1;
    FieldPair fp = gauss_pair(rg, A, B, s);
    GaussExact ex = gauss_exact(A, B, s, pp.kappa);
    FunctionalReport fr = energy(fp, pp);
    CHECK(fr.M == doctest::Approx(ex.M).epsilon(1e-10));
    CHECK(fr.K == doctest::Approx(ex.K).epsilon(1e-8));
    CHECK(fr.P == doctest::Approx(ex.P).epsilon(1e-10));
    CHECK(fr.E == doctest::Approx(0.5 * ex.K - ex.P).epsilon(1e-8));
    CHECK(mass(fp) == doctest::Approx(ex.M).epsilon(1e-10));
    CHECK(interaction(fp) == doctest::Approx(ex.P).epsilon(1e-10));
}

TEST_CASE("action is E + omega M / 2") {
    RadialGrid rg(4, 512, 12.0);
    PhysicalParams pp(0.5);
    FieldPair fp = gauss_pair(rg, 1.0, 0.5, 1.0);
    FunctionalReport fr = energy(fp, pp);
    const double om = 0.37;
    CHECK(action(fp, om, pp) == doctest::Approx(fr.E + 0.5 * om * fr.M).epsilon(1e-13));
}

TEST_CASE("weinstein quotient is scale invariant") {
    // Under u -> l^2 u(l x) (same for v) all of K sqrt(M)/P is unchanged;
    // for gaussians this maps (A, s) -> (l^2 A, s/l).
    RadialGrid rg(4, 4096, 20.0);
    PhysicalParams pp(0.5);
    FieldPair fp1 = gauss_pair(rg, 1.0, 0.6, 1.4);
    const double l = 1.3;
    FieldPair fp2 = gauss_pair(rg, l * l * 1.0, l * l * 0.6, 1.4 / l);
    CHECK(weinstein(fp1, pp) == doctest::Approx(weinstein(fp2, pp)).epsilon(1e-8));
}

TEST_CASE("weinstein rejects nonpositive interaction") {
    RadialGrid rg(4, 256, 10.0);
    PhysicalParams pp(0.5);
    FieldPair fp = gauss_pair(rg, 1.0, -0.5, 1.0);  // P < 0
    CHECK_THROWS_AS(weinstein(fp, pp), NonpositiveInteraction);
}

TEST_CASE("mass in ball matches the incomplete integral") {
    // |u|^2 = exp(-2 r^2) in d=4: mass(r < R) = 2 pi^2 int_0^R r^3 e^{-2r^2} dr
    //        = (pi^2/4) (1 - (1 + 2 R^2) e^{-2 R^2}).
    RadialGrid rg(4, 4096, 12.0);
    ComplexField u(rg), v(rg);
    for (int j = 0; j < rg.nr; ++j) {
        const double r = rg.node(j);
        u.val[j] = std::exp(-r * r);
        v.val[j] = 0.0;
    }
    FieldPair fp{std::move(u), std::move(v)};
    const double R = 1.5, pi = std::numbers::pi;
    const double center[3] = {0, 0, 0};
    const double exact = (pi * pi / 4.0) * (1.0 - (1.0 + 2.0 * R * R) * std::exp(-2.0 * R * R));
    CHECK(mass_in_ball(fp, R, center) == doctest::Approx(exact).epsilon(1e-3));
}

TEST_CASE("h1 norm decomposes into l2 and gradient parts") {
    RadialGrid rg(4, 1024, 12.0);
    FieldPair fp = gauss_pair(rg, 0.9, 0.4, 1.2);
    const double expect = l2_norm_sq(fp.u) + grad_norm_sq(fp.u) + l2_norm_sq(fp.v) + grad_norm_sq(fp.v);
    CHECK(h1_pair_norm_sq(fp) == doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("modulated distance finds the gauge that was applied") {
    RadialGrid rg(4, 1024, 12.0);
    FieldPair ref = gauss_pair(rg, 1.0, 0.5, 1.0);
    FieldPair fp = ref;
    const double th = 1.234;
    for (auto& z : fp.u.val) z *= std::polar(1.0, th);
    for (auto& z : fp.v.val) z *= std::polar(1.0, 2.0 * th);
    ModulationResult mr = modulated_distance(fp, ref);
    CHECK(mr.dist < 1e-6);
}

TEST_CASE("modulated distance finds a translation on tensor grids") {
    Grid g(1, 256, 32.0);
    ComplexField u(g), v(g);
    for (int m = 0; m < g.n; ++m) {
        const double x = g.coord(m);
        u.val[m] = std::exp(-x * x / 2.0);
        v.val[m] = 0.5 * std::exp(-x * x / 2.0);
    }
    FieldPair ref{std::move(u), std::move(v)};
    const double y[3] = {0.4, 0, 0};
    FieldPair fp{spectral_shift(ref.u, y), spectral_shift(ref.v, y)};
    ModulationResult mr = modulated_distance(fp, ref);
    // The optimizer searches a coarse shift lattice before polishing, so a
    // loose absolute bound plus recovery of the applied shift is the honest
    // check here.
    CHECK(mr.dist < 1e-3);
    CHECK(mr.shift[0] == doctest::Approx(0.4).epsilon(0.05));
}

} // TEST_SUITE
