#include "doctest.h"

#include <numbers>
#include <random>

#include "qnls/ground_state.hpp"

using namespace qnls;

namespace {

// Energy of the gaussian ansatz u = A exp(-x^2/(2 s^2)), v = B exp(-x^2/(2 s^2))
// in d = 1 (closed forms), used as an upper bound for the constrained minimum.
// |u|^2 = A^2 s sqrt(pi), |u'|^2 = A^2 sqrt(pi)/(2 s),
// P = A^2 B int exp(-3 x^2/(2 s^2)) = A^2 B s sqrt(2 pi / 3).
double gauss_energy_1d(double a, double b, double s, double kappa) {
    const double pi = std::numbers::pi;
    const double A2 = a / (s * std::sqrt(pi));
    const double B2 = b / (s * std::sqrt(pi));
    const double K = (A2 + kappa * B2) * std::sqrt(pi) / (2.0 * s);
    const double P = A2 * std::sqrt(B2) * s * std::sqrt(2.0 * pi / 3.0);
    return 0.5 * K - P;
}

double gauss_best_energy_1d(double a, double b, double kappa) {
    double best = 1e300;
    for (double s = 0.2; s < 8.0; s *= 1.02)
        best = std::min(best, gauss_energy_1d(a, b, s, kappa));
    return best;
}

} // namespace

TEST_SUITE("ground_state") {

TEST_CASE("two-mass minimizer beats the gaussian ansatz and is stationary") {
    Grid g(1, 256, 32.0);
    PhysicalParams pp(0.5);
    GroundStateOpts opts;
    GroundStateResult gs = minimize_I(1.0, 1.0, g, pp, opts);
    CHECK(gs.residual_inf < opts.tol_residual);
    CHECK(gs.energy_value < 0.0);
    // The true minimum can only undercut any fixed-shape trial family.
    CHECK(gs.energy_value <= gauss_best_energy_1d(1.0, 1.0, pp.kappa) + 1e-10);
    // Constraint is honored.
    CHECK(l2_norm_sq(gs.fields.u) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(l2_norm_sq(gs.fields.v) == doctest::Approx(1.0).epsilon(1e-10));
    // No Pohozaev check here: the identities tie K, M, P together only when
    // the multipliers satisfy omega2 = 2 omega1, which a two-mass minimizer
    // has no reason to do.
}

TEST_CASE("total-mass minimizer locks the multipliers to omega2 = 2 omega1") {
    Grid g(1, 256, 32.0);
    PhysicalParams pp(0.5);
    GroundStateResult gs = minimize_J(4.0, g, pp);
    CHECK(gs.omega1 > 0.0);
    CHECK(std::abs(gs.omega2 - 2.0 * gs.omega1) < 1e-6 * gs.omega1);
    CHECK(mass(gs.fields) == doctest::Approx(4.0).epsilon(1e-10));
    for (double d : gs.pohozaev_defects) CHECK(std::abs(d) < 1e-6);
}

TEST_CASE("total-mass minimum matches the sweep over component splits") {
    // J(c) = min over a of I(a, (c-a)/2): evaluate the right side on a coarse
    // grid of splits; the joint minimum can never be above any of them, and
    // should agree with the best split to a modest tolerance.
    Grid g(1, 256, 32.0);
    PhysicalParams pp(0.5);
    const double c = 4.0;
    GroundStateResult gj = minimize_J(c, g, pp);
    double best = 1e300;
    for (double a : {1.0, 1.5, 2.0, 2.5, 3.0}) {
        GroundStateResult gi = minimize_I(a, 0.5 * (c - a), g, pp);
        best = std::min(best, gi.energy_value);
    }
    CHECK(gj.energy_value <= best + 1e-8);
    CHECK(gj.energy_value == doctest::Approx(best).epsilon(1e-2));
}

TEST_CASE("subadditivity gap is strictly negative") {
    Grid g(1, 256, 32.0);
    PhysicalParams pp(0.5);
    auto rows = subadditivity_scan({{0.5, 0.5}, {1.0, 1.0}}, g, pp);
    REQUIRE(rows.size() == 3);  // self-pairs included
    for (const auto& row : rows) {
        CHECK(row.gap < 0.0);
        CHECK(row.I_sum < row.I_i + row.I_j);
    }
}

TEST_CASE("elliptic solver produces a positive stationary pair") {
    RadialGrid rg(4, 1024, 30.0);
    PhysicalParams pp(0.5);
    GroundStateOpts opts;
    opts.tol_residual = 1e-10;
    FieldPair fp = solve_elliptic(1.0, 2.0, pp, rg, opts);
    CHECK(elliptic_residual_inf(fp, 1.0, 2.0, pp) < 1e-10);
    for (const auto& z : fp.u.val) {
        CHECK(z.real() > 0.0);
        CHECK(z.imag() == 0.0);
    }
    double defects[3];
    pohozaev_report(fp, 1.0, pp, 4, defects);
    // Defects inherit the quadrature error of the truncated tail, not just
    // the solver tolerance.
    for (double d : defects) CHECK(std::abs(d) < 1e-5);
}

TEST_CASE("multiplier extraction recovers the multipliers of a solve") {
    RadialGrid rg(4, 1024, 30.0);
    PhysicalParams pp(0.5);
    FieldPair fp = solve_elliptic(1.3, 2.6, pp, rg);
    double w1 = 0, w2 = 0;
    extract_multipliers(fp, pp, w1, w2);
    CHECK(w1 == doctest::Approx(1.3).epsilon(1e-4));
    CHECK(w2 == doctest::Approx(2.6).epsilon(1e-4));
}

TEST_CASE("sharp constant: ground pair attains the bound, trials respect it") {
    RadialGrid rg(4, 1024, 30.0);
    PhysicalParams pp(0.5);
    GroundStateOpts opts;
    opts.tol_residual = 1e-10;
    GNReport gn = gn_constant(rg, pp, opts);
    CHECK(gn.C_opt == doctest::Approx(1.0 / (2.0 * std::sqrt(gn.M_gs))).epsilon(1e-14));
    CHECK(weinstein(gn.ground_pair, pp) * gn.C_opt == doctest::Approx(1.0).epsilon(1e-5));

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> amp(0.2, 2.0), wid(0.5, 3.0);
    for (int trial = 0; trial < 32; ++trial) {
        ComplexField u(rg), v(rg);
        const double A = amp(rng), B = amp(rng), su = wid(rng), sv = wid(rng);
        for (int j = 0; j < rg.nr; ++j) {
            const double r = rg.node(j);
            u.val[j] = A * std::exp(-r * r / (2.0 * su * su));
            v.val[j] = B * std::exp(-r * r / (2.0 * sv * sv));
        }
        FieldPair fp{std::move(u), std::move(v)};
        FunctionalReport fr = energy(fp, pp);
        CHECK(fr.P <= gn.C_opt * fr.K * std::sqrt(fr.M) * (1.0 + 1e-6));
    }
}

TEST_CASE("constraint construction rejects bad masses") {
    CHECK_THROWS_AS(ConstraintSpec::two_mass(0.0, 1.0), Error);
    CHECK_THROWS_AS(ConstraintSpec::two_mass(1.0, -2.0), Error);
    CHECK_THROWS_AS(ConstraintSpec::total_mass(0.0), Error);
}

} // TEST_SUITE
