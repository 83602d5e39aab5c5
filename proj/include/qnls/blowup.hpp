#pragma once

#include <span>

#include "qnls/dynamics.hpp"
#include "qnls/ground_state.hpp"

namespace qnls {

/// Explicit minimal-mass blow-up family built on a stationary pair of the
/// d=4, kappa=1/2 system at (omega1, omega2) = (1, 2):
///   u(t,x) = e^{i theta1} e^{i rho^2/(T-t)}  e^{-i|x|^2/(4(T-t))} (rho/(T-t))^2 phi(rho x/(T-t))
///   v(t,x) = e^{i theta2} e^{2i rho^2/(T-t)} e^{-i|x|^2/(2(T-t))} (rho/(T-t))^2 psi(rho x/(T-t))
/// With theta1 = -1/T, theta2 = -2/T, rho = 1 this is the basic family whose
/// phases read t/(T(T-t)) and 2t/(T(T-t)).
struct PseudoConformalSpec {
    double T = 1.0;
    double rho = 1.0;
    double theta1 = 0.0;
    double theta2 = 0.0;
    FieldPair ground;  // radial d=4 stationary pair
};

/// Evaluate the family at time t < T. Throws TooCloseToBlowup when the grid
/// cannot resolve the quadratic phase (h * max|grad phase| >= pi/4).
FieldPair pseudo_conformal(const PseudoConformalSpec& spec, double t, const RadialGrid& grid);

/// Sup norm of i(u_b - u_a)/dt + Lap u_m + 2 v_m conj(u_m) (and the v
/// analogue) with midpoints m = (a+b)/2; certifies that two nearby snapshots
/// belong to a solution.
double pde_residual(const FieldPair& fp_a, const FieldPair& fp_b, double dt,
                    const PhysicalParams& params);

/// Radial weight profile chi with enough derivatives for the virial
/// quantities: chi, chi', chi'', Lap chi, Lap^2 chi sampled at the grid nodes.
struct ChiProfile {
    std::vector<double> chi, dchi, d2chi, lap, bilap;
};

/// chi = |x|^2 (dchi = 2r, d2chi = 2, lap = 2d, bilap = 0).
ChiProfile quadratic_chi(const RadialGrid& rg);

/// V_chi = int chi (|u|^2 + 2|v|^2).
double virial_V(const FieldPair& fp, std::span<const double> chi);

/// dV/dt = 2 int chi'(r) Im(u_r conj(u) + v_r conj(v)).
double virial_first(const FieldPair& fp, const ChiProfile& profile);

/// d2V/dt2 = -int Lap^2(chi) (|u|^2 + |v|^2/2)
///           + int chi'' (4|u_r|^2 + 2|v_r|^2) - 2 Re int Lap(chi) conj(v) u^2.
/// Valid only under mass resonance; throws KappaMismatch when kappa != 1/2.
double virial_second_rhs(const FieldPair& fp, const ChiProfile& profile,
                         const PhysicalParams& params);

struct CutoffSpec {
    double R = 1.0;
    enum class Kind { Theta2Cap, ExplicitVartheta } kind = Kind::ExplicitVartheta;
    double epsilon = 0.015;
    double C_const = 1.0;
};

struct CutoffProfiles {
    ChiProfile chi;                 // chi_R and its derivatives
    std::vector<double> chi1;       // 2 - chi_R''
    std::vector<double> chi2;       // 8 - Lap chi_R
};

/// chi_R(r) = R^2 theta(r/R) where theta' is either the explicit piecewise
/// profile (linear ramp, cubic turnover, smooth descent to zero) or a C-inf
/// mollified descent that caps theta at exactly 2.
CutoffProfiles make_cutoffs(const CutoffSpec& spec, const RadialGrid& rg);

struct PositivityResult {
    bool holds = false;
    double margin = 0;  // min over nodes of chi1 - C*eps*chi2^2
};

PositivityResult positivity_check(const CutoffSpec& spec, const RadialGrid& rg);

/// Cauchy-Schwarz bound at minimal mass:
///   |int phi'(r) Im(u_r conj(u) + v_r conj(v))| <=
///     sqrt(2E) (int |phi'|^2 (|u|^2 + 2|v|^2))^{1/2}.
/// dvarphi samples phi'(r) at the grid nodes. Throws MassNotMinimal when
/// M(fp) differs from M_gs by more than 1e-6 relative.
void banica_check(const FieldPair& fp, std::span<const double> dvarphi, double M_gs,
                  const PhysicalParams& params, double& lhs, double& rhs);

/// Positive radial pair with E < -margin, obtained by amplitude-scaling a
/// Gaussian pair until the cubic interaction term dominates the quadratic
/// kinetic term. Throws CannotAchieve when the profile has P <= 0.
FieldPair negative_energy_seed(const RadialGrid& rgrid, const PhysicalParams& params,
                               double margin);

struct MinimalMassReport {
    double mass_error = 0;           // max |M(t) - M_gs| over the run
    double T_est = 0;
    double rate_exponent = 0;
    double variance_identity_resid[3] = {0, 0, 0};  // |var - 8 t^2 E_gauged| rel., three times
    std::vector<std::pair<double, double>> ball_curve_numeric;   // (t, ball mass), evolved
    std::vector<std::pair<double, double>> ball_curve_analytic;  // (t, ball mass), exact family
    double peak_ball_fraction = 0;   // max analytic ball mass / M_gs on the resolvable window
    EvolveStatus status = EvolveStatus::Completed;
};

/// Instantiate the family with T and rho = 1, evolve it, and verify mass
/// constancy, the K-rate, the variance identity, and ball-mass concentration.
MinimalMassReport minimal_mass_experiment(const GNReport& gnr, double T,
                                          const EvolveConfig& cfg,
                                          const PhysicalParams& params,
                                          double ball_radius);

} // namespace qnls
