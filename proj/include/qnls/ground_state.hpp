#pragma once

#include <vector>

#include "qnls/functionals.hpp"

namespace qnls {

/// Constraint of the variational problem: either both component masses
/// (|u|^2 = a, |v|^2 = b) or the total mass M(u,v) = c.
struct ConstraintSpec {
    enum class Kind { TwoMass, TotalMass } kind = Kind::TotalMass;
    double a = 0, b = 0;  // TwoMass
    double c = 0;         // TotalMass

    static ConstraintSpec two_mass(double a, double b) {
        if (!(a > 0) || !(b > 0)) throw Error("ConstraintSpec: masses must be positive");
        return {Kind::TwoMass, a, b, 0};
    }
    static ConstraintSpec total_mass(double c) {
        if (!(c > 0)) throw Error("ConstraintSpec: total mass must be positive");
        return {Kind::TotalMass, 0, 0, c};
    }
};

struct GroundStateOpts {
    double tol_energy = 1e-12;    // accepted-step energy decrease below this => near-stationary
    double tol_residual = 1e-8;   // elliptic residual, relative to the nonlinear terms
    int max_iters = 50000;
    double tau0 = 0.5;            // initial gradient-flow step
    const FieldPair* seed = nullptr;  // optional start iterate (projected onto the constraint);
                                      // lets a coarse-grid solution warm-start a fine grid
};

struct GroundStateResult {
    FieldPair fields;
    double omega1 = 0;
    double omega2 = 0;
    double energy_value = 0;
    FunctionalReport functionals;
    double residual_inf = 0;
    double pohozaev_defects[3] = {0, 0, 0};
    int iterations = 0;
};

struct GNReport {
    double M_gs = 0;
    double C_opt = 0;
    FieldPair ground_pair;
};

/// Minimize E over {|u|^2 = a, |v|^2 = b} by a normalized gradient flow
/// (semi-implicit resolvent step, then independent rescale of u and v).
/// d <= 3 only.
GroundStateResult minimize_I(double a, double b, const Grid& grid,
                             const PhysicalParams& params, const GroundStateOpts& opts = {});

/// Minimize E over {M(u,v) = c}; single joint rescale preserves the manifold.
GroundStateResult minimize_J(double c, const Grid& grid,
                             const PhysicalParams& params, const GroundStateOpts& opts = {});

/// Lagrange multipliers of an (approximately) stationary pair:
/// omega1 = (2P - |grad u|^2)/|u|^2, omega2 = (P - kappa |grad v|^2)/|v|^2.
void extract_multipliers(const FieldPair& fp, const PhysicalParams& params,
                         double& omega1, double& omega2);

/// Relative defects of K + omega M = 3P, K = d S_omega, omega M = (6-d) S_omega.
void pohozaev_report(const FieldPair& fp, double omega, const PhysicalParams& params,
                     int d, double defects[3]);

/// Petviashvili iteration for the stationary system
///   -Lap u + omega1 u = 2 v u,  -kappa Lap v + omega2 v = u^2
/// on a radial grid; returns positive radial fields.
FieldPair solve_elliptic(double omega1, double omega2, const PhysicalParams& params,
                         const RadialGrid& rgrid, const GroundStateOpts& opts = {});

/// Sup norm of the stationary-system residual at given multipliers, scaled by
/// the sup of the nonlinear terms (sixth-order radial Laplacian, spectral on
/// tensor grids).
double elliptic_residual_inf(const FieldPair& fp, double omega1, double omega2,
                             const PhysicalParams& params);

/// Solve the d=4, kappa=1/2 system at (omega1, omega2) = (1, 2) and form the
/// sharp constant C_opt = 1/(2 sqrt(M_gs)).
GNReport gn_constant(const RadialGrid& rgrid, const PhysicalParams& params,
                     const GroundStateOpts& opts = {});

struct SubadditivityRow {
    std::size_t i = 0, j = 0;   // indices into the input pair list
    double I_i = 0, I_j = 0, I_sum = 0;
    double gap = 0;             // I(a_i+a_j, b_i+b_j) - I_i - I_j, must be < 0
};

/// Strict-subadditivity table for I over every unordered pair of constraints.
std::vector<SubadditivityRow> subadditivity_scan(
    const std::vector<std::pair<double, double>>& pairs, const Grid& grid,
    const PhysicalParams& params, const GroundStateOpts& opts = {});

} // namespace qnls
