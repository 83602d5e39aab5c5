#pragma once

#include "qnls/field.hpp"
#include "qnls/params.hpp"
#include "qnls/spectral.hpp"

namespace qnls {

/// The four conserved/variational quantities of the system.
struct FunctionalReport {
    double M = 0;  // mass  |u|^2 + 2|v|^2
    double K = 0;  // kinetic  |grad u|^2 + kappa |grad v|^2
    double P = 0;  // interaction  Re <v, u^2>
    double E = 0;  // energy  K/2 - P
};

double mass(const FieldPair& fp);
double interaction(const FieldPair& fp);
FunctionalReport energy(const FieldPair& fp, const PhysicalParams& params);

/// Action S_omega = E + (omega/2) M.
double action(const FieldPair& fp, double omega, const PhysicalParams& params);

/// Scale-invariant quotient K sqrt(M) / P (d = 4, kappa = 1/2).
/// Throws NonpositiveInteraction when P <= 0.
double weinstein(const FieldPair& fp, const PhysicalParams& params);

struct ModulationResult {
    double dist = 0;       // H1 x H1 distance after modulation
    double shift[3] = {0, 0, 0};
    double theta = 0;
};

///// Distance from fp to the symmetry orbit of ref: minimum over translations y
/// and the single gauge (e^{i theta} w, e^{2i theta} z) of the H1 x H1 norm of
/// the difference. On radial grids only the gauge is searched.
ModulationResult modulated_distance(const FieldPair& fp, const FieldPair& ref);

/// Mass |u|^2 + 2|v|^2 inside the ball of given radius around `center`
/// (center ignored on radial grids: balls are centered at the origin).
double mass_in_ball(const FieldPair& fp, double radius, const double center[3]);

/// H1 x H1 norm squared with unit weights.
double h1_pair_norm_sq(const FieldPair& fp);

} // namespace qnls
