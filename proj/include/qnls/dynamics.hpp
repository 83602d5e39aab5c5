#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "qnls/functionals.hpp"
#include "qnls/ground_state.hpp"

namespace qnls {

struct EvolveConfig {
    double dt = 1e-3;
    double t_end = 1.0;
    enum class Scheme { Strang } scheme = Scheme::Strang;
    int diag_stride = 1;
    double blowup_K_factor = 1e4;   // stop (flag blow-up) when K exceeds this times K(0)
    double dt_floor = 1e-8;
    bool track_variance = false;    // variance and first virial (radial grids)
    double ball_radius = 0;         // > 0: record mass in the origin-centered ball
};

struct DiagnosticsRecord {
    double t = 0;
    double M = 0, E = 0, K = 0, P = 0;
    std::optional<double> variance;
    std::optional<double> virial_first;
    std::optional<double> ball_mass;
};

enum class EvolveStatus { Completed, BlowupDetected, StepFloorReached };

struct EvolveResult {
    FieldPair final;
    std::vector<DiagnosticsRecord> diags;
    EvolveStatus status = EvolveStatus::Completed;
    double t_stop = 0;
};

using DiagCallback = std::function<void(const DiagnosticsRecord&, const FieldPair&)>;

/// Exact Fourier kinetic flow on tensor grids; Crank-Nicolson tridiagonal
/// solve on radial grids. Unitary in both cases.
FieldPair kinetic_substep(const FieldPair& fp, double dt, const PhysicalParams& params);

/// Pointwise RK4 on du/dt = 2i v conj(u), dv/dt = i u^2; dealiased afterwards
/// on tensor grids.
FieldPair nonlinear_substep(const FieldPair& fp, double dt);

/// Strang evolution kinetic(dt/2) o nonlinear(dt) o kinetic(dt/2) with
/// diagnostics, adaptive dt halving when K doubles between records, and
/// blow-up flagging.
EvolveResult evolve(const FieldPair& fp0, const PhysicalParams& params,
                    const EvolveConfig& cfg, const DiagCallback& callback = {});

struct BlowupFit {
    double T_est = 0;
    double rate_exponent = 0;
};

/// Fit K(t) ~ (T-t)^alpha over the last decade of growth, estimating T by a
/// golden-section search. Returns nothing for bounded runs (K growth < 1e3x).
std::optional<BlowupFit> blowup_detect(const std::vector<DiagnosticsRecord>& diags);

struct StabilityResult {
    double initial_dist = 0;
    double max_dist = 0;
};

/// Perturb (u, v) -> (u + eps * bump, v), evolve, and track the modulated
/// distance to the ground-state orbit at every diagnostic time.
StabilityResult stability_experiment(const GroundStateResult& gs, double eps,
                                     const PhysicalParams& params, const EvolveConfig& cfg);

} // namespace qnls
