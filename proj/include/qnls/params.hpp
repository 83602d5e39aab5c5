#pragma once

#include <complex>
#include <optional>

#include "qnls/errors.hpp"

namespace qnls {

/// Raw coupling constants of the physical system, before normalization.
struct RawConstants {
    double m = 1.0;            // mass of the fundamental component
    double big_m = 2.0;        // mass of the second-harmonic component
    std::complex<double> lambda{1.0, 0.0};
    std::complex<double> mu{1.0, 0.0};
};

/// Parameters of the normalized system i u_t + Lap u = -2 v conj(u),
/// i v_t + kappa Lap v = -u^2.
struct PhysicalParams {
    double kappa = 0.5;  // mass ratio m/M
    std::optional<RawConstants> raw;

    PhysicalParams() = default;
    explicit PhysicalParams(double kappa_) : kappa(kappa_) {
        if (!(kappa > 0)) throw Error("PhysicalParams: kappa must be positive");
    }
};

/// Field/coordinate scalings taking raw-system data to normalized data:
///   u_norm(t, x) = amp_u * u_raw(t, x / coord), v_norm = amp_v * v_raw(...).
struct NormalizeResult {
    double kappa;
    double amp_u;                 // sqrt(c/2) |mu|
    std::complex<double> amp_v;   // -lambda/2
    double coord;                 // sqrt(1/(2m))
};

/// Reduce raw constants to the normalized system. Requires lambda = c * conj(mu)
/// for some real c > 0 (otherwise the two equations cannot be rescaled to the
/// common form above).
NormalizeResult normalize_params(const RawConstants& raw);

} // namespace qnls
