#include "qnls/params.hpp"

#include <cmath>

namespace qnls {

NormalizeResult normalize_params(const RawConstants& raw) {
    if (!(raw.m > 0) || !(raw.big_m > 0))
        throw MassConditionViolated("normalize_params: masses must be positive");
    const double la = std::abs(raw.lambda);
    const double ma = std::abs(raw.mu);
    if (la == 0.0 || ma == 0.0)
        throw MassConditionViolated("normalize_params: lambda and mu must be nonzero");
    // lambda = c * conj(mu) with real c > 0
    const std::complex<double> c_cand = raw.lambda / std::conj(raw.mu);
    if (std::abs(c_cand.imag()) > 1e-12 * std::abs(c_cand) || c_cand.real() <= 0.0)
        throw MassConditionViolated("normalize_params: lambda = c*conj(mu) with c > 0 fails");
    const double c = c_cand.real();

    NormalizeResult out;
    out.kappa = raw.m / raw.big_m;
    out.amp_u = std::sqrt(0.5 * c) * ma;
    out.amp_v = -0.5 * raw.lambda;
    out.coord = std::sqrt(0.5 / raw.m);
    return out;
}

} // namespace qnls
