#include "qnls/dynamics.hpp"

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <algorithm>
#include <cmath>

namespace qnls {

namespace {

// Heptadiagonal rows of the sixth-order radial Laplacian f'' + (d-1)/r f'
// (even-extension ghosts at r = 0, zero beyond R_max). The high order keeps
// the scheme's dispersion relation accurate at the large wavenumbers a
// collapsing profile develops; with a second-order stencil the tracking error
// near blow-up is dominated by phase error of the marginally resolved modes.
constexpr int kCNBand = 3;  // stencil half-width

void radial_lap_rows(const RadialGrid& rg, std::vector<double> diag[2 * kCNBand + 1]) {
    const int n = rg.nr;
    const double dr = rg.dr();
    const double c2[7] = {2.0, -27.0, 270.0, -490.0, 270.0, -27.0, 2.0};    // /180 dr^2
    const double c1[7] = {-1.0, 9.0, -45.0, 0.0, 45.0, -9.0, 1.0};          // /60 dr
    for (int o = 0; o < 2 * kCNBand + 1; ++o) diag[o].assign(n, 0.0);
    for (int j = 0; j < n; ++j) {
        const double inv_r = (rg.dim - 1) / rg.node(j);
        for (int off = -kCNBand; off <= kCNBand; ++off) {
            const double lap = c2[off + kCNBand] / (180.0 * dr * dr) +
                               inv_r * c1[off + kCNBand] / (60.0 * dr);
            int col = j + off;
            if (col >= n) continue;
            if (col < 0) col = -col - 1;  // ghost at r_{-m} folds onto r_{m-1}
            diag[col - j + kCNBand][j] += lap;
        }
    }
}

// One Crank-Nicolson step of u_t = i c Lap u on a radial grid:
// (1 - a L) f+ = (1 + a L) f with a = i c dt / 2 and the 7-point L above.
// L is not exactly self-adjoint in the r^{d-1} dr inner product (folding the
// stencil at the axis breaks the symmetry), so the Cayley map is not exactly
// unitary; the step finishes by rescaling f back to its incoming norm.  The
// rescale inverts exactly under dt -> -dt, so the step stays time-reversible.
// The banded LU of (1 - a L) is cached; evolve re-uses one step size for long
// stretches between halvings.
struct CNFactors {
    static constexpr int kl = kCNBand, ku = kCNBand, ldab = 2 * kl + ku + 1;
    RadialGrid rg;
    cxd a{0, 0};
    std::vector<double> L[2 * kCNBand + 1];
    std::vector<cxd> ab;
    std::vector<lapack_int> ipiv;

    void build(const RadialGrid& rg_, cxd a_) {
        rg = rg_;
        a = a_;
        radial_lap_rows(rg, L);
        const int n = rg.nr;
        ab.assign(static_cast<std::size_t>(ldab) * n, cxd(0));
        for (int j = 0; j < n; ++j) {
            for (int off = -kCNBand; off <= kCNBand; ++off) {
                const int col = j + off;
                if (col < 0 || col >= n) continue;
                ab[static_cast<std::size_t>(col) * ldab + (kl + ku + j - col)] =
                    -a * L[off + kCNBand][j];
            }
            ab[static_cast<std::size_t>(j) * ldab + (kl + ku)] += 1.0;
        }
        ipiv.assign(n, 0);
        if (LAPACKE_zgbtrf(LAPACK_COL_MAJOR, n, n, kl, ku, ab.data(), ldab, ipiv.data()) != 0)
            throw Error("cn_radial: banded factorization failed");
    }
};

void cn_radial(std::vector<cxd>& f, const RadialGrid& rg, double c, double dt) {
    static thread_local CNFactors cache[2];
    static thread_local int next = 0;
    const cxd a(0, 0.5 * c * dt);
    CNFactors* fac = nullptr;
    for (auto& e : cache)
        if (e.a == a && e.rg == rg) fac = &e;
    if (!fac) {
        fac = &cache[next];
        next = (next + 1) % 2;
        fac->build(rg, a);
    }
    const int n = rg.nr;
    std::vector<cxd> rhs(n, cxd(0));
    double m_in = 0.0;
    for (int j = 0; j < n; ++j) {
        for (int off = -kCNBand; off <= kCNBand; ++off) {
            const int col = j + off;
            if (col < 0 || col >= n) continue;
            rhs[j] += a * fac->L[off + kCNBand][j] * f[col];
        }
        rhs[j] += f[j];
        m_in += rg.weight(j) * std::norm(f[j]);
    }
    if (LAPACKE_zgbtrs(LAPACK_COL_MAJOR, 'N', n, CNFactors::kl, CNFactors::ku, 1, fac->ab.data(),
                       CNFactors::ldab, fac->ipiv.data(), rhs.data(), n) != 0)
        throw Error("cn_radial: banded solve failed");
    double m_out = 0.0;
    for (int j = 0; j < n; ++j) m_out += rg.weight(j) * std::norm(rhs[j]);
    if (m_out > 0.0) {
        const double s = std::sqrt(m_in / m_out);
        for (auto& z : rhs) z *= s;
    }
    f = std::move(rhs);
}

double variance_of(const FieldPair& fp) {
    std::vector<double> dens(fp.u.size());
    if (fp.on_radial()) {
        const RadialGrid& rg = fp.radial();
        for (int j = 0; j < rg.nr; ++j) {
            const double r = rg.node(j);
            dens[j] = r * r * (std::norm(fp.u.val[j]) + 2.0 * std::norm(fp.v.val[j]));
        }
        return integrate(dens, fp.grid());
    }
    const Grid& g = fp.tensor();
    const int n = g.n;
    const std::size_t nn = static_cast<std::size_t>(n);
    auto x2 = [&](int m) { double x = g.coord(m); return x * x; };
    if (g.dim == 1) {
        for (int i = 0; i < n; ++i)
            dens[i] = x2(i) * (std::norm(fp.u.val[i]) + 2.0 * std::norm(fp.v.val[i]));
    } else if (g.dim == 2) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                std::size_t p = i * nn + j;
                dens[p] = (x2(i) + x2(j)) * (std::norm(fp.u.val[p]) + 2.0 * std::norm(fp.v.val[p]));
            }
    } else {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int l = 0; l < n; ++l) {
                    std::size_t p = (i * nn + j) * nn + l;
                    dens[p] = (x2(i) + x2(j) + x2(l)) *
                              (std::norm(fp.u.val[p]) + 2.0 * std::norm(fp.v.val[p]));
                }
    }
    return integrate(dens, fp.grid());
}

// First virial derivative for chi = |x|^2 on radial data:
// 2 int grad(chi) . Im(grad(u) conj(u) + grad(v) conj(v)) = 4 int r Im(u' conj(u) + v' conj(v)).
double virial_first_quadratic(const FieldPair& fp) {
    const RadialGrid& rg = fp.radial();
    std::vector<cxd> du = radial_derivative(fp.u), dv = radial_derivative(fp.v);
    std::vector<double> dens(rg.size());
    for (int j = 0; j < rg.nr; ++j) {
        const double r = rg.node(j);
        dens[j] = 4.0 * r * (std::imag(du[j] * std::conj(fp.u.val[j])) +
                             std::imag(dv[j] * std::conj(fp.v.val[j])));
    }
    return integrate(dens, fp.grid());
}

} // namespace

FieldPair kinetic_substep(const FieldPair& fp, double dt, const PhysicalParams& params) {
    FieldPair out = fp;
    if (fp.on_tensor()) {
        const Grid& g = fp.tensor();
        const std::vector<double> k2 = k2_table(g);
        fft_forward(g, out.u.val);
        fft_forward(g, out.v.val);
        for (std::size_t i = 0; i < out.u.size(); ++i) {
            out.u.val[i] *= std::polar(1.0, -k2[i] * dt);
            out.v.val[i] *= std::polar(1.0, -params.kappa * k2[i] * dt);
        }
        fft_inverse(g, out.u.val);
        fft_inverse(g, out.v.val);
        return out;
    }
    const RadialGrid& rg = fp.radial();
    cn_radial(out.u.val, rg, 1.0, dt);
    cn_radial(out.v.val, rg, params.kappa, dt);
    return out;
}

FieldPair nonlinear_substep(const FieldPair& fp, double dt) {
    FieldPair out = fp;
    const cxd I(0, 1);
    for (std::size_t i = 0; i < out.u.size(); ++i) {
        cxd u = fp.u.val[i], v = fp.v.val[i];
        auto fu = [&](cxd a, cxd b) { return 2.0 * I * b * std::conj(a); };
        auto fv = [&](cxd a) { return I * a * a; };
        const cxd k1u = fu(u, v), k1v = fv(u);
        const cxd k2u = fu(u + 0.5 * dt * k1u, v + 0.5 * dt * k1v),
                  k2v = fv(u + 0.5 * dt * k1u);
        const cxd k3u = fu(u + 0.5 * dt * k2u, v + 0.5 * dt * k2v),
                  k3v = fv(u + 0.5 * dt * k2u);
        const cxd k4u = fu(u + dt * k3u, v + dt * k3v), k4v = fv(u + dt * k3u);
        out.u.val[i] = u + dt / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        out.v.val[i] = v + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    }
    if (out.on_tensor()) {
        dealias_inplace(out.u);
        dealias_inplace(out.v);
    }
    return out;
}

EvolveResult evolve(const FieldPair& fp0, const PhysicalParams& params,
                    const EvolveConfig& cfg, const DiagCallback& callback) {
    if (!(cfg.dt > 0) || !(cfg.dt_floor < cfg.dt))
        throw Error("evolve: need dt > 0 and dt_floor < dt");
    EvolveResult res;
    FieldPair fp = fp0;
    double t = 0, dt = cfg.dt;

    auto record = [&](double tt) {
        FunctionalReport fr = energy(fp, params);
        DiagnosticsRecord d;
        d.t = tt;
        d.M = fr.M;
        d.E = fr.E;
        d.K = fr.K;
        d.P = fr.P;
        if (cfg.track_variance) {
            d.variance = variance_of(fp);
            if (fp.on_radial()) d.virial_first = virial_first_quadratic(fp);
        }
        if (cfg.ball_radius > 0) d.ball_mass = mass_in_ball(fp, cfg.ball_radius, nullptr);
        res.diags.push_back(d);
        if (callback) callback(d, fp);
        return d.K;
    };

    double K0 = record(0.0);
    double K_prev = K0;
    res.status = EvolveStatus::Completed;

    int steps_since_diag = 0;
    while (t < cfg.t_end - 1e-15 * cfg.t_end) {
        // nonlinear substep rotates at frequency ~ 2 max|v|; keep the RK4
        // substep well inside its accuracy range as the amplitude grows
        double amp = 0;
        for (std::size_t i = 0; i < fp.u.size(); ++i)
            amp = std::max({amp, std::abs(fp.u.val[i]), 2.0 * std::abs(fp.v.val[i])});
        const double cap = 0.015 / std::max(amp, 1e-300);
        const double step = std::min({dt, cfg.t_end - t, cap});
        fp = kinetic_substep(fp, 0.5 * step, params);
        fp = nonlinear_substep(fp, step);
        fp = kinetic_substep(fp, 0.5 * step, params);
        t += step;
        if (!fp.finite())
            throw NonFinite("evolve: non-finite field at t = " + std::to_string(t));
        // growth control every step: near collapse K can cross several decades
        // within one diagnostic interval
        const double K = grad_norm_sq(fp.u) + params.kappa * grad_norm_sq(fp.v);
        if (K > cfg.blowup_K_factor * K0) {
            record(t);
            res.status = EvolveStatus::BlowupDetected;
            break;
        }
        if (K > 2.0 * K_prev) {
            record(t);
            steps_since_diag = 0;
            if (dt <= cap) {  // halving helps only while dt, not the amplitude cap, binds
                dt *= 0.5;
                if (dt < cfg.dt_floor) {
                    res.status = EvolveStatus::StepFloorReached;
                    break;
                }
            }
            K_prev = K;
        }
        if (++steps_since_diag >= cfg.diag_stride || t >= cfg.t_end - 1e-15 * cfg.t_end) {
            steps_since_diag = 0;
            record(t);
            K_prev = K;
        }
    }
    res.t_stop = t;
    res.final = std::move(fp);
    return res;
}

std::optional<BlowupFit> blowup_detect(const std::vector<DiagnosticsRecord>& diags) {
    if (diags.size() < 20)
        throw InsufficientGrowth("blowup_detect: need at least 20 diagnostic records");
    const double K0 = diags.front().K;
    double Kmax = K0;
    std::size_t imax = 0;
    for (std::size_t i = 0; i < diags.size(); ++i)
        if (diags[i].K > Kmax) { Kmax = diags[i].K; imax = i; }
    if (Kmax < 1e3 * K0) return std::nullopt;

    // fit over the last decade of growth
    std::vector<double> ts, ys;
    for (std::size_t i = 0; i <= imax; ++i)
        if (diags[i].K >= 0.1 * Kmax) {
            ts.push_back(diags[i].t);
            ys.push_back(std::log(diags[i].K));
        }
    if (ts.size() < 3) return std::nullopt;
    const double t_last = ts.back();

    auto fit_sse = [&](double T, double* slope) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double n = static_cast<double>(ts.size());
        for (std::size_t i = 0; i < ts.size(); ++i) {
            const double x = std::log(T - ts[i]);
            sx += x;
            sy += ys[i];
            sxx += x * x;
            sxy += x * ys[i];
        }
        const double a = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        const double b = (sy - a * sx) / n;
        double sse = 0;
        for (std::size_t i = 0; i < ts.size(); ++i) {
            const double r = ys[i] - (a * std::log(T - ts[i]) + b);
            sse += r * r;
        }
        if (slope) *slope = a;
        return sse;
    };

    const double span = t_last - ts.front();
    double lo = t_last + 1e-9 * std::max(span, 1.0), hi = t_last + 2.0 * span;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = fit_sse(x1, nullptr), f2 = fit_sse(x2, nullptr);
    for (int it = 0; it < 200; ++it) {
        if (f1 < f2) {
            hi = x2; x2 = x1; f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = fit_sse(x1, nullptr);
        } else {
            lo = x1; x1 = x2; f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = fit_sse(x2, nullptr);
        }
        if (hi - lo < 1e-12 * std::max(1.0, hi)) break;
    }
    BlowupFit out;
    out.T_est = 0.5 * (lo + hi);
    fit_sse(out.T_est, &out.rate_exponent);
    return out;
}

StabilityResult stability_experiment(const GroundStateResult& gs, double eps,
                                     const PhysicalParams& params, const EvolveConfig& cfg) {
    FieldPair fp = gs.fields;
    if (fp.on_tensor()) {
        const Grid& g = fp.tensor();
        const int n = g.n;
        const std::size_t nn = static_cast<std::size_t>(n);
        auto bump = [&](double r2) { return std::exp(-r2); };
        if (g.dim == 1) {
            for (int i = 0; i < n; ++i) {
                double x = g.coord(i);
                fp.u.val[i] += eps * bump(x * x);
            }
        } else if (g.dim == 2) {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    double x = g.coord(i), y = g.coord(j);
                    fp.u.val[i * nn + j] += eps * bump(x * x + y * y);
                }
        } else {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int l = 0; l < n; ++l) {
                        double x = g.coord(i), y = g.coord(j), z = g.coord(l);
                        fp.u.val[(i * nn + j) * nn + l] += eps * bump(x * x + y * y + z * z);
                    }
        }
    } else {
        const RadialGrid& rg = fp.radial();
        for (int j = 0; j < rg.nr; ++j) {
            double r = rg.node(j);
            fp.u.val[j] += eps * std::exp(-r * r);
        }
    }

    StabilityResult out;
    out.initial_dist = modulated_distance(fp, gs.fields).dist;
    out.max_dist = out.initial_dist;
    auto cb = [&](const DiagnosticsRecord&, const FieldPair& state) {
        out.max_dist = std::max(out.max_dist, modulated_distance(state, gs.fields).dist);
    };
    evolve(fp, params, cfg, cb);
    return out;
}

} // namespace qnls
