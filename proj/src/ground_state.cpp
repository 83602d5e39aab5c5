#include "qnls/ground_state.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qnls {

namespace {

// ---------------------------------------------------------------------------
// Banded operator A = omega I - Lap6 on the radial grid, where Lap6 is the
// sixth-order f'' + (d-1)/r f' with even-extension ghosts at r=0 and zero
// beyond R_max. Stored as seven diagonals plus a LAPACK banded LU.

struct RadialHelmholtz {
    int n = 0;
    static constexpr int kl = 3, ku = 3, ldab = 2 * 3 + 3 + 1;
    std::vector<double> diag[7];          // [off+3][j], coefficient of f_{j+off}
    std::vector<double> ab;               // banded LU storage
    std::vector<lapack_int> ipiv;

    RadialHelmholtz(const RadialGrid& rg, double omega) : n(rg.nr) {
        const double dr = rg.dr();
        const double c2[7] = {2.0, -27.0, 270.0, -490.0, 270.0, -27.0, 2.0};
        const double c1[7] = {-1.0, 9.0, -45.0, 0.0, 45.0, -9.0, 1.0};
        for (auto& d : diag) d.assign(n, 0.0);
        for (int j = 0; j < n; ++j) {
            const double inv_r = (rg.dim - 1) / rg.node(j);
            for (int off = -3; off <= 3; ++off) {
                const double lap = c2[off + 3] / (180.0 * dr * dr) + inv_r * c1[off + 3] / (60.0 * dr);
                double a = -lap + ((off == 0) ? omega : 0.0);
                int col = j + off;
                if (col >= n) continue;                 // Dirichlet beyond R_max
                if (col < 0) col = -col - 1;            // even extension f_{-m} = f_{m-1}
                // accumulate into the folded band position
                const int o = col - j;
                if (o < -3 || o > 3) throw Error("RadialHelmholtz: fold out of band");
                diag[o + 3][j] += a;
            }
        }
        // banded LU
        ab.assign(static_cast<std::size_t>(ldab) * n, 0.0);
        for (int j = 0; j < n; ++j)
            for (int off = -3; off <= 3; ++off) {
                const int col = j + off;
                if (col < 0 || col >= n) continue;
                // column-major band storage: A(i,j) at ab[j*ldab + kl+ku+i-j]
                ab[static_cast<std::size_t>(col) * ldab + (kl + ku + j - col)] = diag[off + 3][j];
            }
        ipiv.resize(n);
        lapack_int info = LAPACKE_dgbtrf(LAPACK_COL_MAJOR, n, n, kl, ku, ab.data(), ldab, ipiv.data());
        if (info != 0) throw Error("RadialHelmholtz: banded LU failed");
    }

    std::vector<double> apply(const std::vector<double>& f) const {
        std::vector<double> out(n, 0.0);
        for (int j = 0; j < n; ++j)
            for (int off = -3; off <= 3; ++off) {
                const int col = j + off;
                if (col < 0 || col >= n) continue;
                out[j] += diag[off + 3][j] * f[col];
            }
        return out;
    }

    std::vector<double> solve(std::vector<double> rhs) const {
        lapack_int info = LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', n, kl, ku, 1,
                                         ab.data(), ldab, ipiv.data(), rhs.data(), n);
        if (info != 0) throw Error("RadialHelmholtz: banded solve failed");
        return rhs;
    }
};

double radial_dot(const RadialGrid& rg, const std::vector<double>& f, const std::vector<double>& g) {
    std::vector<double> terms(rg.size());
    for (int j = 0; j < rg.nr; ++j) terms[j] = rg.weight(j) * f[j] * g[j];
    return pairwise_sum(std::span<const double>(terms));
}

// ---------------------------------------------------------------------------
// Normalized gradient flow on a tensor grid.

FieldPair gaussian_seed(const Grid& g, double a, double b) {
    const double pi = std::numbers::pi;
    // |A e^{-|x|^2}|^2 integrates to A^2 (pi/2)^{d/2}
    const double Au = std::sqrt(a / std::pow(pi / 2.0, g.dim / 2.0));
    const double Av = std::sqrt(b / std::pow(pi / 2.0, g.dim / 2.0));
    ComplexField u(g), v(g);
    const int n = g.n;
    const std::size_t nn = static_cast<std::size_t>(n);
    auto fill = [&](ComplexField& f, double A) {
        if (g.dim == 1) {
            for (int i = 0; i < n; ++i) {
                double x = g.coord(i);
                f.val[i] = A * std::exp(-x * x);
            }
        } else if (g.dim == 2) {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    double x = g.coord(i), y = g.coord(j);
                    f.val[i * nn + j] = A * std::exp(-(x * x + y * y));
                }
        } else {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int l = 0; l < n; ++l) {
                        double x = g.coord(i), y = g.coord(j), z = g.coord(l);
                        f.val[(i * nn + j) * nn + l] = A * std::exp(-(x * x + y * y + z * z));
                    }
        }
    };
    fill(u, Au);
    fill(v, Av);
    return FieldPair(std::move(u), std::move(v));
}

void dealiased_nonlinearities(const FieldPair& fp, ComplexField& Nu, ComplexField& Nv) {
    Nu = fp.u;
    Nv = fp.u;
    for (std::size_t i = 0; i < fp.u.size(); ++i) {
        const cxd u = fp.u.val[i];
        Nu.val[i] = 2.0 * fp.v.val[i] * std::conj(u);
        Nv.val[i] = u * u;
    }
    if (fp.on_tensor()) {
        dealias_inplace(Nu);
        dealias_inplace(Nv);
    }
}

GroundStateResult run_flow(const ConstraintSpec& cs, const Grid& grid,
                           const PhysicalParams& params, const GroundStateOpts& opts) {
    if (grid.dim > 3) throw Error("gradient flow: d <= 3 required");

    const double a0 = (cs.kind == ConstraintSpec::Kind::TwoMass) ? cs.a : 0.5 * cs.c;
    const double b0 = (cs.kind == ConstraintSpec::Kind::TwoMass) ? cs.b : 0.25 * cs.c;
    FieldPair fp = gaussian_seed(grid, a0, b0);
    if (opts.seed) {
        if (!opts.seed->on_tensor() || !same_grid(opts.seed->grid(), GridVar(grid)))
            throw GridMismatch("gradient flow: seed grid differs from the target grid");
        fp = *opts.seed;
    }

    auto project = [&](FieldPair& p) {
        if (cs.kind == ConstraintSpec::Kind::TwoMass) {
            const double mu = l2_norm_sq(p.u), mv = l2_norm_sq(p.v);
            const double su = std::sqrt(cs.a / mu), sv = std::sqrt(cs.b / mv);
            for (auto& z : p.u.val) z *= su;
            for (auto& z : p.v.val) z *= sv;
        } else {
            const double s = std::sqrt(cs.c / mass(p));
            for (auto& z : p.u.val) z *= s;
            for (auto& z : p.v.val) z *= s;
        }
    };
    project(fp);

    const std::vector<double> k2 = k2_table(grid);
    double E = energy(fp, params).E;
    double tau = opts.tau0;
    double res = std::numeric_limits<double>::infinity();
    int iter = 0;
    ComplexField Nu, Nv;

    auto residual_now = [&](const FieldPair& p) {
        double w1, w2;
        extract_multipliers(p, params, w1, w2);
        return elliptic_residual_inf(p, w1, w2, params);
    };

    // Under the TotalMass constraint, the joint rescale projects along
    // (u, 2v) only if v evolves in the 2|v|^2-weighted metric, i.e. at half
    // the step. (Under TwoMass each component is rescaled on its own and the
    // plain metric is fine.) Shifting the resolvent by the current multiplier
    // estimates makes constrained critical points exact fixed points of the
    // discrete map, so the residual can reach solver precision at finite tau.
    const double vfac = (cs.kind == ConstraintSpec::Kind::TotalMass) ? 0.5 : 1.0;

    for (; iter < opts.max_iters; ++iter) {
        dealiased_nonlinearities(fp, Nu, Nv);
        double w1, w2;
        if (cs.kind == ConstraintSpec::Kind::TwoMass) {
            extract_multipliers(fp, params, w1, w2);
        } else {
            // single multiplier of the M(u,v) = c constraint; Pohozaev gives
            // omega = (3P - K)/M at the minimizer, and the v equation carries 2 omega
            const FunctionalReport fr = energy(fp, params);
            w1 = (3.0 * fr.P - fr.K) / fr.M;
            w2 = 2.0 * w1;
        }
        bool accepted = false;
        while (tau > 1e-14) {
            const double tv = vfac * tau;
            // keep the shifted resolvents positive definite
            const double s1 = std::max(w1, -0.5 / tau);
            const double s2 = std::max(w2, -0.5 / tv);
            FieldPair trial = fp;
            // semi-implicit step: (1 + tau(-Lap + w))^{-1}(u + tau Nu), kappa on v
            std::vector<cxd> uh(trial.u.size()), vh(trial.v.size());
            for (std::size_t i = 0; i < uh.size(); ++i) {
                uh[i] = fp.u.val[i] + tau * Nu.val[i];
                vh[i] = fp.v.val[i] + tv * Nv.val[i];
            }
            fft_forward(grid, uh);
            fft_forward(grid, vh);
            for (std::size_t i = 0; i < uh.size(); ++i) {
                uh[i] /= 1.0 + tau * (k2[i] + s1);
                vh[i] /= 1.0 + tv * (params.kappa * k2[i] + s2);
            }
            fft_inverse(grid, uh);
            fft_inverse(grid, vh);
            trial.u.val = std::move(uh);
            trial.v.val = std::move(vh);
            project(trial);
            const double Et = energy(trial, params).E;
            if (Et <= E + 1e-14 * std::abs(E)) {
                fp = std::move(trial);
                const double dE = E - Et;
                E = Et;
                accepted = true;
                tau = std::min(tau * 1.2, 4.0);
                if (dE < opts.tol_energy) {
                    res = residual_now(fp);
                    if (res < opts.tol_residual) { ++iter; goto done; }
                }
                break;
            }
            tau *= 0.5;
        }
        if (!accepted) {
            res = residual_now(fp);
            if (res < opts.tol_residual) { ++iter; break; }
            throw NoDescent("gradient flow: step size underflow before convergence");
        }
        if ((iter & 63) == 63) {
            res = residual_now(fp);
            if (std::getenv("QNLS_FLOW_DEBUG"))
                std::fprintf(stderr, "iter %d E=%.14f res=%.3e tau=%.3e\n", iter, E, res, tau);
            if (res < opts.tol_residual) { ++iter; break; }
        }
    }
done:
    if (res > opts.tol_residual) {
        res = residual_now(fp);
        if (res > opts.tol_residual)
            throw NotConverged("gradient flow: residual above tolerance at max_iters");
    }

    GroundStateResult out;
    out.iterations = iter;
    extract_multipliers(fp, params, out.omega1, out.omega2);
    out.residual_inf = res;
    out.functionals = energy(fp, params);
    out.energy_value = out.functionals.E;
    pohozaev_report(fp, out.omega1, params, grid.dim, out.pohozaev_defects);
    out.fields = std::move(fp);
    if (!(out.energy_value < 0))
        throw PositiveEnergy("gradient flow: minimum energy is nonnegative");
    return out;
}

} // namespace

GroundStateResult minimize_I(double a, double b, const Grid& grid,
                             const PhysicalParams& params, const GroundStateOpts& opts) {
    return run_flow(ConstraintSpec::two_mass(a, b), grid, params, opts);
}

GroundStateResult minimize_J(double c, const Grid& grid,
                             const PhysicalParams& params, const GroundStateOpts& opts) {
    return run_flow(ConstraintSpec::total_mass(c), grid, params, opts);
}

void extract_multipliers(const FieldPair& fp, const PhysicalParams& params,
                         double& omega1, double& omega2) {
    const double mu = l2_norm_sq(fp.u), mv = l2_norm_sq(fp.v);
    if (mu <= 0 || mv <= 0) throw ZeroMassComponent("extract_multipliers: vanishing component");
    const double P = interaction(fp);
    omega1 = (2.0 * P - grad_norm_sq(fp.u)) / mu;
    omega2 = (P - params.kappa * grad_norm_sq(fp.v)) / mv;
}

void pohozaev_report(const FieldPair& fp, double omega, const PhysicalParams& params,
                     int d, double defects[3]) {
    FunctionalReport r = energy(fp, params);
    if (r.M == 0) {
        defects[0] = defects[1] = defects[2] = 0;
        return;
    }
    const double S = r.E + 0.5 * omega * r.M;
    auto rel = [](double lhs, double rhs) {
        const double den = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
        return std::abs(lhs - rhs) / den;
    };
    defects[0] = rel(r.K + omega * r.M, 3.0 * r.P);
    defects[1] = rel(r.K, d * S);
    defects[2] = rel(omega * r.M, (6.0 - d) * S);
}

double elliptic_residual_inf(const FieldPair& fp, double omega1, double omega2,
                             const PhysicalParams& params) {
    ComplexField Nu, Nv;
    dealiased_nonlinearities(fp, Nu, Nv);
    ComplexField Lu = fp.on_tensor() ? laplacian(fp.u, fp.tensor())
                                     : radial_laplacian_hi(fp.u, fp.radial());
    ComplexField Lv = fp.on_tensor() ? laplacian(fp.v, fp.tensor())
                                     : radial_laplacian_hi(fp.v, fp.radial());
    double m = 0, scale = 0;
    for (std::size_t i = 0; i < fp.u.size(); ++i) {
        m = std::max(m, std::abs(-Lu.val[i] + omega1 * fp.u.val[i] - Nu.val[i]));
        m = std::max(m, std::abs(-params.kappa * Lv.val[i] + omega2 * fp.v.val[i] - Nv.val[i]));
        scale = std::max(scale, std::max(std::abs(Nu.val[i]), std::abs(Nv.val[i])));
    }
    // Scale by the size of the nonlinear terms: the absolute sup residual has
    // a roundoff floor of order cond(-Lap + omega) * eps, which exceeds any
    // fixed absolute tolerance once the grid is fine enough.
    return m / std::max(scale, 1.0);
}

FieldPair solve_elliptic(double omega1, double omega2, const PhysicalParams& params,
                         const RadialGrid& rgrid, const GroundStateOpts& opts) {
    if (!(omega1 > 0) || !(omega2 > 0))
        throw Error("solve_elliptic: multipliers must be positive");
    RadialHelmholtz A1(rgrid, omega1);
    // A2 = -kappa Lap + omega2 = kappa(-Lap + omega2/kappa)
    RadialHelmholtz A2(rgrid, omega2 / params.kappa);

    const int n = rgrid.nr;
    std::vector<double> u(n), v(n);
    for (int j = 0; j < n; ++j) {
        const double r = rgrid.node(j);
        u[j] = v[j] = 2.0 * std::exp(-0.5 * r * r);
    }

    double s = 0;
    for (int iter = 0; iter < opts.max_iters; ++iter) {
        std::vector<double> f(n), g(n), Pterms(n);
        for (int j = 0; j < n; ++j) {
            f[j] = 2.0 * u[j] * v[j];
            g[j] = u[j] * u[j];
            Pterms[j] = rgrid.weight(j) * v[j] * u[j] * u[j];
        }
        const double P = pairwise_sum(std::span<const double>(Pterms));
        if (!(P > 0)) throw NegativeInteraction("solve_elliptic: interaction became nonpositive");
        const std::vector<double> A1u = A1.apply(u);
        std::vector<double> A2v = A2.apply(v);
        for (double& x : A2v) x *= params.kappa;
        s = (radial_dot(rgrid, A1u, u) + radial_dot(rgrid, A2v, v)) / (3.0 * P);

        std::vector<double> su = A1.solve(f);
        std::vector<double> sv = A2.solve(g);
        // The undamped map sustains a period-2 oscillation in the u/v ratio;
        // mixing half the previous iterate back in removes it.
        const double s2 = s * s;
        double res = 0, scale = 1.0;
        for (int j = 0; j < n; ++j) {
            res = std::max(res, std::abs(A1u[j] - f[j]));
            res = std::max(res, std::abs(A2v[j] - g[j]));
            scale = std::max(scale, std::max(std::abs(f[j]), std::abs(g[j])));
            u[j] = 0.5 * u[j] + 0.5 * s2 * su[j];
            v[j] = 0.5 * v[j] + 0.5 * s2 * sv[j] / params.kappa;  // A2.solve inverts -Lap + omega2/kappa
        }
        if (res / scale < opts.tol_residual && std::abs(s - 1.0) < opts.tol_residual) {
            ComplexField uc(rgrid), vc(rgrid);
            for (int j = 0; j < n; ++j) {
                uc.val[j] = u[j];
                vc.val[j] = v[j];
            }
            return FieldPair(std::move(uc), std::move(vc));
        }
    }
    throw NotConverged("solve_elliptic: no fixed point within max_iters");
}

GNReport gn_constant(const RadialGrid& rgrid, const PhysicalParams& params,
                     const GroundStateOpts& opts) {
    if (rgrid.dim != 4 || std::abs(params.kappa - 0.5) > 1e-14)
        throw Error("gn_constant: requires d = 4 and kappa = 1/2");
    GNReport rep;
    rep.ground_pair = solve_elliptic(1.0, 2.0, params, rgrid, opts);
    rep.M_gs = mass(rep.ground_pair);
    rep.C_opt = 1.0 / (2.0 * std::sqrt(rep.M_gs));
    return rep;
}

std::vector<SubadditivityRow> subadditivity_scan(
    const std::vector<std::pair<double, double>>& pairs, const Grid& grid,
    const PhysicalParams& params, const GroundStateOpts& opts) {
    for (const auto& [a, b] : pairs)
        if (!(a > 0) || !(b > 0)) throw Error("subadditivity_scan: masses must be positive");
    std::vector<double> I(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i)
        I[i] = minimize_I(pairs[i].first, pairs[i].second, grid, params, opts).energy_value;
    std::vector<SubadditivityRow> table;
    for (std::size_t i = 0; i < pairs.size(); ++i)
        for (std::size_t j = i; j < pairs.size(); ++j) {
            SubadditivityRow row;
            row.i = i;
            row.j = j;
            row.I_i = I[i];
            row.I_j = I[j];
            row.I_sum = minimize_I(pairs[i].first + pairs[j].first,
                                   pairs[i].second + pairs[j].second, grid, params, opts)
                            .energy_value;
            row.gap = row.I_sum - row.I_i - row.I_j;
            table.push_back(row);
        }
    return table;
}

} // namespace qnls
