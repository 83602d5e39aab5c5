#include "qnls/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qnls {

double mass(const FieldPair& fp) {
    std::vector<double> dens(fp.u.size());
    for (std::size_t i = 0; i < dens.size(); ++i)
        dens[i] = std::norm(fp.u.val[i]) + 2.0 * std::norm(fp.v.val[i]);
    return integrate(dens, fp.grid());
}

double interaction(const FieldPair& fp) {
    std::vector<double> dens(fp.u.size());
    for (std::size_t i = 0; i < dens.size(); ++i) {
        const cxd u = fp.u.val[i];
        dens[i] = (fp.v.val[i] * std::conj(u) * std::conj(u)).real();
    }
    return integrate(dens, fp.grid());
}

FunctionalReport energy(const FieldPair& fp, const PhysicalParams& params) {
    FunctionalReport r;
    r.M = mass(fp);
    r.K = grad_norm_sq(fp.u) + params.kappa * grad_norm_sq(fp.v);
    r.P = interaction(fp);
    r.E = 0.5 * r.K - r.P;
    return r;
}

double action(const FieldPair& fp, double omega, const PhysicalParams& params) {
    FunctionalReport r = energy(fp, params);
    return r.E + 0.5 * omega * r.M;
}

double weinstein(const FieldPair& fp, const PhysicalParams& params) {
    FunctionalReport r = energy(fp, params);
    if (!(r.P > 0)) throw NonpositiveInteraction("weinstein: P <= 0");
    return r.K * std::sqrt(r.M) / r.P;
}

double h1_pair_norm_sq(const FieldPair& fp) {
    return l2_norm_sq(fp.u) + grad_norm_sq(fp.u) + l2_norm_sq(fp.v) + grad_norm_sq(fp.v);
}

namespace {

// H1 scalar product <f,g> = integral of f conj(g) + grad f . conj(grad g).
cxd h1_inner(const ComplexField& f, const ComplexField& g) {
    if (f.on_tensor()) {
        const Grid& tg = f.tensor();
        std::vector<cxd> fh = f.val, gh = g.val;
        fft_forward(tg, fh);
        fft_forward(tg, gh);
        const std::vector<double> k2 = k2_table(tg);
        std::vector<cxd> terms(fh.size());
        for (std::size_t i = 0; i < fh.size(); ++i)
            terms[i] = (1.0 + k2[i]) * fh[i] * std::conj(gh[i]);
        const double scale = std::pow(tg.spacing(), tg.dim) / static_cast<double>(tg.size());
        return scale * pairwise_sum(std::span<const cxd>(terms));
    }
    cxd s = inner(f, g);
    std::vector<cxd> df = radial_derivative(f), dg = radial_derivative(g);
    const RadialGrid& rg = f.radial();
    std::vector<cxd> terms(df.size());
    for (int j = 0; j < rg.nr; ++j) terms[j] = rg.weight(j) * df[j] * std::conj(dg[j]);
    return s + pairwise_sum(std::span<const cxd>(terms));
}

// Maximize g(theta) = Re(A e^{-i theta}) + Re(B e^{-2i theta}).
double best_theta(cxd A, cxd B, double* gmax) {
    const double a = std::abs(A), alpha = std::arg(A);
    const double b = std::abs(B), beta = std::arg(B);
    auto g = [&](double th) { return a * std::cos(th - alpha) + b * std::cos(2.0 * th - beta); };
    double th_best = 0, g_best = g(0);
    constexpr int nsamp = 64;
    for (int i = 1; i < nsamp; ++i) {
        double th = 2.0 * std::numbers::pi * i / nsamp;
        double gt = g(th);
        if (gt > g_best) { g_best = gt; th_best = th; }
    }
    for (int it = 0; it < 8; ++it) {
        double gp = -a * std::sin(th_best - alpha) - 2.0 * b * std::sin(2.0 * th_best - beta);
        double gpp = -a * std::cos(th_best - alpha) - 4.0 * b * std::cos(2.0 * th_best - beta);
        if (gpp >= -1e-300) break;
        th_best -= gp / gpp;
    }
    g_best = g(th_best);
    if (gmax) *gmax = g_best;
    return th_best;
}

} // namespace

ModulationResult modulated_distance(const FieldPair& fp, const FieldPair& ref) {
    if (!same_grid(fp.grid(), ref.grid()))
        throw GridMismatch("modulated_distance: grids differ");
    const double norms = h1_pair_norm_sq(fp) + h1_pair_norm_sq(ref);
    ModulationResult out;

    if (fp.on_radial()) {
        cxd A = h1_inner(fp.u, ref.u);
        cxd B = h1_inner(fp.v, ref.v);
        double g = 0;
        out.theta = best_theta(A, B, &g);
        out.dist = std::sqrt(std::max(0.0, norms - 2.0 * g));
        return out;
    }

    const Grid& tg = fp.tensor();
    const std::size_t N = tg.size();
    const double scale = std::pow(tg.spacing(), tg.dim) / static_cast<double>(N);
    const std::vector<double> k2 = k2_table(tg);

    // Correlations over all grid shifts via FFT:
    //   A(y) = <u, w(.-y)>_{H1} = scale * sum_k (1+|k|^2) u^(k) conj(w^(k)) e^{i k.y}.
    std::vector<cxd> uh = fp.u.val, wh = ref.u.val, vh = fp.v.val, zh = ref.v.val;
    fft_forward(tg, uh);
    fft_forward(tg, wh);
    fft_forward(tg, vh);
    fft_forward(tg, zh);
    std::vector<cxd> ca(N), cb(N);
    for (std::size_t i = 0; i < N; ++i) {
        ca[i] = (1.0 + k2[i]) * uh[i] * std::conj(wh[i]);
        cb[i] = (1.0 + k2[i]) * vh[i] * std::conj(zh[i]);
    }
    std::vector<cxd> Agrid = ca, Bgrid = cb;
    fft_inverse(tg, Agrid);
    fft_inverse(tg, Bgrid);
    for (std::size_t i = 0; i < N; ++i) {
        Agrid[i] *= scale * static_cast<double>(N);
        Bgrid[i] *= scale * static_cast<double>(N);
    }

    auto gain = [&](std::size_t i) {
        double g = 0;
        best_theta(Agrid[i], Bgrid[i], &g);
        return g;
    };
    std::size_t ibest = 0;
    double gbest = gain(0);
    for (std::size_t i = 1; i < N; ++i) {
        double g = gain(i);
        if (g > gbest) { gbest = g; ibest = i; }
    }

    // Decompose the winning linear index into per-axis shift indices.
    const int n = tg.n;
    int idx[3] = {0, 0, 0};
    {
        std::size_t rem = ibest;
        for (int a = tg.dim - 1; a >= 0; --a) {
            idx[a] = static_cast<int>(rem % static_cast<std::size_t>(n));
            rem /= static_cast<std::size_t>(n);
        }
    }

    // Correlation at an arbitrary (fractional) shift y, by direct phase sum.
    auto corr_at = [&](const double y[3], cxd& A, cxd& B) {
        std::vector<cxd> terms(N);
        const std::size_t nn = static_cast<std::size_t>(n);
        auto phase1 = [&](int a) {
            std::vector<cxd> ph(n);
            for (int m = 0; m < n; ++m) ph[m] = std::polar(1.0, tg.wavenumber(m) * y[a]);
            return ph;
        };
        std::vector<cxd> p0 = phase1(0), p1, p2;
        if (tg.dim >= 2) p1 = phase1(1);
        if (tg.dim >= 3) p2 = phase1(2);
        auto accumulate = [&](const std::vector<cxd>& c) {
            if (tg.dim == 1) {
                for (int i = 0; i < n; ++i) terms[i] = c[i] * p0[i];
            } else if (tg.dim == 2) {
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) terms[i * nn + j] = c[i * nn + j] * p0[i] * p1[j];
            } else {
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j)
                        for (int l = 0; l < n; ++l)
                            terms[(i * nn + j) * nn + l] = c[(i * nn + j) * nn + l] * p0[i] * p1[j] * p2[l];
            }
            return scale * pairwise_sum(std::span<const cxd>(terms));
        };
        A = accumulate(ca);
        B = accumulate(cb);
    };

    // Quadratic sub-grid refinement per axis through the three neighboring
    // grid gains, then one exact evaluation at the refined shift.
    double y[3] = {0, 0, 0};
    const double h = tg.spacing();
    for (int a = 0; a < tg.dim; ++a) {
        auto neighbor = [&](int off) {
            int id[3] = {idx[0], idx[1], idx[2]};
            id[a] = (id[a] + off + n) % n;
            std::size_t lin = 0;
            for (int b = 0; b < tg.dim; ++b)
                lin = lin * static_cast<std::size_t>(n) + static_cast<std::size_t>(id[b]);
            return gain(lin);
        };
        const double gm = neighbor(-1), g0 = gbest, gp = neighbor(+1);
        double frac = 0;
        const double denom = gm - 2.0 * g0 + gp;
        if (denom < 0) frac = std::clamp(0.5 * (gm - gp) / denom, -0.5, 0.5);
        y[a] = (idx[a] + frac) * h;
        // map to the symmetric representative in (-L/2, L/2]
        if (y[a] > 0.5 * tg.length) y[a] -= tg.length;
    }

    cxd A, B;
    corr_at(y, A, B);
    double g = 0;
    double th = best_theta(A, B, &g);
    if (g < gbest) {  // refinement should never lose; fall back to the grid optimum
        for (int a = 0; a < tg.dim; ++a) {
            y[a] = idx[a] * h;
            if (y[a] > 0.5 * tg.length) y[a] -= tg.length;
        }
        th = best_theta(Agrid[ibest], Bgrid[ibest], &g);
    }
    out.dist = std::sqrt(std::max(0.0, norms - 2.0 * g));
    out.theta = th;
    for (int a = 0; a < 3; ++a) out.shift[a] = y[a];
    return out;
}

double mass_in_ball(const FieldPair& fp, double radius, const double center[3]) {
    const double r2 = radius * radius;
    if (fp.on_radial()) {
        const RadialGrid& rg = fp.radial();
        std::vector<double> terms;
        terms.reserve(rg.size());
        for (int j = 0; j < rg.nr; ++j) {
            if (rg.node(j) >= radius) break;
            terms.push_back(rg.weight(j) * (std::norm(fp.u.val[j]) + 2.0 * std::norm(fp.v.val[j])));
        }
        return pairwise_sum(std::span<const double>(terms));
    }
    const Grid& tg = fp.tensor();
    const int n = tg.n;
    const std::size_t nn = static_cast<std::size_t>(n);
    const double hd = std::pow(tg.spacing(), tg.dim);
    std::vector<double> terms(tg.size(), 0.0);
    auto dens = [&](std::size_t i) {
        return std::norm(fp.u.val[i]) + 2.0 * std::norm(fp.v.val[i]);
    };
    auto dx2 = [&](int m, int a) {
        double d = tg.coord(m) - (center ? center[a] : 0.0);
        return d * d;
    };
    if (tg.dim == 1) {
        for (int i = 0; i < n; ++i)
            if (dx2(i, 0) < r2) terms[i] = dens(i);
    } else if (tg.dim == 2) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (dx2(i, 0) + dx2(j, 1) < r2) terms[i * nn + j] = dens(i * nn + j);
    } else {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int l = 0; l < n; ++l)
                    if (dx2(i, 0) + dx2(j, 1) + dx2(l, 2) < r2)
                        terms[(i * nn + j) * nn + l] = dens((i * nn + j) * nn + l);
    }
    return hd * pairwise_sum(std::span<const double>(terms));
}

} // namespace qnls
