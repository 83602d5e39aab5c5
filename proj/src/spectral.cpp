#include "qnls/spectral.hpp"

#include <algorithm>
#include <cmath>

namespace qnls {

namespace {

template <class T>
T pairwise_impl(std::span<const T> x) {
    if (x.size() <= 8) {
        T s{};
        for (const T& t : x) s += t;
        return s;
    }
    std::size_t half = x.size() / 2;
    return pairwise_impl(x.subspan(0, half)) + pairwise_impl(x.subspan(half));
}

} // namespace

double pairwise_sum(std::span<const double> x) { return pairwise_impl(x); }
cxd pairwise_sum(std::span<const cxd> x) { return pairwise_impl(x); }

std::vector<double> k2_table(const Grid& g) {
    std::vector<double> kax(g.n);
    for (int m = 0; m < g.n; ++m) {
        double k = g.wavenumber(m);
        kax[m] = k * k;
    }
    std::vector<double> out(g.size());
    const std::size_t n = static_cast<std::size_t>(g.n);
    if (g.dim == 1) {
        out = kax;
    } else if (g.dim == 2) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) out[i * n + j] = kax[i] + kax[j];
    } else {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t l = 0; l < n; ++l)
                    out[(i * n + j) * n + l] = kax[i] + kax[j] + kax[l];
    }
    return out;
}

ComplexField laplacian(const ComplexField& f, const Grid& g) {
    require_same_grid(f, GridVar(g), "laplacian");
    ComplexField out = f;
    fft_forward(g, out.val);
    const std::vector<double> k2 = k2_table(g);
    for (std::size_t i = 0; i < out.val.size(); ++i) out.val[i] *= -k2[i];
    fft_inverse(g, out.val);
    return out;
}

ComplexField radial_laplacian(const ComplexField& f, const RadialGrid& rg) {
    require_same_grid(f, GridVar(rg), "radial_laplacian");
    const int nr = rg.nr;
    const double dr = rg.dr();
    const int d = rg.dim;
    ComplexField out(rg);
    // Conservative form (r^{d-1} f')' / r^{d-1}; the flux through the r=0
    // face vanishes, which is the even extension for d=1 as well.
    for (int j = 0; j < nr; ++j) {
        const double r = rg.node(j);
        const double rp = std::pow((j + 1) * dr, d - 1);
        const double rm = std::pow(j * dr, d - 1);
        const cxd fj = f.val[j];
        const cxd fp = (j + 1 < nr) ? f.val[j + 1] : cxd(0.0);
        const cxd fluxp = rp * (fp - fj);
        const cxd fluxm = (j > 0) ? rm * (fj - f.val[j - 1]) : cxd(0.0);
        out.val[j] = (fluxp - fluxm) / (std::pow(r, d - 1) * dr * dr);
    }
    return out;
}

namespace {

// Even-extension ghost on the left (smooth radial data is even in r),
// zeros beyond R_max.
inline cxd rad_at(const std::vector<cxd>& f, int j) {
    const int n = static_cast<int>(f.size());
    if (j < 0) return f[-j - 1];
    if (j >= n) return cxd(0.0);
    return f[j];
}

} // namespace

ComplexField radial_laplacian_hi(const ComplexField& f, const RadialGrid& rg) {
    require_same_grid(f, GridVar(rg), "radial_laplacian_hi");
    const int nr = rg.nr;
    const double dr = rg.dr();
    const int d = rg.dim;
    static const double c2[7] = {2.0, -27.0, 270.0, -490.0, 270.0, -27.0, 2.0};
    static const double c1[7] = {-1.0, 9.0, -45.0, 0.0, 45.0, -9.0, 1.0};
    ComplexField out(rg);
    for (int j = 0; j < nr; ++j) {
        cxd d2(0, 0), d1(0, 0);
        for (int off = -3; off <= 3; ++off) {
            const cxd fv = rad_at(f.val, j + off);
            d2 += c2[off + 3] * fv;
            d1 += c1[off + 3] * fv;
        }
        out.val[j] = d2 / (180.0 * dr * dr) + (d - 1) / rg.node(j) * d1 / (60.0 * dr);
    }
    return out;
}

std::vector<cxd> radial_derivative(const ComplexField& f) {
    const RadialGrid& rg = f.radial();
    const double dr = rg.dr();
    std::vector<cxd> out(f.size());
    for (int j = 0; j < rg.nr; ++j) {
        const cxd fm2 = rad_at(f.val, j - 2), fm1 = rad_at(f.val, j - 1);
        const cxd fp1 = rad_at(f.val, j + 1), fp2 = rad_at(f.val, j + 2);
        out[j] = (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * dr);
    }
    return out;
}

double grad_norm_sq(const ComplexField& f) {
    if (f.on_tensor()) {
        const Grid& g = f.tensor();
        std::vector<cxd> hat = f.val;
        fft_forward(g, hat);
        const std::vector<double> k2 = k2_table(g);
        std::vector<double> terms(hat.size());
        for (std::size_t i = 0; i < hat.size(); ++i) terms[i] = k2[i] * std::norm(hat[i]);
        const double scale = std::pow(g.spacing(), g.dim) / static_cast<double>(g.size());
        return scale * pairwise_sum(terms);
    }
    std::vector<cxd> df = radial_derivative(f);
    std::vector<double> dens(df.size());
    for (std::size_t j = 0; j < df.size(); ++j) dens[j] = std::norm(df[j]);
    return integrate(dens, f.grid);
}

double integrate(std::span<const double> density, const GridVar& g) {
    if (std::holds_alternative<Grid>(g)) {
        const Grid& tg = std::get<Grid>(g);
        if (density.size() != tg.size()) throw GridMismatch("integrate: size mismatch");
        return std::pow(tg.spacing(), tg.dim) * pairwise_sum(density);
    }
    const RadialGrid& rg = std::get<RadialGrid>(g);
    if (density.size() != rg.size()) throw GridMismatch("integrate: size mismatch");
    std::vector<double> weighted(density.size());
    for (int j = 0; j < rg.nr; ++j) weighted[j] = rg.weight(j) * density[j];
    return pairwise_sum(weighted);
}

double l2_norm_sq(const ComplexField& f) {
    std::vector<double> dens(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) dens[i] = std::norm(f.val[i]);
    return integrate(dens, f.grid);
}

cxd inner(const ComplexField& f, const ComplexField& g) {
    if (!same_grid(f.grid, g.grid)) throw GridMismatch("inner: grids differ");
    std::vector<cxd> prod(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) prod[i] = f.val[i] * std::conj(g.val[i]);
    if (f.on_tensor()) {
        const Grid& tg = f.tensor();
        return std::pow(tg.spacing(), tg.dim) * pairwise_sum(std::span<const cxd>(prod));
    }
    const RadialGrid& rg = f.radial();
    for (int j = 0; j < rg.nr; ++j) prod[j] *= rg.weight(j);
    return pairwise_sum(std::span<const cxd>(prod));
}

namespace {

// signed FFT index along one axis
inline int signed_mode(int m, int n) { return (m < n / 2) ? m : m - n; }

} // namespace

void dealias_inplace(ComplexField& f) {
    const Grid& g = f.tensor();
    fft_forward(g, f.val);
    const int n = g.n;
    const int cut = n / 3;
    const std::size_t nn = static_cast<std::size_t>(n);
    auto kill = [&](int m) { return std::abs(signed_mode(m, n)) > cut; };
    if (g.dim == 1) {
        for (int i = 0; i < n; ++i)
            if (kill(i)) f.val[i] = 0.0;
    } else if (g.dim == 2) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (kill(i) || kill(j)) f.val[i * nn + j] = 0.0;
    } else {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int l = 0; l < n; ++l)
                    if (kill(i) || kill(j) || kill(l)) f.val[(i * nn + j) * nn + l] = 0.0;
    }
    fft_inverse(g, f.val);
}

ComplexField dealias(const ComplexField& f, const Grid& g) {
    require_same_grid(f, GridVar(g), "dealias");
    ComplexField out = f;
    dealias_inplace(out);
    return out;
}

ComplexField spectral_shift(const ComplexField& f, const double y[3]) {
    const Grid& g = f.tensor();
    ComplexField out = f;
    fft_forward(g, out.val);
    const int n = g.n;
    const std::size_t nn = static_cast<std::size_t>(n);
    std::vector<cxd> ph[3];
    for (int a = 0; a < g.dim; ++a) {
        ph[a].resize(n);
        for (int m = 0; m < n; ++m) {
            double k = g.wavenumber(m);
            ph[a][m] = std::polar(1.0, -k * y[a]);  // f(x - y): phase e^{-i k y}
        }
    }
    if (g.dim == 1) {
        for (int i = 0; i < n; ++i) out.val[i] *= ph[0][i];
    } else if (g.dim == 2) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) out.val[i * nn + j] *= ph[0][i] * ph[1][j];
    } else {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int l = 0; l < n; ++l)
                    out.val[(i * nn + j) * nn + l] *= ph[0][i] * ph[1][j] * ph[2][l];
    }
    fft_inverse(g, out.val);
    return out;
}

ComplexField spectral_upsample(const ComplexField& f, const Grid& fine) {
    const Grid& g = f.tensor();
    if (fine.dim != g.dim || std::abs(fine.length - g.length) > 1e-14 * g.length)
        throw GridMismatch("spectral_upsample: dimensions or box lengths differ");
    if (fine.n < g.n) throw Error("spectral_upsample: target grid is coarser");
    if (fine.n == g.n) return f;
    std::vector<cxd> hat = f.val;
    fft_forward(g, hat);
    // fft_inverse divides by the point count, so coefficients scale with it
    const double scale =
        std::pow(static_cast<double>(fine.n) / g.n, static_cast<double>(g.dim));
    ComplexField out(fine);
    const int nc = g.n, nf = fine.n;
    const std::size_t nnc = static_cast<std::size_t>(nc), nnf = static_cast<std::size_t>(nf);
    // coarse frequency index m -> fine storage index (negative modes at the top)
    auto up = [&](int m) { return (m < nc / 2) ? m : m + (nf - nc); };
    if (g.dim == 1) {
        for (int i = 0; i < nc; ++i) out.val[up(i)] = scale * hat[i];
    } else if (g.dim == 2) {
        for (int i = 0; i < nc; ++i)
            for (int j = 0; j < nc; ++j)
                out.val[up(i) * nnf + up(j)] = scale * hat[i * nnc + j];
    } else {
        for (int i = 0; i < nc; ++i)
            for (int j = 0; j < nc; ++j)
                for (int l = 0; l < nc; ++l)
                    out.val[(up(i) * nnf + up(j)) * nnf + up(l)] =
                        scale * hat[(i * nnc + j) * nnc + l];
    }
    fft_inverse(fine, out.val);
    return out;
}

double boundary_decay_ratio(const ComplexField& f) {
    double peak = 0.0;
    for (const cxd& z : f.val) peak = std::max(peak, std::abs(z));
    if (peak == 0.0) return 0.0;
    double bmax = 0.0;
    if (f.on_radial()) {
        const RadialGrid& rg = f.radial();
        bmax = std::abs(f.val[rg.nr - 1]);
    } else {
        const Grid& g = f.tensor();
        const int n = g.n;
        const std::size_t nn = static_cast<std::size_t>(n);
        auto edge = [&](int m) { return m == 0 || m == n - 1; };
        if (g.dim == 1) {
            bmax = std::max(std::abs(f.val[0]), std::abs(f.val[nn - 1]));
        } else if (g.dim == 2) {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (edge(i) || edge(j)) bmax = std::max(bmax, std::abs(f.val[i * nn + j]));
        } else {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int l = 0; l < n; ++l)
                        if (edge(i) || edge(j) || edge(l))
                            bmax = std::max(bmax, std::abs(f.val[(i * nn + j) * nn + l]));
        }
    }
    return bmax / peak;
}

double boundary_decay_ratio(const FieldPair& fp) {
    return std::max(boundary_decay_ratio(fp.u), boundary_decay_ratio(fp.v));
}

} // namespace qnls
