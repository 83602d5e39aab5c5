#include "doctest.h"

#include <numbers>
#include <random>

#include "qnls/spectral.hpp"

using namespace qnls;

namespace {

ComplexField gaussian_1d(const Grid& g, double sigma, double x0 = 0.0) {
    ComplexField f(g);
    for (int m = 0; m < g.n; ++m) {
        const double x = g.coord(m) - x0;
        f.val[m] = std::exp(-x * x / (2.0 * sigma * sigma));
    }
    return f;
}

ComplexField gaussian_radial(const RadialGrid& rg, double a) {
    // exp(-a r^2)
    ComplexField f(rg);
    for (int j = 0; j < rg.nr; ++j) {
        const double r = rg.node(j);
        f.val[j] = std::exp(-a * r * r);
    }
    return f;
}

} // namespace

TEST_SUITE("spectral") {

TEST_CASE("fft round trip restores data") {
    Grid g(2, 32, 5.0);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::vector<cxd> data(g.size()), orig;
    for (auto& z : data) z = cxd(uni(rng), uni(rng));
    orig = data;
    fft_forward(g, data);
    fft_inverse(g, data);
    double err = 0;
    for (std::size_t i = 0; i < data.size(); ++i) err = std::max(err, std::abs(data[i] - orig[i]));
    CHECK(err < 1e-13);
}

TEST_CASE("spectral laplacian has plane-wave eigenvalues") {
    Grid g(1, 64, 7.0);
    const double k = g.wavenumber(5);
    ComplexField f(g);
    for (int m = 0; m < g.n; ++m) f.val[m] = std::polar(1.0, k * g.coord(m));
    ComplexField lf = laplacian(f, g);
    double err = 0;
    for (int m = 0; m < g.n; ++m) err = std::max(err, std::abs(lf.val[m] + k * k * f.val[m]));
    CHECK(err < 1e-10);
}

TEST_CASE("gradient norm of a gaussian matches the closed form") {
    // f = exp(-x^2 / (2 s^2)): |f|_2^2 = s sqrt(pi), |f'|_2^2 = sqrt(pi)/(2s).
    Grid g(1, 512, 40.0);
    const double s = 1.3;
    ComplexField f = gaussian_1d(g, s);
    const double pi = std::numbers::pi;
    CHECK(l2_norm_sq(f) == doctest::Approx(s * std::sqrt(pi)).epsilon(1e-12));
    CHECK(grad_norm_sq(f) == doctest::Approx(std::sqrt(pi) / (2.0 * s)).epsilon(1e-12));
}

TEST_CASE("radial quadrature integrates a gaussian in d=4") {
    // int_{R^4} exp(-r^2) = pi^2 (the weight sigma_4 r^3 gives 2 pi^2 * 1/2).
    RadialGrid rg(4, 2048, 14.0);
    ComplexField f = gaussian_radial(rg, 1.0);
    std::vector<double> dens(rg.size());
    for (int j = 0; j < rg.nr; ++j) dens[j] = std::norm(f.val[j]);
    // |f|^2 = exp(-2 r^2): integral = pi^2 / 4.
    const double pi = std::numbers::pi;
    CHECK(integrate(dens, GridVar(rg)) == doctest::Approx(pi * pi / 4.0).epsilon(1e-10));
    CHECK(l2_norm_sq(f) == doctest::Approx(pi * pi / 4.0).epsilon(1e-10));
}

TEST_CASE("radial gradient norm matches the closed form in d=4") {
    // f = exp(-r^2/2): |grad f|^2 integrates r^2 exp(-r^2), total 2 pi^2 * 1 = 2 pi^2.
    RadialGrid rg(4, 2048, 14.0);
    ComplexField f = gaussian_radial(rg, 0.5);
    const double pi = std::numbers::pi;
    CHECK(grad_norm_sq(f) == doctest::Approx(2.0 * pi * pi).epsilon(1e-8));
}

TEST_CASE("high-order radial laplacian converges at sixth order") {
    // Lap exp(-r^2) = (4 r^2 - 2 d) exp(-r^2).
    auto sup_err = [](int nr) {
        RadialGrid rg(4, nr, 10.0);
        ComplexField f = gaussian_radial(rg, 1.0);
        ComplexField lf = radial_laplacian_hi(f, rg);
        double err = 0;
        for (int j = 0; j < rg.nr; ++j) {
            const double r = rg.node(j);
            const double exact = (4.0 * r * r - 8.0) * std::exp(-r * r);
            err = std::max(err, std::abs(lf.val[j] - exact));
        }
        return err;
    };
    const double e1 = sup_err(256), e2 = sup_err(512);
    CHECK(e1 < 1e-6);
    CHECK(e1 / e2 > 40.0);  // nominal 64
}

TEST_CASE("radial derivative matches the closed form") {
    RadialGrid rg(3, 512, 10.0);
    ComplexField f = gaussian_radial(rg, 1.0);
    auto df = radial_derivative(f);
    double err = 0;
    for (int j = 0; j < rg.nr; ++j) {
        const double r = rg.node(j);
        err = std::max(err, std::abs(df[j] - cxd(-2.0 * r * std::exp(-r * r))));
    }
    CHECK(err < 1e-6);
}

TEST_CASE("dealiasing zeroes the upper third and is idempotent") {
    Grid g(1, 64, 6.0);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    ComplexField f(g);
    for (auto& z : f.val) z = cxd(uni(rng), uni(rng));
    ComplexField fd = dealias(f, g);
    std::vector<cxd> hat = fd.val;
    fft_forward(g, hat);
    for (int m = 0; m < g.n; ++m) {
        const int mm = (m < g.n / 2) ? m : m - g.n;
        if (std::abs(mm) > g.n / 3) CHECK(std::abs(hat[m]) < 1e-12);
    }
    ComplexField fdd = dealias(fd, g);
    double err = 0;
    for (std::size_t i = 0; i < fd.val.size(); ++i) err = std::max(err, std::abs(fd.val[i] - fdd.val[i]));
    CHECK(err < 1e-13);
}

TEST_CASE("spectral shift translates a gaussian") {
    Grid g(1, 256, 24.0);
    ComplexField f = gaussian_1d(g, 1.0);
    const double y[3] = {0.73, 0, 0};
    ComplexField fs = spectral_shift(f, y);
    ComplexField ref = gaussian_1d(g, 1.0, 0.73);
    double err = 0;
    for (int m = 0; m < g.n; ++m) err = std::max(err, std::abs(fs.val[m] - ref.val[m]));
    CHECK(err < 1e-10);
}

TEST_CASE("pairwise sum agrees with sequential summation") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<double> x(100001);
    for (auto& e : x) e = uni(rng);
    double seq = 0;
    for (double e : x) seq += e;
    CHECK(pairwise_sum(x) == doctest::Approx(seq).epsilon(1e-12));
}

TEST_CASE("boundary decay ratio is small for confined data") {
    Grid g(1, 128, 32.0);
    ComplexField f = gaussian_1d(g, 1.0);
    CHECK(boundary_decay_ratio(f) < 1e-20);
}

} // TEST_SUITE
