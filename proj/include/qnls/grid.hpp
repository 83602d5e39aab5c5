#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <variant>

#include "qnls/errors.hpp"

namespace qnls {

/// Periodic tensor grid on the box [-L/2, L/2)^d, d <= 3, n points per axis.
struct Grid {
    int dim = 1;
    int n = 0;          // points per axis, power of two, >= 8
    double length = 0;  // box edge L

    Grid() = default;
    Grid(int dim_, int n_, double length_) : dim(dim_), n(n_), length(length_) {
        if (dim < 1 || dim > 3) throw Error("Grid: dim must be 1..3");
        if (n < 8 || (n & (n - 1)) != 0) throw Error("Grid: n must be a power of two >= 8");
        if (!(length > 0)) throw Error("Grid: length must be positive");
    }

    double spacing() const { return length / n; }
    std::size_t size() const {
        std::size_t s = 1;
        for (int a = 0; a < dim; ++a) s *= static_cast<std::size_t>(n);
        return s;
    }
    double volume() const { return std::pow(length, dim); }
    /// Coordinate of index m along one axis.
    double coord(int m) const { return -0.5 * length + m * spacing(); }
    /// Wavenumber of FFT index m along one axis (negative branch for m >= n/2).
    double wavenumber(int m) const {
        int mm = (m < n / 2) ? m : m - n;
        return 2.0 * std::numbers::pi * mm / length;
    }

    bool operator==(const Grid&) const = default;
};

/// Cell-centered radial grid: nodes r_j = (j+1/2) dr, j = 0..nr-1, dr = R_max/nr.
struct RadialGrid {
    int dim = 3;
    int nr = 0;
    double r_max = 0;

    RadialGrid() = default;
    RadialGrid(int dim_, int nr_, double r_max_) : dim(dim_), nr(nr_), r_max(r_max_) {
        if (dim < 1 || dim > 4) throw Error("RadialGrid: dim must be 1..4");
        if (nr < 8) throw Error("RadialGrid: nr must be >= 8");
        if (!(r_max > 0)) throw Error("RadialGrid: r_max must be positive");
    }

    double dr() const { return r_max / nr; }
    double node(int j) const { return (j + 0.5) * dr(); }
    std::size_t size() const { return static_cast<std::size_t>(nr); }

    /// Area of the unit (d-1)-sphere.
    double sphere_area() const {
        constexpr double pi = std::numbers::pi;
        switch (dim) {
            case 1: return 2.0;
            case 2: return 2.0 * pi;
            case 3: return 4.0 * pi;
            case 4: return 2.0 * pi * pi;
        }
        return 0.0;
    }
    /// Quadrature weight sigma_d r^{d-1} dr of node j.
    double weight(int j) const {
        return sphere_area() * std::pow(node(j), dim - 1) * dr();
    }

    bool operator==(const RadialGrid&) const = default;
};

using GridVar = std::variant<Grid, RadialGrid>;

inline bool same_grid(const GridVar& a, const GridVar& b) { return a == b; }

} // namespace qnls
