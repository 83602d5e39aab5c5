#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "qnls/grid.hpp"

namespace qnls {

using cxd = std::complex<double>;

/// A complex scalar field living on a tensor or radial grid.
struct ComplexField {
    GridVar grid;
    std::vector<cxd> val;

    ComplexField() = default;
    explicit ComplexField(const Grid& g) : grid(g), val(g.size()) {}
    explicit ComplexField(const RadialGrid& rg) : grid(rg), val(rg.size()) {}

    bool on_tensor() const { return std::holds_alternative<Grid>(grid); }
    bool on_radial() const { return std::holds_alternative<RadialGrid>(grid); }
    const Grid& tensor() const { return std::get<Grid>(grid); }
    const RadialGrid& radial() const { return std::get<RadialGrid>(grid); }
    std::size_t size() const { return val.size(); }

    bool finite() const {
        for (const cxd& z : val)
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
        return true;
    }
};

/// The state (u, v) of the coupled system; both components share one grid.
struct FieldPair {
    ComplexField u;
    ComplexField v;

    FieldPair() = default;
    FieldPair(ComplexField u_, ComplexField v_) : u(std::move(u_)), v(std::move(v_)) {
        if (!same_grid(u.grid, v.grid)) throw GridMismatch("FieldPair: components on different grids");
    }

    const GridVar& grid() const { return u.grid; }
    bool on_tensor() const { return u.on_tensor(); }
    bool on_radial() const { return u.on_radial(); }
    const Grid& tensor() const { return u.tensor(); }
    const RadialGrid& radial() const { return u.radial(); }
    bool finite() const { return u.finite() && v.finite(); }
};

inline void require_same_grid(const ComplexField& f, const GridVar& g, const char* where) {
    if (!same_grid(f.grid, g)) throw GridMismatch(std::string(where) + ": field/grid mismatch");
}

} // namespace qnls
