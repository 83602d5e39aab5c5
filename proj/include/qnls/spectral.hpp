#pragma once

#include <span>
#include <vector>

#include "qnls/field.hpp"
#include "qnls/fft.hpp"

namespace qnls {

/// Deterministic pairwise summation; fixed order regardless of thread count.
double pairwise_sum(std::span<const double> x);
cxd pairwise_sum(std::span<const cxd> x);

/// |k|^2 for every linear index of the tensor grid.
std::vector<double> k2_table(const Grid& g);

/// Spectral Laplacian on a periodic grid.
ComplexField laplacian(const ComplexField& f, const Grid& g);

/// Second-order conservative radial Laplacian f'' + (d-1)/r f'
/// (even extension at r=0, Dirichlet at r=R_max).
ComplexField radial_laplacian(const ComplexField& f, const RadialGrid& rg);

/// Sixth-order radial Laplacian, used by the elliptic solver and by
/// residual diagnostics where O(dr^2) is not accurate enough.
ComplexField radial_laplacian_hi(const ComplexField& f, const RadialGrid& rg);

/// Fourth-order radial derivative d/dr.
std::vector<cxd> radial_derivative(const ComplexField& f);

/// Integral of |grad f|^2: Parseval sum on tensor grids, derivative
/// quadrature on radial grids.
double grad_norm_sq(const ComplexField& f);

/// Quadrature of a real density: h^d sum on tensor grids, weighted
/// sigma_d r^{d-1} dr sum on radial grids.
double integrate(std::span<const double> density, const GridVar& g);

/// Integral of |f|^2.
double l2_norm_sq(const ComplexField& f);

/// L2 scalar product <f,g> = integral of f * conj(g).
cxd inner(const ComplexField& f, const ComplexField& g);

/// 2/3-rule dealiasing: zeroes Fourier modes with any axis index |m| > n/3.
ComplexField dealias(const ComplexField& f, const Grid& g);
void dealias_inplace(ComplexField& f);

/// Translate a periodic field by y (any real shift) via Fourier phases.
ComplexField spectral_shift(const ComplexField& f, const double y[3]);

/// Zero-padded resampling onto a finer tensor grid with the same box length:
/// exact for the trigonometric polynomial the coarse grid represents.
ComplexField spectral_upsample(const ComplexField& f, const Grid& fine);

/// max |f| on the outermost grid layer divided by max |f| overall.
double boundary_decay_ratio(const ComplexField& f);
double boundary_decay_ratio(const FieldPair& fp);

} // namespace qnls
