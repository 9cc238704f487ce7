// potential.hpp — Coulomb / Bopp-Podolski potentials of radial densities.
//
// For a radial density rho = u^2 the 3D convolution with a radial kernel
// K(|x|) reduces, via integration over spheres, to
//
//   phi(r) = (2 pi / r) int_0^R  s rho(s) [ k(r + s) - k(|r - s|) ] ds,
//   k(t)   = int_0^t  w K(w) dw.
//
// Coulomb (a = 0):       K(w) = 1/w,                 k(t) = t
//                        which recovers Newton's theorem.
// Bopp-Podolski (a > 0): K(w) = (1 - e^{-w/a}) / w,  k(t) = t - a(1 - e^{-t/a}).
//
// This solves the field equation -Delta phi + a^2 Delta^2 phi = 4 pi u^2
// without discretizing the fourth-order operator; the truncation radius R
// stands in for decay at infinity.
//
// The interaction energy A(u) = int phi_{a,u} u^2 is an exactly symmetric
// biquadratic form in u; poisson_energy_handle precomputes its kernel matrix
// once per (grid, a) so that repeated evaluations are matrix products.

#pragma once

#include "fibrate/functional.hpp"
#include "fibrate/grid.hpp"

namespace fibrate {

// Radial antiderivative kernel k_a(t).
double radial_kernel_primitive(double t, double a);

// phi_{a,u} at the grid nodes; requires a radial grid and a >= 0.
Field bopp_podolski_potential(const Field& u, double a);

// A(u) = int phi_{a,u} u^2; degree 4, even, gradient representer 4 phi u.
FunctionalHandle poisson_energy_handle(const GridPtr& grid, double a);

} // namespace fibrate
