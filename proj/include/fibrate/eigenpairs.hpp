// eigenpairs.hpp — Dirichlet Laplacian eigenpairs of the discrete operator.
//
// Solves K phi = lambda W phi where K is the stiffness matrix of the
// discrete Dirichlet form (u^T K u = int |grad u|^2 over the grid's cells)
// and W = diag(quadrature weights). Eigenvectors are returned
// quadrature-orthonormal, eigenvalues ascending.
//
// On the unit interval the discrete values are (2/h^2)(1 - cos(m pi h)).
//
// Method: unshifted inverse iteration with quadrature-orthogonal deflation;
// exact tridiagonal solves in 1D/radial, preconditioned CG on rectangles.

#pragma once

#include "fibrate/grid.hpp"

#include <utility>
#include <vector>

namespace fibrate {

// First k eigenpairs; requires k <= size/2. Residual tolerance 1e-10.
std::vector<std::pair<double, Field>> eigenpairs(const GridPtr& grid, int k);

} // namespace fibrate
