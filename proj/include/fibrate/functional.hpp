// functional.hpp — homogeneous energy functionals with exact directional
// derivatives and quadrature-paired gradient representers.
//
// A FunctionalHandle packages a d-homogeneous functional F together with
//   directional(u, v) = F'(u)v
//   gradient(u)       = the field g with <g, v>_h = F'(u)v for all v,
// where <.,.>_h is the grid's quadrature inner product. Homogeneity and the
// Euler identity F'(u)u = d*F(u) hold exactly by construction, which the
// fibering engine relies on.
//
// Built-in families:
//   grad_p_energy(grid, p)            int |grad u|^p   (staggered midpoint cells,
//                                     ghost zeros at Dirichlet boundaries; at
//                                     the radial origin the even extension
//                                     contributes no gradient)
//   weighted_power(grid, s, w)        int w |u|^s      (nodal quadrature)
//   grad_p_squared_energy(grid)       ( int |grad u|^2 )^2
//
// For p < 2 the p-Laplacian assembly regularizes |D| by sqrt(D^2 + 1e-12)
// in the derivative only; evaluation stays exact.

#pragma once

#include "fibrate/grid.hpp"

#include <functional>
#include <string>
#include <vector>

namespace fibrate {

struct FunctionalHandle {
    std::function<double(const Field&)> evaluate;
    std::function<double(const Field&, const Field&)> directional;
    std::function<Field(const Field&)> gradient;
    double degree = 0.0;
    bool is_even = true;
    std::string name;
};

// int |grad u|^p over the cells of the grid; p >= 1.
FunctionalHandle grad_p_energy(const GridPtr& grid, double p);

// int w |u|^s with a nodal weight field; s > 1.
FunctionalHandle weighted_power(const GridPtr& grid, double s, const Field& weight);
FunctionalHandle weighted_power(const GridPtr& grid, double s, double weight = 1.0);

// Kirchhoff coupling A(u) = ( int |grad u|^2 )^2.
FunctionalHandle grad_p_squared_energy(const GridPtr& grid);

// c*F; same degree.
FunctionalHandle scale_handle(const FunctionalHandle& f, double c, const std::string& name = "");

// F + G; degrees must agree.
FunctionalHandle sum_handle(const FunctionalHandle& f, const FunctionalHandle& g,
                            const std::string& name = "");

// Constant-valued nodal field on a grid.
Field constant_field(const GridPtr& grid, double value);

namespace detail {

// One staggered-difference cell: D = (u[ib] - u[ia]) * inv_h with index -1
// for a ghost zero, carrying quadrature mass.
struct Edge {
    int ia;
    int ib;
    double inv_h;
    double mass;
};

// Cell decomposition of the Dirichlet form; shared with the eigensolver.
std::vector<Edge> build_edge_scheme(const Grid& grid);

// Stiffness application (Ku)_i with u^T K u = int |grad u|^2.
void apply_stiffness(const std::vector<Edge>& edges, const std::vector<double>& u,
                     std::vector<double>& out);

} // namespace detail

} // namespace fibrate
