// grid.hpp — discretized domains, quadrature weights, and nodal fields.
//
// Three domain kinds share one interface:
//
//   interval   [0,L]          n interior nodes x_i = i*h,  h = L/(n+1)
//   rectangle  [0,Lx]x[0,Ly]  nx*ny interior nodes (i*hx, j*hy), row-major in i
//   radial     [0,R]          n interior nodes r_i = i*h,  h = R/(n+1),
//                             standing in for radial functions on R^3
//
// All boundaries are homogeneous Dirichlet; the radial origin carries a
// regularity condition (even extension) instead. A Field stores interior
// node values only.
//
// Quadrature is the composite trapezoid rule. Interior nodes carry
//   interval/rectangle:  w_i = h      (resp. hx*hy)
//   radial:              w_i = 4*pi*r_i^2*h
// and the halved boundary cells are tracked separately in boundary_mass so
// that  sum(weights) + boundary_mass  reproduces the domain measure
// (exactly for interval/rectangle; to the O(h^2) trapezoid error of
// int 4*pi*r^2 dr for radial).

#pragma once

#include "fibrate/errors.hpp"

#include <cmath>
#include <memory>
#include <string>
#include <vector>

namespace fibrate {

enum class GridKind { interval, rectangle, radial };

std::string to_string(GridKind kind);

struct Grid {
    GridKind kind;
    double lx = 0.0;        // interval length / rectangle Lx / radial R
    double ly = 0.0;        // rectangle Ly only
    int nx = 0;             // interior nodes along x (or r)
    int ny = 0;             // interior nodes along y (rectangle only)
    double hx = 0.0;
    double hy = 0.0;
    std::vector<double> axis_x;   // interior coordinates along x (or r)
    std::vector<double> axis_y;   // interior coordinates along y
    std::vector<double> weights;  // quadrature weight per interior node
    double boundary_mass = 0.0;   // halved boundary-cell quadrature mass

    int size() const { return static_cast<int>(weights.size()); }

    // Total quadrature mass including the halved boundary cells.
    double measure() const;

    // Flattened index of the rectangle node (i, j); row-major in i.
    int index(int i, int j) const { return j * nx + i; }

    double x_of(int idx) const { return axis_x[static_cast<size_t>(idx % nx)]; }
    double y_of(int idx) const { return axis_y[static_cast<size_t>(idx / nx)]; }

    // Analytic domain measure (interval length, rectangle area, ball volume).
    double domain_measure() const;
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr build_interval_grid(double length, int n);
GridPtr build_rectangle_grid(double lx, double ly, int nx, int ny);
GridPtr build_radial_grid(double radius, int n);

// A nodal field on the interior of a grid.
struct Field {
    GridPtr grid;
    std::vector<double> values;

    Field() = default;
    explicit Field(GridPtr g) : grid(std::move(g)), values(grid->weights.size(), 0.0) {}
    Field(GridPtr g, std::vector<double> v);

    int size() const { return static_cast<int>(values.size()); }
    double& operator[](int i) { return values[static_cast<size_t>(i)]; }
    double operator[](int i) const { return values[static_cast<size_t>(i)]; }
};

// Quadrature inner product <u,v>_h = sum_i w_i u_i v_i and derived norm.
double inner_h(const Field& u, const Field& v);
double norm_h(const Field& u);

Field scaled(const Field& u, double s);
Field added(const Field& u, const Field& v);
// u + s*v
Field axpy(const Field& u, double s, const Field& v);
Field normalized_h(const Field& u);

bool same_grid(const Grid& a, const Grid& b);
void require_same_grid(const Field& u, const Field& v);

} // namespace fibrate
