#include "fibrate/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fibrate {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

std::string to_string(GridKind kind) {
    switch (kind) {
        case GridKind::interval: return "interval";
        case GridKind::rectangle: return "rectangle";
        case GridKind::radial: return "radial";
    }
    return "unknown";
}

double Grid::measure() const {
    double s = boundary_mass;
    for (double w : weights) s += w;
    return s;
}

double Grid::domain_measure() const {
    switch (kind) {
        case GridKind::interval: return lx;
        case GridKind::rectangle: return lx * ly;
        case GridKind::radial: return 4.0 / 3.0 * kPi * lx * lx * lx;
    }
    return 0.0;
}

GridPtr build_interval_grid(double length, int n) {
    if (length <= 0.0) throw BadSpec("interval length must be positive");
    if (n < 3) throw BadSpec("interval grid needs n >= 3 interior nodes");
    auto g = std::make_shared<Grid>();
    g->kind = GridKind::interval;
    g->lx = length;
    g->nx = n;
    g->ny = 1;
    g->hx = length / (n + 1);
    g->axis_x.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) g->axis_x[static_cast<size_t>(i)] = (i + 1) * g->hx;
    g->axis_y = {0.0};
    g->weights.assign(static_cast<size_t>(n), g->hx);
    g->boundary_mass = g->hx;  // two halved end cells
    return g;
}

GridPtr build_rectangle_grid(double lx, double ly, int nx, int ny) {
    if (lx <= 0.0 || ly <= 0.0) throw BadSpec("rectangle extents must be positive");
    if (nx < 3 || ny < 3) throw BadSpec("rectangle grid needs nx, ny >= 3");
    auto g = std::make_shared<Grid>();
    g->kind = GridKind::rectangle;
    g->lx = lx;
    g->ly = ly;
    g->nx = nx;
    g->ny = ny;
    g->hx = lx / (nx + 1);
    g->hy = ly / (ny + 1);
    g->axis_x.resize(static_cast<size_t>(nx));
    g->axis_y.resize(static_cast<size_t>(ny));
    for (int i = 0; i < nx; ++i) g->axis_x[static_cast<size_t>(i)] = (i + 1) * g->hx;
    for (int j = 0; j < ny; ++j) g->axis_y[static_cast<size_t>(j)] = (j + 1) * g->hy;
    g->weights.assign(static_cast<size_t>(nx) * static_cast<size_t>(ny), g->hx * g->hy);
    // Boundary ring of the tensor trapezoid rule: full mass minus interior.
    g->boundary_mass = lx * ly - (nx * g->hx) * (ny * g->hy);
    return g;
}

GridPtr build_radial_grid(double radius, int n) {
    if (radius <= 0.0) throw BadSpec("radial truncation radius must be positive");
    if (n < 3) throw BadSpec("radial grid needs n >= 3 interior nodes");
    auto g = std::make_shared<Grid>();
    g->kind = GridKind::radial;
    g->lx = radius;
    g->nx = n;
    g->ny = 1;
    g->hx = radius / (n + 1);
    g->axis_x.resize(static_cast<size_t>(n));
    g->weights.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        double r = (i + 1) * g->hx;
        g->axis_x[static_cast<size_t>(i)] = r;
        g->weights[static_cast<size_t>(i)] = 4.0 * kPi * r * r * g->hx;
    }
    g->axis_y = {0.0};
    // r = 0 endpoint has zero shell area; r = R carries the halved cell.
    g->boundary_mass = 4.0 * kPi * radius * radius * g->hx / 2.0;
    return g;
}

Field::Field(GridPtr g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
    if (static_cast<int>(values.size()) != grid->size())
        throw GridMismatch("field length " + std::to_string(values.size()) +
                           " incompatible with grid of size " + std::to_string(grid->size()));
}

double inner_h(const Field& u, const Field& v) {
    require_same_grid(u, v);
    const auto& w = u.grid->weights;
    double s = 0.0;
    for (size_t i = 0; i < w.size(); ++i) s += w[i] * u.values[i] * v.values[i];
    return s;
}

double norm_h(const Field& u) { return std::sqrt(inner_h(u, u)); }

Field scaled(const Field& u, double s) {
    Field out = u;
    for (double& x : out.values) x *= s;
    return out;
}

Field added(const Field& u, const Field& v) {
    require_same_grid(u, v);
    Field out = u;
    for (size_t i = 0; i < out.values.size(); ++i) out.values[i] += v.values[i];
    return out;
}

Field axpy(const Field& u, double s, const Field& v) {
    require_same_grid(u, v);
    Field out = u;
    for (size_t i = 0; i < out.values.size(); ++i) out.values[i] += s * v.values[i];
    return out;
}

Field normalized_h(const Field& u) {
    double nrm = norm_h(u);
    if (nrm == 0.0) throw BadParams("cannot normalize the zero field");
    return scaled(u, 1.0 / nrm);
}

bool same_grid(const Grid& a, const Grid& b) {
    return a.kind == b.kind && a.nx == b.nx && a.ny == b.ny && a.lx == b.lx && a.ly == b.ly;
}

void require_same_grid(const Field& u, const Field& v) {
    if (u.grid.get() == v.grid.get()) return;
    if (!u.grid || !v.grid || !same_grid(*u.grid, *v.grid))
        throw GridMismatch("fields live on different grids");
}

} // namespace fibrate
