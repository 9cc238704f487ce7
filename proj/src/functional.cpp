#include "fibrate/functional.hpp"

#include <cmath>
#include <memory>

namespace fibrate {

namespace detail {

std::vector<Edge> build_edge_scheme(const Grid& grid) {
    std::vector<Edge> edges;
    switch (grid.kind) {
        case GridKind::interval: {
            const int n = grid.nx;
            const double h = grid.hx;
            edges.reserve(static_cast<size_t>(n) + 1);
            for (int c = 0; c <= n; ++c) {
                int ia = c - 1;            // ghost zero at the left boundary
                int ib = (c == n) ? -1 : c;  // ghost zero at the right boundary
                edges.push_back({ia, ib, 1.0 / h, h});
            }
            break;
        }
        case GridKind::rectangle: {
            const int nx = grid.nx, ny = grid.ny;
            const double hx = grid.hx, hy = grid.hy;
            const double mass = hx * hy;
            edges.reserve(static_cast<size_t>((nx + 1) * ny + nx * (ny + 1)));
            for (int j = 0; j < ny; ++j)
                for (int c = 0; c <= nx; ++c) {
                    int ia = (c == 0) ? -1 : grid.index(c - 1, j);
                    int ib = (c == nx) ? -1 : grid.index(c, j);
                    edges.push_back({ia, ib, 1.0 / hx, mass});
                }
            for (int i = 0; i < nx; ++i)
                for (int c = 0; c <= ny; ++c) {
                    int ia = (c == 0) ? -1 : grid.index(i, c - 1);
                    int ib = (c == ny) ? -1 : grid.index(i, c);
                    edges.push_back({ia, ib, 1.0 / hy, mass});
                }
            break;
        }
        case GridKind::radial: {
            // Cells [r_i, r_{i+1}] carry mass 4*pi*r_mid^2*h. The origin cell
            // [0, r_1] contributes no gradient (even extension of u).
            const int n = grid.nx;
            const double h = grid.hx;
            constexpr double kPi = 3.14159265358979323846;
            edges.reserve(static_cast<size_t>(n));
            for (int c = 1; c <= n; ++c) {
                double r_mid = (c + 0.5) * h;
                int ia = c - 1;
                int ib = (c == n) ? -1 : c;  // ghost zero at r = R
                edges.push_back({ia, ib, 1.0 / h, 4.0 * kPi * r_mid * r_mid * h});
            }
            break;
        }
    }
    return edges;
}

void apply_stiffness(const std::vector<Edge>& edges, const std::vector<double>& u,
                     std::vector<double>& out) {
    out.assign(u.size(), 0.0);
    for (const Edge& e : edges) {
        double ua = (e.ia >= 0) ? u[static_cast<size_t>(e.ia)] : 0.0;
        double ub = (e.ib >= 0) ? u[static_cast<size_t>(e.ib)] : 0.0;
        double flux = e.mass * (ub - ua) * e.inv_h * e.inv_h;
        if (e.ia >= 0) out[static_cast<size_t>(e.ia)] -= flux;
        if (e.ib >= 0) out[static_cast<size_t>(e.ib)] += flux;
    }
}

namespace {

constexpr double kEpsReg = 1e-12;  // under-the-root regularization for p < 2

// |D|^{p-2} D, regularized only when p < 2.
inline double phi_p(double d, double p) {
    if (p == 2.0) return d;
    if (p >= 2.0) return std::pow(std::abs(d), p - 2.0) * d;
    return std::pow(d * d + kEpsReg, 0.5 * (p - 2.0)) * d;
}

} // namespace
} // namespace detail

FunctionalHandle grad_p_energy(const GridPtr& grid, double p) {
    if (!grid) throw BadParams("grad_p_energy: null grid");
    if (p < 1.0) throw BadParams("grad_p_energy: p must be >= 1");
    auto edges = std::make_shared<const std::vector<detail::Edge>>(detail::build_edge_scheme(*grid));

    FunctionalHandle h;
    h.degree = p;
    h.is_even = true;
    h.name = "grad_" + std::to_string(p);

    h.evaluate = [edges, p](const Field& u) {
        double s = 0.0;
        for (const auto& e : *edges) {
            double ua = (e.ia >= 0) ? u.values[static_cast<size_t>(e.ia)] : 0.0;
            double ub = (e.ib >= 0) ? u.values[static_cast<size_t>(e.ib)] : 0.0;
            double d = (ub - ua) * e.inv_h;
            s += e.mass * ((p == 2.0) ? d * d : std::pow(std::abs(d), p));
        }
        return s;
    };
    h.directional = [edges, p](const Field& u, const Field& v) {
        require_same_grid(u, v);
        double s = 0.0;
        for (const auto& e : *edges) {
            double ua = (e.ia >= 0) ? u.values[static_cast<size_t>(e.ia)] : 0.0;
            double ub = (e.ib >= 0) ? u.values[static_cast<size_t>(e.ib)] : 0.0;
            double va = (e.ia >= 0) ? v.values[static_cast<size_t>(e.ia)] : 0.0;
            double vb = (e.ib >= 0) ? v.values[static_cast<size_t>(e.ib)] : 0.0;
            double du = (ub - ua) * e.inv_h;
            double dv = (vb - va) * e.inv_h;
            s += e.mass * p * detail::phi_p(du, p) * dv;
        }
        return s;
    };
    h.gradient = [edges, p](const Field& u) {
        Field g(u.grid);
        for (const auto& e : *edges) {
            double ua = (e.ia >= 0) ? u.values[static_cast<size_t>(e.ia)] : 0.0;
            double ub = (e.ib >= 0) ? u.values[static_cast<size_t>(e.ib)] : 0.0;
            double du = (ub - ua) * e.inv_h;
            double flux = e.mass * p * detail::phi_p(du, p) * e.inv_h;
            if (e.ia >= 0) g.values[static_cast<size_t>(e.ia)] -= flux;
            if (e.ib >= 0) g.values[static_cast<size_t>(e.ib)] += flux;
        }
        const auto& w = u.grid->weights;
        for (size_t i = 0; i < w.size(); ++i) g.values[i] /= w[i];
        return g;
    };
    return h;
}

namespace {

// |a|^s with a multiply loop for small integer s; pow() dominates the
// optimizer's per-iteration cost otherwise.
inline double abs_pow(double a, double s, int int_s) {
    a = std::abs(a);
    if (int_s > 0) {
        double r = a;
        for (int k = 1; k < int_s; ++k) r *= a;
        return r;
    }
    return std::pow(a, s);
}

inline int small_int_exponent(double s) {
    double r = std::round(s);
    return (r == s && r >= 1.0 && r <= 8.0) ? static_cast<int>(r) : 0;
}

} // namespace

FunctionalHandle weighted_power(const GridPtr& grid, double s, const Field& weight) {
    if (!grid) throw BadParams("weighted_power: null grid");
    if (s <= 1.0) throw BadParams("weighted_power: exponent must exceed 1");
    if (weight.size() != grid->size()) throw GridMismatch("weighted_power: weight field size");
    auto wf = std::make_shared<const std::vector<double>>(weight.values);
    const int int_s = small_int_exponent(s);
    const int int_s1 = small_int_exponent(s - 1.0);

    FunctionalHandle h;
    h.degree = s;
    h.is_even = true;
    h.name = "power_" + std::to_string(s);

    h.evaluate = [wf, s, int_s](const Field& u) {
        const auto& w = u.grid->weights;
        double acc = 0.0;
        for (size_t i = 0; i < w.size(); ++i)
            acc += w[i] * (*wf)[i] * abs_pow(u.values[i], s, int_s);
        return acc;
    };
    h.directional = [wf, s, int_s1](const Field& u, const Field& v) {
        require_same_grid(u, v);
        const auto& w = u.grid->weights;
        double acc = 0.0;
        for (size_t i = 0; i < w.size(); ++i) {
            double ui = u.values[i];
            if (ui == 0.0) continue;
            acc += w[i] * (*wf)[i] * s * abs_pow(ui, s - 1.0, int_s1) *
                   std::copysign(1.0, ui) * v.values[i];
        }
        return acc;
    };
    h.gradient = [wf, s, int_s1](const Field& u) {
        Field g(u.grid);
        for (size_t i = 0; i < g.values.size(); ++i) {
            double ui = u.values[i];
            g.values[i] = (ui == 0.0) ? 0.0
                                      : s * (*wf)[i] * abs_pow(ui, s - 1.0, int_s1) *
                                            std::copysign(1.0, ui);
        }
        return g;
    };
    return h;
}

FunctionalHandle weighted_power(const GridPtr& grid, double s, double weight) {
    return weighted_power(grid, s, constant_field(grid, weight));
}

FunctionalHandle grad_p_squared_energy(const GridPtr& grid) {
    FunctionalHandle base = grad_p_energy(grid, 2.0);
    FunctionalHandle h;
    h.degree = 4.0;
    h.is_even = true;
    h.name = "grad_2_squared";
    h.evaluate = [base](const Field& u) {
        double n = base.evaluate(u);
        return n * n;
    };
    h.directional = [base](const Field& u, const Field& v) {
        return 2.0 * base.evaluate(u) * base.directional(u, v);
    };
    h.gradient = [base](const Field& u) {
        return scaled(base.gradient(u), 2.0 * base.evaluate(u));
    };
    return h;
}

FunctionalHandle scale_handle(const FunctionalHandle& f, double c, const std::string& name) {
    FunctionalHandle h;
    h.degree = f.degree;
    h.is_even = f.is_even;
    h.name = name.empty() ? ("scaled_" + f.name) : name;
    h.evaluate = [f, c](const Field& u) { return c * f.evaluate(u); };
    h.directional = [f, c](const Field& u, const Field& v) { return c * f.directional(u, v); };
    h.gradient = [f, c](const Field& u) { return scaled(f.gradient(u), c); };
    return h;
}

FunctionalHandle sum_handle(const FunctionalHandle& f, const FunctionalHandle& g,
                            const std::string& name) {
    if (f.degree != g.degree) throw BadParams("sum_handle: homogeneity degrees differ");
    FunctionalHandle h;
    h.degree = f.degree;
    h.is_even = f.is_even && g.is_even;
    h.name = name.empty() ? (f.name + "+" + g.name) : name;
    h.evaluate = [f, g](const Field& u) { return f.evaluate(u) + g.evaluate(u); };
    h.directional = [f, g](const Field& u, const Field& v) {
        return f.directional(u, v) + g.directional(u, v);
    };
    h.gradient = [f, g](const Field& u) { return added(f.gradient(u), g.gradient(u)); };
    return h;
}

Field constant_field(const GridPtr& grid, double value) {
    Field f(grid);
    for (double& x : f.values) x = value;
    return f;
}

} // namespace fibrate
