#include "fibrate/potential.hpp"

#include "fibrate/errors.hpp"

#include <cmath>
#include <memory>
#include <vector>

namespace fibrate {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_radial(const GridPtr& grid) {
    if (!grid || grid->kind != GridKind::radial)
        throw NotRadial("potential solve requires a radial grid");
}

} // namespace

double radial_kernel_primitive(double t, double a) {
    if (a == 0.0) return t;
    // expm1 keeps k_a accurate for t << a, where t - a(1 - e^{-t/a}) cancels.
    return t + a * std::expm1(-t / a);
}

Field bopp_podolski_potential(const Field& u, double a) {
    require_radial(u.grid);
    if (a < 0.0) throw BadParams("Bopp-Podolski parameter a must be >= 0");
    const Grid& g = *u.grid;
    const int n = g.size();
    const double h = g.hx;

    std::vector<double> rho(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) {
        double uj = u.values[static_cast<size_t>(j)];
        rho[static_cast<size_t>(j)] = uj * uj;
    }

    Field phi(u.grid);
    for (int i = 0; i < n; ++i) {
        double ri = g.axis_x[static_cast<size_t>(i)];
        double acc = 0.0;
        for (int j = 0; j < n; ++j) {
            double sj = g.axis_x[static_cast<size_t>(j)];
            double kern = radial_kernel_primitive(ri + sj, a) -
                          radial_kernel_primitive(std::abs(ri - sj), a);
            acc += sj * rho[static_cast<size_t>(j)] * kern;
        }
        phi.values[static_cast<size_t>(i)] = 2.0 * kPi * h * acc / ri;
    }
    return phi;
}

FunctionalHandle poisson_energy_handle(const GridPtr& grid, double a) {
    require_radial(grid);
    if (a < 0.0) throw BadParams("Bopp-Podolski parameter a must be >= 0");
    const int n = grid->size();
    const double h = grid->hx;

    // S_ij = 8 pi^2 h^2 r_i r_j [k(r_i + r_j) - k(|r_i - r_j|)], so that
    // A(u) = rho^T S rho with rho = u^2 and phi_i = (S rho)_i / w_i.
    auto S = std::make_shared<std::vector<double>>(static_cast<size_t>(n) * static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        double ri = grid->axis_x[static_cast<size_t>(i)];
        for (int j = 0; j <= i; ++j) {
            double rj = grid->axis_x[static_cast<size_t>(j)];
            double kern = radial_kernel_primitive(ri + rj, a) -
                          radial_kernel_primitive(ri - rj, a);
            double val = 8.0 * kPi * kPi * h * h * ri * rj * kern;
            (*S)[static_cast<size_t>(i) * n + j] = val;
            (*S)[static_cast<size_t>(j) * n + i] = val;
        }
    }

    auto apply_S_rho = [S, n](const Field& u, std::vector<double>& srho) {
        std::vector<double> rho(static_cast<size_t>(n));
        for (int j = 0; j < n; ++j) {
            double uj = u.values[static_cast<size_t>(j)];
            rho[static_cast<size_t>(j)] = uj * uj;
        }
        srho.assign(static_cast<size_t>(n), 0.0);
        for (int i = 0; i < n; ++i) {
            const double* row = S->data() + static_cast<size_t>(i) * n;
            double acc = 0.0;
            for (int j = 0; j < n; ++j) acc += row[j] * rho[static_cast<size_t>(j)];
            srho[static_cast<size_t>(i)] = acc;
        }
    };

    FunctionalHandle hnd;
    hnd.degree = 4.0;
    hnd.is_even = true;
    hnd.name = "poisson_a" + std::to_string(a);
    hnd.evaluate = [apply_S_rho, n](const Field& u) {
        std::vector<double> srho;
        apply_S_rho(u, srho);
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            double ui = u.values[static_cast<size_t>(i)];
            acc += srho[static_cast<size_t>(i)] * ui * ui;
        }
        return acc;
    };
    hnd.directional = [apply_S_rho, n](const Field& u, const Field& v) {
        require_same_grid(u, v);
        std::vector<double> srho;
        apply_S_rho(u, srho);
        double acc = 0.0;
        for (int i = 0; i < n; ++i)
            acc += 4.0 * srho[static_cast<size_t>(i)] * u.values[static_cast<size_t>(i)] *
                   v.values[static_cast<size_t>(i)];
        return acc;
    };
    hnd.gradient = [apply_S_rho, n](const Field& u) {
        std::vector<double> srho;
        apply_S_rho(u, srho);
        Field g(u.grid);
        const auto& w = u.grid->weights;
        for (int i = 0; i < n; ++i)
            g.values[static_cast<size_t>(i)] = 4.0 * srho[static_cast<size_t>(i)] *
                                               u.values[static_cast<size_t>(i)] /
                                               w[static_cast<size_t>(i)];
        return g;
    };
    return hnd;
}

} // namespace fibrate
