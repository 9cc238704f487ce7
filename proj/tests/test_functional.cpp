#include <doctest.h>

#include "fibrate/functional.hpp"

#include <cmath>
#include <random>

using namespace fibrate;

namespace {

constexpr double kPi = 3.14159265358979323846;

Field sine_field(const GridPtr& g, int mode = 1) {
    Field u(g);
    for (int i = 0; i < u.size(); ++i)
        u[i] = std::sin(mode * kPi * g->axis_x[static_cast<size_t>(i)]);
    return u;
}

Field random_field(const GridPtr& g, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Field u(g);
    for (double& v : u.values) v = gauss(rng);
    return u;
}

// Central finite difference of evaluate along v.
double central_fd(const FunctionalHandle& f, const Field& u, const Field& v, double h) {
    return (f.evaluate(axpy(u, h, v)) - f.evaluate(axpy(u, -h, v))) / (2.0 * h);
}

} // namespace

TEST_CASE("grad_2 of sin(pi x) approximates pi^2/2") {
    auto g = build_interval_grid(1.0, 511);
    auto n2 = grad_p_energy(g, 2.0);
    Field u = sine_field(g);
    CHECK(n2.evaluate(u) == doctest::Approx(kPi * kPi / 2.0).epsilon(1e-4));
}

TEST_CASE("int sin^4 = 3/8 via weighted_power") {
    auto g = build_interval_grid(1.0, 511);
    auto p4 = weighted_power(g, 4.0, 1.0);
    Field u = sine_field(g);
    CHECK(p4.evaluate(u) == doctest::Approx(3.0 / 8.0).epsilon(1e-4));
}

TEST_CASE("grad_2 agrees with the 3-point / 5-point stiffness form to roundoff") {
    SUBCASE("interval") {
        auto g = build_interval_grid(1.0, 33);
        Field u = random_field(g, 7);
        auto n2 = grad_p_energy(g, 2.0);
        auto edges = detail::build_edge_scheme(*g);
        std::vector<double> ku;
        detail::apply_stiffness(edges, u.values, ku);
        double quad = 0.0;
        for (size_t i = 0; i < ku.size(); ++i) quad += u.values[i] * ku[i];
        CHECK(n2.evaluate(u) == doctest::Approx(quad).epsilon(1e-13));
        // 3-point form assembled directly
        double direct = 0.0;
        const double h = g->hx;
        for (int i = 0; i <= g->nx; ++i) {
            double a = (i == 0) ? 0.0 : u[i - 1];
            double b = (i == g->nx) ? 0.0 : u[i];
            direct += (b - a) * (b - a) / h;
        }
        CHECK(n2.evaluate(u) == doctest::Approx(direct).epsilon(1e-13));
    }
    SUBCASE("rectangle") {
        auto g = build_rectangle_grid(1.0, 1.0, 9, 7);
        Field u = random_field(g, 11);
        auto n2 = grad_p_energy(g, 2.0);
        double direct = 0.0;
        const double hx = g->hx, hy = g->hy;
        auto at = [&](int i, int j) {
            return (i < 0 || i >= g->nx || j < 0 || j >= g->ny) ? 0.0 : u[g->index(i, j)];
        };
        for (int j = 0; j < g->ny; ++j)
            for (int i = 0; i <= g->nx; ++i) {
                double d = (at(i, j) - at(i - 1, j)) / hx;
                direct += hx * hy * d * d;
            }
        for (int i = 0; i < g->nx; ++i)
            for (int j = 0; j <= g->ny; ++j) {
                double d = (at(i, j) - at(i, j - 1)) / hy;
                direct += hx * hy * d * d;
            }
        CHECK(n2.evaluate(u) == doctest::Approx(direct).epsilon(1e-13));
    }
}

TEST_CASE("homogeneity and Euler identity for the functional families") {
    auto g = build_interval_grid(1.0, 64);
    auto gr = build_radial_grid(8.0, 80);
    std::vector<FunctionalHandle> handles = {
        grad_p_energy(g, 2.0), grad_p_energy(g, 3.0), grad_p_energy(g, 1.5),
        weighted_power(g, 2.5, 1.0), weighted_power(g, 4.0, 1.0), grad_p_squared_energy(g),
        grad_p_energy(gr, 2.0), weighted_power(gr, 2.5, 1.0)};

    int idx = 0;
    for (const auto& f : handles) {
        CAPTURE(f.name);
        const GridPtr& grid = (idx < 6) ? g : gr;
        Field u = random_field(grid, 100 + static_cast<unsigned>(idx));
        double fu = f.evaluate(u);
        for (double s : {0.5, 2.0, 10.0}) {
            double lhs = f.evaluate(scaled(u, s));
            double rhs = std::pow(s, f.degree) * fu;
            CHECK(std::abs(lhs - rhs) <= 1e-12 * std::abs(rhs));
        }
        double dir = f.directional(u, u);
        CHECK(std::abs(dir - f.degree * fu) <= 1e-10 * std::abs(f.degree * fu));
        CHECK(f.evaluate(scaled(u, -1.0)) == doctest::Approx(fu).epsilon(1e-12));
        ++idx;
    }
}

TEST_CASE("gradient representers match central finite differences") {
    auto g = build_interval_grid(1.0, 48);
    std::vector<FunctionalHandle> handles = {grad_p_energy(g, 2.0), grad_p_energy(g, 3.0),
                                             weighted_power(g, 4.0, 1.0),
                                             grad_p_squared_energy(g)};
    for (const auto& f : handles) {
        CAPTURE(f.name);
        Field u = random_field(g, 21);
        Field v = random_field(g, 22);
        double exact = inner_h(f.gradient(u), v);
        double dir = f.directional(u, v);
        CHECK(exact == doctest::Approx(dir).epsilon(1e-12));
        double fd = central_fd(f, u, v, 1e-4);
        CHECK(std::abs(exact - fd) <= 1e-5 * std::max(1.0, std::abs(fd)));
    }
}

TEST_CASE("weighted_power honors a nodal weight field") {
    auto g = build_interval_grid(1.0, 99);
    Field w(g);
    for (int i = 0; i < w.size(); ++i) w[i] = g->axis_x[static_cast<size_t>(i)];
    auto f = weighted_power(g, 3.0, w);
    Field u = constant_field(g, 2.0);
    // exact nodal sum: 8 h sum x_i = 8 h^2 n(n+1)/2
    double expect = 8.0 * g->hx * g->hx * 99.0 * 100.0 / 2.0;
    CHECK(f.evaluate(u) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("handle combinators preserve structure") {
    auto g = build_interval_grid(1.0, 32);
    auto n2 = grad_p_energy(g, 2.0);
    auto mass = weighted_power(g, 2.0, 1.0);
    auto s = sum_handle(n2, scale_handle(mass, 2.5), "n2+2.5mass");
    Field u = random_field(g, 5);
    CHECK(s.evaluate(u) ==
          doctest::Approx(n2.evaluate(u) + 2.5 * mass.evaluate(u)).epsilon(1e-14));
    CHECK(s.degree == 2.0);
    CHECK_THROWS_AS(sum_handle(n2, weighted_power(g, 3.0, 1.0)), BadParams);
    CHECK_THROWS_AS(grad_p_energy(g, 0.5), BadParams);
    CHECK_THROWS_AS(weighted_power(g, 1.0, 1.0), BadParams);
}
