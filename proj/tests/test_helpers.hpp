// Shared helpers for the unit tests: mock homogeneous handles and fields.

#pragma once

#include "fibrate/functional.hpp"
#include "fibrate/grid.hpp"
#include "fibrate/model.hpp"

#include <cmath>
#include <random>

namespace fibrate::testing {

// ||u||_h^d — a smooth d-homogeneous functional equal to 1 on the unit
// sphere, handy for abstract-class fixtures with N = A = B = 1.
inline FunctionalHandle norm_power(double d) {
    FunctionalHandle h;
    h.degree = d;
    h.is_even = true;
    h.name = "norm_pow_" + std::to_string(d);
    h.evaluate = [d](const Field& u) { return std::pow(inner_h(u, u), 0.5 * d); };
    h.directional = [d](const Field& u, const Field& v) {
        return d * std::pow(inner_h(u, u), 0.5 * d - 1.0) * inner_h(u, v);
    };
    h.gradient = [d](const Field& u) {
        return scaled(u, d * std::pow(inner_h(u, u), 0.5 * d - 1.0));
    };
    return h;
}

inline Field gaussian_field(const GridPtr& g, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Field u(g);
    for (double& v : u.values) v = gauss(rng);
    return u;
}

inline Field sine_field(const GridPtr& g, int mode = 1) {
    constexpr double pi = 3.14159265358979323846;
    Field u(g);
    for (int i = 0; i < u.size(); ++i)
        u[i] = std::sin(mode * pi * g->axis_x[static_cast<size_t>(i)] / g->lx);
    return u;
}

// Abstract class-one/two model on norm-power components.
inline ModelSpec abstract_class_model(ClassTag tag, const GridPtr&, double eta, double alpha,
                                      double beta) {
    return ModelSpec::power_class(tag, norm_power(eta), norm_power(alpha), norm_power(beta), eta,
                                  alpha, beta);
}

} // namespace fibrate::testing
