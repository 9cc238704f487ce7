// optimizer.hpp — critical points of Lambda restricted to the unit sphere.
//
// Lambda is 0-homogeneous, so the quadrature unit sphere is a natural
// constraint: critical points of the restriction are critical points of
// Lambda, and each yields a zero-energy critical point (mu, t0(u)u).
//
// optimize_lambda runs projected gradient descent/ascent with Armijo
// backtracking and renormalization retraction. multistart launches it from
// Laplacian eigenfunctions, Gaussian fields, and two-eigenfunction
// combinations, deduplicating nearby solutions.
//
// estimate_mu_n bounds the Ljusternik-Schnirelman level mu_n one-sidedly:
// the surrogate F = S intersect span{b_1..b_n} with b_i quadrature-
// orthonormal is compact, symmetric, of genus n (Borsuk-Ulam), so the inner
// extremum of Lambda over F gives an upper bound when mu_n = inf sup
// (Lambda bounded below) and a lower bound when mu_n = sup inf (bounded
// above). Every estimate is labeled with its bound direction; the exact
// min-max value is never claimed.
//
// Multistart runs are independent; FIBRATE_THREADS caps the worker count.

#pragma once

#include "fibrate/fiber.hpp"
#include "fibrate/model.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fibrate {

enum class Direction { minimize, maximize };

struct SolveOptions {
    std::optional<Direction> direction;  // default: class two maximizes, else minimizes
    int max_iters = 5000;
    double tol_grad = 1e-8;       // tangential gradient quadrature norm
    double armijo_c = 1e-4;
    double backtrack_factor = 0.5;
    double initial_step = 1.0;
    unsigned long long seed = 0;
    double tol_energy = 1e-9;     // certification tolerances
    double tol_gradient = 1e-6;
};

enum class BoundSide { upper, lower };

std::string to_string(BoundSide b);

struct MinMaxEstimate {
    int n = 0;
    BoundSide bound = BoundSide::upper;
    double value = 0.0;
    int basis_dim = 0;
};

Direction model_direction(const ModelSpec& model);

// Projected gradient on the sphere; returns the certified record of the
// final iterate (converged=false when the gradient tolerance was not met).
CriticalPointRecord optimize_lambda(const ModelSpec& model, const Field& init,
                                    const SolveOptions& opts);

// Runs optimize_lambda from `count` starts, drops failed runs, deduplicates,
// sorts ascending by mu. Empty when every start fails.
std::vector<CriticalPointRecord> multistart(const ModelSpec& model, int count,
                                            const SolveOptions& opts);

// One-sided surrogate bound for mu_n, 1 <= n <= 6.
MinMaxEstimate estimate_mu_n(const ModelSpec& model, int n, const SolveOptions& opts);

// Estimates for n = 1..K with certified points reached from the inner
// extremizers; estimate monotonicity is enforced as a post-assertion.
std::vector<std::pair<MinMaxEstimate, std::optional<CriticalPointRecord>>>
mu_sequence(const ModelSpec& model, int K, const SolveOptions& opts);

} // namespace fibrate
