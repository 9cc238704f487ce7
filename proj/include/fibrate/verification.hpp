// verification.hpp — executable invariant suites and analytic bound checks.
//
// Every property the engine relies on is run as a sampled check with an
// explicit tolerance: component homogeneity and Euler identities, fiber
// scaling t0(su) = t0(u)/s, 0-homogeneity/evenness of Lambda, the natural
// constraint Lambda'(u)u = 0, the zero-energy identity
// Phi_{Lambda(u)}(t0(u)u) = 0 for every u in D, the Nehari sign identity
// J'_mu(v)v = I2(v) t0^2 psi''(t0), and single-sign-change fiber scans.
//
// The corrupt_* helpers build deliberately broken models so the suite's
// falsifiability is itself testable.

#pragma once

#include "fibrate/model.hpp"

#include <random>
#include <string>
#include <vector>

namespace fibrate {

struct CheckReport {
    std::string name;
    bool passed = true;
    double worst_error = 0.0;
    int sample_count = 0;
    std::vector<std::string> details;  // per-sample failures, capped
};

// Compares directional_derivative(u,v) with the central difference of
// evaluate at step h; tolerance relative 1e-5 at h = 1e-4.
CheckReport directional_fd_check(const FunctionalHandle& handle, const Field& u, const Field& v,
                                 double h);

// Runs the full invariant battery on random members of D.
std::vector<CheckReport> invariant_suite(const ModelSpec& model, int sample_count,
                                         unsigned long long seed);

struct FiberScanRow {
    double t, psi, psi_prime, psi_second;
};

// Geometric grid of m points in [t_min, t_max]; rows are exact per the
// homogeneous expansion.
std::vector<FiberScanRow> fiber_scan(const ModelSpec& model, const Field& u, double t_min,
                                     double t_max, int m);

int count_sign_changes(const std::vector<FiberScanRow>& rows);

// Semilinear: min Lambda over 1000 sphere samples >= C_Omega - 1e-8 with the
// discrete lambda_1; class one: min Lambda > 0.
CheckReport bound_check(const ModelSpec& model);

// Heuristic finite proxy for Lambda blowing up along weakly-null sequences:
// Lambda on eigenfunctions of increasing index must be nondecreasing.
// Applies to models with Lambda bounded below.
CheckReport divergence_trend_check(const ModelSpec& model, int k_max = 8);

// Negative controls: lie about a component degree / scale a gradient.
ModelSpec with_corrupted_degree(const ModelSpec& model, double delta);
ModelSpec with_corrupted_gradient(const ModelSpec& model, double factor);

Field random_gaussian_field(const GridPtr& grid, std::mt19937_64& rng);

// Rejection sampling of D-members (Gaussian node fields, capped tries).
Field random_member_of_D(const ModelSpec& model, std::mt19937_64& rng, int max_tries = 1000);

} // namespace fibrate
