// fiber.hpp — the fibering-map engine.
//
// For Phi_mu = I1 - mu*I2 with I2(u) != 0 off zero, the generalized Rayleigh
// quotient mu0(u) = I1(u)/I2(u) is the unique parameter with
// Phi_{mu0(u)}(u) = 0. Restricting along rays gives the fiber map
// psi_u(t) = mu0(t u), whose unique critical point t0(u) > 0 (on the set D
// where it exists) defines
//
//   Lambda(u) = psi_u(t0(u)) = mu0(t0(u) u),
//
// an even, 0-homogeneous functional whose critical points u yield
// zero-energy critical points (mu, v) = (Lambda(u), t0(u) u) of Phi_mu, and
// conversely. Its derivative is
//
//   Lambda'(u)v = Phi'_{Lambda(u)}(t0(u)u)(t0(u)v) / I2(t0(u)u),
//
// so Lambda'(u)u = 0 for every u in D.
//
// Because every component is homogeneous, psi_u expands exactly as a finite
// power sum  psi_u(t) = sum_i a_i(u) t^{p_i}; all t-derivatives come from
// that expansion, never from numerical differencing.
//
// The fiber critical point may be a maximum or a minimum; the engine records
// which (FiberType) instead of assuming one sign.

#pragma once

#include "fibrate/model.hpp"

namespace fibrate {

// Exact power expansion of psi_u; coefficients are component values at u.
struct FiberExpansion {
    std::vector<double> exponents;  // p_i = deg(F_i) - deg(G)
    std::vector<double> coeffs;     // a_i = c_i F_i(u) / I2(u)
    double i2_value = 0.0;

    double psi(double t) const;
    double dpsi(double t) const;
    double d2psi(double t) const;
    // Sum of |term| magnitudes, used for scale-aware zero tests.
    double dpsi_scale(double t) const;
    double d2psi_scale(double t) const;
};

struct FiberPoint {
    double psi, psi_prime, psi_second;
};

FiberExpansion fiber_expansion(const ModelSpec& model, const Field& u);

// mu0(u) = I1(u)/I2(u); Phi_{mu0(u)}(u) = 0 to roundoff.
double mu0(const ModelSpec& model, const Field& u);

// psi_u(t) and its first two t-derivatives.
FiberPoint fiber_eval(const ModelSpec& model, const Field& u, double t);

// Generic bracketed safeguarded Newton in log t over [1e-6, 1e6].
FiberDiagnostics solve_t0_scan(const ModelSpec& model, const Field& u);

// Dispatch: class closed forms / custom fast path / generic scan.
FiberDiagnostics solve_t0(const ModelSpec& model, const Field& u);

// Lambda(u) = psi_u(t0(u)).
double lambda_value(const ModelSpec& model, const Field& u);

// Lambda'(u)v per the identity above, and its gradient representer.
double lambda_grad(const ModelSpec& model, const Field& u, const Field& v);
Field lambda_grad_vector(const ModelSpec& model, const Field& u);

// Sign of J'_mu(v)v assembled from the second-degree Euler identities
// J'_mu(v)v = sum_i d_i (d_i - 1) * term_i(v) of the homogeneous components.
NehariClass nehari_class(const ModelSpec& model, double mu, const Field& v);

// Builds the zero-energy record at (Lambda(u), t0(u)u) with normalized
// residuals; converged iff both residuals meet the tolerances.
CriticalPointRecord certify_zero_energy(const ModelSpec& model, const Field& u, double tol_energy,
                                        double tol_gradient);

// Class models: B(u) > 0. Custom models: the geometric pre-scan of psi'
// finds a sign change.
bool membership_D(const ModelSpec& model, const Field& u);

// Energy and assembled gradient representer of Phi_mu at v.
double phi_mu(const ModelSpec& model, double mu, const Field& v);
Field phi_mu_gradient(const ModelSpec& model, double mu, const Field& v);

} // namespace fibrate
