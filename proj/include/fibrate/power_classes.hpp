// power_classes.hpp — closed forms for the two power-law classes.
//
// Writing kappa for the ratio inside t0^{beta-eta},
//
//   class one:  kappa = (beta/eta)(eta-alpha)/(beta-alpha)
//               t0(u) = (kappa N(u)/B(u))^{1/(beta-eta)}
//               Lambda(u) = C * N^{(beta-alpha)/(beta-eta)} / (A * B^{(eta-alpha)/(beta-eta)})
//   class two:  kappa = (beta/eta)(alpha-eta)/(alpha-beta)
//               t0(u) = (kappa N(u)/B(u))^{1/(beta-eta)}
//               Lambda(u) = C * B^{(alpha-eta)/(beta-eta)} * N^{(beta-alpha)/(beta-eta)} / A
//
// valid on B+ = {B(u) > 0}. The leading constant is not transcribed from a
// printed formula: it is pinned by the identity Lambda = psi(t0) evaluated
// on normalized data N = A = B = 1, which the scaling argument makes exact.
// (For class one that calibration selects the exponent (eta-alpha)/(beta-eta)
// on kappa.)
//
// The directional derivative uses
//   Lambda'(u)v = C Q(u) [ e1 A B N'(u)v - N B A'(u)v - e2 N A B'(u)v ]   (class one)
//   Lambda'(u)v = C Q(u) [ e1 A N B'(u)v - N B A'(u)v - e2 B A N'(u)v ]   (class two)
// with Q(u) = N^{(eta-alpha)/(beta-eta)} B^{(alpha-beta)/(beta-eta)} / A^2
// and (e1, e2) the exponent pair below.

#pragma once

#include "fibrate/model.hpp"

namespace fibrate {

struct ClassConstants {
    double kappa = 0.0;      // ratio inside t0^{beta-eta}
    double constant = 0.0;   // C_{alpha,beta,eta} resp. D_{alpha,beta,eta}
    double exponent_1 = 0.0; // class one: (beta-alpha)/(beta-eta) on N
                             // class two: (alpha-eta)/(beta-eta) on B
    double exponent_2 = 0.0; // class one: (eta-alpha)/(beta-eta) on B
                             // class two: (alpha-beta)/(beta-eta) on N
    double t0_unit = 0.0;    // t0 on normalized data, kappa^{1/(beta-eta)}
};

// Constants for a class; throws BadDegrees when the ordering is violated.
ClassConstants class_constants(ClassTag tag, double alpha, double beta, double eta);

// Fiber map of the normalized data N = A = B = 1 (calibration oracle).
double unit_psi(ClassTag tag, double alpha, double beta, double eta, double t);

double t0_closed(const ModelSpec& model, const Field& u);
double lambda_closed(const ModelSpec& model, const Field& u);
double lambda_grad_closed(const ModelSpec& model, const Field& u, const Field& v);

} // namespace fibrate
