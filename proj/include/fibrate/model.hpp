// model.hpp — parameter-dependent variational models Phi_mu = I1 - mu*I2.
//
// A ModelSpec assembles the energy from homogeneous components. For the two
// power classes
//
//   class one:  Phi_mu = N/eta - (mu/alpha) A - B/beta,  1 < alpha < eta < beta
//   class two:  Phi_mu = N/eta + (mu/alpha) A - B/beta,  1 < eta < beta < alpha
//
// so I1 = N/eta - B/beta and I2 = +A/alpha (class one) or -A/alpha (class
// two). Custom models list their I1 terms and I2 directly and may install a
// closed-form t0 fast path.
//
// All evaluation state is immutable after construction; models are safe to
// share across threads.

#pragma once

#include "fibrate/functional.hpp"
#include "fibrate/grid.hpp"

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fibrate {

enum class ClassTag { class_one, class_two, custom };
enum class SignA { minus, plus };
enum class NehariClass { n_minus, n_plus };
enum class FiberType { maximum, minimum };

std::string to_string(NehariClass c);

struct PhiTerm {
    double coeff;
    FunctionalHandle F;
};

struct ModelSpec {
    ClassTag class_tag = ClassTag::custom;
    SignA sign_a = SignA::minus;
    GridPtr grid;               // discretization the components live on
    FunctionalHandle N, A, B;   // class components; custom models keep N as
                                // the coercive lead term and A as I2's base
    double eta = 0.0, alpha = 0.0, beta = 0.0;

    std::vector<PhiTerm> phi_terms;  // I1 = sum coeff_i * F_i
    PhiTerm i2;                      // I2 = coeff * G

    // Optional closed-form t0 (installed for the custom fast paths).
    std::function<double(const Field&)> fast_t0;

    std::string name;
    std::vector<std::string> notes;                         // output metadata
    std::vector<std::pair<std::string, double>> extra_params;  // e.g. q, r

    double param(const std::string& key, double fallback = 0.0) const;

    static ModelSpec power_class(ClassTag tag, FunctionalHandle N, FunctionalHandle A,
                                 FunctionalHandle B, double eta, double alpha, double beta);
};

struct FiberDiagnostics {
    double t0 = 0.0;
    double psi_second = 0.0;        // psi_u''(t0)
    FiberType critical_type = FiberType::maximum;
    double lambda = 0.0;            // Lambda(u) = psi_u(t0)
    bool in_d = false;
};

struct CriticalPointRecord {
    double mu = 0.0;
    Field v;                        // t0(u) * u
    double energy_residual = 0.0;   // |Phi_mu(v)| / (1 + |N(v)|)
    double gradient_residual = 0.0; // ||grad Phi_mu(v)||_h / (1 + ||v||_h)
    NehariClass nehari_class = NehariClass::n_minus;
    int iterations = 0;
    bool converged = false;
};

} // namespace fibrate
