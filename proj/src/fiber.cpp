#include "fibrate/fiber.hpp"

#include "fibrate/errors.hpp"
#include "fibrate/power_classes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fibrate {

std::string to_string(NehariClass c) { return c == NehariClass::n_minus ? "N-" : "N+"; }

double ModelSpec::param(const std::string& key, double fallback) const {
    for (const auto& [k, v] : extra_params)
        if (k == key) return v;
    return fallback;
}

ModelSpec ModelSpec::power_class(ClassTag tag, FunctionalHandle N, FunctionalHandle A,
                                 FunctionalHandle B, double eta, double alpha, double beta) {
    if (tag == ClassTag::class_one) {
        if (!(1.0 < alpha && alpha < eta && eta < beta))
            throw BadDegrees("class one needs 1 < alpha < eta < beta");
    } else if (tag == ClassTag::class_two) {
        if (!(1.0 < eta && eta < beta && beta < alpha))
            throw BadDegrees("class two needs 1 < eta < beta < alpha");
    } else {
        throw BadParams("power_class: tag must be class_one or class_two");
    }
    if (N.degree != eta || A.degree != alpha || B.degree != beta)
        throw BadDegrees("component homogeneity degrees do not match (eta, alpha, beta)");

    ModelSpec m;
    m.class_tag = tag;
    m.sign_a = (tag == ClassTag::class_one) ? SignA::minus : SignA::plus;
    m.N = N;
    m.A = A;
    m.B = B;
    m.eta = eta;
    m.alpha = alpha;
    m.beta = beta;
    m.phi_terms = {{1.0 / eta, N}, {-1.0 / beta, B}};
    double i2c = (m.sign_a == SignA::minus) ? 1.0 / alpha : -1.0 / alpha;
    m.i2 = {i2c, A};
    return m;
}

// ── Fiber expansion ───────────────────────────────────────────────────────

double FiberExpansion::psi(double t) const {
    double s = 0.0;
    for (size_t i = 0; i < exponents.size(); ++i) s += coeffs[i] * std::pow(t, exponents[i]);
    return s;
}

double FiberExpansion::dpsi(double t) const {
    double s = 0.0;
    for (size_t i = 0; i < exponents.size(); ++i) {
        double p = exponents[i];
        if (p != 0.0) s += coeffs[i] * p * std::pow(t, p - 1.0);
    }
    return s;
}

double FiberExpansion::d2psi(double t) const {
    double s = 0.0;
    for (size_t i = 0; i < exponents.size(); ++i) {
        double p = exponents[i];
        if (p != 0.0 && p != 1.0) s += coeffs[i] * p * (p - 1.0) * std::pow(t, p - 2.0);
    }
    return s;
}

double FiberExpansion::dpsi_scale(double t) const {
    double s = 0.0;
    for (size_t i = 0; i < exponents.size(); ++i) {
        double p = exponents[i];
        if (p != 0.0) s += std::abs(coeffs[i] * p * std::pow(t, p - 1.0));
    }
    return s;
}

double FiberExpansion::d2psi_scale(double t) const {
    double s = 0.0;
    for (size_t i = 0; i < exponents.size(); ++i) {
        double p = exponents[i];
        if (p != 0.0 && p != 1.0) s += std::abs(coeffs[i] * p * (p - 1.0) * std::pow(t, p - 2.0));
    }
    return s;
}

FiberExpansion fiber_expansion(const ModelSpec& model, const Field& u) {
    double i2v = model.i2.coeff * model.i2.F.evaluate(u);
    if (!std::isfinite(i2v) || std::abs(i2v) < 1e3 * std::numeric_limits<double>::min())
        throw ZeroDenominator("I2(u) vanishes; the Rayleigh quotient is undefined");

    FiberExpansion e;
    e.i2_value = i2v;
    e.exponents.reserve(model.phi_terms.size());
    e.coeffs.reserve(model.phi_terms.size());
    for (const PhiTerm& term : model.phi_terms) {
        e.exponents.push_back(term.F.degree - model.i2.F.degree);
        e.coeffs.push_back(term.coeff * term.F.evaluate(u) / i2v);
    }
    return e;
}

double mu0(const ModelSpec& model, const Field& u) {
    double i2v = model.i2.coeff * model.i2.F.evaluate(u);
    if (!std::isfinite(i2v) || std::abs(i2v) < 1e3 * std::numeric_limits<double>::min())
        throw ZeroDenominator("I2(u) vanishes; the Rayleigh quotient is undefined");
    double i1v = 0.0;
    for (const PhiTerm& term : model.phi_terms) i1v += term.coeff * term.F.evaluate(u);
    return i1v / i2v;
}

FiberPoint fiber_eval(const ModelSpec& model, const Field& u, double t) {
    if (!(t > 0.0)) throw BadParams("fiber_eval: t must be positive");
    FiberExpansion e = fiber_expansion(model, u);
    return {e.psi(t), e.dpsi(t), e.d2psi(t)};
}

// ── t0 solve ──────────────────────────────────────────────────────────────

namespace {

constexpr double kT0Lo = 1e-6;
constexpr double kT0Hi = 1e6;
constexpr int kScanPoints = 200;
constexpr double kDegenerateTol = 1e-12;

FiberDiagnostics diagnostics_at(const FiberExpansion& e, double t0) {
    double psi2 = e.d2psi(t0);
    double scale2 = e.d2psi_scale(t0);
    if (std::abs(psi2) <= kDegenerateTol * scale2)
        throw DegenerateFiber("psi''(t0) numerically zero at t0 = " + std::to_string(t0));
    FiberDiagnostics d;
    d.t0 = t0;
    d.psi_second = psi2;
    d.critical_type = (psi2 < 0.0) ? FiberType::maximum : FiberType::minimum;
    d.lambda = e.psi(t0);
    d.in_d = true;
    return d;
}

FiberDiagnostics not_in_d() {
    FiberDiagnostics d;
    d.in_d = false;
    return d;
}

} // namespace

FiberDiagnostics solve_t0_scan(const ModelSpec& model, const Field& u) {
    FiberExpansion e = fiber_expansion(model, u);

    // Geometric pre-scan for a sign change of psi'.
    const double log_lo = std::log(kT0Lo), log_hi = std::log(kT0Hi);
    double sa = 0.0, sb = 0.0, fa = 0.0, fb = 0.0;
    bool bracketed = false;
    double s_prev = log_lo;
    double f_prev = e.dpsi(std::exp(s_prev));
    for (int i = 1; i < kScanPoints; ++i) {
        double s = log_lo + (log_hi - log_lo) * i / (kScanPoints - 1);
        double f = e.dpsi(std::exp(s));
        if (f_prev == 0.0) {
            return diagnostics_at(e, std::exp(s_prev));
        }
        if (f_prev * f < 0.0) {
            sa = s_prev;
            sb = s;
            fa = f_prev;
            fb = f;
            bracketed = true;
            break;
        }
        s_prev = s;
        f_prev = f;
    }
    if (!bracketed) {
        if (f_prev == 0.0) return diagnostics_at(e, std::exp(s_prev));
        return not_in_d();
    }

    // Safeguarded Newton in s = log t with bisection fallback.
    double s = 0.5 * (sa + sb);
    for (int it = 0; it < 200; ++it) {
        double t = std::exp(s);
        double f = e.dpsi(t);
        if (std::abs(f) <= kDegenerateTol * e.dpsi_scale(t)) return diagnostics_at(e, t);
        if (fa * f < 0.0) {
            sb = s;
            fb = f;
        } else {
            sa = s;
            fa = f;
        }
        double fprime_s = e.d2psi(t) * t;  // d/ds psi'(e^s)
        double s_newton = s - f / fprime_s;
        s = (std::isfinite(s_newton) && s_newton > sa && s_newton < sb) ? s_newton
                                                                        : 0.5 * (sa + sb);
        if (sb - sa <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(s)))
            return diagnostics_at(e, std::exp(0.5 * (sa + sb)));
    }
    (void)fb;
    return diagnostics_at(e, std::exp(s));
}

FiberDiagnostics solve_t0(const ModelSpec& model, const Field& u) {
    if (model.class_tag == ClassTag::class_one || model.class_tag == ClassTag::class_two) {
        if (!(model.B.evaluate(u) > 0.0)) return not_in_d();
        double t0 = t0_closed(model, u);
        FiberExpansion e = fiber_expansion(model, u);
        return diagnostics_at(e, t0);
    }
    if (model.fast_t0) {
        double t0 = 0.0;
        try {
            t0 = model.fast_t0(u);
        } catch (const NotInD&) {
            return not_in_d();
        }
        FiberExpansion e = fiber_expansion(model, u);
        return diagnostics_at(e, t0);
    }
    return solve_t0_scan(model, u);
}

// ── Lambda and its derivative ─────────────────────────────────────────────

double lambda_value(const ModelSpec& model, const Field& u) {
    FiberDiagnostics d = solve_t0(model, u);
    if (!d.in_d) throw NotInD("lambda_value: u lies outside D");
    return d.lambda;
}

double phi_mu(const ModelSpec& model, double mu, const Field& v) {
    double s = 0.0;
    for (const PhiTerm& term : model.phi_terms) s += term.coeff * term.F.evaluate(v);
    return s - mu * model.i2.coeff * model.i2.F.evaluate(v);
}

Field phi_mu_gradient(const ModelSpec& model, double mu, const Field& v) {
    Field g(v.grid);
    for (const PhiTerm& term : model.phi_terms) g = axpy(g, term.coeff, term.F.gradient(v));
    g = axpy(g, -mu * model.i2.coeff, model.i2.F.gradient(v));
    return g;
}

double lambda_grad(const ModelSpec& model, const Field& u, const Field& v) {
    FiberDiagnostics d = solve_t0(model, u);
    if (!d.in_d) throw NotInD("lambda_grad: u lies outside D");
    Field w = scaled(u, d.t0);
    double i2w = model.i2.coeff * model.i2.F.evaluate(w);
    double dir = 0.0;
    for (const PhiTerm& term : model.phi_terms) dir += term.coeff * term.F.directional(w, v);
    dir -= d.lambda * model.i2.coeff * model.i2.F.directional(w, v);
    return d.t0 * dir / i2w;
}

Field lambda_grad_vector(const ModelSpec& model, const Field& u) {
    FiberDiagnostics d = solve_t0(model, u);
    if (!d.in_d) throw NotInD("lambda_grad_vector: u lies outside D");
    Field w = scaled(u, d.t0);
    double i2w = model.i2.coeff * model.i2.F.evaluate(w);
    return scaled(phi_mu_gradient(model, d.lambda, w), d.t0 / i2w);
}

// ── Nehari classification and certification ──────────────────────────────

NehariClass nehari_class(const ModelSpec& model, double mu, const Field& v) {
    double jpp = 0.0, scale = 0.0;
    for (const PhiTerm& term : model.phi_terms) {
        double deg = term.F.degree;
        double contrib = term.coeff * deg * (deg - 1.0) * term.F.evaluate(v);
        jpp += contrib;
        scale += std::abs(contrib);
    }
    double g = model.i2.F.degree;
    double contrib = -mu * model.i2.coeff * g * (g - 1.0) * model.i2.F.evaluate(v);
    jpp += contrib;
    scale += std::abs(contrib);

    if (std::abs(jpp) <= 1e-12 * scale)
        throw DegenerateNehari("J'_mu(v)v numerically zero; Nehari class undecidable");
    return (jpp < 0.0) ? NehariClass::n_minus : NehariClass::n_plus;
}

CriticalPointRecord certify_zero_energy(const ModelSpec& model, const Field& u, double tol_energy,
                                        double tol_gradient) {
    FiberDiagnostics d = solve_t0(model, u);
    if (!d.in_d) throw NotInD("certify_zero_energy: u lies outside D");

    CriticalPointRecord rec;
    rec.mu = d.lambda;
    rec.v = scaled(u, d.t0);
    rec.energy_residual = std::abs(phi_mu(model, rec.mu, rec.v)) /
                          (1.0 + std::abs(model.N.evaluate(rec.v)));
    rec.gradient_residual =
        norm_h(phi_mu_gradient(model, rec.mu, rec.v)) / (1.0 + norm_h(rec.v));
    rec.nehari_class = nehari_class(model, rec.mu, rec.v);
    rec.iterations = 0;
    rec.converged = rec.energy_residual <= tol_energy && rec.gradient_residual <= tol_gradient;
    return rec;
}

bool membership_D(const ModelSpec& model, const Field& u) {
    if (model.class_tag == ClassTag::class_one || model.class_tag == ClassTag::class_two)
        return model.B.evaluate(u) > 0.0;
    try {
        return solve_t0_scan(model, u).in_d;
    } catch (const ZeroDenominator&) {
        return false;
    } catch (const DegenerateFiber&) {
        return false;
    }
}

} // namespace fibrate
