#include "fibrate/power_classes.hpp"

#include "fibrate/errors.hpp"

#include <cmath>

namespace fibrate {

namespace {

void require_class(const ModelSpec& model) {
    if (model.class_tag != ClassTag::class_one && model.class_tag != ClassTag::class_two)
        throw BadParams("closed forms require a class-one or class-two model");
}

} // namespace

double unit_psi(ClassTag tag, double alpha, double beta, double eta, double t) {
    if (tag == ClassTag::class_one)
        return (alpha / eta) * std::pow(t, eta - alpha) - (alpha / beta) * std::pow(t, beta - alpha);
    return (alpha / beta) * std::pow(t, beta - alpha) - (alpha / eta) * std::pow(t, eta - alpha);
}

ClassConstants class_constants(ClassTag tag, double alpha, double beta, double eta) {
    ClassConstants c;
    if (tag == ClassTag::class_one) {
        if (!(1.0 < alpha && alpha < eta && eta < beta))
            throw BadDegrees("class one needs 1 < alpha < eta < beta");
        c.kappa = (beta / eta) * (eta - alpha) / (beta - alpha);
        c.exponent_1 = (beta - alpha) / (beta - eta);
        c.exponent_2 = (eta - alpha) / (beta - eta);
    } else if (tag == ClassTag::class_two) {
        if (!(1.0 < eta && eta < beta && beta < alpha))
            throw BadDegrees("class two needs 1 < eta < beta < alpha");
        c.kappa = (beta / eta) * (alpha - eta) / (alpha - beta);
        c.exponent_1 = (alpha - eta) / (beta - eta);
        c.exponent_2 = (alpha - beta) / (beta - eta);
    } else {
        throw BadParams("class_constants: tag must be class_one or class_two");
    }
    c.t0_unit = std::pow(c.kappa, 1.0 / (beta - eta));
    // The constant is pinned by Lambda = psi(t0) on normalized data, not
    // transcribed; on N = A = B = 1 the scaling argument makes this exact.
    c.constant = unit_psi(tag, alpha, beta, eta, c.t0_unit);
    return c;
}

double t0_closed(const ModelSpec& model, const Field& u) {
    require_class(model);
    double n = model.N.evaluate(u);
    double b = model.B.evaluate(u);
    if (!(b > 0.0)) throw NotInD("t0_closed: B(u) <= 0");
    if (!(n > 0.0)) throw NotInD("t0_closed: N(u) <= 0 violates coercivity");
    ClassConstants c = class_constants(model.class_tag, model.alpha, model.beta, model.eta);
    return std::pow(c.kappa * n / b, 1.0 / (model.beta - model.eta));
}

double lambda_closed(const ModelSpec& model, const Field& u) {
    require_class(model);
    double n = model.N.evaluate(u);
    double a = model.A.evaluate(u);
    double b = model.B.evaluate(u);
    if (!(b > 0.0)) throw NotInD("lambda_closed: B(u) <= 0");
    if (a == 0.0) throw ZeroDenominator("lambda_closed: A(u) = 0");
    ClassConstants c = class_constants(model.class_tag, model.alpha, model.beta, model.eta);
    if (model.class_tag == ClassTag::class_one)
        return c.constant * std::pow(n, c.exponent_1) / (a * std::pow(b, c.exponent_2));
    return c.constant * std::pow(b, c.exponent_1) * std::pow(n, -c.exponent_2) / a;
}

double lambda_grad_closed(const ModelSpec& model, const Field& u, const Field& v) {
    require_class(model);
    double n = model.N.evaluate(u);
    double a = model.A.evaluate(u);
    double b = model.B.evaluate(u);
    if (!(b > 0.0)) throw NotInD("lambda_grad_closed: B(u) <= 0");
    if (a == 0.0) throw ZeroDenominator("lambda_grad_closed: A(u) = 0");
    double nv = model.N.directional(u, v);
    double av = model.A.directional(u, v);
    double bv = model.B.directional(u, v);
    ClassConstants c = class_constants(model.class_tag, model.alpha, model.beta, model.eta);

    // Q(u) = N^{(eta-alpha)/(beta-eta)} B^{(alpha-beta)/(beta-eta)} / A^2.
    double q = std::pow(n, (model.eta - model.alpha) / (model.beta - model.eta)) *
               std::pow(b, (model.alpha - model.beta) / (model.beta - model.eta)) / (a * a);
    if (model.class_tag == ClassTag::class_one)
        return c.constant * q * (c.exponent_1 * a * b * nv - n * b * av - c.exponent_2 * n * a * bv);
    return c.constant * q * (c.exponent_1 * a * n * bv - n * b * av - c.exponent_2 * a * b * nv);
}

} // namespace fibrate
