#include "fibrate/verification.hpp"

#include "fibrate/eigenpairs.hpp"
#include "fibrate/errors.hpp"
#include "fibrate/fiber.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fibrate {

namespace {

constexpr size_t kMaxDetails = 10;

void record_failure(CheckReport& rep, int sample, const std::string& what, double err) {
    rep.passed = false;
    if (rep.details.size() < kMaxDetails)
        rep.details.push_back("sample " + std::to_string(sample) + ": " + what + " err=" +
                              std::to_string(err));
}

void track(CheckReport& rep, int sample, const std::string& what, double err, double tol) {
    rep.worst_error = std::max(rep.worst_error, err);
    if (!(err <= tol)) record_failure(rep, sample, what, err);
}

// Distinct handles the model evaluates: the I1 terms plus I2.
std::vector<const FunctionalHandle*> model_components(const ModelSpec& model) {
    std::vector<const FunctionalHandle*> out;
    for (const PhiTerm& t : model.phi_terms) out.push_back(&t.F);
    out.push_back(&model.i2.F);
    return out;
}

} // namespace

Field random_gaussian_field(const GridPtr& grid, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Field u(grid);
    for (double& v : u.values) v = gauss(rng);
    return u;
}

Field random_member_of_D(const ModelSpec& model, std::mt19937_64& rng, int max_tries) {
    const GridPtr& grid = model.grid;
    if (!grid) throw BadParams("random_member_of_D: model carries no grid");
    for (int tries = 0; tries < max_tries; ++tries) {
        Field u = random_gaussian_field(grid, rng);
        // D is a cone and every suite invariant is ray-invariant, so pick
        // the ray representative with N(u) = B(u). Nodal noise on fine
        // grids otherwise drives t0 outside the fixed fiber-scan window.
        if (model.N.evaluate && model.B.evaluate && model.beta > model.eta) {
            double n = model.N.evaluate(u);
            double b = model.B.evaluate(u);
            if (n > 0.0 && b > 0.0) {
                double s = std::pow(n / b, 1.0 / (model.beta - model.eta));
                if (std::isfinite(s) && s > 0.0) u = scaled(u, s);
            }
        }
        if (membership_D(model, u)) return u;
    }
    throw SamplerOutOfD("random_member_of_D: rejection sampling exhausted " +
                        std::to_string(max_tries) + " tries");
}

CheckReport directional_fd_check(const FunctionalHandle& handle, const Field& u, const Field& v,
                                 double h) {
    if (!(h > 0.0)) throw BadParams("directional_fd_check: h must be positive");
    CheckReport rep;
    rep.name = "directional-fd:" + handle.name;
    rep.sample_count = 1;
    double exact = handle.directional(u, v);
    double fd = (handle.evaluate(axpy(u, h, v)) - handle.evaluate(axpy(u, -h, v))) / (2.0 * h);
    double err = std::abs(exact - fd) / std::max(1.0, std::abs(fd));
    track(rep, 0, "directional vs central difference", err, 1e-5);
    return rep;
}

std::vector<FiberScanRow> fiber_scan(const ModelSpec& model, const Field& u, double t_min,
                                     double t_max, int m) {
    if (!(0.0 < t_min && t_min < t_max)) throw BadParams("fiber_scan: need 0 < t_min < t_max");
    if (m < 2) throw BadParams("fiber_scan: need m >= 2");
    FiberExpansion e = fiber_expansion(model, u);
    std::vector<FiberScanRow> rows;
    rows.reserve(static_cast<size_t>(m));
    const double log_lo = std::log(t_min), log_hi = std::log(t_max);
    for (int i = 0; i < m; ++i) {
        double t = std::exp(log_lo + (log_hi - log_lo) * i / (m - 1));
        rows.push_back({t, e.psi(t), e.dpsi(t), e.d2psi(t)});
    }
    return rows;
}

int count_sign_changes(const std::vector<FiberScanRow>& rows) {
    int changes = 0;
    double prev = 0.0;
    bool have_prev = false;
    for (const auto& r : rows) {
        if (r.psi_prime == 0.0) continue;
        if (have_prev && prev * r.psi_prime < 0.0) ++changes;
        prev = r.psi_prime;
        have_prev = true;
    }
    return changes;
}

std::vector<CheckReport> invariant_suite(const ModelSpec& model, int sample_count,
                                         unsigned long long seed) {
    if (sample_count < 1) throw BadParams("invariant_suite: sample_count must be >= 1");

    CheckReport homogeneity{"homogeneity"};
    CheckReport euler{"euler-identity"};
    CheckReport t0_scaling{"t0-scaling"};
    CheckReport evenness{"lambda-evenness"};
    CheckReport natural{"natural-constraint"};
    CheckReport zero_energy{"zero-energy-identity"};
    CheckReport nehari_sign{"nehari-sign-consistency"};
    CheckReport fiber_unique{"fiber-uniqueness"};

    const double scales[] = {0.5, 2.0, 10.0};
    const double tiny = 1e3 * std::numeric_limits<double>::min();
    auto components = model_components(model);

    std::mt19937_64 rng(seed);
    for (int s = 0; s < sample_count; ++s) {
        Field u = random_member_of_D(model, rng);

        // Component homogeneity F(su) = s^d F(u), relative 1e-12.
        for (const FunctionalHandle* f : components) {
            double fu = f->evaluate(u);
            for (double sc : scales) {
                double expect = std::pow(sc, f->degree) * fu;
                double err = std::abs(f->evaluate(scaled(u, sc)) - expect) /
                             std::max(std::abs(expect), tiny);
                track(homogeneity, s, f->name + " s=" + std::to_string(sc), err, 1e-12);
            }
            // Euler identity F'(u)u = d F(u), relative 1e-10.
            double expect = f->degree * fu;
            double err =
                std::abs(f->directional(u, u) - expect) / std::max(std::abs(expect), tiny);
            track(euler, s, f->name, err, 1e-10);
        }

        // Fiber scaling and 0-homogeneity/evenness of Lambda, relative 1e-10.
        FiberDiagnostics base = solve_t0(model, u);
        if (!base.in_d) continue;  // rejection sampling should prevent this
        for (double sc : scales) {
            FiberDiagnostics ds = solve_t0(model, scaled(u, sc));
            track(t0_scaling, s, "t0(su)s/t0", std::abs(ds.t0 * sc - base.t0) / base.t0, 1e-10);
            track(t0_scaling, s, "Lambda(su)",
                  std::abs(ds.lambda - base.lambda) / std::max(std::abs(base.lambda), tiny), 1e-10);
        }
        FiberDiagnostics dneg = solve_t0(model, scaled(u, -1.0));
        track(evenness, s, "t0(-u)", std::abs(dneg.t0 - base.t0) / base.t0, 1e-10);
        track(evenness, s, "Lambda(-u)",
              std::abs(dneg.lambda - base.lambda) / std::max(std::abs(base.lambda), tiny), 1e-10);

        // Natural constraint Lambda'(u)u = 0, relative to gradient scale.
        double guu = lambda_grad(model, u, u);
        double scale = norm_h(lambda_grad_vector(model, u)) * norm_h(u) + tiny;
        track(natural, s, "Lambda'(u)u", std::abs(guu) / scale, 1e-10);

        // Zero-energy identity Phi_{Lambda(u)}(t0 u) = 0, relative 1e-12.
        Field v = scaled(u, base.t0);
        double phi = 0.0, phi_scale = tiny;
        for (const PhiTerm& term : model.phi_terms) {
            double c = term.coeff * term.F.evaluate(v);
            phi += c;
            phi_scale += std::abs(c);
        }
        double i2term = base.lambda * model.i2.coeff * model.i2.F.evaluate(v);
        phi -= i2term;
        phi_scale += std::abs(i2term);
        track(zero_energy, s, "Phi_Lambda(t0 u)", std::abs(phi) / phi_scale, 1e-12);

        // Nehari sign equals sign(I2(v)) * sign(psi''(t0)); on zero-energy
        // points J'_mu(v)v = I2(v) t0^2 psi''(t0) holds exactly.
        NehariClass nc = nehari_class(model, base.lambda, v);
        double i2v = model.i2.coeff * model.i2.F.evaluate(v);
        bool expect_plus = (i2v > 0.0) == (base.psi_second > 0.0);
        bool got_plus = nc == NehariClass::n_plus;
        track(nehari_sign, s, "sign(J') vs sign(I2)sign(psi'')",
              got_plus == expect_plus ? 0.0 : 1.0, 0.5);

        // The fiber has exactly one critical point on the scan range.
        auto rows = fiber_scan(model, u, 1e-6, 1e6, 200);
        int changes = count_sign_changes(rows);
        track(fiber_unique, s, "sign changes of psi'", std::abs(changes - 1.0), 0.5);
    }

    for (CheckReport* r : {&homogeneity, &euler, &t0_scaling, &evenness, &natural, &zero_energy,
                           &nehari_sign, &fiber_unique})
        r->sample_count = sample_count;

    return {homogeneity, euler,       t0_scaling,  evenness,
            natural,     zero_energy, nehari_sign, fiber_unique};
}

CheckReport bound_check(const ModelSpec& model) {
    CheckReport rep;
    const int samples = 1000;
    rep.sample_count = samples;
    std::mt19937_64 rng(0xB0D5ull);

    if (model.name == "semilinear") {
        rep.name = "semilinear-C-Omega-bound";
        double q = model.param("q"), r = model.param("r");
        if (!(q > 2.0 && r > q)) throw BadParams("bound_check: semilinear exponents missing");
        double shift = (2.0 / q) * (r - q) / (r - 2.0) *
                       std::pow((r / q) * (q - 2.0) / (r - 2.0), (q - 2.0) / (r - q));
        double lambda1 = eigenpairs(model.grid, 1)[0].first;
        double c_omega = lambda1 - shift;
        double min_lambda = std::numeric_limits<double>::infinity();
        for (int s = 0; s < samples; ++s) {
            Field u = normalized_h(random_gaussian_field(model.grid, rng));
            min_lambda = std::min(min_lambda, lambda_value(model, u));
        }
        double violation = std::max(0.0, c_omega - min_lambda);
        rep.worst_error = violation;
        rep.passed = violation <= 1e-8;
        if (!rep.passed)
            rep.details.push_back("min Lambda = " + std::to_string(min_lambda) +
                                  " below C_Omega = " + std::to_string(c_omega));
        return rep;
    }
    if (model.class_tag == ClassTag::class_one) {
        rep.name = "class-one-positivity";
        double min_lambda = std::numeric_limits<double>::infinity();
        for (int s = 0; s < samples; ++s) {
            Field u = normalized_h(random_member_of_D(model, rng));
            min_lambda = std::min(min_lambda, lambda_value(model, u));
        }
        rep.passed = min_lambda > 0.0;
        rep.worst_error = rep.passed ? 0.0 : -min_lambda;
        if (!rep.passed)
            rep.details.push_back("min sampled Lambda = " + std::to_string(min_lambda));
        return rep;
    }
    throw BadParams("bound_check: model must be semilinear or class one");
}

CheckReport divergence_trend_check(const ModelSpec& model, int k_max) {
    if (model.class_tag == ClassTag::class_two)
        throw BadParams("divergence_trend_check applies to Lambda bounded below");
    if (k_max < 2) throw BadParams("divergence_trend_check: need k_max >= 2");
    CheckReport rep;
    rep.name = "divergence-trend-heuristic";
    rep.sample_count = k_max;
    auto pairs = eigenpairs(model.grid, std::min(k_max, model.grid->size() / 2));
    double prev = -std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < pairs.size(); ++k) {
        if (!membership_D(model, pairs[k].second)) continue;
        double lam = lambda_value(model, pairs[k].second);
        double drop = prev - lam;
        rep.worst_error = std::max(rep.worst_error, std::max(0.0, drop));
        if (drop > 1e-10 * (1.0 + std::abs(prev))) {
            rep.passed = false;
            if (rep.details.size() < kMaxDetails)
                rep.details.push_back("Lambda(b_" + std::to_string(k + 1) +
                                      ") dropped below the previous mode");
        }
        prev = lam;
    }
    return rep;
}

ModelSpec with_corrupted_degree(const ModelSpec& model, double delta) {
    ModelSpec out = model;
    if (out.phi_terms.empty()) throw BadParams("with_corrupted_degree: no terms");
    out.phi_terms.back().F.degree += delta;  // the declared degree now lies
    out.name = model.name + "+corrupt_degree";
    out.fast_t0 = nullptr;  // force the generic path onto the corrupted data
    return out;
}

ModelSpec with_corrupted_gradient(const ModelSpec& model, double factor) {
    ModelSpec out = model;
    if (out.phi_terms.empty()) throw BadParams("with_corrupted_gradient: no terms");
    FunctionalHandle& f = out.phi_terms.front().F;
    FunctionalHandle broken = f;
    FunctionalHandle original = f;
    broken.directional = [original, factor](const Field& u, const Field& v) {
        return factor * original.directional(u, v);
    };
    broken.gradient = [original, factor](const Field& u) {
        return scaled(original.gradient(u), factor);
    };
    broken.name = original.name + "_corrupt_grad";
    f = broken;
    out.name = model.name + "+corrupt_gradient";
    return out;
}

} // namespace fibrate
