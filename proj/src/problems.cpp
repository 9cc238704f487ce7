#include "fibrate/problems.hpp"

#include "fibrate/errors.hpp"
#include "fibrate/potential.hpp"

#include <algorithm>
#include <cmath>

namespace fibrate {

std::string to_string(ProblemKind kind) {
    switch (kind) {
        case ProblemKind::concave_convex: return "concave_convex";
        case ProblemKind::kirchhoff: return "kirchhoff";
        case ProblemKind::schrodinger_poisson: return "schrodinger_poisson";
        case ProblemKind::pq_laplacian: return "pq_laplacian";
        case ProblemKind::semilinear: return "semilinear";
    }
    return "unknown";
}

ProblemKind problem_kind_from_string(const std::string& name) {
    if (name == "concave_convex") return ProblemKind::concave_convex;
    if (name == "kirchhoff") return ProblemKind::kirchhoff;
    if (name == "schrodinger_poisson") return ProblemKind::schrodinger_poisson;
    if (name == "pq_laplacian") return ProblemKind::pq_laplacian;
    if (name == "semilinear") return ProblemKind::semilinear;
    throw BadParams("unknown problem kind '" + name + "'");
}

namespace {

Field weight_field(const std::optional<Field>& field, double constant, const GridPtr& grid,
                   const char* label) {
    if (field) {
        if (field->size() != grid->size())
            throw GridMismatch(std::string(label) + " weight field does not match the grid");
        return *field;
    }
    return constant_field(grid, constant);
}

void validate_weights(const Field& f, const Field& g) {
    double fmax = -1e300, gmin = 1e300;
    for (double v : f.values) fmax = std::max(fmax, v);
    for (double v : g.values) gmin = std::min(gmin, v);
    if (!(fmax > 0.0)) throw BadParams("weight f must be positive on some subregion");
    if (!(gmin > 0.0)) throw BadParams("weight g must be positive everywhere");
}

} // namespace

namespace {

ModelSpec build_problem_impl(const ProblemParams& params, const GridPtr& grid);

} // namespace

ModelSpec build_problem(const ProblemParams& params, const GridPtr& grid) {
    ModelSpec m = build_problem_impl(params, grid);
    m.grid = grid;
    return m;
}

namespace {

ModelSpec build_problem_impl(const ProblemParams& params, const GridPtr& grid) {
    if (!grid) throw BadParams("build_problem: null grid");
    Field f = weight_field(params.f_field, params.f_const, grid, "f");
    Field g = weight_field(params.g_field, params.g_const, grid, "g");

    switch (params.kind) {
        case ProblemKind::concave_convex: {
            if (!(1.0 < params.q && params.q < params.p && params.p < params.r))
                throw BadParams("concave_convex needs 1 < q < p < r");
            validate_weights(f, g);
            ModelSpec m = ModelSpec::power_class(
                ClassTag::class_one, grad_p_energy(grid, params.p),
                weighted_power(grid, params.q, g), weighted_power(grid, params.r, f), params.p,
                params.q, params.r);
            m.name = to_string(params.kind);
            m.extra_params = {{"p", params.p}, {"q", params.q}, {"r", params.r}};
            if (params.p < 2.0)
                m.notes.push_back(
                    "p-Laplacian assembly regularizes |grad u| by eps_reg=1e-12 under the root "
                    "for p < 2");
            return m;
        }
        case ProblemKind::kirchhoff: {
            if (!(params.a > 0.0)) throw BadParams("kirchhoff needs a > 0");
            if (!(2.0 < params.r && params.r < 4.0)) throw BadParams("kirchhoff needs 2 < r < 4");
            validate_weights(f, g);
            // Folding a into N makes Phi_mu = N/2 + (mu/4)A - B/r exactly.
            FunctionalHandle n = scale_handle(grad_p_energy(grid, 2.0), params.a, "a_grad_2");
            ModelSpec m = ModelSpec::power_class(ClassTag::class_two, n,
                                                 grad_p_squared_energy(grid),
                                                 weighted_power(grid, params.r, f), 2.0, 4.0,
                                                 params.r);
            m.name = to_string(params.kind);
            m.extra_params = {{"a", params.a}, {"r", params.r}};
            return m;
        }
        case ProblemKind::schrodinger_poisson: {
            if (grid->kind != GridKind::radial)
                throw GridMismatch("schrodinger_poisson requires a radial grid");
            if (!(params.omega > 0.0)) throw BadParams("schrodinger_poisson needs omega > 0");
            if (params.a < 0.0) throw BadParams("schrodinger_poisson needs a >= 0");
            if (!(2.0 < params.p && params.p < 3.0))
                throw BadParams("schrodinger_poisson needs p in (2,3)");
            FunctionalHandle n =
                sum_handle(grad_p_energy(grid, 2.0),
                           scale_handle(weighted_power(grid, 2.0, 1.0), params.omega), "grad_2+omega_mass");
            ModelSpec m = ModelSpec::power_class(ClassTag::class_two, n,
                                                 poisson_energy_handle(grid, params.a),
                                                 weighted_power(grid, params.p, 1.0), 2.0, 4.0,
                                                 params.p);
            m.name = to_string(params.kind);
            m.extra_params = {{"omega", params.omega}, {"a", params.a}, {"p", params.p}};
            return m;
        }
        case ProblemKind::pq_laplacian: {
            if (!(1.0 < params.q && params.q < params.p && params.p < params.r))
                throw BadParams("pq_laplacian needs 1 < q < p < r");
            validate_weights(f, g);
            FunctionalHandle grad_p = grad_p_energy(grid, params.p);
            FunctionalHandle grad_q = grad_p_energy(grid, params.q);
            FunctionalHandle a_q = weighted_power(grid, params.q, g);
            FunctionalHandle b_r = weighted_power(grid, params.r, f);

            ModelSpec m;
            m.class_tag = ClassTag::custom;
            m.N = grad_p;
            m.A = a_q;
            m.B = b_r;
            m.eta = params.p;
            m.alpha = params.q;
            m.beta = params.r;
            m.phi_terms = {{1.0 / params.p, grad_p}, {1.0 / params.q, grad_q},
                           {-1.0 / params.r, b_r}};
            m.i2 = {1.0 / params.q, a_q};
            const double p = params.p, q = params.q, r = params.r;
            m.fast_t0 = [grad_p, b_r, p, q, r](const Field& u) {
                double np = grad_p.evaluate(u);
                double br = b_r.evaluate(u);
                if (!(br > 0.0)) throw NotInD("pq_laplacian: int f|u|^r <= 0");
                return std::pow((r / p) * (p - q) / (r - q) * np / br, 1.0 / (r - p));
            };
            m.name = to_string(params.kind);
            m.extra_params = {{"p", p}, {"q", q}, {"r", r}};
            if (p < 2.0 || q < 2.0)
                m.notes.push_back(
                    "p-Laplacian assembly regularizes |grad u| by eps_reg=1e-12 under the root "
                    "for exponents below 2");
            return m;
        }
        case ProblemKind::semilinear: {
            if (!(2.0 < params.q && params.q < params.r))
                throw BadParams("semilinear needs 2 < q < r");
            FunctionalHandle grad_2 = grad_p_energy(grid, 2.0);
            FunctionalHandle mass = weighted_power(grid, 2.0, 1.0);
            FunctionalHandle pow_q = weighted_power(grid, params.q, 1.0);
            FunctionalHandle pow_r = weighted_power(grid, params.r, 1.0);

            ModelSpec m;
            m.class_tag = ClassTag::custom;
            m.N = grad_2;
            m.A = mass;
            m.B = pow_r;
            m.eta = 2.0;
            m.alpha = 2.0;
            m.beta = params.r;
            m.phi_terms = {{0.5, grad_2}, {-1.0 / params.q, pow_q}, {1.0 / params.r, pow_r}};
            m.i2 = {0.5, mass};
            const double q = params.q, r = params.r;
            m.fast_t0 = [pow_q, pow_r, q, r](const Field& u) {
                double nq = pow_q.evaluate(u);
                double nr = pow_r.evaluate(u);
                if (!(nr > 0.0)) throw NotInD("semilinear: zero field");
                return std::pow((r / q) * (q - 2.0) / (r - 2.0) * nq / nr, 1.0 / (r - q));
            };
            m.name = to_string(params.kind);
            m.extra_params = {{"q", q}, {"r", r}};
            m.notes.push_back(
                "semilinear fiber critical point is a minimum; the computed Nehari sign is N+ "
                "(J'_mu(v)v > 0), which differs from the N- label quoted for this problem");
            return m;
        }
    }
    throw BadParams("build_problem: unknown problem kind");
}

} // namespace

} // namespace fibrate
