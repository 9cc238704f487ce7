#include <doctest.h>

#include "fibrate/eigenpairs.hpp"
#include "fibrate/optimizer.hpp"
#include "fibrate/problems.hpp"
#include "test_helpers.hpp"

#include <cmath>

using namespace fibrate;
using namespace fibrate::testing;

namespace {

ModelSpec make_semilinear(const GridPtr& g) {
    ProblemParams pp;
    pp.kind = ProblemKind::semilinear;
    pp.q = 3.0;
    pp.r = 4.0;
    return build_problem(pp, g);
}

ModelSpec make_cc(const GridPtr& g) {
    ProblemParams pp;
    pp.kind = ProblemKind::concave_convex;
    pp.p = 2.0;
    pp.q = 1.5;
    pp.r = 3.0;
    return build_problem(pp, g);
}

ModelSpec make_kirchhoff(const GridPtr& g) {
    ProblemParams pp;
    pp.kind = ProblemKind::kirchhoff;
    pp.a = 1.0;
    pp.r = 3.0;
    return build_problem(pp, g);
}

} // namespace

TEST_CASE("optimize_lambda converges on the semilinear problem") {
    auto g = build_interval_grid(1.0, 256);
    ModelSpec m = make_semilinear(g);
    SolveOptions opts;
    Field e1 = eigenpairs(g, 1)[0].second;

    CriticalPointRecord rec = optimize_lambda(m, e1, opts);
    CHECK(rec.converged);
    CHECK(rec.energy_residual <= 1e-9);
    CHECK(rec.gradient_residual <= 1e-8);
    // mu_1 lies above the discrete C_Omega.
    double lambda1 = eigenpairs(g, 1)[0].first;
    CHECK(rec.mu >= lambda1 - 2.0 / 9.0 - 1e-8);
    // ... and below Lambda at the eigenfunction start.
    CHECK(rec.mu <= lambda_value(m, e1) + 1e-12);

    SUBCASE("restarting from the solution is a fixed point") {
        CriticalPointRecord again = optimize_lambda(m, rec.v, opts);
        CHECK(again.converged);
        CHECK(again.iterations <= 1);
        CHECK(again.mu == doctest::Approx(rec.mu).epsilon(1e-10));
    }
    SUBCASE("sign symmetry: -init reaches the same level") {
        CriticalPointRecord neg = optimize_lambda(m, scaled(e1, -1.0), opts);
        CHECK(neg.converged);
        CHECK(std::abs(neg.mu - rec.mu) <= 1e-12 * (1.0 + std::abs(rec.mu)));
        Field ua = normalized_h(rec.v);
        Field ub = normalized_h(neg.v);
        double dist = std::min(norm_h(axpy(ua, -1.0, ub)), norm_h(added(ua, ub)));
        CHECK(dist <= 1e-6);
    }
}

TEST_CASE("optimize_lambda certification round-trip at the solution") {
    auto g = build_interval_grid(1.0, 128);
    ModelSpec m = make_semilinear(g);
    SolveOptions opts;
    CriticalPointRecord rec = optimize_lambda(m, eigenpairs(g, 1)[0].second, opts);
    REQUIRE(rec.converged);
    CHECK(mu0(m, rec.v) == doctest::Approx(rec.mu).epsilon(1e-8));
    CHECK(solve_t0(m, rec.v).t0 == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(rec.nehari_class == NehariClass::n_plus);  // fiber minimum, I2 > 0
}

TEST_CASE("optimize_lambda rejects starts outside D") {
    auto g = build_interval_grid(1.0, 32);
    Field f(g);
    for (int i = 0; i < f.size(); ++i)
        f[i] = (g->axis_x[static_cast<size_t>(i)] < 0.5) ? 1.0 : -1.0;
    ProblemParams pp;
    pp.kind = ProblemKind::concave_convex;
    pp.p = 2.0;
    pp.q = 1.5;
    pp.r = 3.0;
    pp.f_field = f;
    ModelSpec m = build_problem(pp, g);
    Field outside(g);
    for (int i = 0; i < outside.size(); ++i)
        outside[i] = (g->axis_x[static_cast<size_t>(i)] > 0.5) ? 1.0 : 0.0;
    SolveOptions opts;
    CHECK_THROWS_AS(optimize_lambda(m, outside, opts), NotInD);
}

TEST_CASE("option validation") {
    auto g = build_interval_grid(1.0, 16);
    ModelSpec m = make_semilinear(g);
    SolveOptions opts;
    opts.backtrack_factor = 1.5;
    CHECK_THROWS_AS(optimize_lambda(m, gaussian_field(g, 1), opts), BadParams);
    opts = SolveOptions{};
    opts.tol_grad = -1.0;
    CHECK_THROWS_AS(optimize_lambda(m, gaussian_field(g, 1), opts), BadParams);
}

TEST_CASE("multistart returns deduplicated records sorted by mu") {
    auto g = build_interval_grid(1.0, 128);
    ModelSpec m = make_semilinear(g);
    SolveOptions opts;
    opts.seed = 17;

    auto records = multistart(m, 8, opts);
    REQUIRE(!records.empty());
    for (size_t i = 1; i < records.size(); ++i) CHECK(records[i - 1].mu <= records[i].mu);
    // Deduplication: surviving records differ in mu or in field.
    for (size_t i = 1; i < records.size(); ++i) {
        bool mu_far =
            std::abs(records[i].mu - records[i - 1].mu) > 1e-6 * (1.0 + std::abs(records[i].mu));
        if (!mu_far) {
            Field ua = normalized_h(records[i - 1].v);
            Field ub = normalized_h(records[i].v);
            CHECK(std::min(norm_h(axpy(ua, -1.0, ub)), norm_h(added(ua, ub))) > 1e-4);
        }
    }

    SUBCASE("count=1 reduces to the first-eigenfunction run") {
        auto single = multistart(m, 1, opts);
        REQUIRE(single.size() == 1);
        CriticalPointRecord direct = optimize_lambda(m, eigenpairs(g, 1)[0].second, opts);
        CHECK(single[0].mu == doctest::Approx(direct.mu).epsilon(1e-12));
    }
}

TEST_CASE("estimate_mu_n: level 1 equals the multistart extremum") {
    auto g = build_interval_grid(1.0, 96);
    ModelSpec m = make_semilinear(g);
    SolveOptions opts;
    opts.seed = 3;
    MinMaxEstimate est = estimate_mu_n(m, 1, opts);
    CHECK(est.n == 1);
    CHECK(est.basis_dim == 1);
    CHECK(est.bound == BoundSide::upper);

    auto records = multistart(m, 10, opts);
    REQUIRE(!records.empty());
    double best = 1e300;
    for (const auto& r : records)
        if (r.converged) best = std::min(best, r.mu);
    CHECK(est.value == doctest::Approx(best).epsilon(1e-12));

    CHECK_THROWS_AS(estimate_mu_n(m, 0, opts), BadLevel);
    CHECK_THROWS_AS(estimate_mu_n(m, 7, opts), BadLevel);
}

TEST_CASE("mu_sequence: class-one estimates nondecreasing, upper bounds") {
    auto g = build_interval_grid(1.0, 96);
    ModelSpec m = make_cc(g);
    SolveOptions opts;
    opts.seed = 5;
    auto seq = mu_sequence(m, 3, opts);
    REQUIRE(seq.size() == 3);
    for (size_t i = 0; i < seq.size(); ++i) {
        CHECK(seq[i].first.bound == BoundSide::upper);
        CHECK(seq[i].first.n == static_cast<int>(i) + 1);
        if (i > 0) CHECK(seq[i].first.value >= seq[i - 1].first.value - 1e-12);
    }
    for (const auto& [est, rec] : seq) {
        if (!rec) continue;
        CHECK(rec->converged);
        CHECK(rec->nehari_class == NehariClass::n_minus);
    }
}

TEST_CASE("mu_sequence: Kirchhoff estimates strictly decreasing lower bounds") {
    auto g = build_interval_grid(1.0, 96);
    ModelSpec m = make_kirchhoff(g);
    SolveOptions opts;
    opts.seed = 7;
    auto seq = mu_sequence(m, 3, opts);
    REQUIRE(seq.size() == 3);
    for (size_t i = 0; i < seq.size(); ++i) {
        CHECK(seq[i].first.bound == BoundSide::lower);
        if (i > 0) CHECK(seq[i].first.value < seq[i - 1].first.value);
    }
    for (const auto& [est, rec] : seq) {
        if (!rec) continue;
        CHECK(rec->converged);
        CHECK(rec->nehari_class == NehariClass::n_plus);
    }
    CHECK_THROWS_AS(mu_sequence(m, 7, opts), BadLevel);
}

TEST_CASE("class-one nonexistence direction: no record below the mu_1 estimate") {
    auto g = build_interval_grid(1.0, 96);
    ModelSpec m = make_cc(g);
    SolveOptions opts;
    opts.seed = 11;
    MinMaxEstimate mu1 = estimate_mu_n(m, 1, opts);
    auto records = multistart(m, 12, opts);
    for (const auto& r : records)
        if (r.converged) CHECK(r.mu >= mu1.value - 1e-6 * (1.0 + std::abs(mu1.value)));
}
