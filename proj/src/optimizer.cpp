#include "fibrate/optimizer.hpp"

#include "fibrate/eigenpairs.hpp"
#include "fibrate/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <random>
#include <thread>

namespace fibrate {

std::string to_string(BoundSide b) { return b == BoundSide::upper ? "upper" : "lower"; }

Direction model_direction(const ModelSpec& model) {
    return model.class_tag == ClassTag::class_two ? Direction::maximize : Direction::minimize;
}

namespace {

void validate_options(const SolveOptions& o) {
    if (o.max_iters < 1) throw BadParams("max_iters must be positive");
    if (!(o.tol_grad > 0.0) || !(o.tol_energy > 0.0) || !(o.tol_gradient > 0.0))
        throw BadParams("tolerances must be positive");
    if (!(o.backtrack_factor > 0.0 && o.backtrack_factor < 1.0))
        throw BadParams("backtrack_factor must lie in (0,1)");
    if (!(o.initial_step > 0.0) || !(o.armijo_c > 0.0))
        throw BadParams("step parameters must be positive");
}

const GridPtr& model_grid(const ModelSpec& model) {
    if (!model.grid) throw BadParams("this operation needs a model with an attached grid");
    return model.grid;
}

int thread_cap() {
    if (const char* env = std::getenv("FIBRATE_THREADS")) {
        int v = std::atoi(env);
        if (v >= 1) return v;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs fn(i) for i in [0, count); results are collected by index so the
// reduction order stays deterministic regardless of scheduling.
template <typename Fn>
void parallel_for(int count, Fn&& fn) {
    int workers = std::min(thread_cap(), count);
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&]() {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
        });
    for (auto& t : pool) t.join();
}

Field gaussian_field(const GridPtr& grid, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Field u(grid);
    for (double& v : u.values) v = gauss(rng);
    return u;
}

} // namespace

namespace {

// in_d=false instead of NotInD/DegenerateFiber, for line-search probing.
FiberDiagnostics probe_t0(const ModelSpec& model, const Field& u) {
    try {
        return solve_t0(model, u);
    } catch (const DegenerateFiber&) {
        return FiberDiagnostics{};
    } catch (const ZeroDenominator&) {
        return FiberDiagnostics{};
    }
}

} // namespace

CriticalPointRecord optimize_lambda(const ModelSpec& model, const Field& init,
                                    const SolveOptions& opts) {
    validate_options(opts);

    const Direction dir = opts.direction.value_or(model_direction(model));
    const double sense = (dir == Direction::minimize) ? -1.0 : 1.0;

    Field u = normalized_h(init);
    FiberDiagnostics diag = probe_t0(model, u);
    if (!diag.in_d) throw NotInD("optimize_lambda: init lies outside D");
    double lam = diag.lambda;

    auto tangential_gradient = [&](const Field& w) {
        Field g = lambda_grad_vector(model, w);
        return axpy(g, -inner_h(g, w), w);
    };

    // Near the minimizer the Armijo gain c*step*|gt|^2 drops below the
    // floating-point resolution of Lambda long before |gt| reaches tol_grad;
    // there the Barzilai-Borwein step is accepted under a no-measurable-
    // ascent guard instead, and the best-gradient iterate is retained.
    Field best_u = u;
    double best_gn = std::numeric_limits<double>::infinity();
    Field prev_u, prev_gamma;
    bool have_prev = false;

    // tol_grad is the primary stopping gate; certification is the arbiter.
    // When the Lambda-gradient scale is far from the Phi-residual scale
    // (large t0, e.g. Kirchhoff), the threshold tightens proportionally
    // until the certified residual meets tol_gradient.
    double threshold = opts.tol_grad;

    int it = 0;
    for (; it < opts.max_iters; ++it) {
        Field gt = tangential_gradient(u);
        double gn = norm_h(gt);
        if (gn < best_gn) {
            best_gn = gn;
            best_u = u;
        }
        if (gn <= threshold) {
            CriticalPointRecord rec =
                certify_zero_energy(model, u, opts.tol_energy, opts.tol_gradient);
            if (rec.converged) {
                rec.iterations = it;
                return rec;
            }
            double factor = rec.gradient_residual / std::max(gn, 1e-300);
            double target = 0.3 * opts.tol_gradient / std::max(factor, 1e-300);
            threshold = std::min(threshold * 0.1, target);
            if (threshold < 1e4 * std::numeric_limits<double>::min()) break;
        }

        // Descent gradient of the minimized objective (+Lambda or -Lambda).
        Field gamma = (dir == Direction::minimize) ? gt : scaled(gt, -1.0);
        double step = opts.initial_step;
        if (have_prev) {
            Field s = axpy(u, -1.0, prev_u);
            Field y = axpy(gamma, -1.0, prev_gamma);
            double sy = inner_h(s, y);
            double ss = inner_h(s, s);
            if (std::isfinite(sy) && sy > 0.0 && ss > 0.0)
                step = std::clamp(ss / sy, 1e-12, 1e8);
        }
        prev_u = u;
        prev_gamma = gamma;
        have_prev = true;

        const double resolution =
            32.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(lam));
        bool accepted = false;
        int d_exits = 0;
        while (step > 1e-18) {
            Field cand = normalized_h(axpy(u, sense * step, gt));
            FiberDiagnostics cd = probe_t0(model, cand);
            if (!cd.in_d) {
                step *= 0.5;
                if (++d_exits > 30)
                    throw LeftD("optimize_lambda: iterate left D and step halving failed");
                continue;
            }
            double lam_c = cd.lambda;
            double gain = opts.armijo_c * step * gn * gn;
            bool ok;
            if (gain > resolution) {
                ok = (dir == Direction::minimize) ? (lam_c <= lam - gain) : (lam_c >= lam + gain);
            } else {
                // Resolution-limited regime: no measurable ascent and no
                // gradient blowup (BB norms may wiggle, not explode).
                ok = (dir == Direction::minimize) ? (lam_c <= lam + resolution)
                                                  : (lam_c >= lam - resolution);
                if (ok) ok = norm_h(tangential_gradient(cand)) <= 10.0 * gn;
            }
            if (ok) {
                u = std::move(cand);
                lam = lam_c;
                accepted = true;
                break;
            }
            step *= opts.backtrack_factor;
        }
        if (!accepted) break;  // line search exhausted at this iterate
    }
    {
        double gn_last = norm_h(tangential_gradient(u));
        if (gn_last < best_gn) {
            best_gn = gn_last;
            best_u = u;
        }
    }

    // Converged means certified: both normalized residuals within tolerance.
    CriticalPointRecord rec =
        certify_zero_energy(model, best_u, opts.tol_energy, opts.tol_gradient);
    rec.iterations = it;
    return rec;
}

namespace {

// Duplicates: close mu and aligned unit fields within 1e-4.
bool duplicate_records(const CriticalPointRecord& a, const CriticalPointRecord& b) {
    if (std::abs(a.mu - b.mu) > 1e-6 * (1.0 + std::abs(a.mu))) return false;
    Field ua = normalized_h(a.v);
    Field ub = normalized_h(b.v);
    return std::min(norm_h(axpy(ua, -1.0, ub)), norm_h(added(ua, ub))) <= 1e-4;
}

std::vector<Field> multistart_inits(const ModelSpec& model, int count, const SolveOptions& opts) {
    const GridPtr& grid = model_grid(model);
    int k_eig = std::min({count, 10, grid->size() / 2});
    auto pairs = eigenpairs(grid, k_eig);

    std::vector<Field> inits;
    inits.reserve(static_cast<size_t>(count));
    for (const auto& [lam, vec] : pairs) {
        if (static_cast<int>(inits.size()) >= count) break;
        inits.push_back(vec);
    }

    std::mt19937_64 rng(opts.seed ^ 0x9E3779B97F4A7C15ull);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_int_distribution<int> pick(0, k_eig - 1);
    bool make_gaussian = true;
    int guard = 0;
    while (static_cast<int>(inits.size()) < count && guard++ < 100 * count) {
        Field cand(grid);
        if (make_gaussian || k_eig < 2) {
            cand = gaussian_field(grid, rng);
        } else {
            int i = pick(rng), j = pick(rng);
            while (j == i) j = pick(rng);
            cand = axpy(scaled(pairs[static_cast<size_t>(i)].second, gauss(rng)), gauss(rng),
                        pairs[static_cast<size_t>(j)].second);
        }
        make_gaussian = !make_gaussian;
        if (membership_D(model, cand)) inits.push_back(std::move(cand));
    }
    return inits;
}

} // namespace

std::vector<CriticalPointRecord> multistart(const ModelSpec& model, int count,
                                            const SolveOptions& opts) {
    validate_options(opts);
    if (count < 1) throw BadParams("multistart: count must be >= 1");

    std::vector<Field> inits = multistart_inits(model, count, opts);
    std::vector<std::optional<CriticalPointRecord>> slots(inits.size());
    parallel_for(static_cast<int>(inits.size()), [&](int i) {
        try {
            slots[static_cast<size_t>(i)] =
                optimize_lambda(model, inits[static_cast<size_t>(i)], opts);
        } catch (const NotInD&) {
        } catch (const LeftD&) {
        } catch (const ZeroDenominator&) {
        } catch (const DegenerateFiber&) {
        } catch (const DegenerateNehari&) {
        }
    });

    std::vector<CriticalPointRecord> records;
    for (auto& s : slots)
        if (s) records.push_back(std::move(*s));
    std::sort(records.begin(), records.end(),
              [](const CriticalPointRecord& a, const CriticalPointRecord& b) { return a.mu < b.mu; });

    std::vector<CriticalPointRecord> unique;
    for (auto& rec : records) {
        bool dup = false;
        for (auto& kept : unique) {
            if (duplicate_records(kept, rec)) {
                if (rec.gradient_residual < kept.gradient_residual) kept = rec;
                dup = true;
                break;
            }
        }
        if (!dup) unique.push_back(std::move(rec));
    }
    std::sort(unique.begin(), unique.end(),
              [](const CriticalPointRecord& a, const CriticalPointRecord& b) { return a.mu < b.mu; });
    return unique;
}

// ── min-max surrogates ───────────────────────────────────────────────────

namespace {

Field combine(const std::vector<Field>& basis, const std::vector<double>& c) {
    Field u = scaled(basis[0], c[0]);
    for (size_t i = 1; i < basis.size(); ++i) u = axpy(u, c[i], basis[i]);
    return u;
}

void normalize_coeffs(std::vector<double>& c) {
    double s = 0.0;
    for (double v : c) s += v * v;
    s = std::sqrt(s);
    for (double& v : c) v /= s;
}

struct SubspaceExtremum {
    double value = 0.0;
    std::vector<double> coeffs;
    bool found = false;
};

// Dense sampling of the coefficient sphere followed by projected-gradient
// refinement within the subspace. `inner` is the inner extremum direction
// (maximize for inf-sup classes, minimize for sup-inf classes).
SubspaceExtremum subspace_extremum(const ModelSpec& model, const std::vector<Field>& basis,
                                   Direction inner, const SolveOptions& opts,
                                   const std::vector<double>* warm) {
    const int n = static_cast<int>(basis.size());
    const bool maximize = inner == Direction::maximize;
    SubspaceExtremum best;

    auto consider = [&](const std::vector<double>& c) {
        Field u = combine(basis, c);
        FiberDiagnostics d = probe_t0(model, u);
        if (!d.in_d) return;
        double lam = d.lambda;
        if (!best.found || (maximize ? lam > best.value : lam < best.value)) {
            best.value = lam;
            best.coeffs = c;
            best.found = true;
        }
    };

    // Axis points first: they embed every lower-dimensional surrogate.
    for (int i = 0; i < n; ++i) {
        std::vector<double> c(static_cast<size_t>(n), 0.0);
        c[static_cast<size_t>(i)] = 1.0;
        consider(c);
    }
    if (warm && static_cast<int>(warm->size()) <= n) {
        std::vector<double> c(static_cast<size_t>(n), 0.0);
        std::copy(warm->begin(), warm->end(), c.begin());
        normalize_coeffs(c);
        consider(c);
    }

    std::mt19937_64 rng(opts.seed ^ (0xC2B2AE3D27D4EB4Full + static_cast<unsigned long long>(n)));
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int samples = 10000 * n;
    std::vector<double> c(static_cast<size_t>(n));
    for (int s = 0; s < samples; ++s) {
        for (double& v : c) v = gauss(rng);
        double nrm = 0.0;
        for (double v : c) nrm += v * v;
        if (nrm == 0.0) continue;
        nrm = std::sqrt(nrm);
        for (double& v : c) v /= nrm;
        consider(c);
    }
    if (!best.found)
        throw SamplerOutOfD("estimate_mu_n: the whole surrogate sphere misses D");

    // Projected-gradient refinement in coefficients (stays on the surrogate).
    std::vector<double> cc = best.coeffs;
    double lam = best.value;
    const double sense = maximize ? 1.0 : -1.0;
    for (int it = 0; it < 500; ++it) {
        Field u = combine(basis, cc);
        Field g = lambda_grad_vector(model, u);
        std::vector<double> gc(static_cast<size_t>(n));
        double gdotc = 0.0;
        for (int i = 0; i < n; ++i) {
            gc[static_cast<size_t>(i)] = inner_h(g, basis[static_cast<size_t>(i)]);
            gdotc += gc[static_cast<size_t>(i)] * cc[static_cast<size_t>(i)];
        }
        double gnorm2 = 0.0;
        for (int i = 0; i < n; ++i) {
            gc[static_cast<size_t>(i)] -= gdotc * cc[static_cast<size_t>(i)];
            gnorm2 += gc[static_cast<size_t>(i)] * gc[static_cast<size_t>(i)];
        }
        double gnorm = std::sqrt(gnorm2);
        // The estimate only feeds trend/monotonicity checks; refining the
        // coefficient gradient to the Lambda resolution floor is enough.
        if (gnorm <= 1e-7 * (1.0 + std::abs(lam))) break;

        double step = 1.0;
        bool accepted = false;
        while (step > 1e-16) {
            std::vector<double> cand = cc;
            for (int i = 0; i < n; ++i)
                cand[static_cast<size_t>(i)] += sense * step * gc[static_cast<size_t>(i)];
            normalize_coeffs(cand);
            Field ucand = combine(basis, cand);
            FiberDiagnostics d = probe_t0(model, ucand);
            if (d.in_d) {
                double lam_c = d.lambda;
                double gain = 1e-4 * step * gnorm2;
                if (maximize ? (lam_c >= lam + gain) : (lam_c <= lam - gain)) {
                    cc = std::move(cand);
                    lam = lam_c;
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if (!accepted) break;
    }
    best.value = lam;
    best.coeffs = cc;
    return best;
}

MinMaxEstimate make_estimate(const ModelSpec& model, int n, double value) {
    MinMaxEstimate est;
    est.n = n;
    est.basis_dim = n;
    est.value = value;
    // inf-sup (bounded below): a single surrogate yields an upper bound;
    // sup-inf (bounded above): a lower bound.
    est.bound =
        (model_direction(model) == Direction::minimize) ? BoundSide::upper : BoundSide::lower;
    return est;
}

struct LevelResult {
    MinMaxEstimate estimate;
    std::optional<CriticalPointRecord> record;
    std::vector<double> coeffs;
};

LevelResult run_level(const ModelSpec& model, int n, const SolveOptions& opts,
                      const std::vector<Field>& basis, const std::vector<double>* warm,
                      bool attach_record) {
    LevelResult out;
    const Direction h2_dir = model_direction(model);
    if (n == 1) {
        // mu_1 = inf_D Lambda (resp. sup_D Lambda): plain multistart.
        auto records = multistart(model, 10, opts);
        if (records.empty())
            throw ConvergenceFailure("estimate_mu_n: no multistart record for level 1");
        const CriticalPointRecord* best = nullptr;
        for (const auto& r : records) {
            if (!r.converged) continue;
            if (!best || (h2_dir == Direction::minimize ? r.mu < best->mu : r.mu > best->mu))
                best = &r;
        }
        // All-unconverged fallback: still report the extremal level reached.
        if (!best)
            best = (h2_dir == Direction::minimize) ? &records.front() : &records.back();
        out.estimate = make_estimate(model, 1, best->mu);
        if (attach_record && best->converged) out.record = *best;
        out.coeffs = {1.0};
        return out;
    }

    const Direction inner = (h2_dir == Direction::minimize) ? Direction::maximize
                                                            : Direction::minimize;
    std::vector<Field> sub(basis.begin(), basis.begin() + n);
    SubspaceExtremum ex = subspace_extremum(model, sub, inner, opts, warm);
    out.estimate = make_estimate(model, n, ex.value);
    out.coeffs = ex.coeffs;
    if (attach_record) {
        try {
            CriticalPointRecord rec = optimize_lambda(model, combine(sub, ex.coeffs), opts);
            if (rec.converged) out.record = rec;
        } catch (const std::runtime_error&) {
        }
    }
    return out;
}

} // namespace

MinMaxEstimate estimate_mu_n(const ModelSpec& model, int n, const SolveOptions& opts) {
    validate_options(opts);
    if (n < 1 || n > 6) throw BadLevel("estimate_mu_n: need 1 <= n <= 6");
    std::vector<Field> basis;
    if (n > 1) {
        auto pairs = eigenpairs(model_grid(model), n);
        for (auto& [lam, vec] : pairs) basis.push_back(std::move(vec));
    }
    return run_level(model, n, opts, basis, nullptr, false).estimate;
}

std::vector<std::pair<MinMaxEstimate, std::optional<CriticalPointRecord>>>
mu_sequence(const ModelSpec& model, int K, const SolveOptions& opts) {
    validate_options(opts);
    if (K < 1 || K > 6) throw BadLevel("mu_sequence: need 1 <= K <= 6");

    std::vector<Field> basis;
    if (K > 1) {
        auto pairs = eigenpairs(model_grid(model), K);
        for (auto& [lam, vec] : pairs) basis.push_back(std::move(vec));
    }

    const Direction h2_dir = model_direction(model);
    std::vector<std::pair<MinMaxEstimate, std::optional<CriticalPointRecord>>> out;
    std::vector<double> prev_coeffs;
    double prev_value = 0.0;
    for (int n = 1; n <= K; ++n) {
        LevelResult lr = run_level(model, n, opts, basis, n > 1 ? &prev_coeffs : nullptr, true);
        if (n > 1) {
            bool ok = (h2_dir == Direction::minimize)
                          ? lr.estimate.value >= prev_value - 1e-12 * (1.0 + std::abs(prev_value))
                          : lr.estimate.value <= prev_value + 1e-12 * (1.0 + std::abs(prev_value));
            if (!ok)
                throw ConvergenceFailure("mu_sequence: surrogate estimates lost monotonicity");
        }
        prev_value = lr.estimate.value;
        prev_coeffs = lr.coeffs;
        out.emplace_back(lr.estimate, lr.record);
    }
    return out;
}

} // namespace fibrate
