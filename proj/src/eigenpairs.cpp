#include "fibrate/eigenpairs.hpp"

#include "fibrate/errors.hpp"
#include "fibrate/functional.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace fibrate {

namespace {

using detail::Edge;

// Tridiagonal stiffness for interval/radial grids (node ordering is 1D).
struct Tridiag {
    std::vector<double> diag, lower;  // lower[i] couples nodes i and i+1

    static Tridiag assemble(const std::vector<Edge>& edges, int n) {
        Tridiag t;
        t.diag.assign(static_cast<size_t>(n), 0.0);
        t.lower.assign(static_cast<size_t>(n > 0 ? n - 1 : 0), 0.0);
        for (const Edge& e : edges) {
            double k = e.mass * e.inv_h * e.inv_h;
            if (e.ia >= 0) t.diag[static_cast<size_t>(e.ia)] += k;
            if (e.ib >= 0) t.diag[static_cast<size_t>(e.ib)] += k;
            if (e.ia >= 0 && e.ib >= 0)
                t.lower[static_cast<size_t>(std::min(e.ia, e.ib))] -= k;
        }
        return t;
    }

    // Thomas algorithm; the stiffness is SPD so no pivoting is needed.
    void solve(const std::vector<double>& rhs, std::vector<double>& x) const {
        size_t n = diag.size();
        std::vector<double> c(n, 0.0), d(n, 0.0);
        c[0] = (n > 1) ? lower[0] / diag[0] : 0.0;
        d[0] = rhs[0] / diag[0];
        for (size_t i = 1; i < n; ++i) {
            double m = diag[i] - lower[i - 1] * c[i - 1];
            if (i + 1 < n) c[i] = lower[i] / m;
            d[i] = (rhs[i] - lower[i - 1] * d[i - 1]) / m;
        }
        x.assign(n, 0.0);
        x[n - 1] = d[n - 1];
        for (size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
    }
};

// Jacobi-preconditioned CG for the rectangle stiffness.
void cg_solve(const std::vector<Edge>& edges, const std::vector<double>& diag,
              const std::vector<double>& rhs, std::vector<double>& x) {
    size_t n = rhs.size();
    x.assign(n, 0.0);
    std::vector<double> r = rhs, z(n), p(n), kp(n);
    double rhs_norm = 0.0;
    for (double v : rhs) rhs_norm += v * v;
    rhs_norm = std::sqrt(rhs_norm);
    if (rhs_norm == 0.0) return;

    for (size_t i = 0; i < n; ++i) z[i] = r[i] / diag[i];
    p = z;
    double rz = 0.0;
    for (size_t i = 0; i < n; ++i) rz += r[i] * z[i];

    const int max_iter = static_cast<int>(20 * n) + 200;
    for (int it = 0; it < max_iter; ++it) {
        detail::apply_stiffness(edges, p, kp);
        double pkp = 0.0;
        for (size_t i = 0; i < n; ++i) pkp += p[i] * kp[i];
        double alpha = rz / pkp;
        double rnorm = 0.0;
        for (size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * kp[i];
            rnorm += r[i] * r[i];
        }
        if (std::sqrt(rnorm) <= 1e-13 * rhs_norm) return;
        for (size_t i = 0; i < n; ++i) z[i] = r[i] / diag[i];
        double rz_new = 0.0;
        for (size_t i = 0; i < n; ++i) rz_new += r[i] * z[i];
        double beta = rz_new / rz;
        rz = rz_new;
        for (size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    throw ConvergenceFailure("CG stiffness solve did not reach tolerance");
}

} // namespace

std::vector<std::pair<double, Field>> eigenpairs(const GridPtr& grid, int k) {
    if (!grid) throw BadParams("eigenpairs: null grid");
    const int n = grid->size();
    if (k < 1 || k > n / 2) throw BadParams("eigenpairs: need 1 <= k <= size/2");

    const auto edges = detail::build_edge_scheme(*grid);
    const auto& w = grid->weights;
    const bool tri = (grid->kind != GridKind::rectangle);
    Tridiag t;
    std::vector<double> diag;
    if (tri) {
        t = Tridiag::assemble(edges, n);
    } else {
        t = Tridiag::assemble(edges, n);  // reuse the diagonal for Jacobi
        diag = t.diag;
    }

    auto dot_w = [&](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            s += w[static_cast<size_t>(i)] * a[static_cast<size_t>(i)] * b[static_cast<size_t>(i)];
        return s;
    };

    std::vector<std::vector<double>> basis;
    std::vector<double> lambdas;
    auto deflate = [&](std::vector<double>& x) {
        for (const auto& b : basis) {
            double c = dot_w(x, b);
            for (int i = 0; i < n; ++i) x[static_cast<size_t>(i)] -= c * b[static_cast<size_t>(i)];
        }
    };

    std::vector<double> rhs(static_cast<size_t>(n)), z(static_cast<size_t>(n)),
        kz(static_cast<size_t>(n));
    const double res_tol = 1e-10;
    const int max_iter = 100000;

    std::mt19937_64 rng(0xF1B7A7Eull);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);

    for (int j = 0; j < k; ++j) {
        std::vector<double> x(static_cast<size_t>(n));
        for (double& v : x) v = unif(rng);
        deflate(x);
        double nrm = std::sqrt(dot_w(x, x));
        for (double& v : x) v /= nrm;

        double lambda = 0.0;
        bool converged = false;
        for (int it = 0; it < max_iter; ++it) {
            for (int i = 0; i < n; ++i)
                rhs[static_cast<size_t>(i)] = w[static_cast<size_t>(i)] * x[static_cast<size_t>(i)];
            if (tri)
                t.solve(rhs, z);
            else
                cg_solve(edges, diag, rhs, z);
            deflate(z);
            deflate(z);  // second pass keeps the basis orthogonal to roundoff
            nrm = std::sqrt(dot_w(z, z));
            if (!(nrm > 0.0)) throw ConvergenceFailure("inverse iteration collapsed to zero");
            for (double& v : z) v /= nrm;

            detail::apply_stiffness(edges, z, kz);
            lambda = 0.0;
            for (int i = 0; i < n; ++i) lambda += z[static_cast<size_t>(i)] * kz[static_cast<size_t>(i)];
            // Residual in the quadrature-dual norm.
            double res = 0.0;
            for (int i = 0; i < n; ++i) {
                double r = kz[static_cast<size_t>(i)] -
                           lambda * w[static_cast<size_t>(i)] * z[static_cast<size_t>(i)];
                res += r * r / w[static_cast<size_t>(i)];
            }
            res = std::sqrt(res);
            x = z;
            if (res <= res_tol * std::abs(lambda)) {
                converged = true;
                break;
            }
        }
        if (!converged)
            throw ConvergenceFailure("inverse iteration stalled at eigenpair " + std::to_string(j + 1));
        basis.push_back(x);
        lambdas.push_back(lambda);
    }

    std::vector<std::pair<double, Field>> out;
    out.reserve(static_cast<size_t>(k));
    for (int j = 0; j < k; ++j) out.emplace_back(lambdas[static_cast<size_t>(j)], Field(grid, basis[static_cast<size_t>(j)]));
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
}

} // namespace fibrate
