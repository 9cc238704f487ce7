// problems.hpp — the five discretized elliptic model problems.
//
//   concave_convex       -Delta_p u = mu g|u|^{q-2}u + f|u|^{r-2}u
//                        class one, (eta,alpha,beta) = (p,q,r), 1<q<p<r
//   kirchhoff            -(a + mu int|grad u|^2) Delta u = f|u|^{r-2}u
//                        class two, (2,4,r), a>0, 2<r<4
//   schrodinger_poisson  -Delta u + omega u + mu phi_{a,u} u = |u|^{p-2}u
//                        class two, (2,4,p), p in (2,3), radial grid
//   pq_laplacian         -Delta_p u - Delta_q u = mu g|u|^{q-2}u + f|u|^{r-2}u
//                        custom, closed-form t0 fast path, 1<q<p<r
//   semilinear           -Delta u = mu u + |u|^{q-2}u - |u|^{r-2}u
//                        custom, closed-form t0 fast path, 2<q<r
//
// Weight functions f, g are nodal fields (or constant shorthand); g must be
// positive everywhere, f positive somewhere (max f > 0).

#pragma once

#include "fibrate/grid.hpp"
#include "fibrate/model.hpp"

#include <optional>
#include <string>

namespace fibrate {

enum class ProblemKind { concave_convex, kirchhoff, schrodinger_poisson, pq_laplacian, semilinear };

std::string to_string(ProblemKind kind);
ProblemKind problem_kind_from_string(const std::string& name);

struct ProblemParams {
    ProblemKind kind = ProblemKind::semilinear;
    double p = 2.0;   // gradient exponent (cc, pq); SP power p
    double q = 0.0;
    double r = 0.0;
    double a = 0.0;   // Kirchhoff stiffness a > 0; Bopp-Podolski a >= 0
    double omega = 1.0;
    double f_const = 1.0;
    double g_const = 1.0;
    std::optional<Field> f_field;
    std::optional<Field> g_field;
};

ModelSpec build_problem(const ProblemParams& params, const GridPtr& grid);

} // namespace fibrate
