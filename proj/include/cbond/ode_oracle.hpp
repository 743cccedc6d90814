#pragma once

#include <vector>

#include "cbond/analytic.hpp"
#include "cbond/model.hpp"

namespace cbond {

/// Finite-difference solution of the penalized ODE
///   -L0 v = c + lambda (gamma s - v)^+ - lambda (v - K)^+
/// on a uniform grid in z = ln s over [ln s_min, ln sbar], with Dirichlet
/// ends v(s_min) = c/r (Cases I/III) or U (Case II) and v(sbar) = U.
/// Serves as the independent numerical ground truth for the closed forms.
struct GridSolution {
  ModelParams params;
  Regime regime = Regime::CaseI;
  std::vector<double> s;
  std::vector<double> value;
  int iterations = 0;
  double residual_norm = 0.0;  // sup-norm of the discrete nonlinear residual
  double s_min = 0.0;
};

/// Policy iteration: freeze the active sets {v < gamma s} and {v > K},
/// solve the resulting linear tridiagonal system (Thomas algorithm),
/// repeat until consecutive iterates differ by < 1e-10 in sup norm.
/// Plain fixed-point iteration would not contract for large lambda; the
/// frozen-set solve keeps lambda on the diagonal instead.
/// Throws NoConvergenceError after max_iters, DomainError on a bad grid.
GridSolution solve_penalized_ode(const ModelParams& p, int n_nodes, double s_min,
                                 int max_iters = 200);

/// s_min defaults to sbar * exp(-6).
GridSolution solve_penalized_ode(const ModelParams& p, int n_nodes = 2000);

struct ErrorReport {
  double sup_error = 0.0;
  double l2_error = 0.0;
  // contribution neglected by pinning v(s_min) to c/r: coeff_A * s_min^alpha
  double truncation_bound = 0.0;
  int n_nodes = 0;
};

/// Nodewise errors against the closed form on interior nodes.
/// Throws ParamMismatch if the two results were built from different params.
ErrorReport compare_to_analytic(const GridSolution& g, const AnalyticSolution& sol);

/// log2(err(n) / err(2n)) — about 2 for the central-difference stencil.
double estimate_convergence_order(const ModelParams& p, int n_coarse, double s_min);

}  // namespace cbond
