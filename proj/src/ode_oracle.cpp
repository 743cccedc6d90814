#include "cbond/ode_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

namespace cbond {

namespace {

// Thomas algorithm for a constant-band tridiagonal system with the
// diagonal supplied per row; overwrites rhs with the solution.
void solve_tridiagonal(double lower, double upper, const std::vector<double>& diag,
                       std::vector<double>& rhs, std::vector<double>& scratch) {
  const std::size_t n = diag.size();
  scratch.resize(n);
  scratch[0] = upper / diag[0];
  rhs[0] /= diag[0];
  for (std::size_t i = 1; i < n; ++i) {
    const double m = diag[i] - lower * scratch[i - 1];
    scratch[i] = upper / m;
    rhs[i] = (rhs[i] - lower * rhs[i - 1]) / m;
  }
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= scratch[i] * rhs[i + 1];
}

}  // namespace

GridSolution solve_penalized_ode(const ModelParams& p, int n_nodes) {
  return solve_penalized_ode(p, n_nodes, threshold_sbar(p) * std::exp(-6.0));
}

GridSolution solve_penalized_ode(const ModelParams& p, int n_nodes, double s_min,
                                 int max_iters) {
  const double sbar = threshold_sbar(p);
  if (n_nodes < 100) throw DomainError("solve_penalized_ode: need at least 100 nodes");
  if (!(s_min > 0.0) || !(s_min < sbar))
    throw DomainError("solve_penalized_ode: s_min must lie in (0, sbar)");

  GridSolution g;
  g.params = p;
  g.regime = classify_regime(p);
  g.s_min = s_min;

  const int n = n_nodes;
  const double z_lo = std::log(s_min), z_hi = std::log(sbar);
  const double h = (z_hi - z_lo) / double(n - 1);
  const double mu = p.r - p.q - 0.5 * p.sigma * p.sigma;
  const double u_upper = (p.c + p.lambda * p.K) / (p.r + p.lambda);
  const double lo_bc = g.regime == Regime::CaseII ? u_upper : p.c / p.r;

  g.s.resize(n);
  for (int i = 0; i < n; ++i) g.s[i] = std::exp(z_lo + h * double(i));
  g.s[n - 1] = sbar;

  const double lower = -0.5 * p.sigma * p.sigma / (h * h) + mu / (2.0 * h);
  const double upper = -0.5 * p.sigma * p.sigma / (h * h) - mu / (2.0 * h);
  const double diag0 = p.sigma * p.sigma / (h * h) + p.r;
  if (lower > 0.0 || upper > 0.0)
    throw DomainError("solve_penalized_ode: grid too coarse for the drift (|mu| h > sigma^2)");

  std::vector<double>& v = g.value;
  v.resize(n);
  for (int i = 0; i < n; ++i)
    v[i] = lo_bc + (u_upper - lo_bc) * double(i) / double(n - 1);

  std::vector<double> diag(n - 2), rhs(n - 2), scratch, vn(n);
  vn[0] = lo_bc;
  vn[n - 1] = u_upper;
  double diff = 0.0;
  bool converged = false;
  for (int it = 1; it <= max_iters; ++it) {
    g.iterations = it;
    for (int i = 1; i + 1 < n; ++i) {
      const bool lo_active = v[i] < p.gamma * g.s[i];
      const bool hi_active = v[i] > p.K;
      diag[i - 1] = diag0 + p.lambda * (double(lo_active) + double(hi_active));
      rhs[i - 1] = p.c + p.lambda * (lo_active ? p.gamma * g.s[i] : 0.0) +
                   p.lambda * (hi_active ? p.K : 0.0);
    }
    rhs[0] -= lower * lo_bc;
    rhs[n - 3] -= upper * u_upper;
    solve_tridiagonal(lower, upper, diag, rhs, scratch);
    diff = 0.0;
    for (int i = 1; i + 1 < n; ++i) {
      diff = std::max(diff, std::abs(rhs[i - 1] - v[i]));
      vn[i] = rhs[i - 1];
    }
    v = vn;
    if (diff < 1e-10) {
      converged = true;
      break;
    }
  }

  // discrete residual of the nonlinear system on the converged iterate
  double res = 0.0;
  for (int i = 1; i + 1 < n; ++i) {
    const double gen = 0.5 * p.sigma * p.sigma * (v[i + 1] - 2.0 * v[i] + v[i - 1]) / (h * h) +
                       mu * (v[i + 1] - v[i - 1]) / (2.0 * h) - p.r * v[i];
    const double pen = p.lambda * std::max(p.gamma * g.s[i] - v[i], 0.0) -
                       p.lambda * std::max(v[i] - p.K, 0.0);
    res = std::max(res, std::abs(gen + p.c + pen));
  }
  g.residual_norm = res;

  if (!converged) {
    std::ostringstream msg;
    msg << "solve_penalized_ode: policy iteration still moving after " << max_iters
        << " iterations (last sup change " << diff << ")";
    throw NoConvergenceError(msg.str(), res);
  }
  return g;
}

ErrorReport compare_to_analytic(const GridSolution& g, const AnalyticSolution& sol) {
  if (std::memcmp(&g.params, &sol.params, sizeof(ModelParams)) != 0)
    throw ParamMismatch("compare_to_analytic: grid and closed form use different parameters");

  ErrorReport rep;
  rep.n_nodes = int(g.s.size());
  const double h = std::log(g.s[1] / g.s[0]);
  double sup = 0.0, sq = 0.0;
  for (std::size_t i = 1; i + 1 < g.s.size(); ++i) {
    const double e = std::abs(g.value[i] - price_constrained(sol, g.s[i]));
    sup = std::max(sup, e);
    sq += e * e * h;
  }
  rep.sup_error = sup;
  rep.l2_error = std::sqrt(sq);
  rep.truncation_bound =
      sol.regime == Regime::CaseII
          ? 0.0
          : std::abs(sol.coeff_A) * std::exp(sol.exps.alpha_plus * std::log(g.s_min));
  return rep;
}

double estimate_convergence_order(const ModelParams& p, int n_coarse, double s_min) {
  const AnalyticSolution sol = build_constrained_solution(p);
  const ErrorReport coarse = compare_to_analytic(solve_penalized_ode(p, n_coarse, s_min), sol);
  const ErrorReport fine =
      compare_to_analytic(solve_penalized_ode(p, 2 * n_coarse, s_min), sol);
  return std::log2(coarse.sup_error / fine.sup_error);
}

}  // namespace cbond
