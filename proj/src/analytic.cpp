#include "cbond/analytic.hpp"

#include <cmath>

#include "cbond/free_boundary.hpp"

namespace cbond {

namespace {

// exp(a)/(1 - exp(d)) for d >= 0, safe against exp(d) overflow
double exp_over_one_minus_exp(double a, double d) {
  if (d > 690.0) return -std::exp(a - d);
  return std::exp(a) / (1.0 - std::exp(d));
}

struct UpperPieceTerms {
  double plus = 0.0;   // B+ s^beta+
  double minus = 0.0;  // B- s^beta-
};

UpperPieceTerms upper_terms(const AnalyticSolution& sol, double s, int deriv) {
  const double l = std::log(s / sol.x_star);
  const double bp = sol.exps.beta_plus;
  const double bm = sol.exps.beta_minus;
  double wp = 1.0, wm = 1.0;
  if (deriv >= 1) { wp *= bp; wm *= bm; }
  if (deriv >= 2) { wp *= bp - 1.0; wm *= bm - 1.0; }
  UpperPieceTerms t;
  t.plus = sol.pasting_h * wp * exp_over_one_minus_exp(bp * l, sol.log_gap);
  const double em = std::exp(-sol.log_gap);
  t.minus = sol.pasting_h * wm * std::exp(bm * l) / (1.0 - em);
  return t;
}

}  // namespace

AnalyticSolution build_constrained_solution(const ModelParams& p) {
  const Regime regime = classify_regime(p);
  const double x_star =
      regime == Regime::CaseIII ? solve_conversion_boundary(p) : threshold_sbar(p);
  return build_constrained_solution(p, x_star);
}

AnalyticSolution build_constrained_solution(const ModelParams& p, double x_star) {
  AnalyticSolution sol;
  sol.params = p;
  sol.regime = classify_regime(p);
  sol.exps = exponents(p);
  sol.sbar = threshold_sbar(p);
  sol.u_upper = (p.c + p.lambda * p.K) / (p.r + p.lambda);
  sol.l_lower = lower_bound_coeffs(p);
  sol.x_star = sol.sbar;

  const double alpha = sol.exps.alpha_plus;
  switch (sol.regime) {
    case Regime::CaseI:
      sol.coeff_A = p.lambda / (p.r + p.lambda) * (p.r * p.K - p.c) / p.r *
                    std::exp(-alpha * std::log(sol.sbar));
      break;
    case Regime::CaseII:
      break;  // constant U
    case Regime::CaseIII: {
      if (!(x_star > 0.0) || x_star > sol.sbar * (1.0 + 1e-12))
        throw DomainError("build_constrained_solution: x_star outside (0, sbar]");
      sol.x_star = std::min(x_star, sol.sbar);
      sol.coeff_A = std::exp(-alpha * std::log(sol.x_star)) *
                    (p.gamma * sol.x_star - p.c / p.r);
      sol.pasting_h =
          p.q * p.gamma * sol.x_star / (p.q + p.lambda) - p.c / (p.r + p.lambda);
      sol.log_gap =
          (sol.exps.beta_plus - sol.exps.beta_minus) * std::log(sol.sbar / sol.x_star);
      sol.upper_piece_empty = !(sol.x_star < sol.sbar);
      if (!sol.upper_piece_empty) {
        const double lxs = std::log(sol.x_star);
        sol.coeff_B_plus = exp_over_one_minus_exp(-sol.exps.beta_plus * lxs, sol.log_gap) *
                           sol.pasting_h;
        sol.coeff_B_minus = sol.pasting_h * std::exp(-sol.exps.beta_minus * lxs) /
                            (1.0 - std::exp(-sol.log_gap));
      }
      break;
    }
  }
  return sol;
}

double price_constrained(const AnalyticSolution& sol, double s) {
  if (!(s > 0.0)) throw DomainError("price_constrained: s must be > 0");
  const ModelParams& p = sol.params;
  const double lower = sol.l_lower.intercept + sol.l_lower.slope * s;
  if (s >= sol.sbar) return lower;
  switch (sol.regime) {
    case Regime::CaseII:
      return sol.u_upper;
    case Regime::CaseI:
      return sol.coeff_A * std::exp(sol.exps.alpha_plus * std::log(s)) + p.c / p.r;
    case Regime::CaseIII:
      if (s < sol.x_star || sol.upper_piece_empty)
        return sol.coeff_A * std::exp(sol.exps.alpha_plus * std::log(s)) + p.c / p.r;
      {
        const UpperPieceTerms t = upper_terms(sol, s, 0);
        return t.plus + t.minus + lower;
      }
  }
  return lower;
}

double price_constrained_d1(const AnalyticSolution& sol, double s) {
  if (!(s > 0.0)) throw DomainError("price_constrained_d1: s must be > 0");
  const double alpha = sol.exps.alpha_plus;
  if (s >= sol.sbar) return sol.l_lower.slope;
  switch (sol.regime) {
    case Regime::CaseII:
      return 0.0;
    case Regime::CaseI:
      return sol.coeff_A * alpha * std::exp((alpha - 1.0) * std::log(s));
    case Regime::CaseIII:
      if (s < sol.x_star || sol.upper_piece_empty)
        return sol.coeff_A * alpha * std::exp((alpha - 1.0) * std::log(s));
      {
        const UpperPieceTerms t = upper_terms(sol, s, 1);
        return (t.plus + t.minus) / s + sol.l_lower.slope;
      }
  }
  return sol.l_lower.slope;
}

double price_constrained_d2(const AnalyticSolution& sol, double s) {
  if (!(s > 0.0)) throw DomainError("price_constrained_d2: s must be > 0");
  const double alpha = sol.exps.alpha_plus;
  if (s >= sol.sbar) return 0.0;
  switch (sol.regime) {
    case Regime::CaseII:
      return 0.0;
    case Regime::CaseI:
      return sol.coeff_A * alpha * (alpha - 1.0) * std::exp((alpha - 2.0) * std::log(s));
    case Regime::CaseIII:
      if (s < sol.x_star || sol.upper_piece_empty)
        return sol.coeff_A * alpha * (alpha - 1.0) * std::exp((alpha - 2.0) * std::log(s));
      {
        const UpperPieceTerms t = upper_terms(sol, s, 2);
        return (t.plus + t.minus) / (s * s);
      }
  }
  return 0.0;
}

double penalized_ode_residual(const AnalyticSolution& sol, double s) {
  const ModelParams& p = sol.params;
  const double v = price_constrained(sol, s);
  const double d1 = price_constrained_d1(sol, s);
  const double d2 = price_constrained_d2(sol, s);
  const double gen = 0.5 * p.sigma * p.sigma * s * s * d2 + (p.r - p.q) * s * d1 - p.r * v;
  const double pen_lo = p.lambda * std::max(p.gamma * s - v, 0.0);
  const double pen_hi = p.lambda * std::max(v - p.K, 0.0);
  return gen + p.c + pen_lo - pen_hi;
}

ClassicalSolution build_classical_solution(const ModelParams& p) {
  ClassicalSolution sol;
  sol.params = p;
  sol.regime = classify_regime(p);
  sol.sbar = threshold_sbar_limit(p);
  const double alpha = exponents(p).alpha_plus;
  switch (sol.regime) {
    case Regime::CaseI:
      sol.x3 = sol.sbar;
      sol.coeff = (p.r * p.K - p.c) / p.r * std::exp(-alpha * std::log(sol.sbar));
      break;
    case Regime::CaseII:
      sol.x3 = sol.sbar;
      sol.coeff = 0.0;
      break;
    case Regime::CaseIII: {
      const double x_unconstrained = alpha / (alpha - 1.0) * p.c / (p.gamma * p.r);
      sol.x3 = p.c <= classical_coupon_threshold(p) ? x_unconstrained : sol.sbar;
      sol.coeff = (p.gamma * sol.x3 - p.c / p.r) * std::exp(-alpha * std::log(sol.x3));
      break;
    }
  }
  return sol;
}

double price_classical(const ClassicalSolution& sol, double s) {
  if (!(s > 0.0)) throw DomainError("price_classical: s must be > 0");
  const ModelParams& p = sol.params;
  const double boundary = sol.regime == Regime::CaseIII ? sol.x3 : sol.sbar;
  if (s >= boundary) return p.gamma * s;
  if (sol.regime == Regime::CaseII) return p.K;
  const double alpha = exponents(p).alpha_plus;
  return sol.coeff * std::exp(alpha * std::log(s)) + p.c / p.r;
}

}  // namespace cbond
