#pragma once

#include "cbond/model.hpp"

namespace cbond {

/// Closed-form value of the constrained bond on (0, sbar_lambda), plus the
/// trivial region s >= sbar_lambda where the value equals the lower bound.
///
/// Case I  : v(s) = A s^alpha + c/r
/// Case II : v(s) = U (constant)
/// Case III: v(s) = A s^alpha + c/r                     on (0, x_star)
///           v(s) = B+ s^beta+ + B- s^beta- + lower(s)  on (x_star, sbar)
///
/// Powers are evaluated in log space; the Case III upper piece is evaluated
/// through the combined exponents
///   B+ s^beta+ = H exp(beta+ ln(s/x*)) / (1 - exp(D)),
///   B- s^beta- = H exp(beta- ln(s/x*)) / (1 - exp(-D)),
/// with H = q gamma x*/(q+lambda) - c/(r+lambda) and
/// D = (beta+ - beta-) ln(sbar/x*), so nothing overflows even at
/// lambda = 1e4 where beta+ - beta- exceeds 1e3. The raw coefficients
/// coeff_B_plus / coeff_B_minus are kept for reporting and may round to
/// +-0 or +-inf at extreme lambda; the pricing path never uses them.
struct AnalyticSolution {
  ModelParams params;
  Regime regime = Regime::CaseI;
  Exponents exps;
  double sbar = 0.0;
  double u_upper = 0.0;
  LowerBoundCoeffs l_lower;
  double coeff_A = 0.0;
  double coeff_B_plus = 0.0;
  double coeff_B_minus = 0.0;
  double x_star = 0.0;            // Case III boundary; == sbar sentinel otherwise
  bool upper_piece_empty = true;  // Case III degenerates to one piece at x_star == sbar
  double pasting_h = 0.0;         // H above
  double log_gap = 0.0;           // D above
};

/// Builds all piecewise coefficients. In Case III this solves the
/// free-boundary equation for x_star and propagates BracketError on failure.
AnalyticSolution build_constrained_solution(const ModelParams& p);

/// Variant that accepts an already-solved Case III boundary.
AnalyticSolution build_constrained_solution(const ModelParams& p, double x_star);

double price_constrained(const AnalyticSolution& sol, double s);
double price_constrained_d1(const AnalyticSolution& sol, double s);
double price_constrained_d2(const AnalyticSolution& sol, double s);

/// Residual of the penalized ODE at s, using the analytic derivatives:
///   L0 v + c + lambda (gamma s - v)^+ - lambda (v - K)^+
/// with L0 = (sigma^2/2) s^2 d^2/ds^2 + (r-q) s d/ds - r. Zero (to rounding)
/// on (0, sbar) for a correctly assembled solution.
double penalized_ode_residual(const AnalyticSolution& sol, double s);

/// Closed form of the classical (continuously stopped) bond.
/// Case I/III: A s^alpha + c/r below the boundary, gamma s above;
/// Case II: K below K/gamma, gamma s above.
struct ClassicalSolution {
  ModelParams params;
  Regime regime = Regime::CaseI;
  double sbar = 0.0;   // K/gamma
  double coeff = 0.0;  // power coefficient (zero in Case II)
  double x3 = 0.0;     // conversion boundary (== sbar in Cases I/II)
};

ClassicalSolution build_classical_solution(const ModelParams& p);
double price_classical(const ClassicalSolution& sol, double s);

}  // namespace cbond
