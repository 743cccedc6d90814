#pragma once

#include <cstddef>

#include "cbond/model.hpp"

namespace cbond {

/// Raw coefficients of the Case III boundary equation
///   C1 x^(beta+-beta-+1) + C2 x^(beta+-beta-) + C3 x + C4 = 0.
/// Only for reporting; the solver works with the rescaled residual below,
/// since these coefficients contain sbar^(beta+-beta-), which grows like
/// exp(1e3) at lambda = 1e4.
struct BoundaryCoefficients {
  double C1 = 0.0;
  double C2 = 0.0;
  double C3 = 0.0;
  double C4 = 0.0;
};
BoundaryCoefficients boundary_coefficients(const ModelParams& p);

/// Rescaled residual whose root in (0, sbar] is the conversion boundary:
///   [ (x/sbar)^(beta+-beta-) - 1 ] *
///     [ (alpha - lambda/(q+lambda)) gamma x - alpha c/r
///       - beta+ (q gamma x/(q+lambda) - c/(r+lambda)) ]
///   - (beta+ - beta-) (q gamma x/(q+lambda) - c/(r+lambda))
/// The power has base <= 1 and is evaluated as exp((beta+-beta-) ln(x/sbar)),
/// which underflows harmlessly instead of overflowing.
/// Throws DomainError unless 0 < x <= sbar.
double boundary_residual(const ModelParams& p, double x);

/// Number of sign changes of the residual over a log-spaced probe grid;
/// the equation is expected to have exactly one root.
int residual_sign_changes(const ModelParams& p, std::size_t n_probes = 256);

/// Solves for the Case III conversion boundary x_star in (0, sbar].
/// Bracketing over 64 log-spaced probes in y = x/sbar, then a safeguarded
/// secant/bisection refinement to 1e-13 in y. At c = qK the root sits at
/// sbar exactly; the right endpoint is accepted when the residual there is
/// zero to scaled tolerance. Throws BracketError when no sign change is
/// found (parameter/regime inconsistency).
double solve_conversion_boundary(const ModelParams& p);

/// Smooth-pasting verification at the solved boundary.
struct PastingReport {
  double x_star = 0.0;
  double deriv_left = 0.0;
  double deriv_right = 0.0;
  double rel_mismatch = 0.0;
  double gamma = 0.0;
  bool deriv_below_gamma = false;
  bool convex_below = false;
  bool concave_above = false;
  bool dominated_above = false;  // v <= gamma s on (x_star, sbar]
  bool degenerate = false;       // x_star == sbar, upper piece empty
  bool pass = false;
};

/// Checks, on 100 sample points per side:
///   |v'(x*-) - v'(x*+)| <= 1e-8 relative, v'(x*) < gamma,
///   v'' > 0 below x*, v'' <= 0 above, and v <= gamma s on (x*, sbar].
/// Returns the report if everything passes, throws PastingViolation naming
/// the first failed inequality otherwise.
PastingReport verify_smooth_pasting(const ModelParams& p, double x_star);

/// Non-throwing variant; inspect report.pass.
PastingReport smooth_pasting_report(const ModelParams& p, double x_star);

}  // namespace cbond
