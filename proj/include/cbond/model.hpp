#pragma once

#include <string>

#include "cbond/errors.hpp"

namespace cbond {

/// Market and contract parameters of the perpetual convertible bond.
///
/// Rates are annualized continuous rates, sigma is annualized volatility,
/// lambda is the intensity (1/year) of the Poisson clock at which either
/// party may act, c is the coupon rate (currency/year), K the surrender
/// price and gamma the conversion rate.
struct ModelParams {
  double r = 0.0;
  double q = 0.0;
  double sigma = 0.0;
  double lambda = 0.0;
  double c = 0.0;
  double K = 0.0;
  double gamma = 0.0;
};

/// Checks every constraint and throws DomainError listing all violations:
/// r > q > 0, sigma > 0, lambda > 0, c > 0, K > 0, gamma in (0, 1].
ModelParams validate_params(const ModelParams& raw);

/// Coupon regime. The three cases partition parameter space (given r > q)
/// and determine which party has an incentive to act early.
enum class Regime { CaseI, CaseII, CaseIII };

std::string to_string(Regime regime);

/// CaseI: qK < c < rK, CaseII: c >= rK, CaseIII: c <= qK.
Regime classify_regime(const ModelParams& p);

/// Roots of the two characteristic quadratics
///   (sigma^2/2) x(x-1) + (r-q) x - r       = 0   (alpha, lambda-free)
///   (sigma^2/2) x(x-1) + (r-q) x - (r+lam) = 0   (beta, lambda-loaded)
/// with alpha_minus < 0 < 1 < alpha_plus and beta_plus > alpha_plus.
struct Exponents {
  double alpha_plus = 0.0;
  double alpha_minus = 0.0;
  double beta_plus = 0.0;
  double beta_minus = 0.0;
};

/// Roots of x^2 + (2 mu / sigma^2) x - 2 rate / sigma^2 = 0 with
/// mu = r - q - sigma^2/2. Larger-magnitude root is computed first; the
/// other follows from the product of roots -2 rate / sigma^2, which avoids
/// cancellation when the roots are large (big lambda, small sigma).
/// Returns {plus_root, minus_root}.
struct QuadraticRoots {
  double plus = 0.0;
  double minus = 0.0;
};
QuadraticRoots characteristic_roots(double r, double q, double sigma, double rate);

Exponents exponents(const ModelParams& p);

/// Threshold above which it is optimal for both parties to stop at the
/// first Poisson arrival: sbar_lambda = (q+lambda)/(r+lambda) * K/gamma.
double threshold_sbar(const ModelParams& p);

/// lambda -> infinity limit of the threshold, K/gamma.
double threshold_sbar_limit(const ModelParams& p);

/// A-priori bounds on the bond value:
///   lower(s) = c/(r+lambda) + lambda*gamma*s/(q+lambda)   (affine in s)
///   upper    = (c + lambda*K)/(r+lambda)                  (constant)
/// They coincide exactly at s = sbar_lambda.
struct ValueBounds {
  double lower = 0.0;
  double upper = 0.0;
};
ValueBounds bounds(const ModelParams& p, double s);

/// Coefficients of the affine lower bound, lower(s) = intercept + slope*s.
struct LowerBoundCoeffs {
  double intercept = 0.0;
  double slope = 0.0;
};
LowerBoundCoeffs lower_bound_coeffs(const ModelParams& p);

/// Coupon threshold (alpha-1)/alpha * r * K separating the two possible
/// lambda -> infinity limits of the Case III conversion boundary.
double classical_coupon_threshold(const ModelParams& p);

}  // namespace cbond
