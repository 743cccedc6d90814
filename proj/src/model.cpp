#include "cbond/model.hpp"

#include <cmath>
#include <sstream>

namespace cbond {

ModelParams validate_params(const ModelParams& raw) {
  std::ostringstream bad;
  auto flag = [&bad](const std::string& msg) {
    if (bad.tellp() > 0) bad << "; ";
    bad << msg;
  };
  auto finite = [](double v) { return std::isfinite(v); };

  if (!finite(raw.r) || !finite(raw.q) || !finite(raw.sigma) || !finite(raw.lambda) ||
      !finite(raw.c) || !finite(raw.K) || !finite(raw.gamma))
    flag("all parameters must be finite");
  if (!(raw.q > 0.0)) flag("q must be > 0");
  if (!(raw.r > raw.q)) flag("r must be > q");
  if (!(raw.sigma > 0.0)) flag("sigma must be > 0");
  if (!(raw.lambda > 0.0)) flag("lambda must be > 0");
  if (!(raw.c > 0.0)) flag("c must be > 0");
  if (!(raw.K > 0.0)) flag("K must be > 0");
  if (!(raw.gamma > 0.0 && raw.gamma <= 1.0)) flag("gamma must be in (0, 1]");

  if (bad.tellp() > 0) throw DomainError("invalid parameters: " + bad.str());
  return raw;
}

std::string to_string(Regime regime) {
  switch (regime) {
    case Regime::CaseI: return "CaseI";
    case Regime::CaseII: return "CaseII";
    case Regime::CaseIII: return "CaseIII";
  }
  return "?";
}

Regime classify_regime(const ModelParams& p) {
  if (p.c >= p.r * p.K) return Regime::CaseII;
  if (p.c <= p.q * p.K) return Regime::CaseIII;
  return Regime::CaseI;
}

QuadraticRoots characteristic_roots(double r, double q, double sigma, double rate) {
  const double s2 = sigma * sigma;
  const double b = 2.0 * (r - q - 0.5 * s2) / s2;  // x^2 + b x + c0 = 0
  const double c0 = -2.0 * rate / s2;
  const double disc = std::sqrt(b * b - 4.0 * c0);
  // root of larger magnitude first, the other via the product of roots
  const double big = (b >= 0.0) ? (-b - disc) / 2.0 : (-b + disc) / 2.0;
  const double small = c0 / big;
  QuadraticRoots out;
  out.plus = std::max(big, small);
  out.minus = std::min(big, small);
  return out;
}

Exponents exponents(const ModelParams& p) {
  const QuadraticRoots a = characteristic_roots(p.r, p.q, p.sigma, p.r);
  const QuadraticRoots b = characteristic_roots(p.r, p.q, p.sigma, p.r + p.lambda);
  Exponents e;
  e.alpha_plus = a.plus;
  e.alpha_minus = a.minus;
  e.beta_plus = b.plus;
  e.beta_minus = b.minus;
  return e;
}

double threshold_sbar(const ModelParams& p) {
  return (p.q + p.lambda) / (p.r + p.lambda) * p.K / p.gamma;
}

double threshold_sbar_limit(const ModelParams& p) { return p.K / p.gamma; }

LowerBoundCoeffs lower_bound_coeffs(const ModelParams& p) {
  return {p.c / (p.r + p.lambda), p.lambda * p.gamma / (p.q + p.lambda)};
}

ValueBounds bounds(const ModelParams& p, double s) {
  if (!(s > 0.0)) throw DomainError("bounds: s must be > 0");
  const LowerBoundCoeffs lb = lower_bound_coeffs(p);
  return {lb.intercept + lb.slope * s, (p.c + p.lambda * p.K) / (p.r + p.lambda)};
}

double classical_coupon_threshold(const ModelParams& p) {
  const double alpha = characteristic_roots(p.r, p.q, p.sigma, p.r).plus;
  return (alpha - 1.0) / alpha * p.r * p.K;
}

}  // namespace cbond
