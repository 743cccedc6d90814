#include "cbond/free_boundary.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "cbond/analytic.hpp"

namespace cbond {

namespace {

struct ResidualParts {
  double delta;  // beta+ - beta-
  double g;      // (alpha - lambda/(q+lambda)) gamma x - alpha c/r
  double h;      // q gamma x/(q+lambda) - c/(r+lambda)
};

ResidualParts residual_parts(const ModelParams& p, const Exponents& e, double x) {
  ResidualParts parts;
  parts.delta = e.beta_plus - e.beta_minus;
  parts.g = (e.alpha_plus - p.lambda / (p.q + p.lambda)) * p.gamma * x -
            e.alpha_plus * p.c / p.r;
  parts.h = p.q * p.gamma * x / (p.q + p.lambda) - p.c / (p.r + p.lambda);
  return parts;
}

double residual_from_y(const ModelParams& p, const Exponents& e, double sbar, double y) {
  const ResidualParts parts = residual_parts(p, e, y * sbar);
  const double pow_term = y >= 1.0 ? 1.0 : std::exp(parts.delta * std::log(y));
  return (pow_term - 1.0) * (parts.g - e.beta_plus * parts.h) - parts.delta * parts.h;
}

double residual_scale(const ModelParams& p, const Exponents& e, double sbar) {
  const ResidualParts parts = residual_parts(p, e, sbar);
  return parts.delta * (std::abs(parts.g) + (std::abs(e.beta_plus) + 1.0) * std::abs(parts.h) +
                        e.alpha_plus * p.c / p.r + p.gamma * sbar);
}

// lowest probe, scaled to sit well below any admissible root
double probe_floor(const ModelParams& p, const Exponents& e, double sbar) {
  const double classical = e.alpha_plus / (e.alpha_plus - 1.0) * p.c / (p.gamma * p.r);
  return std::clamp(1e-2 * classical / sbar, 1e-14, 1e-6);
}

}  // namespace

BoundaryCoefficients boundary_coefficients(const ModelParams& p) {
  const Exponents e = exponents(p);
  const double sbar = threshold_sbar(p);
  const double pow_sbar = std::exp((e.beta_plus - e.beta_minus) * std::log(sbar));
  BoundaryCoefficients c;
  c.C1 = (e.alpha_plus - p.lambda / (p.q + p.lambda) - p.q / (p.q + p.lambda) * e.beta_plus) *
         p.gamma;
  c.C2 = -(e.alpha_plus * p.c / p.r - p.c / (p.r + p.lambda) * e.beta_plus);
  c.C3 = -(e.alpha_plus - p.lambda / (p.q + p.lambda) - p.q / (p.q + p.lambda) * e.beta_minus) *
         pow_sbar * p.gamma;
  c.C4 = (e.alpha_plus * p.c / p.r - p.c / (p.r + p.lambda) * e.beta_minus) * pow_sbar;
  return c;
}

double boundary_residual(const ModelParams& p, double x) {
  const double sbar = threshold_sbar(p);
  if (!(x > 0.0) || x > sbar * (1.0 + 1e-12))
    throw DomainError("boundary_residual: x must lie in (0, sbar]");
  return residual_from_y(p, exponents(p), sbar, std::min(x / sbar, 1.0));
}

int residual_sign_changes(const ModelParams& p, std::size_t n_probes) {
  const Exponents e = exponents(p);
  const double sbar = threshold_sbar(p);
  const double y0 = probe_floor(p, e, sbar);
  const double step = std::pow(1.0 / y0, 1.0 / double(n_probes - 1));
  int changes = 0;
  double prev = residual_from_y(p, e, sbar, y0);
  double y = y0;
  for (std::size_t i = 1; i < n_probes; ++i) {
    y = (i + 1 == n_probes) ? 1.0 : y * step;
    const double cur = residual_from_y(p, e, sbar, y);
    if ((prev < 0.0 && cur > 0.0) || (prev > 0.0 && cur < 0.0)) ++changes;
    if (cur != 0.0) prev = cur;
  }
  return changes;
}

double solve_conversion_boundary(const ModelParams& p) {
  const Exponents e = exponents(p);
  const double sbar = threshold_sbar(p);
  auto f = [&](double y) { return residual_from_y(p, e, sbar, y); };

  constexpr std::size_t kProbes = 64;
  const double y0 = probe_floor(p, e, sbar);
  const double step = std::pow(1.0 / y0, 1.0 / double(kProbes - 1));
  double a = y0, fa = f(a);
  double b = 0.0, fb = 0.0;
  bool bracketed = false;
  double y = y0;
  for (std::size_t i = 1; i < kProbes; ++i) {
    y = (i + 1 == kProbes) ? 1.0 : std::min(y * step, 1.0);
    const double fy = f(y);
    if (fy == 0.0) return y * sbar;
    if ((fa > 0.0 && fy < 0.0) || (fa < 0.0 && fy > 0.0)) {
      b = y;
      fb = fy;
      bracketed = true;
      break;
    }
    a = y;
    fa = fy;
  }
  if (!bracketed) {
    // c = qK puts the root exactly at sbar; accept the endpoint when the
    // residual there vanishes to scaled tolerance
    const double f1 = f(1.0);
    if (std::abs(f1) <= 1e-10 * residual_scale(p, e, sbar)) return sbar;
    std::ostringstream msg;
    msg << "solve_conversion_boundary: no sign change on (0, sbar]; regime is "
        << to_string(classify_regime(p)) << " (root exists only in CaseIII)";
    throw BracketError(msg.str());
  }

  // safeguarded secant: fall back to bisection whenever the secant step
  // leaves the bracket or fails to shrink it fast enough
  constexpr double kTolY = 1e-13;
  double last_width = b - a;
  for (int it = 0; it < 200 && (b - a) > kTolY; ++it) {
    double mid = 0.5 * (a + b);
    double trial = mid;
    const double denom = fb - fa;
    if (denom != 0.0) {
      const double secant = a - fa * (b - a) / denom;
      if (secant > a && secant < b) trial = secant;
    }
    if (it % 2 == 1 && (b - a) > 0.5 * last_width) trial = mid;  // force progress
    last_width = b - a;
    const double ft = f(trial);
    if (ft == 0.0) return trial * sbar;
    if ((fa < 0.0) == (ft < 0.0)) {
      a = trial;
      fa = ft;
    } else {
      b = trial;
      fb = ft;
    }
  }
  return 0.5 * (a + b) * sbar;
}

PastingReport smooth_pasting_report(const ModelParams& p, double x_star) {
  const AnalyticSolution sol = build_constrained_solution(p, x_star);
  PastingReport rep;
  rep.x_star = x_star;
  rep.gamma = p.gamma;
  rep.degenerate = sol.upper_piece_empty;

  const double eps = 1e-9 * x_star;
  rep.deriv_left = price_constrained_d1(sol, x_star - eps);
  rep.deriv_right =
      rep.degenerate ? rep.deriv_left : price_constrained_d1(sol, std::min(x_star + eps, sol.sbar));
  const double denom = std::max({std::abs(rep.deriv_left), std::abs(rep.deriv_right), 1e-30});
  rep.rel_mismatch = std::abs(rep.deriv_left - rep.deriv_right) / denom;

  rep.deriv_below_gamma = rep.deriv_left < p.gamma && rep.deriv_right < p.gamma;

  constexpr int kSamples = 100;
  rep.convex_below = true;
  for (int i = 1; i <= kSamples; ++i) {
    const double s = x_star * double(i) / double(kSamples + 1);
    if (!(price_constrained_d2(sol, s) > 0.0)) rep.convex_below = false;
  }
  rep.concave_above = true;
  rep.dominated_above = true;
  if (!rep.degenerate) {
    for (int i = 1; i <= kSamples; ++i) {
      const double s = x_star + (sol.sbar - x_star) * double(i) / double(kSamples);
      if (price_constrained_d2(sol, s) > 1e-12) rep.concave_above = false;
      if (price_constrained(sol, s) > p.gamma * s + 1e-10 * p.K) rep.dominated_above = false;
    }
  }

  rep.pass = rep.rel_mismatch <= 1e-8 && rep.deriv_below_gamma && rep.convex_below &&
             rep.concave_above && rep.dominated_above;
  return rep;
}

PastingReport verify_smooth_pasting(const ModelParams& p, double x_star) {
  const PastingReport rep = smooth_pasting_report(p, x_star);
  if (rep.pass) return rep;
  std::ostringstream msg;
  msg << "smooth pasting failed at x_star=" << x_star << ":";
  if (rep.rel_mismatch > 1e-8)
    msg << " |v'(x*-) - v'(x*+)| relative mismatch " << rep.rel_mismatch << " > 1e-8;";
  if (!rep.deriv_below_gamma) msg << " v'(x*) >= gamma;";
  if (!rep.convex_below) msg << " v'' <= 0 somewhere below x*;";
  if (!rep.concave_above) msg << " v'' > 0 somewhere above x*;";
  if (!rep.dominated_above) msg << " v > gamma s somewhere on (x*, sbar];";
  throw PastingViolation(msg.str());
}

}  // namespace cbond
