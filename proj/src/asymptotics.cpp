#include "cbond/asymptotics.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "cbond/analytic.hpp"
#include "cbond/free_boundary.hpp"

namespace cbond {

std::vector<SweepRow> boundary_sweep(const ModelParams& tmpl,
                                     const std::vector<double>& lambdas,
                                     const std::vector<double>& coupons) {
  std::vector<SweepRow> rows;
  rows.reserve(lambdas.size() * coupons.size());
  for (double c : coupons) {
    for (double lam : lambdas) {
      SweepRow row;
      row.lambda = lam;
      row.c = c;
      ModelParams p = tmpl;
      p.lambda = lam;
      p.c = c;
      try {
        validate_params(p);
        if (classify_regime(p) != Regime::CaseIII)
          throw DomainError("sweep cell is not in Case III (c > qK)");
        row.s_bar_lambda = threshold_sbar(p);
        row.x_star_lambda = solve_conversion_boundary(p);
        const double alpha = exponents(p).alpha_plus;
        row.limit_target = p.c <= classical_coupon_threshold(p)
                               ? alpha / (alpha - 1.0) * p.c / (p.gamma * p.r)
                               : threshold_sbar_limit(p);
        row.gap = std::abs(row.x_star_lambda - row.limit_target);
      } catch (const std::exception& e) {
        row.failed = true;
        row.error = e.what();
      }
      rows.push_back(row);
    }
  }
  return rows;
}

namespace {

ModelParams with_lambda(const ModelParams& p, double lambda) {
  ModelParams out = p;
  out.lambda = lambda;
  return out;
}

RateProbe make_probe(double h, double fd, double exact) {
  RateProbe probe;
  probe.h = h;
  probe.fd_slope = fd;
  probe.exact_slope = exact;
  probe.rel_err = std::abs(fd - exact) / std::max(std::abs(exact), 1e-300);
  return probe;
}

double loglog_slope(const std::vector<double>& hs, const std::vector<double>& gaps) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = double(hs.size());
  for (std::size_t i = 0; i < hs.size(); ++i) {
    const double x = std::log(hs[i]), y = std::log(gaps[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

const double kRateHs[] = {1e-2, 1e-3, 1e-4};

}  // namespace

RateReport rate_check_case1(const ModelParams& p, double s_above) {
  if (classify_regime(p) != Regime::CaseI)
    throw DomainError("rate_check_case1: parameters are not in Case I");
  const double sbar_inf = threshold_sbar_limit(p);
  if (s_above < sbar_inf)
    throw DomainError("rate_check_case1: price probe point must satisfy s >= K/gamma");

  RateReport rep;
  const double alpha = exponents(p).alpha_plus;
  const double a1_limit = (p.r * p.K - p.c) / p.r * std::exp(-alpha * std::log(sbar_inf));

  const double exact_boundary = -(p.r - p.q) * sbar_inf;
  const double exact_coeff = ((alpha - 1.0) * p.r - alpha * p.q) * a1_limit;
  const double exact_price = p.c - p.q * p.gamma * s_above;

  for (double h : kRateHs) {
    const ModelParams ph = with_lambda(p, 1.0 / h);
    rep.boundary.push_back(
        make_probe(h, (threshold_sbar(ph) - sbar_inf) / h, exact_boundary));
    const AnalyticSolution sol = build_constrained_solution(ph);
    rep.coeff.push_back(make_probe(h, (sol.coeff_A - a1_limit) / h, exact_coeff));
    const double v_inf = p.gamma * s_above;  // classical value above the boundary
    rep.price.push_back(
        make_probe(h, (price_constrained(sol, s_above) - v_inf) / h, exact_price));
  }

  std::vector<double> hs, gaps;
  for (double h = 1e-4; h <= 1.0000001e-1; h *= std::pow(10.0, 0.25)) {
    hs.push_back(h);
    gaps.push_back(std::abs(threshold_sbar(with_lambda(p, 1.0 / h)) - sbar_inf));
  }
  rep.loglog_slope = loglog_slope(hs, gaps);
  return rep;
}

RateReport rate_check_case2(const ModelParams& p) {
  if (classify_regime(p) != Regime::CaseII)
    throw DomainError("rate_check_case2: parameters are not in Case II");
  RateReport rep;
  const double exact_price = p.c - p.r * p.K;  // c - r v2 with v2 = K
  for (double h : kRateHs) {
    const ModelParams ph = with_lambda(p, 1.0 / h);
    const double v_h = (p.c + ph.lambda * p.K) / (p.r + ph.lambda);
    rep.price.push_back(make_probe(h, (v_h - p.K) / h, exact_price));
  }
  std::vector<double> hs, gaps;
  for (double h = 1e-4; h <= 1.0000001e-1; h *= std::pow(10.0, 0.25)) {
    const ModelParams ph = with_lambda(p, 1.0 / h);
    hs.push_back(h);
    gaps.push_back(std::abs((p.c + ph.lambda * p.K) / (p.r + ph.lambda) - p.K));
  }
  rep.loglog_slope = loglog_slope(hs, gaps);
  return rep;
}

std::string table1_gamma_note() {
  return "published table caption lists gamma=1, but its printed values (sbar=1.2500=K/gamma, "
         "x*=alpha/(alpha-1)*c/(gamma r)) require gamma=0.8; reproduced here with gamma=0.8";
}

Table1Result reproduce_table1(double tolerance) {
  const auto t_start = std::chrono::steady_clock::now();
  Table1Result res;
  res.tolerance = tolerance;
  res.params = validate_params({0.05, 0.03, 0.2, 1.0, 0.005, 1.0, 0.8});
  res.lambdas = {1.0, 100.0, 10000.0};
  res.coupons = {0.005, 0.010, 0.015, 0.020, 0.025, 0.030};
  res.reference = {
      {0.2932, 0.5863, 0.8784, 1.1179, 1.2012, 1.2262},
      {0.3353, 0.6706, 1.0059, 1.2474, 1.2495, 1.2498},
      {0.3396, 0.6792, 1.0188, 1.2500, 1.2500, 1.2500},
  };
  res.x_star_reference = {0.3401, 0.6802, 1.0203, 1.3604, 1.7005, 2.0406};
  res.s_bar_reference = {1.25, 1.25, 1.25, 1.25, 1.25, 1.25};

  auto check = [&](const std::string& where, double got, double want) {
    if (std::abs(got - want) > tolerance) {
      std::ostringstream os;
      os << where << ": got " << got << ", published " << want << " (tol " << tolerance << ")";
      res.mismatches.push_back(os.str());
    }
  };

  for (std::size_t i = 0; i < res.lambdas.size(); ++i) {
    std::vector<double> row;
    for (std::size_t j = 0; j < res.coupons.size(); ++j) {
      ModelParams p = res.params;
      p.lambda = res.lambdas[i];
      p.c = res.coupons[j];
      const double x = solve_conversion_boundary(p);
      row.push_back(x);
      std::ostringstream cell;
      cell << "x*(lambda=" << p.lambda << ", c=" << p.c << ")";
      check(cell.str(), x, res.reference[i][j]);
    }
    res.x_grid.push_back(row);
  }

  const double alpha = exponents(res.params).alpha_plus;
  for (std::size_t j = 0; j < res.coupons.size(); ++j) {
    ModelParams p = res.params;
    p.c = res.coupons[j];
    const double x_star = alpha / (alpha - 1.0) * p.c / (p.gamma * p.r);
    const double s_bar = threshold_sbar_limit(p);
    res.x_star_row.push_back(x_star);
    res.s_bar_row.push_back(s_bar);
    res.limit_row.push_back(build_classical_solution(p).x3);
    std::ostringstream a, b;
    a << "x* row (c=" << p.c << ")";
    b << "sbar row (c=" << p.c << ")";
    check(a.str(), x_star, res.x_star_reference[j]);
    check(b.str(), s_bar, res.s_bar_reference[j]);
  }

  res.pass = res.mismatches.empty();
  res.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return res;
}

Table1Result reproduce_table1_or_throw(double tolerance) {
  Table1Result res = reproduce_table1(tolerance);
  if (!res.pass) {
    std::ostringstream os;
    os << res.mismatches.size() << " cell(s) outside tolerance:";
    for (const auto& m : res.mismatches) os << "\n  " << m;
    throw MismatchError(os.str());
  }
  return res;
}

}  // namespace cbond
