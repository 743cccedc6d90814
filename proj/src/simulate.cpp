#include "cbond/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cbond/free_boundary.hpp"
#include "cbond/rng.hpp"

namespace cbond {

bool StopRule::fires(int arrival_index, double t, double s, bool hit_sbar) const {
  (void)t;
  if (arrival_index < 1)
    throw DomainError("StopRule::fires: stopping before the first arrival is not allowed");
  switch (kind) {
    case RuleKind::StopAtFirstArrival: return true;
    case RuleKind::StopAtTM:
    case RuleKind::NeverBeforeTM: return hit_sbar;
    case RuleKind::ThresholdConvert: return hit_sbar || s >= threshold;
  }
  return false;
}

std::string StopRule::label() const {
  switch (kind) {
    case RuleKind::StopAtFirstArrival: return "stop-at-first-arrival";
    case RuleKind::StopAtTM: return "stop-at-TM";
    case RuleKind::NeverBeforeTM: return "never-before-TM";
    case RuleKind::ThresholdConvert: {
      std::ostringstream os;
      os << "threshold-convert(" << threshold << ")";
      return os.str();
    }
  }
  return "?";
}

StrategyPair optimal_strategy(const ModelParams& p) {
  StrategyPair pair;
  pair.name = "optimal";
  switch (classify_regime(p)) {
    case Regime::CaseI:
      pair.firm = {RuleKind::StopAtTM};
      pair.investor = {RuleKind::StopAtTM};
      break;
    case Regime::CaseII:
      pair.firm = {RuleKind::StopAtFirstArrival};
      pair.investor = {RuleKind::StopAtTM};
      break;
    case Regime::CaseIII:
      pair.firm = {RuleKind::StopAtTM};
      pair.investor = {RuleKind::ThresholdConvert, solve_conversion_boundary(p)};
      break;
  }
  return pair;
}

std::vector<StrategyPair> deviation_roster(const ModelParams& p) {
  const StrategyPair opt = optimal_strategy(p);
  const double x_ref = opt.investor.kind == RuleKind::ThresholdConvert ? opt.investor.threshold
                                                                       : threshold_sbar(p);
  std::vector<StrategyPair> roster{opt};
  auto inv_dev = [&](StopRule rule) {
    roster.push_back({opt.firm, rule, "investor:" + rule.label()});
  };
  auto firm_dev = [&](StopRule rule) {
    roster.push_back({rule, opt.investor, "firm:" + rule.label()});
  };
  inv_dev({RuleKind::StopAtFirstArrival});
  inv_dev({RuleKind::NeverBeforeTM});
  inv_dev({RuleKind::ThresholdConvert, 0.5 * x_ref});
  inv_dev({RuleKind::ThresholdConvert, 1.5 * x_ref});
  firm_dev({RuleKind::StopAtFirstArrival});
  firm_dev({RuleKind::NeverBeforeTM});
  return roster;
}

double default_monitor_step(const ModelParams& p) {
  return std::min(1.0 / p.lambda, 0.01) / 4.0;
}

double default_horizon(const ModelParams& p, double trunc_tol) {
  const double u_upper = (p.c + p.lambda * p.K) / (p.r + p.lambda);
  return std::log(std::max(p.K, u_upper) / trunc_tol) / p.r;
}

namespace {

constexpr long kBatchSize = 4096;

struct PathContext {
  ModelParams p;
  double z0 = 0.0;
  double z_bar = 0.0;
  double mu = 0.0;
  double monitor = 0.0;
  double t_max = 0.0;
  double u_upper = 0.0;
  LowerBoundCoeffs lb;
};

PathContext make_context(const ModelParams& p, double s0, const SimConfig& cfg) {
  if (cfg.n_paths <= 0) throw SeedError("simulate: n_paths must be positive");
  if (!(s0 > 0.0)) throw DomainError("simulate: s0 must be > 0");
  if (!(cfg.trunc_tol > 0.0)) throw ConfigError("simulate: trunc_tol must be > 0");
  PathContext ctx;
  ctx.p = p;
  ctx.z0 = std::log(s0);
  ctx.z_bar = std::log(threshold_sbar(p));
  ctx.mu = p.r - p.q - 0.5 * p.sigma * p.sigma;
  ctx.monitor = cfg.monitor_step > 0.0 ? cfg.monitor_step : default_monitor_step(p);
  ctx.t_max = default_horizon(p, cfg.trunc_tol);
  ctx.u_upper = (p.c + p.lambda * p.K) / (p.r + p.lambda);
  ctx.lb = lower_bound_coeffs(p);
  return ctx;
}

double coupon_leg(const ModelParams& p, double t) {
  return p.c * (1.0 - std::exp(-p.r * t)) / p.r;
}

// value assigned to a path still alive at the horizon, within [L, max(L, U)]
double truncation_value(const PathContext& ctx, double s) {
  const double lower = ctx.lb.intercept + ctx.lb.slope * s;
  return std::min(std::max(ctx.p.gamma * s, lower), std::max(lower, ctx.u_upper));
}

// One path: exact GBM between merged monitor/arrival events, bridge-sampled
// barrier hits. on_arrival(n, t, s, hit) -> true ends the walk;
// on_truncate(s) fires at the horizon.
template <class ArrivalFn, class TruncateFn>
void walk_path(const PathContext& ctx, Rng& rng, ArrivalFn&& on_arrival,
               TruncateFn&& on_truncate) {
  const double sigma = ctx.p.sigma;
  double t = 0.0, z = ctx.z0;
  bool hit = z >= ctx.z_bar;
  double t_arr = rng.exponential(ctx.p.lambda);
  long mon_idx = 1;
  int n_arr = 0;
  for (;;) {
    const double t_mon = ctx.monitor * double(mon_idx);
    const bool truncating = ctx.t_max <= t_arr && ctx.t_max <= t_mon;
    const double t_next = truncating ? ctx.t_max : std::min(t_arr, t_mon);
    const double dt = t_next - t;
    double z_next = z;
    if (dt > 0.0) z_next = z + ctx.mu * dt + sigma * std::sqrt(dt) * rng.normal();
    if (!hit) {
      if (z_next >= ctx.z_bar) {
        hit = true;
      } else if (dt > 0.0 && sigma > 0.0) {
        const double log_p_cross =
            -2.0 * (ctx.z_bar - z) * (ctx.z_bar - z_next) / (sigma * sigma * dt);
        if (log_p_cross > -40.0 && rng.uniform() < std::exp(log_p_cross)) hit = true;
      }
    }
    t = t_next;
    z = z_next;
    if (truncating) {
      on_truncate(std::exp(z));
      return;
    }
    if (t_arr <= t_mon) {
      ++n_arr;
      if (on_arrival(n_arr, t, std::exp(z), hit)) return;
      t_arr = t + rng.exponential(ctx.p.lambda);
    } else {
      ++mon_idx;
    }
  }
}

enum StopKind { kConvert = 0, kCall = 1, kTruncated = 2 };

struct Accum {
  double sum = 0.0;
  double sumsq = 0.0;
  double diff_sum = 0.0;  // payoff difference against roster entry 0
  double diff_sumsq = 0.0;
  long n_convert = 0;
  long n_call = 0;
  long n_trunc = 0;

  void merge(const Accum& o) {
    sum += o.sum;
    sumsq += o.sumsq;
    diff_sum += o.diff_sum;
    diff_sumsq += o.diff_sumsq;
    n_convert += o.n_convert;
    n_call += o.n_call;
    n_trunc += o.n_trunc;
  }
};

struct PairScratch {
  bool done = false;
  double payoff = 0.0;
  StopKind kind = kTruncated;
};

// Runs every strategy pair on the same path set (common random numbers);
// per-path generators keyed by the global path index make the result
// independent of batch scheduling.
std::vector<Accum> run_pairs(const PathContext& ctx, const std::vector<StrategyPair>& pairs,
                             const SimConfig& cfg) {
  const long n_batches = (cfg.n_paths + kBatchSize - 1) / kBatchSize;
  const std::size_t n_pairs = pairs.size();
  std::vector<std::vector<Accum>> partial(std::size_t(n_batches),
                                          std::vector<Accum>(n_pairs));

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (cfg.parallel)
#endif
  for (long batch = 0; batch < n_batches; ++batch) {
    std::vector<Accum>& acc = partial[std::size_t(batch)];
    std::vector<PairScratch> scratch(n_pairs);
    const long lo = batch * kBatchSize;
    const long hi = std::min(lo + kBatchSize, cfg.n_paths);
    for (long path = lo; path < hi; ++path) {
      Rng rng(cfg.seed, std::uint64_t(path));
      for (auto& st : scratch) st = PairScratch{};
      std::size_t alive = n_pairs;
      walk_path(
          ctx, rng,
          [&](int n, double t, double s, bool hit) {
            for (std::size_t k = 0; k < n_pairs; ++k) {
              PairScratch& st = scratch[k];
              if (st.done) continue;
              const bool investor_fires = pairs[k].investor.fires(n, t, s, hit);
              const bool firm_fires = pairs[k].firm.fires(n, t, s, hit);
              if (investor_fires) {  // simultaneous stops resolve to conversion
                st.done = true;
                st.kind = kConvert;
                st.payoff = coupon_leg(ctx.p, t) + std::exp(-ctx.p.r * t) * ctx.p.gamma * s;
                --alive;
              } else if (firm_fires) {
                st.done = true;
                st.kind = kCall;
                st.payoff = coupon_leg(ctx.p, t) + std::exp(-ctx.p.r * t) * ctx.p.K;
                --alive;
              }
            }
            return alive == 0;
          },
          [&](double s) {
            const double tail = coupon_leg(ctx.p, ctx.t_max) +
                                std::exp(-ctx.p.r * ctx.t_max) * truncation_value(ctx, s);
            for (auto& st : scratch)
              if (!st.done) {
                st.done = true;
                st.kind = kTruncated;
                st.payoff = tail;
              }
          });
      for (std::size_t k = 0; k < n_pairs; ++k) {
        const PairScratch& st = scratch[k];
        acc[k].sum += st.payoff;
        acc[k].sumsq += st.payoff * st.payoff;
        const double d = st.payoff - scratch[0].payoff;
        acc[k].diff_sum += d;
        acc[k].diff_sumsq += d * d;
        if (st.kind == kConvert) ++acc[k].n_convert;
        if (st.kind == kCall) ++acc[k].n_call;
        if (st.kind == kTruncated) ++acc[k].n_trunc;
      }
    }
  }

  std::vector<Accum> total(n_pairs);
  for (long batch = 0; batch < n_batches; ++batch)
    for (std::size_t k = 0; k < n_pairs; ++k) total[k].merge(partial[std::size_t(batch)][k]);
  return total;
}

SimulationReport report_from(const Accum& a, const StrategyPair& pair, const SimConfig& cfg) {
  SimulationReport rep;
  rep.strategy = pair.name.empty() ? pair.firm.label() + "/" + pair.investor.label() : pair.name;
  rep.n_paths = cfg.n_paths;
  rep.seed = cfg.seed;
  const double n = double(cfg.n_paths);
  rep.estimate = a.sum / n;
  const double var = std::max(0.0, (a.sumsq - n * rep.estimate * rep.estimate) / (n - 1.0));
  rep.std_error = std::sqrt(var / n);
  rep.frac_convert = double(a.n_convert) / n;
  rep.frac_call = double(a.n_call) / n;
  rep.frac_truncated = double(a.n_trunc) / n;
  return rep;
}

}  // namespace

SimulationReport simulate_value(const ModelParams& p, double s0, const StrategyPair& strat,
                                const SimConfig& cfg) {
  const PathContext ctx = make_context(p, s0, cfg);
  const std::vector<StrategyPair> pairs{strat};
  return report_from(run_pairs(ctx, pairs, cfg)[0], strat, cfg);
}

SaddleReport saddle_check(const ModelParams& p, double s0, const SimConfig& cfg) {
  const PathContext ctx = make_context(p, s0, cfg);
  const std::vector<StrategyPair> roster = deviation_roster(p);
  const std::vector<Accum> acc = run_pairs(ctx, roster, cfg);

  SaddleReport rep;
  rep.optimal = report_from(acc[0], roster[0], cfg);
  const double n = double(cfg.n_paths);
  for (std::size_t k = 1; k < roster.size(); ++k) {
    DeviationOutcome dev;
    dev.label = roster[k].name;
    dev.investor_side = roster[k].name.rfind("investor:", 0) == 0;
    dev.report = report_from(acc[k], roster[k], cfg);
    dev.gap = acc[k].diff_sum / n;
    const double var =
        std::max(0.0, (acc[k].diff_sumsq - n * dev.gap * dev.gap) / (n - 1.0));
    dev.paired_se = std::sqrt(var / n);
    rep.deviations.push_back(dev);
  }
  return rep;
}

DriftReport martingale_diagnostic(const ModelParams& p, double s0, const StrategyPair& strat,
                                  const SimConfig& cfg) {
  const PathContext ctx = make_context(p, s0, cfg);
  const AnalyticSolution sol = build_constrained_solution(p);
  const long n_batches = (cfg.n_paths + kBatchSize - 1) / kBatchSize;

  struct DriftAccum {
    double sum = 0.0, sumsq = 0.0;
    long n = 0;
  };
  std::vector<DriftAccum> partial(std::size_t(n_batches));

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (cfg.parallel)
#endif
  for (long batch = 0; batch < n_batches; ++batch) {
    DriftAccum& acc = partial[std::size_t(batch)];
    const long lo = batch * kBatchSize;
    const long hi = std::min(lo + kBatchSize, cfg.n_paths);
    for (long path = lo; path < hi; ++path) {
      Rng rng(cfg.seed, std::uint64_t(path));
      double y_prev = price_constrained(sol, s0);
      walk_path(
          ctx, rng,
          [&](int n, double t, double s, bool hit) {
            const double clamped =
                std::min(p.K, std::max(price_constrained(sol, s), p.gamma * s));
            const double y = coupon_leg(p, t) + std::exp(-p.r * t) * clamped;
            const double d = y - y_prev;
            acc.sum += d;
            acc.sumsq += d * d;
            ++acc.n;
            y_prev = y;
            return strat.investor.fires(n, t, s, hit) || strat.firm.fires(n, t, s, hit);
          },
          [&](double) {});  // horizon tail dropped
    }
  }

  DriftAccum total;
  for (const auto& a : partial) {
    total.sum += a.sum;
    total.sumsq += a.sumsq;
    total.n += a.n;
  }
  DriftReport rep;
  rep.strategy = strat.name;
  rep.n_increments = total.n;
  const double n = double(std::max<long>(total.n, 2));
  rep.mean = total.sum / n;
  const double var = std::max(0.0, (total.sumsq - n * rep.mean * rep.mean) / (n - 1.0));
  rep.std_error = std::sqrt(var / n);
  rep.t_stat = rep.std_error > 0.0 ? rep.mean / rep.std_error : 0.0;
  return rep;
}

}  // namespace cbond
