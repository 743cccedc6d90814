#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cbond/analytic.hpp"
#include "cbond/model.hpp"

namespace cbond {

/// Stopping rules, consulted only at Poisson arrivals with index >= 1.
/// "TM" is the first arrival at or after the continuous hitting time of
/// sbar_lambda, detected by Brownian-bridge sampling between grid points.
enum class RuleKind {
  StopAtFirstArrival,  // fire at the first arrival seen
  StopAtTM,            // fire at the first arrival once sbar has been hit
  ThresholdConvert,    // fire when spot >= threshold, capped at TM
  NeverBeforeTM,       // wait until TM (deviation label for StopAtTM timing)
};

struct StopRule {
  RuleKind kind = RuleKind::StopAtTM;
  double threshold = 0.0;  // ThresholdConvert only

  bool fires(int arrival_index, double t, double s, bool hit_sbar) const;
  std::string label() const;
};

struct StrategyPair {
  StopRule firm;
  StopRule investor;
  std::string name;
};

/// The saddle-point pair:
///   Case I  : both StopAtTM
///   Case II : firm StopAtFirstArrival, investor StopAtTM
///   Case III: firm StopAtTM, investor ThresholdConvert(x_star)
StrategyPair optimal_strategy(const ModelParams& p);

/// Optimal pair first, then the unilateral deviations tested by the saddle
/// check: investor {StopAtFirstArrival, NeverBeforeTM, ThresholdConvert at
/// 0.5 x* and 1.5 x*}, firm {StopAtFirstArrival, NeverBeforeTM}.
std::vector<StrategyPair> deviation_roster(const ModelParams& p);

struct SimConfig {
  long n_paths = 0;
  std::uint64_t seed = 42;
  double monitor_step = 0.0;  // <= 0 selects min(1/lambda, 0.01)/4
  double trunc_tol = 1e-4;    // horizon: exp(-r T_max) max(K, U) < trunc_tol
  bool parallel = true;
};

double default_monitor_step(const ModelParams& p);
double default_horizon(const ModelParams& p, double trunc_tol);

struct SimulationReport {
  std::string strategy;
  double estimate = 0.0;
  double std_error = 0.0;
  long n_paths = 0;
  double frac_convert = 0.0;
  double frac_call = 0.0;
  double frac_truncated = 0.0;
  std::uint64_t seed = 0;
};

/// Discounted-payoff Monte Carlo: exact GBM sampling on the merged grid of
/// Poisson arrivals and monitoring times, bridge-sampled barrier hits,
/// coupons integrated in closed form. Paths still alive at the horizon get
/// exp(-r T_max) clamp(gamma S, lower(S), U) and are counted as truncated.
/// Identical (seed, n_paths, config) gives a bit-identical report whether
/// run serial or parallel. Throws SeedError on n_paths <= 0.
SimulationReport simulate_value(const ModelParams& p, double s0, const StrategyPair& strat,
                                const SimConfig& cfg);

struct DeviationOutcome {
  std::string label;
  bool investor_side = false;
  SimulationReport report;
  double gap = 0.0;        // deviation estimate - optimal estimate, paired
  double paired_se = 0.0;  // std error of the per-path payoff difference
};

struct SaddleReport {
  SimulationReport optimal;
  std::vector<DeviationOutcome> deviations;
};

/// Evaluates the optimal pair and every deviation on common random numbers
/// (one pass per path, identical path set for all strategies).
SaddleReport saddle_check(const ModelParams& p, double s0, const SimConfig& cfg);

struct DriftReport {
  std::string strategy;
  double mean = 0.0;
  double std_error = 0.0;
  double t_stat = 0.0;
  long n_increments = 0;
};

/// Drift of the discounted clamped value min{K, max{v(S), gamma S}} plus
/// accrued coupons, sampled along arrivals of simulated play until the
/// pair stops. Near-zero drift under the optimal pair; a late investor
/// produces the supermartingale (negative) direction, an early firm the
/// submartingale one. Truncated paths contribute their pre-horizon
/// increments only.
DriftReport martingale_diagnostic(const ModelParams& p, double s0, const StrategyPair& strat,
                                  const SimConfig& cfg);

}  // namespace cbond
