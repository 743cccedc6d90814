#pragma once

#include "cbond/model.hpp"

namespace cbond {

/// Backward-induction lattice for the constrained game on (0, sbar_lambda).
///
/// Log-price trinomial with the top node pinned exactly at sbar (one-node
/// moves can then never jump the absorbing boundary). Per step an arrival
/// occurs with probability 1 - exp(-lambda dt); at an arrival the value is
/// clamped to min{K, max{continuation, gamma s}}. Nodes at sbar are
/// absorbing with value U. The horizon is truncated at horizon_cap with the
/// terminal value clamped into [lower(s), U].
struct LatticeConfig {
  double dt = 0.0;
  long n_time = 0;
  int n_space = 0;
  double horizon_cap = 0.0;  // == dt * n_time
  double grid_span = 8.0;    // ln(sbar) - ln(bottom node)
  double trunc_tol = 1e-4;   // required: exp(-r horizon_cap) K < trunc_tol
};

/// Derives n_time from exp(-r T) K < trunc_tol and n_space from the
/// trinomial stability limit (node spacing dz_factor * sigma sqrt(dt)).
LatticeConfig make_lattice_config(const ModelParams& p, double dt, double trunc_tol = 1e-4,
                                  double dz_factor = 1.25);

/// Value at (t = 0, s0) for s0 strictly below sbar (linear interpolation in
/// log price between the two bracketing nodes). No stopping is permitted at
/// t = 0 itself. Throws ConfigError when lambda dt >= 0.2, when the horizon
/// violates the truncation tolerance, or when the stencil probabilities
/// leave [0, 1]; DomainError when s0 is outside the grid.
double lattice_value(const ModelParams& p, const LatticeConfig& cfg, double s0,
                     bool parallel = true);

}  // namespace cbond
