#include "cbond/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace cbond {

LatticeConfig make_lattice_config(const ModelParams& p, double dt, double trunc_tol,
                                  double dz_factor) {
  LatticeConfig cfg;
  cfg.dt = dt;
  cfg.trunc_tol = trunc_tol;
  cfg.n_time = long(std::ceil(std::log(p.K / trunc_tol) / p.r / dt));
  cfg.horizon_cap = cfg.dt * double(cfg.n_time);
  const double dz = dz_factor * p.sigma * std::sqrt(dt);
  cfg.n_space = int(std::floor(cfg.grid_span / dz)) + 1;
  return cfg;
}

double lattice_value(const ModelParams& p, const LatticeConfig& cfg, double s0, bool parallel) {
  const double sbar = threshold_sbar(p);
  const double u_upper = (p.c + p.lambda * p.K) / (p.r + p.lambda);

  if (p.lambda * cfg.dt >= 0.2) {
    std::ostringstream msg;
    msg << "lattice_value: lambda*dt = " << p.lambda * cfg.dt << " >= 0.2";
    throw ConfigError(msg.str());
  }
  if (std::abs(cfg.horizon_cap - cfg.dt * double(cfg.n_time)) > 1e-9 * cfg.horizon_cap)
    throw ConfigError("lattice_value: horizon_cap != dt * n_time");
  if (std::exp(-p.r * cfg.horizon_cap) * p.K > cfg.trunc_tol) {
    std::ostringstream msg;
    msg << "lattice_value: exp(-r T) K = " << std::exp(-p.r * cfg.horizon_cap) * p.K
        << " exceeds trunc_tol = " << cfg.trunc_tol;
    throw ConfigError(msg.str());
  }
  if (cfg.n_space < 3) throw ConfigError("lattice_value: n_space < 3");
  if (!(s0 > 0.0) || s0 >= sbar)
    throw DomainError("lattice_value: s0 must lie strictly below sbar");

  const int n = cfg.n_space;
  const double dz = cfg.grid_span / double(n - 1);
  const double z_top = std::log(sbar);
  const double mu = p.r - p.q - 0.5 * p.sigma * p.sigma;
  if (std::log(s0) < z_top - cfg.grid_span)
    throw DomainError("lattice_value: s0 below the bottom of the grid; widen grid_span");

  // moment-matched one-node trinomial; index 0 is the absorbing top node
  const double var = p.sigma * p.sigma * cfg.dt + (mu * cfg.dt) * (mu * cfg.dt);
  const double pu = 0.5 * (var / (dz * dz) + mu * cfg.dt / dz);
  const double pd = 0.5 * (var / (dz * dz) - mu * cfg.dt / dz);
  const double pm = 1.0 - pu - pd;
  if (pu < 0.0 || pd < 0.0 || pm < 0.0) {
    std::ostringstream msg;
    msg << "lattice_value: stencil probabilities out of range (pu=" << pu << ", pm=" << pm
        << ", pd=" << pd << "); lower n_space or raise dt";
    throw ConfigError(msg.str());
  }

  const double p_arrival = 1.0 - std::exp(-p.lambda * cfg.dt);
  const double disc = std::exp(-p.r * cfg.dt);
  const double coupon = p.c * (1.0 - disc) / p.r;
  const LowerBoundCoeffs lb = lower_bound_coeffs(p);

  std::vector<double> grid_s(n);
  for (int j = 0; j < n; ++j) grid_s[j] = std::exp(z_top - dz * double(j));

  std::vector<double> cur(n), nxt(n);
  for (int j = 0; j < n; ++j) {
    const double lower = lb.intercept + lb.slope * grid_s[j];
    cur[j] = std::clamp(p.gamma * grid_s[j], lower, u_upper);
  }
  cur[0] = u_upper;

  for (long k = cfg.n_time; k >= 1; --k) {
    const bool at_root = (k == 1);  // t = 0: no stopping permitted
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel)
#endif
    for (int j = 1; j < n; ++j) {
      const double down = (j + 1 < n) ? cur[j + 1] : cur[j];  // flat extrapolation at the bottom
      const double cont = coupon + disc * (pu * cur[j - 1] + pm * cur[j] + pd * down);
      if (at_root) {
        nxt[j] = cont;
      } else {
        const double stopped = std::min(p.K, std::max(cont, p.gamma * grid_s[j]));
        nxt[j] = (1.0 - p_arrival) * cont + p_arrival * stopped;
      }
    }
    nxt[0] = u_upper;
    cur.swap(nxt);
  }
  (void)parallel;

  // interpolate at s0, linearly in z
  const double pos = (z_top - std::log(s0)) / dz;
  const int j0 = std::min(int(pos), n - 2);
  const double w = pos - double(j0);
  return (1.0 - w) * cur[j0] + w * cur[j0 + 1];
}

}  // namespace cbond
