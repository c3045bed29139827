#pragma once

#include <cstdint>
#include <vector>

#include "paac/tensor.hpp"

namespace paac {

/// One segment of experience collected from n_envs environments over t_max
/// steps. Flat arrays are indexed time-major: row(e, t) = t*n_envs + e,
/// matching the order the collector appends batches.
struct TrajectorySlab {
  int n_envs = 0;
  int t_max = 0;
  int obs_dim = 0;

  Matrix observations;               // (n_envs*t_max) x obs_dim
  std::vector<int> actions;          // n_envs*t_max
  std::vector<real> rewards;         // n_envs*t_max
  std::vector<std::uint8_t> dones;   // n_envs*t_max
  std::vector<real> values;          // n_envs*t_max, from forward at selection
  std::vector<real> bootstrap_values;  // n_envs, value of the post-segment state
  std::vector<real> returns;         // n_envs*t_max, filled by compute_returns

  std::uint64_t param_version = 0;   // parameters that generated this slab

  std::size_t index(int env, int t) const {
    return static_cast<std::size_t>(t) * n_envs + env;
  }
  std::size_t batch_size() const {
    return static_cast<std::size_t>(n_envs) * t_max;
  }
};

/// Fills slab.returns by the backward recursion R_t = r_t + gamma*R_{t+1},
/// seeded with the bootstrap value past the segment end and masked to zero
/// across every terminal step. Deterministic function of its inputs.
void compute_returns(TrajectorySlab& slab, real gamma);

/// Elementwise R - v over the slab (returns must be filled).
std::vector<real> compute_advantages(const TrajectorySlab& slab);

}  // namespace paac
