#include "paac/returns.hpp"

namespace paac {

namespace {

void check_slab(const TrajectorySlab& slab) {
  const std::size_t n = slab.batch_size();
  if (slab.n_envs < 1 || slab.t_max < 1)
    throw ConfigError("slab needs n_envs >= 1 and t_max >= 1");
  if (slab.rewards.size() != n || slab.dones.size() != n)
    throw ConfigError("slab rewards/dones length mismatch");
  if (slab.bootstrap_values.size() != static_cast<std::size_t>(slab.n_envs))
    throw ConfigError("slab bootstrap length mismatch");
}

}  // namespace

void compute_returns(TrajectorySlab& slab, real gamma) {
  check_slab(slab);
  if (!(gamma > 0 && gamma < 1))
    throw ConfigError("compute_returns: gamma must be in (0, 1)");

  slab.returns.assign(slab.batch_size(), real(0));
  for (int e = 0; e < slab.n_envs; ++e) {
    real carry = slab.bootstrap_values[e];
    for (int t = slab.t_max - 1; t >= 0; --t) {
      const std::size_t i = slab.index(e, t);
      if (slab.dones[i]) carry = 0;  // a terminal masks all bootstrapping across it
      carry = slab.rewards[i] + gamma * carry;
      slab.returns[i] = carry;
    }
  }
}

std::vector<real> compute_advantages(const TrajectorySlab& slab) {
  if (slab.returns.size() != slab.batch_size() ||
      slab.values.size() != slab.batch_size())
    throw ConfigError("compute_advantages: returns/values not filled");
  std::vector<real> advantages(slab.batch_size());
  for (std::size_t i = 0; i < advantages.size(); ++i)
    advantages[i] = slab.returns[i] - slab.values[i];
  return advantages;
}

}  // namespace paac
