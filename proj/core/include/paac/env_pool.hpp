#pragma once

#include <barrier>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

#include "paac/env.hpp"
#include "paac/tensor.hpp"

namespace paac {

/// One finished episode, flushed by the pool when an environment terminates.
struct EpisodeResult {
  int env_index = 0;
  real score = 0;  // undiscounted reward sum
  int length = 0;  // agent steps
};

/// Result of stepping every environment once.
struct PoolStep {
  Matrix observations;              // n_envs x obs_dim; post-reset rows where done
  std::vector<real> rewards;        // n_envs
  std::vector<std::uint8_t> dones;  // n_envs
};

/// n_envs environment instances stepped in lockstep by n_workers persistent
/// worker threads. Environments are partitioned into static contiguous
/// blocks (env i belongs to worker i*n_workers/n_envs) and each holds an
/// independent RNG stream derived from (master_seed, env_index), so results
/// are bitwise independent of the worker count and of scheduling order.
///
/// Environments that report done are reset inside the pool immediately; the
/// returned observation row is the post-reset observation while the done
/// flag stays set for the step that terminated. Completed episode returns
/// accumulate until drained.
///
/// The pool is driven from a single controlling thread. A worker failure
/// poisons the pool; subsequent calls throw.
class EnvPool {
 public:
  using EnvFactory =
      std::function<std::unique_ptr<Environment>(int env_index, RngStream rng)>;

  EnvPool(const EnvSpec& spec, int n_envs, int n_workers, std::uint64_t master_seed);
  EnvPool(const EnvFactory& factory, int obs_dim, int n_envs, int n_workers,
          std::uint64_t master_seed);
  ~EnvPool();

  EnvPool(const EnvPool&) = delete;
  EnvPool& operator=(const EnvPool&) = delete;

  int n_envs() const { return n_envs_; }
  int n_workers() const { return n_workers_; }
  int obs_dim() const { return obs_dim_; }

  /// Applies actions[i] to environment i, all environments exactly once.
  /// Blocks until every worker finishes its block.
  PoolStep step(std::span<const int> actions);

  /// Current observation batch; no side effects.
  const Matrix& observations() const { return observations_; }

  /// Episode results completed since the last drain, in (step, env) order.
  std::vector<EpisodeResult> drain_completed_episodes();

  bool poisoned() const { return poisoned_; }

 private:
  void worker_loop(int worker_index);
  void step_env(int env_index);
  std::pair<int, int> worker_block(int worker_index) const;

  int n_envs_;
  int n_workers_;
  int obs_dim_;

  std::vector<std::unique_ptr<Environment>> envs_;
  Matrix observations_;
  std::vector<int> actions_;
  std::vector<real> rewards_;
  std::vector<std::uint8_t> dones_;

  // per-env episode accumulators and their flushed results (disjoint slots,
  // merged by the controlling thread after the barrier)
  std::vector<real> episode_scores_;
  std::vector<int> episode_lengths_;
  std::vector<std::vector<EpisodeResult>> completed_per_env_;
  std::vector<EpisodeResult> completed_;

  std::barrier<> start_gate_;
  std::barrier<> end_gate_;
  std::vector<std::jthread> workers_;
  bool stopping_ = false;

  bool poisoned_ = false;
  std::mutex error_mutex_;
  std::string first_error_;
};

}  // namespace paac
