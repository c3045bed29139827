#include "paac/env_pool.hpp"

#include <algorithm>
#include <string>
#include <utility>

namespace paac {

EnvPool::EnvPool(const EnvSpec& spec, int n_envs, int n_workers,
                 std::uint64_t master_seed)
    : EnvPool(
          [&spec](int, RngStream rng) { return make_env(spec, rng); },
          spec.obs_dim(), n_envs, n_workers, master_seed) {}

EnvPool::EnvPool(const EnvFactory& factory, int obs_dim, int n_envs, int n_workers,
                 std::uint64_t master_seed)
    : n_envs_(n_envs),
      n_workers_(n_workers),
      obs_dim_(obs_dim),
      observations_(static_cast<std::size_t>(std::max(n_envs, 1)),
                    static_cast<std::size_t>(std::max(obs_dim, 1))),
      actions_(n_envs, 0),
      rewards_(n_envs, 0),
      dones_(n_envs, 0),
      episode_scores_(n_envs, 0),
      episode_lengths_(n_envs, 0),
      completed_per_env_(n_envs),
      start_gate_(n_workers + 1),
      end_gate_(n_workers + 1) {
  if (n_envs < 1) throw ConfigError("pool needs n_envs >= 1");
  if (n_workers < 1 || n_workers > n_envs)
    throw ConfigError("pool needs 1 <= n_workers <= n_envs");

  envs_.reserve(n_envs);
  for (int i = 0; i < n_envs_; ++i) {
    envs_.push_back(factory(i, RngStream(derive_stream_seed(master_seed, i))));
    Environment& env = *envs_.back();
    std::vector<real> obs = env.reset();
    if (env.spec().noop_starts) obs = noop_start(env, std::move(obs));
    if (obs.size() != static_cast<std::size_t>(obs_dim_))
      throw ConfigError("environment observation dim " +
                        std::to_string(obs.size()) + " != pool obs_dim " +
                        std::to_string(obs_dim_));
    std::copy(obs.begin(), obs.end(), observations_.row(i).begin());
  }

  workers_.reserve(n_workers_);
  for (int w = 0; w < n_workers_; ++w)
    workers_.emplace_back([this, w] { worker_loop(w); });
}

EnvPool::~EnvPool() {
  stopping_ = true;
  start_gate_.arrive_and_wait();  // wakes workers, which exit before end_gate
}

std::pair<int, int> EnvPool::worker_block(int worker_index) const {
  // env i -> worker floor(i*n_workers/n_envs); block w is the preimage
  auto ceil_div = [](long long a, long long b) { return (a + b - 1) / b; };
  const int begin = static_cast<int>(
      ceil_div(static_cast<long long>(worker_index) * n_envs_, n_workers_));
  const int end = static_cast<int>(
      ceil_div(static_cast<long long>(worker_index + 1) * n_envs_, n_workers_));
  return {begin, end};
}

void EnvPool::step_env(int env_index) {
  Environment& env = *envs_[env_index];
  StepResult result = env.step(actions_[env_index]);

  rewards_[env_index] = result.reward;
  dones_[env_index] = result.done ? 1 : 0;
  episode_scores_[env_index] += result.reward;
  episode_lengths_[env_index] += 1;

  if (result.done) {
    completed_per_env_[env_index].push_back({env_index, episode_scores_[env_index],
                                             episode_lengths_[env_index]});
    episode_scores_[env_index] = 0;
    episode_lengths_[env_index] = 0;
    std::vector<real> obs = env.reset();
    if (env.spec().noop_starts) obs = noop_start(env, std::move(obs));
    result.observation = std::move(obs);
  }
  std::copy(result.observation.begin(), result.observation.end(),
            observations_.row(env_index).begin());
}

void EnvPool::worker_loop(int worker_index) {
  const auto [begin, end] = worker_block(worker_index);
  while (true) {
    start_gate_.arrive_and_wait();
    if (stopping_) return;
    try {
      for (int i = begin; i < end; ++i) step_env(i);
    } catch (const std::exception& e) {
      std::lock_guard<std::mutex> lock(error_mutex_);
      poisoned_ = true;
      if (first_error_.empty()) first_error_ = e.what();
    }
    end_gate_.arrive_and_wait();
  }
}

PoolStep EnvPool::step(std::span<const int> actions) {
  if (poisoned_)
    throw ContractError("pool is poisoned by an earlier worker failure: " +
                        first_error_);
  if (actions.size() != static_cast<std::size_t>(n_envs_))
    throw ConfigError("action batch length " + std::to_string(actions.size()) +
                      " != n_envs " + std::to_string(n_envs_));

  std::copy(actions.begin(), actions.end(), actions_.begin());
  start_gate_.arrive_and_wait();
  end_gate_.arrive_and_wait();

  if (poisoned_)
    throw ContractError("worker failed during pool step: " + first_error_);

  for (auto& results : completed_per_env_) {
    completed_.insert(completed_.end(), results.begin(), results.end());
    results.clear();
  }

  PoolStep out;
  out.observations = observations_;
  out.rewards = rewards_;
  out.dones = dones_;
  return out;
}

std::vector<EpisodeResult> EnvPool::drain_completed_episodes() {
  return std::exchange(completed_, {});
}

}  // namespace paac
