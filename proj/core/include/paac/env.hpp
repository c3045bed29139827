#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "paac/preprocess.hpp"
#include "paac/rng.hpp"
#include "paac/tensor.hpp"

namespace paac {

enum class EnvKind { GridWorld, Chain, GridWorldPixel };

std::string to_string(EnvKind kind);
EnvKind env_kind_from_string(const std::string& name);

/// Declarative description of a toy environment instance.
struct EnvSpec {
  EnvKind kind = EnvKind::GridWorld;
  int grid_size = 5;       // gridworld, gridworld-pixel
  int chain_length = 8;    // chain
  int step_cap = 100;      // episode ends (done) after this many agent steps
  real step_penalty = real(0.01);  // gridworld per-step cost
  real goal_reward = real(1);
  int action_repeat = 1;   // one agent action advances the base env this often
  bool noop_starts = false;  // apply 1..max_noops no-ops on every reset
  int max_noops = 30;
  int step_delay_us = 0;   // artificial busy-wait per base step (timing studies)

  int action_count() const;
  int obs_dim() const;
  /// Action that leaves the state unchanged, when the kind has one.
  std::optional<int> noop_action() const;

  void validate() const;

  bool operator==(const EnvSpec&) const = default;
};

struct StepResult {
  std::vector<real> observation;
  real reward = 0;
  bool done = false;
};

/// A single environment instance. Owns its own RNG stream; never shares
/// mutable state with other instances, so distinct instances may be stepped
/// concurrently. Stepping a finished episode without reset is a contract
/// violation.
class Environment {
 public:
  explicit Environment(EnvSpec spec, RngStream rng)
      : spec_(std::move(spec)), rng_(rng) {}
  virtual ~Environment() = default;

  Environment(const Environment&) = delete;
  Environment& operator=(const Environment&) = delete;

  virtual std::vector<real> reset() = 0;
  virtual StepResult step(int action) = 0;

  const EnvSpec& spec() const { return spec_; }
  virtual RngStream& rng() { return rng_; }
  int steps_taken() const { return steps_; }

 protected:
  void check_step_preconditions(int action) const;

  EnvSpec spec_;
  RngStream rng_;
  int steps_ = 0;
  bool awaiting_reset_ = true;
};

/// Builds the environment described by `spec`, including the action-repeat
/// wrapper when spec.action_repeat > 1.
std::unique_ptr<Environment> make_env(const EnvSpec& spec, RngStream rng);

/// Applies k no-ops, k drawn uniformly in [1, max_noops] from the env's own
/// stream, immediately after a reset. If an episode terminates mid-noop the
/// env is reset and the procedure retried until a live state comes back.
std::vector<real> noop_start(Environment& env, std::vector<real> initial_obs);

// --- concrete environments -------------------------------------------------

/// size x size grid. Agent starts at (0,0), goal at (size-1,size-1).
/// Actions: 0=right, 1=down, 2=left, 3=up, 4=stay. Off-grid moves keep the
/// agent in place. Reaching the goal yields +goal_reward and ends the
/// episode; every other step costs -step_penalty. Observation: one-hot of
/// the agent cell.
class GridWorldEnv : public Environment {
 public:
  GridWorldEnv(EnvSpec spec, RngStream rng);
  std::vector<real> reset() override;
  StepResult step(int action) override;

  int agent_x() const { return x_; }
  int agent_y() const { return y_; }

 private:
  std::vector<real> observe() const;
  int x_ = 0, y_ = 0;
};

/// Linear chain of chain_length states. Start at the left end; actions
/// 0=left, 1=right; stepping right off the last non-terminal state yields
/// +goal_reward and ends the episode; all other rewards are zero.
/// Observation: one-hot of the state.
class ChainEnv : public Environment {
 public:
  ChainEnv(EnvSpec spec, RngStream rng);
  std::vector<real> reset() override;
  StepResult step(int action) override;

  int state() const { return state_; }

 private:
  std::vector<real> observe() const;
  int state_ = 0;
};

/// GridWorld rendered to synthetic 210x160x3 frames and run through the
/// full frame pipeline: per agent action the base grid advances
/// action_repeat times, the two latest raw frames are max-pooled, converted
/// to luma, downscaled to 84x84 and pushed onto a 4-frame stack. The
/// observation is the flattened stack scaled to [0,1].
class GridWorldPixelEnv : public Environment {
 public:
  GridWorldPixelEnv(EnvSpec spec, RngStream rng);
  std::vector<real> reset() override;
  StepResult step(int action) override;

  /// Renders the current grid state; exposed for pipeline tests.
  Frame render() const;

 private:
  std::vector<real> observe() const;

  GridWorldEnv base_;
  Frame prev_frame_;
  Frame curr_frame_;
  FrameStack stack_;
};

/// Repeats each agent action `action_repeat` times on the wrapped env,
/// summing rewards and stopping early if any sub-step terminates.
class ActionRepeatEnv : public Environment {
 public:
  ActionRepeatEnv(std::unique_ptr<Environment> base, int repeat);
  std::vector<real> reset() override;
  StepResult step(int action) override;
  RngStream& rng() override { return base_->rng(); }

 private:
  std::unique_ptr<Environment> base_;
  int repeat_;
};

}  // namespace paac
