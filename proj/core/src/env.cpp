#include "paac/env.hpp"

#include <chrono>
#include <stdexcept>

namespace paac {

std::string to_string(EnvKind kind) {
  switch (kind) {
    case EnvKind::GridWorld: return "gridworld";
    case EnvKind::Chain: return "chain";
    case EnvKind::GridWorldPixel: return "gridworld-pixel";
  }
  throw ConfigError("unknown env kind");
}

EnvKind env_kind_from_string(const std::string& name) {
  if (name == "gridworld") return EnvKind::GridWorld;
  if (name == "chain") return EnvKind::Chain;
  if (name == "gridworld-pixel") return EnvKind::GridWorldPixel;
  throw ConfigError("unknown env kind '" + name +
                    "' (expected gridworld | chain | gridworld-pixel)");
}

int EnvSpec::action_count() const {
  return kind == EnvKind::Chain ? 2 : 5;
}

int EnvSpec::obs_dim() const {
  switch (kind) {
    case EnvKind::GridWorld: return grid_size * grid_size;
    case EnvKind::Chain: return chain_length;
    case EnvKind::GridWorldPixel:
      return kProcessedSize * kProcessedSize * kFrameStackDepth;
  }
  throw ConfigError("unknown env kind");
}

std::optional<int> EnvSpec::noop_action() const {
  if (kind == EnvKind::Chain) return std::nullopt;
  return 4;  // stay
}

void EnvSpec::validate() const {
  if (action_count() < 2) throw ConfigError("env needs at least 2 actions");
  if (step_cap < 1) throw ConfigError("env step_cap must be >= 1");
  if (kind != EnvKind::Chain && grid_size < 2)
    throw ConfigError("grid_size must be >= 2");
  if (kind == EnvKind::Chain && chain_length < 2)
    throw ConfigError("chain_length must be >= 2");
  if (action_repeat < 1) throw ConfigError("action_repeat must be >= 1");
  if (max_noops < 1) throw ConfigError("max_noops must be >= 1");
  if (step_delay_us < 0) throw ConfigError("step_delay_us must be >= 0");
  if (noop_starts && !noop_action())
    throw ConfigError("noop_starts requires an env kind with a no-op action");
}

void Environment::check_step_preconditions(int action) const {
  if (awaiting_reset_)
    throw ContractError("step() on an environment awaiting reset");
  if (action < 0 || action >= spec_.action_count())
    throw ContractError("action id " + std::to_string(action) + " out of range");
}

namespace {

void busy_wait(int microseconds) {
  if (microseconds <= 0) return;
  const auto until = std::chrono::steady_clock::now() +
                     std::chrono::microseconds(microseconds);
  while (std::chrono::steady_clock::now() < until) {
  }
}

std::vector<real> one_hot(int index, int dim) {
  std::vector<real> v(dim, real(0));
  v[index] = 1;
  return v;
}

}  // namespace

// --- GridWorld ---------------------------------------------------------------

GridWorldEnv::GridWorldEnv(EnvSpec spec, RngStream rng)
    : Environment(std::move(spec), rng) {
  spec_.validate();
}

std::vector<real> GridWorldEnv::observe() const {
  return one_hot(y_ * spec_.grid_size + x_, spec_.grid_size * spec_.grid_size);
}

std::vector<real> GridWorldEnv::reset() {
  x_ = 0;
  y_ = 0;
  steps_ = 0;
  awaiting_reset_ = false;
  return observe();
}

StepResult GridWorldEnv::step(int action) {
  check_step_preconditions(action);
  busy_wait(spec_.step_delay_us);

  const int size = spec_.grid_size;
  switch (action) {
    case 0: x_ = std::min(x_ + 1, size - 1); break;  // right
    case 1: y_ = std::min(y_ + 1, size - 1); break;  // down
    case 2: x_ = std::max(x_ - 1, 0); break;         // left
    case 3: y_ = std::max(y_ - 1, 0); break;         // up
    case 4: break;                                   // stay
  }
  ++steps_;

  StepResult result;
  result.observation = observe();
  if (x_ == size - 1 && y_ == size - 1) {
    result.reward = spec_.goal_reward;
    result.done = true;
  } else {
    result.reward = -spec_.step_penalty;
    result.done = steps_ >= spec_.step_cap;
  }
  awaiting_reset_ = result.done;
  return result;
}

// --- Chain -------------------------------------------------------------------

ChainEnv::ChainEnv(EnvSpec spec, RngStream rng)
    : Environment(std::move(spec), rng) {
  spec_.validate();
}

std::vector<real> ChainEnv::observe() const {
  return one_hot(state_, spec_.chain_length);
}

std::vector<real> ChainEnv::reset() {
  state_ = 0;
  steps_ = 0;
  awaiting_reset_ = false;
  return observe();
}

StepResult ChainEnv::step(int action) {
  check_step_preconditions(action);
  busy_wait(spec_.step_delay_us);

  const int last = spec_.chain_length - 1;
  if (action == 1) {
    state_ = std::min(state_ + 1, last);
  } else {
    state_ = std::max(state_ - 1, 0);
  }
  ++steps_;

  StepResult result;
  result.observation = observe();
  if (state_ == last) {
    result.reward = spec_.goal_reward;
    result.done = true;
  } else {
    result.reward = 0;
    result.done = steps_ >= spec_.step_cap;
  }
  awaiting_reset_ = result.done;
  return result;
}

// --- GridWorld rendered to frames ---------------------------------------------

namespace {

constexpr std::uint8_t kBackground[3] = {24, 24, 24};
constexpr std::uint8_t kGoalColor[3] = {40, 200, 60};
constexpr std::uint8_t kAgentColor[3] = {220, 60, 50};

void fill_cell(Frame& frame, int grid_size, int cx, int cy,
               const std::uint8_t color[3]) {
  const int cell_h = frame.height / grid_size;
  const int cell_w = frame.width / grid_size;
  for (int y = cy * cell_h; y < (cy + 1) * cell_h; ++y)
    for (int x = cx * cell_w; x < (cx + 1) * cell_w; ++x)
      for (int c = 0; c < 3; ++c) frame.at(y, x, c) = color[c];
}

}  // namespace

GridWorldPixelEnv::GridWorldPixelEnv(EnvSpec spec, RngStream rng)
    : Environment(spec, rng), base_(spec, RngStream(0)) {
  spec_.validate();
}

Frame GridWorldPixelEnv::render() const {
  Frame frame(kRawFrameWidth, kRawFrameHeight, 3);
  for (std::size_t i = 0; i < frame.pixels.size(); ++i)
    frame.pixels[i] = kBackground[i % 3];
  const int size = spec_.grid_size;
  fill_cell(frame, size, size - 1, size - 1, kGoalColor);
  fill_cell(frame, size, base_.agent_x(), base_.agent_y(), kAgentColor);
  return frame;
}

std::vector<real> GridWorldPixelEnv::observe() const {
  std::vector<real> obs(stack_.flat_size());
  stack_.flatten_to(obs);
  return obs;
}

std::vector<real> GridWorldPixelEnv::reset() {
  base_.reset();
  curr_frame_ = render();
  prev_frame_ = curr_frame_;
  stack_.reset(preprocess_frame_pair(prev_frame_, curr_frame_));
  steps_ = 0;
  awaiting_reset_ = false;
  return observe();
}

StepResult GridWorldPixelEnv::step(int action) {
  check_step_preconditions(action);

  real reward = 0;
  bool done = false;
  for (int k = 0; k < spec_.action_repeat && !done; ++k) {
    StepResult sub = base_.step(action);
    reward += sub.reward;
    done = sub.done;
    prev_frame_ = std::move(curr_frame_);
    curr_frame_ = render();
  }
  stack_.push(preprocess_frame_pair(prev_frame_, curr_frame_));
  ++steps_;

  StepResult result;
  result.observation = observe();
  result.reward = reward;
  result.done = done;
  awaiting_reset_ = done;
  return result;
}

// --- action repeat wrapper -----------------------------------------------------

ActionRepeatEnv::ActionRepeatEnv(std::unique_ptr<Environment> base, int repeat)
    : Environment(base->spec(), RngStream(0)), base_(std::move(base)),
      repeat_(repeat) {
  if (repeat_ < 1) throw ConfigError("action repeat must be >= 1");
}

std::vector<real> ActionRepeatEnv::reset() {
  steps_ = 0;
  awaiting_reset_ = false;
  return base_->reset();
}

StepResult ActionRepeatEnv::step(int action) {
  check_step_preconditions(action);
  StepResult result;
  for (int k = 0; k < repeat_; ++k) {
    StepResult sub = base_->step(action);
    result.observation = std::move(sub.observation);
    result.reward += sub.reward;
    if (sub.done) {
      result.done = true;
      break;
    }
  }
  ++steps_;
  awaiting_reset_ = result.done;
  return result;
}

// --- factory + no-op starts ------------------------------------------------------

std::unique_ptr<Environment> make_env(const EnvSpec& spec, RngStream rng) {
  spec.validate();
  switch (spec.kind) {
    case EnvKind::GridWorld: {
      auto env = std::make_unique<GridWorldEnv>(spec, rng);
      if (spec.action_repeat > 1)
        return std::make_unique<ActionRepeatEnv>(std::move(env), spec.action_repeat);
      return env;
    }
    case EnvKind::Chain: {
      auto env = std::make_unique<ChainEnv>(spec, rng);
      if (spec.action_repeat > 1)
        return std::make_unique<ActionRepeatEnv>(std::move(env), spec.action_repeat);
      return env;
    }
    case EnvKind::GridWorldPixel:
      // repeat is handled inside so the frame pair spans the sub-steps
      return std::make_unique<GridWorldPixelEnv>(spec, rng);
  }
  throw ConfigError("unknown env kind");
}

std::vector<real> noop_start(Environment& env, std::vector<real> initial_obs) {
  const auto noop = env.spec().noop_action();
  if (!noop) return initial_obs;

  std::vector<real> obs = std::move(initial_obs);
  const int count = env.rng().next_int(1, env.spec().max_noops);
  for (int i = 0; i < count; ++i) {
    StepResult result = env.step(*noop);
    if (result.done) {
      obs = env.reset();
    } else {
      obs = std::move(result.observation);
    }
  }
  return obs;
}

}  // namespace paac
