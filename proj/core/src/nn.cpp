#include "paac/nn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace paac {

namespace {

std::vector<std::size_t> layer_dims(const NetConfig& c) {
  std::vector<std::size_t> dims;
  dims.push_back(c.input_dim);
  for (std::size_t h : c.hidden_sizes) dims.push_back(h);
  return dims;
}

void check_config(const NetConfig& c) {
  if (c.input_dim == 0 || c.action_count < 2)
    throw ConfigError("network needs input_dim >= 1 and at least 2 actions");
  for (std::size_t h : c.hidden_sizes)
    if (h == 0) throw ConfigError("hidden layer of width 0");
}

}  // namespace

ParamSet ParamSet::zeros(const NetConfig& config) {
  check_config(config);
  ParamSet p;
  p.config_ = config;
  const auto dims = layer_dims(config);
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    p.tensors_.emplace_back(dims[i], dims[i + 1]);
    p.tensors_.emplace_back(1, dims[i + 1]);
  }
  const std::size_t trunk_out = config.trunk_output_dim();
  p.tensors_.emplace_back(trunk_out, config.action_count);
  p.tensors_.emplace_back(1, config.action_count);
  p.tensors_.emplace_back(trunk_out, 1);
  p.tensors_.emplace_back(1, 1);
  return p;
}

ParamSet ParamSet::initialized(const NetConfig& config, RngStream& rng) {
  ParamSet p = zeros(config);
  auto glorot_fill = [&rng](Matrix& w, real scale) {
    const real bound = std::sqrt(real(6) / real(w.rows() + w.cols()));
    for (real& v : w.flat())
      v = scale * bound * real(2 * rng.next_double() - 1);
  };
  for (std::size_t i = 0; i < p.trunk_layers(); ++i) glorot_fill(p.trunk_weight(i), 1);
  glorot_fill(p.policy_weight(), real(0.01));
  glorot_fill(p.value_weight(), real(0.01));
  return p;
}

std::size_t ParamSet::parameter_count() const {
  std::size_t n = 0;
  for (const Matrix& t : tensors_) n += t.size();
  return n;
}

bool ParamSet::all_finite() const {
  for (const Matrix& t : tensors_)
    if (!paac::all_finite(t.flat())) return false;
  return true;
}

GradientSet GradientSet::zeros_like(const ParamSet& params) {
  GradientSet g;
  g.tensors.reserve(params.tensors().size());
  for (const Matrix& t : params.tensors()) g.tensors.emplace_back(t.rows(), t.cols());
  return g;
}

bool GradientSet::all_finite() const {
  for (const Matrix& t : tensors)
    if (!paac::all_finite(t.flat())) return false;
  return true;
}

RmsPropState RmsPropState::init(const ParamSet& params, real learning_rate,
                                real decay, real epsilon) {
  RmsPropState s;
  s.learning_rate = learning_rate;
  s.decay = decay;
  s.epsilon = epsilon;
  for (const Matrix& t : params.tensors()) s.g.emplace_back(t.rows(), t.cols());
  return s;
}

void softmax(std::span<const real> logits, std::span<real> out) {
  const real max = *std::max_element(logits.begin(), logits.end());
  real sum = 0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - max);
    sum += out[i];
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i] /= sum;
}

std::vector<real> softmax(std::span<const real> logits) {
  std::vector<real> out(logits.size());
  softmax(logits, out);
  return out;
}

real entropy(std::span<const real> probs) {
  real h = 0;
  for (real p : probs)
    if (p > 0) h -= p * std::log(p);
  return h;
}

std::pair<PolicyValueOutput, ForwardCache> forward(const ParamSet& params,
                                                   const Matrix& obs) {
  if (obs.rows() == 0) throw ConfigError("forward: empty observation batch");
  if (obs.cols() != params.config().input_dim)
    throw ConfigError("forward: observation dim " + std::to_string(obs.cols()) +
                      " != network input dim " +
                      std::to_string(params.config().input_dim));

  ForwardCache cache;
  cache.observations = obs;

  const Matrix* act = &cache.observations;
  for (std::size_t i = 0; i < params.trunk_layers(); ++i) {
    Matrix z = matmul(*act, params.trunk_weight(i));
    add_row_inplace(z, params.trunk_bias(i).flat());
    Matrix a = z;
    for (real& v : a.flat()) v = v > 0 ? v : real(0);
    cache.preacts.push_back(std::move(z));
    cache.activations.push_back(std::move(a));
    act = &cache.activations.back();
  }

  cache.logits = matmul(*act, params.policy_weight());
  add_row_inplace(cache.logits, params.policy_bias().flat());

  Matrix value_col = matmul(*act, params.value_weight());
  add_row_inplace(value_col, params.value_bias().flat());
  cache.values.assign(value_col.data(), value_col.data() + value_col.rows());

  cache.probs = Matrix(cache.logits.rows(), cache.logits.cols());
  for (std::size_t b = 0; b < cache.logits.rows(); ++b)
    softmax(cache.logits.row(b), cache.probs.row(b));

  PolicyValueOutput out;
  out.probs = cache.probs;
  out.logits = cache.logits;
  out.values = cache.values;
  return {std::move(out), std::move(cache)};
}

namespace {

// Backpropagates head-level gradients through both heads and the trunk.
GradientSet backprop_from_heads(const ParamSet& params, const ForwardCache& cache,
                                const Matrix& dlogits, const Matrix& dvalues) {
  GradientSet grads = GradientSet::zeros_like(params);
  const std::size_t layers = params.trunk_layers();
  const Matrix& trunk_out = cache.trunk_output();

  grads.tensors[2 * layers] = matmul_at_b(trunk_out, dlogits);
  grads.tensors[2 * layers + 1] = column_sums(dlogits);
  grads.tensors[2 * layers + 2] = matmul_at_b(trunk_out, dvalues);
  grads.tensors[2 * layers + 3] = column_sums(dvalues);

  if (layers == 0) return grads;

  Matrix d_act = matmul_a_bt(dlogits, params.policy_weight());
  {
    Matrix dv = matmul_a_bt(dvalues, params.value_weight());
    for (std::size_t i = 0; i < d_act.size(); ++i)
      d_act.flat()[i] += dv.flat()[i];
  }

  for (std::size_t layer = layers; layer-- > 0;) {
    // relu mask
    Matrix dz = std::move(d_act);
    const Matrix& z = cache.preacts[layer];
    for (std::size_t i = 0; i < dz.size(); ++i)
      if (z.flat()[i] <= 0) dz.flat()[i] = 0;

    const Matrix& input =
        layer == 0 ? cache.observations : cache.activations[layer - 1];
    grads.tensors[2 * layer] = matmul_at_b(input, dz);
    grads.tensors[2 * layer + 1] = column_sums(dz);

    if (layer > 0) d_act = matmul_a_bt(dz, params.trunk_weight(layer));
  }
  return grads;
}

void check_batch(const ForwardCache& cache, std::size_t actions, std::size_t returns,
                 const char* where) {
  const std::size_t batch = cache.probs.rows();
  if (actions != batch || returns != batch)
    throw ConfigError(std::string(where) + ": batch tensors disagree on length");
}

}  // namespace

GradientSet backward_paac_loss(const ParamSet& params, const ForwardCache& cache,
                               std::span<const int> actions,
                               std::span<const real> returns,
                               std::span<const real> values, real beta,
                               LossStats* stats) {
  check_batch(cache, actions.size(), returns.size(), "backward_paac_loss");
  if (values.size() != actions.size())
    throw ConfigError("backward_paac_loss: values length mismatch");

  const std::size_t batch = cache.probs.rows();
  const std::size_t n_actions = cache.probs.cols();
  const real inv_batch = real(1) / real(batch);

  Matrix dlogits(batch, n_actions);
  Matrix dvalues(batch, 1);
  real policy_loss = 0, value_loss = 0, entropy_sum = 0;

  for (std::size_t b = 0; b < batch; ++b) {
    const auto p = cache.probs.row(b);
    const int action = actions[b];
    if (action < 0 || static_cast<std::size_t>(action) >= n_actions)
      throw ConfigError("backward_paac_loss: action id out of range");

    const real advantage = returns[b] - values[b];
    const real h = entropy(p);
    const real log_p_a = std::log(p[action]);
    const real value_err = returns[b] - cache.values[b];

    policy_loss += -advantage * log_p_a;
    value_loss += value_err * value_err;
    entropy_sum += h;

    for (std::size_t j = 0; j < n_actions; ++j) {
      const real indicator = (static_cast<std::size_t>(j) == static_cast<std::size_t>(action)) ? real(1) : real(0);
      const real policy_term = advantage * (p[j] - indicator);
      const real entropy_term =
          p[j] > 0 ? beta * p[j] * (std::log(p[j]) + h) : real(0);
      dlogits(b, j) = (policy_term + entropy_term) * inv_batch;
    }
    dvalues(b, 0) = -2 * kValueLossWeight * value_err * inv_batch;

    if (!std::isfinite(log_p_a) || !std::isfinite(value_err) ||
        !std::isfinite(advantage))
      throw DivergenceError("non-finite loss contribution at batch index " +
                            std::to_string(b));
  }

  LossStats s;
  s.policy_loss = policy_loss * inv_batch;
  s.value_loss = value_loss * inv_batch;
  s.entropy = entropy_sum * inv_batch;
  s.total_loss = s.policy_loss - beta * s.entropy + kValueLossWeight * s.value_loss;
  if (!std::isfinite(s.total_loss))
    throw DivergenceError("non-finite total loss over batch");
  if (stats) *stats = s;

  return backprop_from_heads(params, cache, dlogits, dvalues);
}

GradientSet backward_q_loss(const ParamSet& params, const ForwardCache& cache,
                            std::span<const int> actions,
                            std::span<const real> targets, LossStats* stats) {
  check_batch(cache, actions.size(), targets.size(), "backward_q_loss");

  const std::size_t batch = cache.logits.rows();
  const std::size_t n_actions = cache.logits.cols();
  const real inv_batch = real(1) / real(batch);

  Matrix dlogits(batch, n_actions);
  Matrix dvalues(batch, 1);  // value head unused by this objective
  real td_loss = 0, entropy_sum = 0;

  for (std::size_t b = 0; b < batch; ++b) {
    const int action = actions[b];
    if (action < 0 || static_cast<std::size_t>(action) >= n_actions)
      throw ConfigError("backward_q_loss: action id out of range");
    const real err = targets[b] - cache.logits(b, action);
    if (!std::isfinite(err))
      throw DivergenceError("non-finite TD error at batch index " +
                            std::to_string(b));
    dlogits(b, action) = -2 * err * inv_batch;
    td_loss += err * err;
    entropy_sum += entropy(cache.probs.row(b));
  }

  LossStats s;
  s.value_loss = td_loss * inv_batch;
  s.entropy = entropy_sum * inv_batch;
  s.total_loss = s.value_loss;
  if (!std::isfinite(s.total_loss))
    throw DivergenceError("non-finite TD loss over batch");
  if (stats) *stats = s;

  return backprop_from_heads(params, cache, dlogits, dvalues);
}

real global_norm(const GradientSet& grads) {
  real sum_sq = 0;
  for (const Matrix& t : grads.tensors)
    for (real v : t.flat()) sum_sq += v * v;
  return std::sqrt(sum_sq);
}

real clip_gradients(GradientSet& grads, real threshold) {
  if (threshold <= 0) throw ConfigError("clip threshold must be positive");
  const real norm = global_norm(grads);
  // Relative slack keeps clip(clip(g)) bitwise equal to clip(g).
  if (norm > threshold * (1 + real(1e-12))) {
    const real scale = threshold / norm;
    for (Matrix& t : grads.tensors)
      for (real& v : t.flat()) v *= scale;
  }
  return norm;
}

void rmsprop_step(ParamSet& params, const GradientSet& grads, RmsPropState& state) {
  if (grads.tensors.size() != params.tensors().size())
    throw ConfigError("rmsprop_step: gradient/parameter tensor count mismatch");

  std::vector<Matrix> new_g = state.g;
  std::vector<Matrix> new_theta = params.tensors();
  const real rho = state.decay;
  const real alpha = state.learning_rate;
  const real eps = state.epsilon;

  for (std::size_t t = 0; t < new_theta.size(); ++t) {
    if (!grads.tensors[t].same_shape(new_theta[t]))
      throw ConfigError("rmsprop_step: tensor shape mismatch");
    auto g = new_g[t].flat();
    auto theta = new_theta[t].flat();
    auto grad = grads.tensors[t].flat();
    for (std::size_t i = 0; i < theta.size(); ++i) {
      g[i] = rho * g[i] + (1 - rho) * grad[i] * grad[i];
      theta[i] -= alpha * grad[i] / std::sqrt(g[i] + eps);
    }
    if (!paac::all_finite(theta) || !paac::all_finite(g))
      throw DivergenceError("rmsprop_step produced non-finite parameters");
  }

  state.g = std::move(new_g);
  params.tensors() = std::move(new_theta);
}

}  // namespace paac
