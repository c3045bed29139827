#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "paac/rng.hpp"
#include "paac/tensor.hpp"

namespace paac {

/// Shape of the shared-trunk policy/value network: a stack of dense+relu
/// layers feeding a softmax policy head (one logit per action) and a scalar
/// value head. hidden_sizes may be empty, in which case both heads act
/// directly on the observation (tabular capacity for one-hot inputs).
struct NetConfig {
  std::size_t input_dim = 0;
  std::vector<std::size_t> hidden_sizes;
  std::size_t action_count = 0;

  std::size_t trunk_output_dim() const {
    return hidden_sizes.empty() ? input_dim : hidden_sizes.back();
  }
  bool operator==(const NetConfig&) const = default;
};

// Parameter tensors live in one flat list so the optimizer, clipping,
// serialization and finite differencing can treat them uniformly.
// Order: [W1, b1, ..., WL, bL, Wpolicy, bpolicy, Wvalue, bvalue],
// weights (in,out), biases (1,out).

/// All learnable parameters of the policy/value network.
class ParamSet {
 public:
  ParamSet() = default;

  /// All tensors zero (uniform policy, zero values).
  static ParamSet zeros(const NetConfig& config);

  /// Trunk weights uniform in +-sqrt(6/(fan_in+fan_out)), biases zero,
  /// head weights additionally scaled by 0.01 so the initial policy is
  /// near uniform and initial values near zero.
  static ParamSet initialized(const NetConfig& config, RngStream& rng);

  const NetConfig& config() const { return config_; }
  std::size_t trunk_layers() const { return config_.hidden_sizes.size(); }

  std::vector<Matrix>& tensors() { return tensors_; }
  const std::vector<Matrix>& tensors() const { return tensors_; }

  Matrix& trunk_weight(std::size_t layer) { return tensors_[2 * layer]; }
  const Matrix& trunk_weight(std::size_t layer) const { return tensors_[2 * layer]; }
  Matrix& trunk_bias(std::size_t layer) { return tensors_[2 * layer + 1]; }
  const Matrix& trunk_bias(std::size_t layer) const { return tensors_[2 * layer + 1]; }

  Matrix& policy_weight() { return tensors_[2 * trunk_layers()]; }
  const Matrix& policy_weight() const { return tensors_[2 * trunk_layers()]; }
  Matrix& policy_bias() { return tensors_[2 * trunk_layers() + 1]; }
  const Matrix& policy_bias() const { return tensors_[2 * trunk_layers() + 1]; }
  Matrix& value_weight() { return tensors_[2 * trunk_layers() + 2]; }
  const Matrix& value_weight() const { return tensors_[2 * trunk_layers() + 2]; }
  Matrix& value_bias() { return tensors_[2 * trunk_layers() + 3]; }
  const Matrix& value_bias() const { return tensors_[2 * trunk_layers() + 3]; }

  std::size_t parameter_count() const;
  bool all_finite() const;

  bool operator==(const ParamSet&) const = default;

 private:
  NetConfig config_;
  std::vector<Matrix> tensors_;
};

/// One tensor per parameter tensor, same shapes and order.
struct GradientSet {
  std::vector<Matrix> tensors;

  static GradientSet zeros_like(const ParamSet& params);
  bool all_finite() const;
};

/// Per-parameter moving average of squared gradients plus the scalar
/// hyperparameters of the update rule.
struct RmsPropState {
  std::vector<Matrix> g;
  real learning_rate = real(0.0224);
  real decay = real(0.99);
  real epsilon = real(0.1);

  static RmsPropState init(const ParamSet& params, real learning_rate, real decay,
                           real epsilon);
};

/// Policy distribution and value estimates for one observation batch.
struct PolicyValueOutput {
  Matrix probs;              // B x |A|, rows on the simplex
  Matrix logits;             // B x |A|, retained for backprop
  std::vector<real> values;  // B
};

/// Everything the backward pass needs from one forward pass.
struct ForwardCache {
  Matrix observations;              // a_0
  std::vector<Matrix> preacts;      // z_1..z_L
  std::vector<Matrix> activations;  // a_1..a_L (post-relu)
  Matrix logits;
  Matrix probs;
  std::vector<real> values;

  const Matrix& trunk_output() const {
    return activations.empty() ? observations : activations.back();
  }
};

/// Per-batch loss telemetry produced alongside the gradients.
struct LossStats {
  real policy_loss = 0;  // mean  -A * log pi(a|s)
  real value_loss = 0;   // mean  (R - V)^2, unweighted
  real entropy = 0;      // mean  H(pi(s))
  real total_loss = 0;   // policy - beta*entropy + 0.5*value
};

/// Weight of the value loss relative to the policy loss when both update
/// the shared trunk in a single combined gradient.
inline constexpr real kValueLossWeight = real(0.5);

/// Numerically stable softmax: subtracts the max before exponentiating.
void softmax(std::span<const real> logits, std::span<real> out);
std::vector<real> softmax(std::span<const real> logits);

/// -sum p*ln(p) with 0*ln(0) == 0. Result lies in [0, ln(n)].
real entropy(std::span<const real> probs);

/// Batched forward pass. obs is B x input_dim.
std::pair<PolicyValueOutput, ForwardCache> forward(const ParamSet& params,
                                                   const Matrix& obs);

/// Gradient of the combined objective over one flattened batch:
///   mean_b [ -A_b*log pi(a_b|s_b) - beta*H(pi(s_b))
///            + 0.5*(R_b - V(s_b))^2 ]
/// where A_b = returns[b] - values[b] is treated as a constant. The result
/// follows the minimization convention: apply as theta <- theta - alpha*step.
GradientSet backward_paac_loss(const ParamSet& params, const ForwardCache& cache,
                               std::span<const int> actions,
                               std::span<const real> returns,
                               std::span<const real> values, real beta,
                               LossStats* stats = nullptr);

/// Gradient of mean_b (targets[b] - Q(s_b, a_b))^2 where the policy-head
/// logits are read as Q-values and targets are constants. The value head
/// receives zero gradient.
GradientSet backward_q_loss(const ParamSet& params, const ForwardCache& cache,
                            std::span<const int> actions,
                            std::span<const real> targets,
                            LossStats* stats = nullptr);

/// Scales all tensors by threshold/norm when the global L2 norm exceeds the
/// threshold (with 1e-12 relative slack so re-clipping is a bitwise no-op).
/// Returns the pre-clip global norm.
real clip_gradients(GradientSet& grads, real threshold);

real global_norm(const GradientSet& grads);

/// Per parameter: g <- decay*g + (1-decay)*grad^2;
///                theta <- theta - lr*grad/sqrt(g + epsilon).
/// Validates the result and throws DivergenceError before committing
/// anything non-finite, so params stay finite after every update.
void rmsprop_step(ParamSet& params, const GradientSet& grads, RmsPropState& state);

}  // namespace paac
