#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "radae/kernels.hpp"
#include "radae/rng.hpp"
#include "radae/types.hpp"

namespace radae {

enum class Variant : std::uint8_t { Radae = 0, Sdae = 1, Lr = 2 };

std::string_view to_string(Variant v);

/// One denoising autoencoder with tied weights: encode sig(W x + b), decode sig(W^T h + b').
struct AELayer {
  Matrix w;                      // width x input_dim
  std::vector<double> b;         // width
  std::vector<double> b_prime;   // input_dim

  std::size_t width() const { return w.rows(); }
  std::size_t input_dim() const { return w.cols(); }
  bool operator==(const AELayer&) const = default;
};

/// Single sigmoid unit estimating the probability that an action is collision-free.
struct ActionHead {
  std::vector<double> w;
  double b = 0.0;
  bool operator==(const ActionHead&) const = default;
};

/// Stacked denoising autoencoder trunk shared by one head per action. Zero layers is the
/// logistic-regression baseline with heads reading the frame directly.
struct AdaptiveNet {
  Variant variant = Variant::Radae;
  std::size_t input_dim = 0;
  std::vector<AELayer> layers;
  std::array<ActionHead, kNumActions> heads;
  std::vector<std::size_t> initial_widths;

  std::vector<std::size_t> widths() const;
  /// Width feeding the heads: the top hidden layer, or the input when there are no layers.
  std::size_t top_width() const;
  /// Throws ContractError unless dimensions chain from the input through every layer to
  /// the heads and every parameter is finite.
  void validate() const;

  bool operator==(const AdaptiveNet&) const = default;
};

/// Trunk weight initialisation. SigmoidGlorot draws uniform in
/// +-4 sqrt(6 / (fan_in + fan_out)); FanIn draws uniform in +-1/sqrt(fan_in).
enum class InitScheme : std::uint8_t { SigmoidGlorot, FanIn };

/// How the generative terms reach the parameters. Full differentiates the combined
/// objective exactly, so a layer's reconstruction term also moves every layer below it.
/// Local stops that gradient at the layer input: each reconstruction term updates only its
/// own layer, while the discriminative term still reaches every layer.
enum class GenGradient : std::uint8_t { Local, Full };

std::string_view to_string(InitScheme s);
std::string_view to_string(GenGradient g);

/// Trunk weights drawn per `init`, head weights uniform in +-1/sqrt(fan_in), biases zero.
AdaptiveNet make_net(Variant variant, std::size_t input_dim, const std::vector<std::size_t>& widths,
                     Rng& rng, InitScheme init = InitScheme::SigmoidGlorot);

/// Half-width of the uniform draw for a trunk weight matrix.
double init_bound(InitScheme init, std::size_t fan_in, std::size_t fan_out);

struct TrainStats {
  double l_g = 0.0;   // mean per-pixel generative loss of layer 1 (nats)
  double l_c = 0.0;   // misclassification rate of the trained head
  double xent = 0.0;  // mean binary cross-entropy of the trained head
};

inline constexpr double kProbClamp = 1e-7;

double sigmoid(double s);

/// sig(W x + b), component-wise.
std::vector<double> sigmoid_affine(const Matrix& w, std::span<const double> x,
                                   std::span<const double> b);

/// Keep-mask with each entry zero with probability p_c. One draw per entry.
std::vector<std::uint8_t> draw_mask(std::size_t n, double p_c, Rng& rng);

/// Masking noise: each component independently zeroed with probability p_c.
Frame corrupt(std::span<const double> x, double p_c, Rng& rng);

/// x_hat = sig(W^T sig(W x + b) + b').
std::vector<double> reconstruct(const AELayer& layer, std::span<const double> x_corrupt);

/// Per-pixel mean binary cross-entropy between a target in [0,1] and a reconstruction.
double generative_loss(std::span<const double> x, std::span<const double> x_hat);

/// Binary cross-entropy of a label against a predicted probability.
double discriminative_loss(int y, double p);

/// Clean activations h^0 = x, h^1, ..., h^J.
std::vector<std::vector<double>> forward(const AdaptiveNet& net, std::span<const double> x);

double head_probability(const AdaptiveNet& net, Action action, std::span<const double> x);
std::array<double, kNumActions> head_probabilities(const AdaptiveNet& net,
                                                   std::span<const double> x);

/// Per-layer keep-masks applied to each layer's local input during a training step.
using CorruptionMasks = std::vector<std::vector<std::uint8_t>>;

CorruptionMasks draw_masks(const AdaptiveNet& net, double p_c, Rng& rng);

/// Gradient of the combined objective for one sample, shaped like the trunk plus one head.
struct Gradients {
  std::vector<Matrix> w;
  std::vector<std::vector<double>> b;
  std::vector<std::vector<double>> b_prime;
  std::vector<double> head_w;
  double head_b = 0.0;

  static Gradients like(const AdaptiveNet& net);
  void zero();
};

/// Combined objective for one sample: the sum over layers of each layer's generative loss
/// (reconstructing its clean input from the masked input) plus the discriminative loss of
/// the head for `action`.
double combined_objective(const AdaptiveNet& net, std::span<const double> x, int y,
                          Action action, const CorruptionMasks& masks);

/// Same objective; accumulates its gradient into `grads` (shaped by Gradients::like and
/// zeroed) and returns the objective value. With GenGradient::Full this is the exact
/// gradient; with Local each layer's input is treated as a constant in its own
/// reconstruction term.
double combined_gradients(const AdaptiveNet& net, std::span<const double> x, int y,
                          Action action, const CorruptionMasks& masks, Gradients& grads,
                          GenGradient mode = GenGradient::Full);

/// params -= lr * grads, touching only the trunk and the head for `action`.
void apply_gradients(AdaptiveNet& net, const Gradients& grads, Action action, double lr);

/// One SGD step per frame in stored order, then the stats of the updated net on the batch.
/// lr = 0 leaves every parameter untouched.
TrainStats train_batch(AdaptiveNet& net, const EpisodeBatch& batch, double lr, double p_c,
                       Rng& rng, GenGradient mode = GenGradient::Local);

/// Stats of the net on a batch without training.
TrainStats evaluate_batch(const AdaptiveNet& net, const EpisodeBatch& batch);

double misclassification_rate(const AdaptiveNet& net, const EpisodeBatch& batch);

/// Mean clean reconstruction loss of 1-based layer `l` over every frame of a pool.
double layer_reconstruction_loss(const AdaptiveNet& net, std::size_t l,
                                 std::span<const EpisodeBatch> pool);

struct GrowthOptions {
  std::size_t epochs = 10;
  double lr = 0.01;
  double p_c = 0.15;
  InitScheme init = InitScheme::SigmoidGlorot;  // for the new rows
};

struct GrowthReport {
  std::size_t layer = 0;
  std::size_t old_width = 0;
  std::size_t new_width = 0;
  double loss_before = 0.0;
  double loss_after = 0.0;
};

/// Adds `delta` units to 1-based layer `l` and trains only the new units on the pool.
GrowthReport grow_layer(AdaptiveNet& net, std::size_t l, std::size_t delta,
                        std::span<const EpisodeBatch> pool, const GrowthOptions& opts, Rng& rng);

struct MergeReport {
  std::size_t layer = 0;
  std::size_t old_width = 0;
  std::size_t new_width = 0;
  bool merged = false;  // false: precondition failed, nothing changed
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // pre-merge unit indices
};

/// Fuses the `delta` closest disjoint unit pairs of 1-based layer `l`.
MergeReport merge_layer(AdaptiveNet& net, std::size_t l, std::size_t delta,
                        std::size_t h_min = 4);

}  // namespace radae
