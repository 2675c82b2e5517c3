#include "radae/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <tuple>

#include "radae/errors.hpp"

namespace radae {

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::Radae: return "radae";
    case Variant::Sdae: return "sdae";
    case Variant::Lr: return "lr";
  }
  return "?";
}

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw ContractError(what);
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

void fill_uniform(std::span<double> v, double bound, Rng& rng) {
  for (double& x : v) x = rng.uniform(-bound, bound);
}

void sigmoid_inplace(std::span<double> v) {
  for (double& x : v) x = sigmoid(x);
}

double clamp_prob(double p) { return std::clamp(p, kProbClamp, 1.0 - kProbClamp); }

double head_logit(const ActionHead& head, std::span<const double> top) {
  return head.b + std::inner_product(head.w.begin(), head.w.end(), top.begin(), 0.0);
}

void check_layer_index(const AdaptiveNet& net, std::size_t l) {
  if (l < 1 || l > net.layers.size()) {
    throw ContractError("layer index " + std::to_string(l) + " outside [1, " +
                        std::to_string(net.layers.size()) + "]");
  }
}

}  // namespace

std::vector<std::size_t> AdaptiveNet::widths() const {
  std::vector<std::size_t> out;
  out.reserve(layers.size());
  for (const auto& layer : layers) out.push_back(layer.width());
  return out;
}

std::size_t AdaptiveNet::top_width() const {
  return layers.empty() ? input_dim : layers.back().width();
}

void AdaptiveNet::validate() const {
  require(input_dim >= 1, "net input dimension must be positive");
  require(initial_widths.size() == layers.size(), "initial widths do not match layer count");
  std::size_t in = input_dim;
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const AELayer& layer = layers[k];
    const std::string where = "layer " + std::to_string(k + 1);
    if (layer.width() < 1) throw ContractError(where + " has no units");
    if (layer.input_dim() != in) throw ContractError(where + " input width breaks chaining");
    if (layer.b.size() != layer.width()) throw ContractError(where + " bias length mismatch");
    if (layer.b_prime.size() != in) throw ContractError(where + " decode bias length mismatch");
    if (!all_finite(layer.w.data()) || !all_finite(layer.b) || !all_finite(layer.b_prime)) {
      throw ContractError(where + " has non-finite parameters");
    }
    in = layer.width();
  }
  for (std::size_t a = 0; a < kNumActions; ++a) {
    if (heads[a].w.size() != in) {
      throw ContractError("head " + std::to_string(a) + " length does not match top width");
    }
    if (!all_finite(heads[a].w) || !std::isfinite(heads[a].b)) {
      throw ContractError("head " + std::to_string(a) + " has non-finite parameters");
    }
  }
}

std::string_view to_string(InitScheme s) {
  return s == InitScheme::SigmoidGlorot ? "glorot" : "fan_in";
}

std::string_view to_string(GenGradient g) { return g == GenGradient::Local ? "local" : "full"; }

double init_bound(InitScheme init, std::size_t fan_in, std::size_t fan_out) {
  if (init == InitScheme::FanIn) return 1.0 / std::sqrt(static_cast<double>(fan_in));
  return 4.0 * std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

AdaptiveNet make_net(Variant variant, std::size_t input_dim, const std::vector<std::size_t>& widths,
                     Rng& rng, InitScheme init) {
  require(input_dim >= 1, "input dimension must be positive");
  AdaptiveNet net;
  net.variant = variant;
  net.input_dim = input_dim;
  net.initial_widths = widths;
  std::size_t in = input_dim;
  for (std::size_t h : widths) {
    require(h >= 1, "layer width must be positive");
    AELayer layer;
    layer.w = Matrix(h, in);
    fill_uniform(layer.w.data(), init_bound(init, in, h), rng);
    layer.b.assign(h, 0.0);
    layer.b_prime.assign(in, 0.0);
    net.layers.push_back(std::move(layer));
    in = h;
  }
  for (auto& head : net.heads) {
    head.w.resize(in);
    fill_uniform(head.w, 1.0 / std::sqrt(static_cast<double>(in)), rng);
    head.b = 0.0;
  }
  return net;
}

double sigmoid(double s) {
  // Keeps the result strictly inside (0,1) in double precision.
  s = std::clamp(s, -35.0, 35.0);
  return 1.0 / (1.0 + std::exp(-s));
}

std::vector<double> sigmoid_affine(const Matrix& w, std::span<const double> x,
                                   std::span<const double> b) {
  require(x.size() == w.cols() && b.size() == w.rows(), "sigmoid_affine: dimension mismatch");
  std::vector<double> out(w.rows());
  kernels::affine(w, x, b, out);
  sigmoid_inplace(out);
  return out;
}

std::vector<std::uint8_t> draw_mask(std::size_t n, double p_c, Rng& rng) {
  if (!(p_c >= 0.0 && p_c <= 1.0)) {
    throw ConfigError("corruption level must lie in [0,1], got " + std::to_string(p_c));
  }
  std::vector<std::uint8_t> mask(n);
  for (auto& m : mask) m = rng.uniform() < p_c ? 0 : 1;
  return mask;
}

Frame corrupt(std::span<const double> x, double p_c, Rng& rng) {
  const auto mask = draw_mask(x.size(), p_c, rng);
  Frame out(x.begin(), x.end());
  for (std::size_t j = 0; j < out.size(); ++j) {
    if (!mask[j]) out[j] = 0.0;
  }
  return out;
}

std::vector<double> reconstruct(const AELayer& layer, std::span<const double> x_corrupt) {
  require(x_corrupt.size() == layer.input_dim(), "reconstruct: dimension mismatch");
  const auto h = sigmoid_affine(layer.w, x_corrupt, layer.b);
  std::vector<double> out(layer.input_dim());
  kernels::affine_t(layer.w, h, layer.b_prime, out);
  sigmoid_inplace(out);
  return out;
}

double generative_loss(std::span<const double> x, std::span<const double> x_hat) {
  require(x.size() == x_hat.size() && !x.empty(), "generative_loss: dimension mismatch");
  double acc = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double q = clamp_prob(x_hat[j]);
    // Skip exact-zero weights so that 0 * log(...) never contributes.
    if (x[j] != 0.0) acc += x[j] * std::log(q);
    if (x[j] != 1.0) acc += (1.0 - x[j]) * std::log1p(-q);
  }
  return -acc / static_cast<double>(x.size());
}

double discriminative_loss(int y, double p) {
  const double q = clamp_prob(p);
  return y ? -std::log(q) : -std::log1p(-q);
}

std::vector<std::vector<double>> forward(const AdaptiveNet& net, std::span<const double> x) {
  require(x.size() == net.input_dim, "forward: frame dimension does not match net input");
  std::vector<std::vector<double>> h;
  h.reserve(net.layers.size() + 1);
  h.emplace_back(x.begin(), x.end());
  for (const auto& layer : net.layers) h.push_back(sigmoid_affine(layer.w, h.back(), layer.b));
  return h;
}

double head_probability(const AdaptiveNet& net, Action action, std::span<const double> x) {
  const auto h = forward(net, x);
  return sigmoid(head_logit(net.heads[index_of(action)], h.back()));
}

std::array<double, kNumActions> head_probabilities(const AdaptiveNet& net,
                                                   std::span<const double> x) {
  const auto h = forward(net, x);
  std::array<double, kNumActions> out{};
  for (std::size_t a = 0; a < kNumActions; ++a) out[a] = sigmoid(head_logit(net.heads[a], h.back()));
  return out;
}

CorruptionMasks draw_masks(const AdaptiveNet& net, double p_c, Rng& rng) {
  CorruptionMasks masks;
  masks.reserve(net.layers.size());
  for (const auto& layer : net.layers) masks.push_back(draw_mask(layer.input_dim(), p_c, rng));
  return masks;
}

Gradients Gradients::like(const AdaptiveNet& net) {
  Gradients g;
  for (const auto& layer : net.layers) {
    g.w.emplace_back(layer.width(), layer.input_dim());
    g.b.emplace_back(layer.width(), 0.0);
    g.b_prime.emplace_back(layer.input_dim(), 0.0);
  }
  g.head_w.assign(net.top_width(), 0.0);
  return g;
}

void Gradients::zero() {
  for (auto& m : w) m.fill(0.0);
  for (auto& v : b) std::fill(v.begin(), v.end(), 0.0);
  for (auto& v : b_prime) std::fill(v.begin(), v.end(), 0.0);
  std::fill(head_w.begin(), head_w.end(), 0.0);
  head_b = 0.0;
}

namespace {

std::vector<double> masked(std::span<const double> u, std::span<const std::uint8_t> mask) {
  std::vector<double> out(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) out[j] = mask[j] ? u[j] : 0.0;
  return out;
}

void check_sample(const AdaptiveNet& net, std::span<const double> x, const CorruptionMasks& masks) {
  require(x.size() == net.input_dim, "frame dimension does not match net input");
  require(masks.size() == net.layers.size(), "one corruption mask per layer required");
  for (std::size_t k = 0; k < masks.size(); ++k) {
    require(masks[k].size() == net.layers[k].input_dim(), "corruption mask length mismatch");
  }
}

}  // namespace

double combined_objective(const AdaptiveNet& net, std::span<const double> x, int y,
                          Action action, const CorruptionMasks& masks) {
  check_sample(net, x, masks);
  const auto h = forward(net, x);
  double obj = 0.0;
  for (std::size_t k = 0; k < net.layers.size(); ++k) {
    obj += generative_loss(h[k], reconstruct(net.layers[k], masked(h[k], masks[k])));
  }
  const double p = sigmoid(head_logit(net.heads[index_of(action)], h.back()));
  return obj + discriminative_loss(y, p);
}

double combined_gradients(const AdaptiveNet& net, std::span<const double> x, int y,
                          Action action, const CorruptionMasks& masks, Gradients& grads,
                          GenGradient mode) {
  check_sample(net, x, masks);
  const std::size_t depth = net.layers.size();
  const auto h = forward(net, x);

  // g[k]: gradient w.r.t. the clean activation h[k] (k >= 1).
  std::vector<std::vector<double>> g(depth + 1);
  for (std::size_t k = 1; k <= depth; ++k) g[k].assign(h[k].size(), 0.0);

  double obj = 0.0;
  std::vector<double> z, a, da, dz, dut;
  for (std::size_t k = 0; k < depth; ++k) {
    const AELayer& layer = net.layers[k];
    const auto& u = h[k];
    const std::size_t n = u.size();
    const std::size_t width = layer.width();
    const auto ut = masked(u, masks[k]);

    z.resize(width);
    kernels::affine(layer.w, ut, layer.b, z);
    sigmoid_inplace(z);
    a.resize(n);
    kernels::affine_t(layer.w, z, layer.b_prime, a);
    std::vector<double> u_hat(a);
    sigmoid_inplace(u_hat);
    obj += generative_loss(u, u_hat);

    const double inv_n = 1.0 / static_cast<double>(n);
    da.resize(n);
    for (std::size_t j = 0; j < n; ++j) da[j] = (u_hat[j] - u[j]) * inv_n;

    // Decoder side of the tied weights.
    kernels::axpy(1.0, da, grads.b_prime[k]);
    kernels::add_outer(grads.w[k], 1.0, z, da);

    // Encoder side.
    dz.resize(width);
    const std::vector<double> zero_bias(width, 0.0);
    kernels::affine(layer.w, da, zero_bias, dz);
    for (std::size_t i = 0; i < width; ++i) dz[i] *= z[i] * (1.0 - z[i]);
    kernels::add_outer(grads.w[k], 1.0, dz, ut);
    kernels::axpy(1.0, dz, grads.b[k]);

    if (k >= 1 && mode == GenGradient::Full) {
      // The layer input is both the (masked) encoder input and the reconstruction target.
      dut.resize(n);
      const std::vector<double> zero_in(n, 0.0);
      kernels::affine_t(layer.w, dz, zero_in, dut);
      for (std::size_t j = 0; j < n; ++j) {
        g[k][j] += (masks[k][j] ? dut[j] : 0.0) - a[j] * inv_n;
      }
    }
  }

  const ActionHead& head = net.heads[index_of(action)];
  const auto& top = h.back();
  const double p = sigmoid(head_logit(head, top));
  obj += discriminative_loss(y, p);
  const double dlogit = p - static_cast<double>(y);
  kernels::axpy(dlogit, top, grads.head_w);
  grads.head_b += dlogit;
  if (depth >= 1) kernels::axpy(dlogit, head.w, g[depth]);

  // Back through the clean encoder chain.
  for (std::size_t l = depth; l >= 1; --l) {
    const std::size_t k = l - 1;
    const AELayer& layer = net.layers[k];
    std::vector<double> ds(g[l]);
    for (std::size_t i = 0; i < ds.size(); ++i) ds[i] *= h[l][i] * (1.0 - h[l][i]);
    kernels::add_outer(grads.w[k], 1.0, ds, h[k]);
    kernels::axpy(1.0, ds, grads.b[k]);
    if (k >= 1) {
      std::vector<double> back(h[k].size());
      const std::vector<double> zero_in(h[k].size(), 0.0);
      kernels::affine_t(layer.w, ds, zero_in, back);
      kernels::axpy(1.0, back, g[k]);
    }
  }
  return obj;
}

void apply_gradients(AdaptiveNet& net, const Gradients& grads, Action action, double lr) {
  for (std::size_t k = 0; k < net.layers.size(); ++k) {
    AELayer& layer = net.layers[k];
    kernels::axpy(-lr, grads.w[k].data(), layer.w.data());
    kernels::axpy(-lr, grads.b[k], layer.b);
    kernels::axpy(-lr, grads.b_prime[k], layer.b_prime);
  }
  ActionHead& head = net.heads[index_of(action)];
  kernels::axpy(-lr, grads.head_w, head.w);
  head.b -= lr * grads.head_b;
}

namespace {
void check_batch(const AdaptiveNet& net, const EpisodeBatch& batch) {
  require(!batch.frames.empty(), "batch must contain at least one frame");
  require(batch.label == 0 || batch.label == 1, "batch label must be 0 or 1");
  for (const auto& f : batch.frames) {
    require(f.size() == net.input_dim, "batch frame dimension does not match net input");
  }
}
}  // namespace

TrainStats train_batch(AdaptiveNet& net, const EpisodeBatch& batch, double lr, double p_c,
                       Rng& rng, GenGradient mode) {
  check_batch(net, batch);
  if (!(lr >= 0.0) || !std::isfinite(lr)) {
    throw ConfigError("learning rate must be non-negative, got " + std::to_string(lr));
  }
  if (lr > 0.0) {
    Gradients grads = Gradients::like(net);
    for (const auto& frame : batch.frames) {
      const auto masks = draw_masks(net, p_c, rng);
      grads.zero();
      combined_gradients(net, frame, batch.label, batch.action, masks, grads, mode);
      apply_gradients(net, grads, batch.action, lr);
    }
  }
  return evaluate_batch(net, batch);
}

TrainStats evaluate_batch(const AdaptiveNet& net, const EpisodeBatch& batch) {
  check_batch(net, batch);
  const ActionHead& head = net.heads[index_of(batch.action)];
  TrainStats stats;
  std::size_t wrong = 0;
  for (const auto& frame : batch.frames) {
    const auto h = forward(net, frame);
    if (!net.layers.empty()) stats.l_g += generative_loss(frame, reconstruct(net.layers[0], frame));
    const double p = sigmoid(head_logit(head, h.back()));
    stats.xent += discriminative_loss(batch.label, p);
    const int predicted = p >= 0.5 ? 1 : 0;
    if (predicted != batch.label) ++wrong;
  }
  const auto n = static_cast<double>(batch.frames.size());
  stats.l_g /= n;
  stats.xent /= n;
  stats.l_c = static_cast<double>(wrong) / n;
  return stats;
}

double misclassification_rate(const AdaptiveNet& net, const EpisodeBatch& batch) {
  check_batch(net, batch);
  const ActionHead& head = net.heads[index_of(batch.action)];
  std::size_t wrong = 0;
  for (const auto& frame : batch.frames) {
    const double p = sigmoid(head_logit(head, forward(net, frame).back()));
    if ((p >= 0.5 ? 1 : 0) != batch.label) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(batch.frames.size());
}

namespace {

// Clean inputs of 0-based layer k for every frame in the pool.
std::vector<std::vector<double>> layer_inputs(const AdaptiveNet& net, std::size_t k,
                                              std::span<const EpisodeBatch> pool) {
  std::vector<std::vector<double>> inputs;
  for (const auto& batch : pool) {
    for (const auto& frame : batch.frames) {
      std::vector<double> u(frame.begin(), frame.end());
      for (std::size_t j = 0; j < k; ++j) {
        u = sigmoid_affine(net.layers[j].w, u, net.layers[j].b);
      }
      inputs.push_back(std::move(u));
    }
  }
  return inputs;
}

double mean_reconstruction_loss(const AELayer& layer,
                                const std::vector<std::vector<double>>& inputs) {
  if (inputs.empty()) return 0.0;
  double acc = 0.0;
  for (const auto& u : inputs) acc += generative_loss(u, reconstruct(layer, u));
  return acc / static_cast<double>(inputs.size());
}

}  // namespace

double layer_reconstruction_loss(const AdaptiveNet& net, std::size_t l,
                                 std::span<const EpisodeBatch> pool) {
  check_layer_index(net, l);
  return mean_reconstruction_loss(net.layers[l - 1], layer_inputs(net, l - 1, pool));
}

GrowthReport grow_layer(AdaptiveNet& net, std::size_t l, std::size_t delta,
                        std::span<const EpisodeBatch> pool, const GrowthOptions& opts, Rng& rng) {
  check_layer_index(net, l);
  require(delta >= 1, "grow_layer: delta must be at least 1");
  const std::size_t k = l - 1;
  AELayer& layer = net.layers[k];
  const auto inputs = layer_inputs(net, k, pool);

  GrowthReport report;
  report.layer = l;
  report.old_width = layer.width();
  report.loss_before = mean_reconstruction_loss(layer, inputs);

  const std::size_t old_width = layer.width();
  const std::size_t new_width = old_width + delta;
  const std::size_t n = layer.input_dim();

  layer.w.append_rows(delta);
  const double in_bound = init_bound(opts.init, n, new_width);
  for (std::size_t i = old_width; i < new_width; ++i) fill_uniform(layer.w.row(i), in_bound, rng);
  layer.b.resize(new_width, 0.0);

  const double out_bound = 1.0 / std::sqrt(static_cast<double>(new_width));
  if (k + 1 < net.layers.size()) {
    AELayer& consumer = net.layers[k + 1];
    consumer.w.append_cols(delta);
    for (std::size_t r = 0; r < consumer.width(); ++r) {
      for (std::size_t c = old_width; c < new_width; ++c) {
        consumer.w(r, c) = rng.uniform(-out_bound, out_bound);
      }
    }
    consumer.b_prime.resize(new_width, 0.0);
  } else {
    for (auto& head : net.heads) {
      head.w.resize(new_width);
      fill_uniform(std::span<double>(head.w).subspan(old_width), out_bound, rng);
    }
  }

  // Greedy initialisation: local denoising reconstruction, gradients applied to new rows only.
  if (opts.lr > 0.0) {
    std::vector<double> z(new_width), a(n), da(n), dz(new_width);
    for (std::size_t epoch = 0; epoch < opts.epochs; ++epoch) {
      for (const auto& u : inputs) {
        const auto mask = draw_mask(n, opts.p_c, rng);
        const auto ut = masked(u, mask);
        kernels::affine(layer.w, ut, layer.b, z);
        sigmoid_inplace(z);
        kernels::affine_t(layer.w, z, layer.b_prime, a);
        const double inv_n = 1.0 / static_cast<double>(n);
        for (std::size_t j = 0; j < n; ++j) da[j] = (sigmoid(a[j]) - u[j]) * inv_n;
        for (std::size_t i = old_width; i < new_width; ++i) {
          const auto row = layer.w.row(i);
          double acc = 0.0;
          for (std::size_t j = 0; j < n; ++j) acc += row[j] * da[j];
          dz[i] = acc * z[i] * (1.0 - z[i]);
        }
        for (std::size_t i = old_width; i < new_width; ++i) {
          auto row = layer.w.row(i);
          const double zi = z[i];
          const double dzi = dz[i];
          for (std::size_t j = 0; j < n; ++j) row[j] -= opts.lr * (zi * da[j] + dzi * ut[j]);
          layer.b[i] -= opts.lr * dzi;
        }
      }
    }
  }

  report.new_width = layer.width();
  report.loss_after = mean_reconstruction_loss(layer, inputs);
  return report;
}

MergeReport merge_layer(AdaptiveNet& net, std::size_t l, std::size_t delta, std::size_t h_min) {
  check_layer_index(net, l);
  const std::size_t k = l - 1;
  AELayer& layer = net.layers[k];
  MergeReport report;
  report.layer = l;
  report.old_width = layer.width();
  report.new_width = layer.width();
  if (delta < 1 || layer.width() < 2 * delta + h_min) return report;

  const std::size_t width = layer.width();
  const std::size_t n = layer.input_dim();
  std::vector<std::tuple<double, std::size_t, std::size_t>> candidates;
  candidates.reserve(width * (width - 1) / 2);
  for (std::size_t i = 0; i < width; ++i) {
    for (std::size_t j = i + 1; j < width; ++j) {
      double d2 = 0.0;
      for (std::size_t c = 0; c < n; ++c) {
        const double diff = layer.w(i, c) - layer.w(j, c);
        d2 += diff * diff;
      }
      const double db = layer.b[i] - layer.b[j];
      d2 += db * db;
      candidates.emplace_back(d2, i, j);
    }
  }
  std::sort(candidates.begin(), candidates.end());

  std::vector<bool> used(width, false);
  for (const auto& [d2, i, j] : candidates) {
    if (report.pairs.size() == delta) break;
    if (used[i] || used[j]) continue;
    used[i] = used[j] = true;
    report.pairs.emplace_back(i, j);
  }

  AELayer* consumer = k + 1 < net.layers.size() ? &net.layers[k + 1] : nullptr;
  std::vector<std::size_t> removed;
  for (const auto& [keep, drop] : report.pairs) {
    for (std::size_t c = 0; c < n; ++c) layer.w(keep, c) = 0.5 * (layer.w(keep, c) + layer.w(drop, c));
    layer.b[keep] = 0.5 * (layer.b[keep] + layer.b[drop]);
    if (consumer) {
      for (std::size_t r = 0; r < consumer->width(); ++r) consumer->w(r, keep) += consumer->w(r, drop);
      consumer->b_prime[keep] = 0.5 * (consumer->b_prime[keep] + consumer->b_prime[drop]);
    } else {
      for (auto& head : net.heads) head.w[keep] += head.w[drop];
    }
    removed.push_back(drop);
  }

  std::sort(removed.rbegin(), removed.rend());
  for (std::size_t drop : removed) {
    layer.w.erase_row(drop);
    layer.b.erase(layer.b.begin() + static_cast<std::ptrdiff_t>(drop));
    if (consumer) {
      consumer->w.erase_col(drop);
      consumer->b_prime.erase(consumer->b_prime.begin() + static_cast<std::ptrdiff_t>(drop));
    } else {
      for (auto& head : net.heads) head.w.erase(head.w.begin() + static_cast<std::ptrdiff_t>(drop));
    }
  }
  report.merged = true;
  report.new_width = layer.width();
  return report;
}

}  // namespace radae
