#include "smoothkl/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "smoothkl/errors.hpp"
#include "smoothkl/kernels.hpp"
#include "smoothkl/random.hpp"

namespace smoothkl {

std::string to_string(Activation act) {
  switch (act) {
    case Activation::relu: return "relu";
    case Activation::tanh: return "tanh";
    case Activation::identity: return "identity";
  }
  return "?";
}

Activation activation_from_string(const std::string& name) {
  if (name == "relu") return Activation::relu;
  if (name == "tanh") return Activation::tanh;
  if (name == "identity") return Activation::identity;
  throw ConfigError("unknown activation '" + name + "'");
}

void NetworkArch::validate() const {
  if (input_dim == 0) throw ConfigError("network input dimension must be positive");
  if (classes < 2) throw ConfigError("network needs at least two classes");
  for (std::size_t w : hidden) {
    if (w == 0) throw ConfigError("hidden layers need at least one unit");
  }
}

Network::Network(NetworkArch arch) : arch_(std::move(arch)) {
  arch_.validate();
  std::size_t prev = arch_.input_dim;
  std::size_t offset = 0;
  std::vector<std::size_t> widths = arch_.hidden;
  widths.push_back(static_cast<std::size_t>(arch_.classes));
  for (std::size_t w : widths) {
    in_.push_back(prev);
    out_.push_back(w);
    w_off_.push_back(offset);
    offset += w * prev;
    b_off_.push_back(offset);
    offset += w;
    prev = w;
  }
  params_.assign(offset, 0.0);
}

void Network::initialize(std::uint64_t seed, std::uint64_t trial) {
  RandomStream rng(seed, trial, StreamRole::network_init);
  std::fill(params_.begin(), params_.end(), 0.0);
  for (std::size_t l = 0; l < layer_count(); ++l) {
    const double gain = arch_.activation == Activation::relu && l + 1 < layer_count() ? 2.0 : 1.0;
    const double sd = std::sqrt(gain / static_cast<double>(in_[l]));
    for (double& w : weights(l)) w = sd * rng.normal();
  }
}

namespace {

void activate(Activation act, std::vector<double>& v) {
  switch (act) {
    case Activation::relu:
      for (double& x : v) x = x > 0.0 ? x : 0.0;
      return;
    case Activation::tanh:
      for (double& x : v) x = std::tanh(x);
      return;
    case Activation::identity:
      return;
  }
}

// Multiplies delta by the activation derivative, given pre- and post-activation values.
void activation_backward(Activation act, const std::vector<double>& pre, const std::vector<double>& post,
                         std::vector<double>& delta) {
  switch (act) {
    case Activation::relu:
      for (std::size_t i = 0; i < delta.size(); ++i) {
        if (!(pre[i] > 0.0)) delta[i] = 0.0;
      }
      return;
    case Activation::tanh:
      for (std::size_t i = 0; i < delta.size(); ++i) delta[i] *= 1.0 - post[i] * post[i];
      return;
    case Activation::identity:
      return;
  }
}

std::vector<double> transpose(const double* a, std::size_t rows, std::size_t cols) {
  std::vector<double> t(rows * cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) t[j * rows + i] = a[i * cols + j];
  }
  return t;
}

}  // namespace

void Network::forward_cached(const double* x, std::size_t n, std::vector<std::vector<double>>& pre,
                             std::vector<std::vector<double>>& post) const {
  const std::size_t layers = layer_count();
  pre.resize(layers);
  post.resize(layers);
  const double* input = x;
  for (std::size_t l = 0; l < layers; ++l) {
    pre[l].resize(n * out_[l]);
    matmul_abt(input, params_.data() + w_off_[l], pre[l].data(), n, out_[l], in_[l]);
    const double* b = params_.data() + b_off_[l];
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t o = 0; o < out_[l]; ++o) pre[l][i * out_[l] + o] += b[o];
    }
    post[l] = pre[l];
    if (l + 1 < layers) activate(arch_.activation, post[l]);
    input = post[l].data();
  }
}

void Network::forward(const double* x, std::size_t n, std::vector<double>& logits) const {
  std::vector<std::vector<double>> pre, post;
  forward_cached(x, n, pre, post);
  logits = std::move(post.back());
}

double Network::loss_and_grad(const LossSpec& spec, const double* x, const int* y, std::size_t n,
                              std::span<double> grad) const {
  if (grad.size() != params_.size()) throw std::invalid_argument("gradient buffer has wrong size");
  if (n == 0) throw std::invalid_argument("empty batch");
  std::vector<std::vector<double>> pre, post;
  forward_cached(x, n, pre, post);

  const std::size_t layers = layer_count();
  const std::size_t k = out_.back();
  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<double> delta(n * k);
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::span<const double> logits(post.back().data() + i * k, k);
    loss += multiclass_loss_with_grad(spec, logits, y[i], std::span<double>(delta.data() + i * k, k));
  }
  for (double& v : delta) v *= inv_n;

  for (std::size_t l = layers; l-- > 0;) {
    const std::size_t o = out_[l];
    const std::size_t in = in_[l];
    const double* input = l == 0 ? x : post[l - 1].data();
    const std::vector<double> delta_t = transpose(delta.data(), n, o);
    const std::vector<double> input_t = transpose(input, n, in);
    matmul_abt(delta_t.data(), input_t.data(), grad.data() + w_off_[l], o, in, n);
    double* gb = grad.data() + b_off_[l];
    for (std::size_t j = 0; j < o; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += delta_t[j * n + i];
      gb[j] = s;
    }
    if (l == 0) break;
    const std::vector<double> w_t = transpose(params_.data() + w_off_[l], o, in);
    std::vector<double> next(n * in);
    matmul_abt(delta.data(), w_t.data(), next.data(), n, in, o);
    activation_backward(arch_.activation, pre[l - 1], post[l - 1], next);
    delta = std::move(next);
  }
  return loss * inv_n;
}

void NetworkConfig::validate() const {
  if (!(learning_rate_init > 0.0)) throw ConfigError("learning_rate_init must be positive");
  if (!(decay_factor > 0.0 && decay_factor <= 1.0)) throw ConfigError("decay_factor must lie in (0, 1]");
  if (decay_every_epochs < 1) throw ConfigError("decay_every_epochs must be at least 1");
  if (epochs < 1) throw ConfigError("epochs must be at least 1");
  if (batch_size < 1) throw ConfigError("batch_size must be at least 1");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0)) throw ConfigError("adam beta1 must lie in [0, 1)");
  if (!(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) throw ConfigError("adam beta2 must lie in [0, 1)");
  if (!(adam_epsilon > 0.0)) throw ConfigError("adam epsilon must be positive");
}

SplitMetrics evaluate_network(const Network& net, const Dataset& data, const LossSpec& spec, MsorVariant variant) {
  if (data.size() == 0) throw std::invalid_argument("empty evaluation set");
  const int k = net.arch().classes;
  if (data.classes() != k) throw std::invalid_argument("dataset and network disagree on K");
  const bool track = spec.family() == Family::lslr;

  constexpr std::size_t kChunk = 2048;
  std::vector<double> logits;
  std::vector<double> estimates;
  if (track) estimates.reserve(data.size() * static_cast<std::size_t>(k));
  double loss = 0.0;
  std::size_t errors = 0;
  for (std::size_t start = 0; start < data.size(); start += kChunk) {
    const std::size_t rows = std::min(kChunk, data.size() - start);
    net.forward(data.features().data() + start * data.dim(), rows, logits);
    for (std::size_t i = 0; i < rows; ++i) {
      const std::span<const double> g(logits.data() + i * k, k);
      const int y = data.label(start + i);
      loss += multiclass_loss(spec, g, y);
      errors += label_zero_one_from_logits(g, spec) != y;
      if (track) {
        const std::vector<double> q = rlogit_probs(g, *spec.level());
        estimates.insert(estimates.end(), q.begin(), q.end());
      }
    }
  }
  SplitMetrics m;
  m.tsr = loss / static_cast<double>(data.size());
  m.ttr = static_cast<double>(errors) / static_cast<double>(data.size());
  if (track) m.deviation = deviation_metrics(estimates, k, variant);
  return m;
}

NetworkFit fit_network(const Dataset& train, const Dataset* test, const LossSpec& spec, const NetworkArch& arch,
                       const NetworkConfig& cfg, MsorVariant variant) {
  cfg.validate();
  if (train.size() == 0) throw std::invalid_argument("empty training set");
  if (train.dim() != arch.input_dim) throw std::invalid_argument("dataset and network disagree on input dimension");
  if (spec.level() && spec.level()->k() != arch.classes) throw std::invalid_argument("smoothing level has wrong K");

  Network net(arch);
  net.initialize(cfg.seed, cfg.trial);
  RandomStream shuffle_rng(cfg.seed, cfg.trial, StreamRole::minibatch);

  const std::size_t n = train.size();
  const std::size_t d = train.dim();
  const std::size_t p = net.parameter_count();
  std::vector<double> m(p, 0.0), v(p, 0.0), grad(p);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> bx;
  std::vector<int> by;
  double b1t = 1.0, b2t = 1.0;

  NetworkFit result;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[shuffle_rng.below(i)]);
    const double lr = cfg.learning_rate_init * std::pow(cfg.decay_factor, epoch / cfg.decay_every_epochs);
    for (std::size_t start = 0; start < n; start += cfg.batch_size) {
      const std::size_t rows = std::min(cfg.batch_size, n - start);
      bx.resize(rows * d);
      by.resize(rows);
      for (std::size_t r = 0; r < rows; ++r) {
        const auto x = train.row(order[start + r]);
        std::copy(x.begin(), x.end(), bx.begin() + r * d);
        by[r] = train.label(order[start + r]);
      }
      const double loss = net.loss_and_grad(spec, bx.data(), by.data(), rows, grad);
      if (!std::isfinite(loss)) throw NumericalError("non-finite loss during network training");
      b1t *= cfg.adam_beta1;
      b2t *= cfg.adam_beta2;
      auto params = net.parameters();
      for (std::size_t j = 0; j < p; ++j) {
        m[j] = cfg.adam_beta1 * m[j] + (1.0 - cfg.adam_beta1) * grad[j];
        v[j] = cfg.adam_beta2 * v[j] + (1.0 - cfg.adam_beta2) * grad[j] * grad[j];
        params[j] -= lr * (m[j] / (1.0 - b1t)) / (std::sqrt(v[j] / (1.0 - b2t)) + cfg.adam_epsilon);
      }
    }
    EpochRecord rec;
    rec.epoch = epoch + 1;
    rec.train = evaluate_network(net, train, spec, variant);
    if (test) rec.test = evaluate_network(net, *test, spec, variant);
    result.history.push_back(rec);
  }

  const auto params = net.parameters();
  result.fit.beta_hat.assign(params.begin(), params.end());
  result.fit.final_empirical_risk = result.history.back().train.tsr;
  result.fit.converged_epochs = cfg.epochs;
  return result;
}

}  // namespace smoothkl
