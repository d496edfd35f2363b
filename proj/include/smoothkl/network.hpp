#pragma once

// Small dense softmax network trained with mini-batch Adam under a multiclass
// surrogate loss, with per-epoch evaluation on the training and test sets.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "smoothkl/dataset.hpp"
#include "smoothkl/estimation.hpp"
#include "smoothkl/losses.hpp"
#include "smoothkl/predictors.hpp"

namespace smoothkl {

enum class Activation { relu, tanh, identity };

std::string to_string(Activation act);
Activation activation_from_string(const std::string& name);

struct NetworkArch {
  std::size_t input_dim = 0;
  std::vector<std::size_t> hidden;  // empty: softmax regression
  int classes = 2;
  Activation activation = Activation::relu;

  void validate() const;
};

class Network {
 public:
  explicit Network(NetworkArch arch);

  const NetworkArch& arch() const { return arch_; }
  std::size_t layer_count() const { return in_.size(); }
  std::size_t parameter_count() const { return params_.size(); }
  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }

  std::span<double> weights(std::size_t layer) { return {params_.data() + w_off_[layer], out_[layer] * in_[layer]}; }
  std::span<double> biases(std::size_t layer) { return {params_.data() + b_off_[layer], out_[layer]}; }

  // Scaled normal weights, zero biases.
  void initialize(std::uint64_t seed, std::uint64_t trial);

  // logits: n x K row-major.
  void forward(const double* x, std::size_t n, std::vector<double>& logits) const;

  // Mean surrogate loss over the rows and its gradient (size parameter_count).
  double loss_and_grad(const LossSpec& spec, const double* x, const int* y, std::size_t n,
                       std::span<double> grad) const;

 private:
  void forward_cached(const double* x, std::size_t n, std::vector<std::vector<double>>& pre,
                      std::vector<std::vector<double>>& post) const;

  NetworkArch arch_;
  std::vector<std::size_t> in_, out_, w_off_, b_off_;
  std::vector<double> params_;
};

struct NetworkConfig {
  double learning_rate_init = 1e-3;
  double decay_factor = 0.31622776601683794;
  int decay_every_epochs = 10;
  int epochs = 30;
  std::size_t batch_size = 128;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;

  void validate() const;
};

struct SplitMetrics {
  double tsr = 0.0;
  double ttr = 0.0;
  DeviationReport deviation;  // R-logit estimates; zero unless the loss is LSLR
};

struct EpochRecord {
  int epoch = 0;
  SplitMetrics train;
  SplitMetrics test;
};

struct NetworkFit {
  FitResult fit;  // beta_hat holds the flattened final parameters
  std::vector<EpochRecord> history;
};

SplitMetrics evaluate_network(const Network& net, const Dataset& data, const LossSpec& spec,
                              MsorVariant variant = MsorVariant::as_printed);

// test may be null; then only training metrics are recorded.
NetworkFit fit_network(const Dataset& train, const Dataset* test, const LossSpec& spec, const NetworkArch& arch,
                       const NetworkConfig& cfg, MsorVariant variant = MsorVariant::as_printed);

}  // namespace smoothkl
