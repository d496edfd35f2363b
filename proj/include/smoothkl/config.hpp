#pragma once

// Experiment configuration: an INI file with one section per command. Every key
// has a default, so an empty file (or none) is a valid configuration.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "smoothkl/estimation.hpp"
#include "smoothkl/losses.hpp"
#include "smoothkl/network.hpp"
#include "smoothkl/predictors.hpp"

namespace smoothkl {

struct Method {
  Family family = Family::lr;
  double alpha = 0.0;

  LossSpec spec(int k) const { return LossSpec::make(family, alpha, k); }
  std::string label() const;
};

// "LR", "MLSLR:0.2", "LSLR:10/9".
Method parse_method(const std::string& text);
std::vector<Method> parse_methods(const std::string& text);

struct AreTableConfig {
  std::vector<std::vector<double>> betas;
  std::vector<Method> methods;
  int nodes = 200;
};

struct EfficiencyConfig {
  std::vector<double> beta;
  std::vector<std::size_t> n_grid;
  std::size_t test_size = 10000;
  int trials = 100;
  std::vector<Method> methods;
  OptimizerConfig optimizer;
};

struct RobustnessConfig {
  std::vector<double> beta;
  double epsilon = 0.05;
  double x_c1 = 1.0;
  double x_c2_from = -10.0;
  double x_c2_to = 10.0;
  double x_c2_step = 0.1;
  std::vector<int> y_c;  // +1 / -1
  std::size_t n = 10000;
  std::size_t test_size = 10000;
  int trials = 1;
  std::vector<Method> methods;
  OptimizerConfig optimizer;

  std::vector<double> x_c2_grid() const;
};

struct MulticlassConfig {
  int classes = 10;
  std::size_t dim = 20;
  std::size_t n = 10000;
  std::size_t test_size = 10000;
  int trials = 20;
  double separation = 1.0;
  double cluster_sd = 1.3;
  std::vector<std::size_t> hidden;
  Activation activation = Activation::relu;
  std::vector<Method> methods;
  NetworkConfig network;
  MsorVariant msor_variant = MsorVariant::as_printed;
};

struct RhoCurvesConfig {
  double c = 0.5;
  std::vector<double> alphas;
  double u_max = 10.0;
  double u_step = 0.01;
};

struct RlogitRangeConfig {
  std::vector<int> classes;
  int points = 100;  // per side of a = 1
};

struct ExperimentConfig {
  std::uint64_t seed = 20240101;
  unsigned threads = 0;
  AreTableConfig are_table;
  EfficiencyConfig efficiency;
  RobustnessConfig robustness;
  MulticlassConfig multiclass;
  RhoCurvesConfig rho_curves;
  RlogitRangeConfig rlogit_range;
};

// The embedded defaults as INI text.
const std::string& default_config_text();

ExperimentConfig default_config();
// Overlays the keys present in the stream on the defaults. Throws ConfigError on
// unknown sections or keys and on invalid values.
ExperimentConfig load_config(std::istream& in);
ExperimentConfig load_config_file(const std::string& path);

}  // namespace smoothkl
