#pragma once

// The experiment drivers behind the CLI. Each run_* returns plain records so
// callers can inspect them; each write_* emits the CSV form with a versioned
// header comment.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "smoothkl/config.hpp"
#include "smoothkl/dataset.hpp"
#include "smoothkl/stats.hpp"

namespace smoothkl {

inline constexpr int kCsvVersion = 1;

void write_csv_header(std::ostream& out, const std::string& command, std::uint64_t seed);

// ARE table.
struct AreRow {
  std::vector<double> beta;
  Method method;
  double are = 0.0;
};
std::vector<AreRow> run_are_table(const AreTableConfig& cfg, unsigned threads);
void write_are_table(std::ostream& out, const std::vector<AreRow>& rows, std::uint64_t seed);

// Efficiency sweep over n.
struct EfficiencyTrial {
  std::size_t n = 0;
  int trial = 0;
  std::size_t method = 0;  // index into the config's method list
  double sob = 0.0;
  double ttr = 0.0;
  bool diverged = false;
};
struct EfficiencyResult {
  std::vector<Method> methods;
  std::vector<std::size_t> n_grid;
  int trials = 0;
  std::vector<EfficiencyTrial> records;  // ordered by (n, trial, method)

  // Per-trial values of one metric for (n, method), in trial order.
  std::vector<double> sob(std::size_t n, std::size_t method) const;
  std::vector<double> ttr(std::size_t n, std::size_t method) const;
};
EfficiencyResult run_efficiency(const EfficiencyConfig& cfg, std::uint64_t seed, unsigned threads);
void write_efficiency(std::ostream& out, const EfficiencyResult& result, std::uint64_t seed);

// Point-mass contamination sweep.
struct RobustnessRecord {
  int y_c = 1;
  double x_c2 = 0.0;
  int trial = 0;
  std::size_t method = 0;
  double sob = 0.0;
  double ttr = 0.0;
  bool diverged = false;
};
struct RobustnessResult {
  std::vector<Method> methods;
  int trials = 0;
  std::vector<RobustnessRecord> records;  // ordered by (y_c, x_c2, trial, method)
};
RobustnessResult run_robustness(const RobustnessConfig& cfg, std::uint64_t seed, unsigned threads);
void write_robustness(std::ostream& out, const RobustnessResult& result, std::uint64_t seed);

// Gaussian-cluster K-class problem for the network experiment.
struct ClusterProblem {
  int classes = 0;
  std::size_t dim = 0;
  double cluster_sd = 1.0;
  std::vector<double> means;  // K x d
};
ClusterProblem make_cluster_problem(const MulticlassConfig& cfg, std::uint64_t seed);
Dataset sample_clusters(const ClusterProblem& problem, std::size_t n, std::uint64_t seed, std::uint64_t stream);

struct MulticlassRecord {
  int trial = 0;
  std::size_t method = 0;
  // Metrics at the epoch with the lowest test TSR, except ttr which is taken at
  // the epoch with the lowest test TTR.
  SplitMetrics train;
  SplitMetrics test;
  int epoch_min_tsr = 0;
  int epoch_min_ttr = 0;
};
struct MulticlassComparison {
  double alpha = 0.0;
  double p_tsr = 1.0;  // one-sided rank-sum p-value, H1: MLSLR lower than LSLR
  double p_ttr = 1.0;
};
struct MulticlassResult {
  std::vector<Method> methods;
  int trials = 0;
  std::vector<MulticlassRecord> records;  // ordered by (trial, method)
  std::vector<MulticlassComparison> comparisons;
};
MulticlassResult run_multiclass(const MulticlassConfig& cfg, std::uint64_t seed, unsigned threads);
void write_multiclass(std::ostream& out, const MulticlassResult& result, std::uint64_t seed);

// Rescaled rho curves.
struct RhoCurvePoint {
  std::string rho;
  double parameter = 0.0;
  double u = 0.0;
  double value = 0.0;
};
std::vector<RhoCurvePoint> run_rho_curves(const RhoCurvesConfig& cfg);
void write_rho_curves(std::ostream& out, const std::vector<RhoCurvePoint>& points, std::uint64_t seed);

// R-logit range endpoints against a.
struct RlogitRangePoint {
  int k = 2;
  double alpha = 0.0;
  double low = 0.0;
  double high = 0.0;
};
std::vector<RlogitRangePoint> run_rlogit_range(const RlogitRangeConfig& cfg);
void write_rlogit_range(std::ostream& out, const std::vector<RlogitRangePoint>& points, std::uint64_t seed);

}  // namespace smoothkl
