#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "smoothkl/asymptotics.hpp"

namespace smoothkl {

// Rows of (x in R^d, y in {0, ..., K-1}). Binary data use class 0 for y = +1
// and class 1 for y = -1. The CSV form writes labels 1-based.
class Dataset {
 public:
  Dataset(std::size_t d, int k);
  Dataset(std::size_t d, int k, std::vector<double> x, std::vector<int> y);

  std::size_t size() const { return y_.size(); }
  std::size_t dim() const { return d_; }
  int classes() const { return k_; }

  std::span<const double> row(std::size_t i) const { return {x_.data() + i * d_, d_}; }
  int label(std::size_t i) const { return y_[i]; }
  const std::vector<double>& features() const { return x_; }
  const std::vector<int>& labels() const { return y_; }

  void push_back(std::span<const double> x, int y);

  bool operator==(const Dataset&) const = default;

 private:
  std::size_t d_;
  int k_;
  std::vector<double> x_;
  std::vector<int> y_;
};

inline double binary_sign(int label) { return label == 0 ? 1.0 : -1.0; }
inline int binary_label(double sign) { return sign > 0.0 ? 0 : 1; }

// Column-major copy of a binary dataset with +-1 signs, the layout the margin
// kernels consume.
struct MarginDesign {
  std::size_t n = 0;
  std::size_t d = 0;
  std::vector<double> columns;  // d blocks of n values
  std::vector<double> signs;
};

MarginDesign margin_design(const Dataset& data);

class ContaminationSpec {
 public:
  ContaminationSpec(double epsilon, std::vector<double> x_c, int y_c);
  double epsilon() const { return epsilon_; }
  const std::vector<double>& x() const { return x_c_; }
  int y() const { return y_c_; }

 private:
  double epsilon_;
  std::vector<double> x_c_;
  int y_c_;
};

// y = +1 with probability 1 / (1 + exp(-beta^T x)), x drawn from the measure.
Dataset sample_nominal(const CovariateMeasure& measure, const TrueParameter& beta, std::size_t n,
                       std::uint64_t seed, std::uint64_t stream = 0);

// Each row is nominal with probability 1 - eps, otherwise exactly (x_c, y_c). The
// nominal rows follow the same draw sequence as sample_nominal.
Dataset sample_contaminated(const CovariateMeasure& measure, const TrueParameter& beta,
                            const ContaminationSpec& spec, std::size_t n, std::uint64_t seed,
                            std::uint64_t stream = 0);

// Header x1,...,xd,y; shortest round-trip decimals; y 1-based.
void write_csv(std::ostream& out, const Dataset& data);
Dataset read_csv(std::istream& in, int k = 0);

}  // namespace smoothkl
