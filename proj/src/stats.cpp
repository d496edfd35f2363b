#include "smoothkl/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "smoothkl/random.hpp"

namespace smoothkl {

MeanStd mean_std(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("mean of an empty sample");
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0))};
}

double rank_sum_p_less(std::span<const double> x, std::span<const double> y) {
  if (x.empty() || y.empty()) throw std::invalid_argument("rank-sum test needs two nonempty samples");
  const std::size_t n1 = x.size();
  const std::size_t n2 = y.size();
  const std::size_t n = n1 + n2;

  std::vector<std::pair<double, int>> pooled;
  pooled.reserve(n);
  for (double v : x) pooled.emplace_back(v, 0);
  for (double v : y) pooled.emplace_back(v, 1);
  std::sort(pooled.begin(), pooled.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  double rank_sum_x = 0.0;
  double tie_term = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && pooled[j].first == pooled[i].first) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t t = i; t < j; ++t) {
      if (pooled[t].second == 0) rank_sum_x += avg_rank;
    }
    const double ties = static_cast<double>(j - i);
    tie_term += ties * ties * ties - ties;
    i = j;
  }

  const double dn1 = static_cast<double>(n1);
  const double dn2 = static_cast<double>(n2);
  const double dn = static_cast<double>(n);
  const double u = rank_sum_x - dn1 * (dn1 + 1.0) / 2.0;
  const double mu = dn1 * dn2 / 2.0;
  const double var = dn1 * dn2 / 12.0 * ((dn + 1.0) - tie_term / (dn * (dn - 1.0)));
  if (var <= 0.0) return 1.0;
  const double z = (u - mu + 0.5) / std::sqrt(var);
  return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

double paired_bootstrap_le_fraction(std::span<const double> x, std::span<const double> y, int resamples,
                                    std::uint64_t seed) {
  if (x.size() != y.size() || x.empty()) throw std::invalid_argument("paired bootstrap needs equal nonempty samples");
  if (resamples < 1) throw std::invalid_argument("resamples must be positive");
  RandomStream rng(seed, 0, StreamRole::resample);
  const std::size_t n = x.size();
  int hits = 0;
  for (int r = 0; r < resamples; ++r) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = rng.below(n);
      s += x[j] - y[j];
    }
    hits += s <= 0.0;
  }
  return static_cast<double>(hits) / resamples;
}

}  // namespace smoothkl
