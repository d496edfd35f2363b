#pragma once

#include <cstdint>
#include <span>

namespace smoothkl {

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample STD (n - 1); 0 for a single value
};

MeanStd mean_std(std::span<const double> values);

// One-sided Wilcoxon rank-sum test of H1: x tends to be smaller than y. Normal
// approximation with tie correction and continuity correction.
double rank_sum_p_less(std::span<const double> x, std::span<const double> y);

// Fraction of paired bootstrap resamples in which mean(x - y) <= 0.
double paired_bootstrap_le_fraction(std::span<const double> x, std::span<const double> y, int resamples,
                                    std::uint64_t seed);

}  // namespace smoothkl
