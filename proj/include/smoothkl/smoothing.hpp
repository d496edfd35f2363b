#pragma once

// Smoothing map s_a(v) = (1 - a) v + a / K, its inverse, and the divergences
// built on top of it (KL, smoothed KL, squared distance).

#include <optional>
#include <span>
#include <vector>

namespace smoothkl {

inline constexpr double kSumTolerance = 1e-10;
inline constexpr double kComponentTolerance = 1e-12;

// Validated smoothing level a together with the class count K.
// Admissible levels are [0, 1) and (1, K / (K - 1)].
class SmoothingLevel {
 public:
  SmoothingLevel(double alpha, int k);

  double alpha() const { return alpha_; }
  int k() const { return k_; }

  // Largest admissible level K / (K - 1).
  static double upper_limit(int k) { return static_cast<double>(k) / (k - 1); }

  // a > 1: the smoothed target puts less mass on the observed class.
  bool beyond_one() const { return alpha_ > 1.0; }

  // Level K - (K - 1) a in [0, 1) paired with a level in (1, K / (K - 1)].
  SmoothingLevel mirrored() const;

  double smooth(double v) const { return (1.0 - alpha_) * v + alpha_ / k_; }
  double unsmooth(double v) const { return (v - alpha_ / k_) / (1.0 - alpha_); }

 private:
  double alpha_;
  int k_;
};

std::vector<double> smooth(std::span<const double> p, const SmoothingLevel& level);
std::vector<double> unsmooth(std::span<const double> q, const SmoothingLevel& level);

bool in_simplex(std::span<const double> p, double component_tol = kComponentTolerance,
                double sum_tol = kSumTolerance);

// Probability vector on the simplex; construction validates.
class SimplexVector {
 public:
  explicit SimplexVector(std::vector<double> p);
  std::span<const double> values() const { return p_; }
  std::size_t size() const { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }

 private:
  std::vector<double> p_;
};

// Image of the simplex under the inverse smoothing map: sums to one, components
// may leave [0, 1] but stay within rlogit_range(level).
class ExtendedProbVector {
 public:
  ExtendedProbVector(std::vector<double> q, const SmoothingLevel& level);
  std::span<const double> values() const { return q_; }
  std::size_t size() const { return q_.size(); }
  double operator[](std::size_t i) const { return q_[i]; }

 private:
  std::vector<double> q_;
};

class DivergenceKind {
 public:
  enum class Tag { kl, skl, sq };

  static DivergenceKind kl() { return DivergenceKind(Tag::kl, std::nullopt); }
  static DivergenceKind skl(const SmoothingLevel& level) { return DivergenceKind(Tag::skl, level); }
  static DivergenceKind sq() { return DivergenceKind(Tag::sq, std::nullopt); }

  Tag tag() const { return tag_; }
  const SmoothingLevel& level() const { return *level_; }

 private:
  DivergenceKind(Tag tag, std::optional<SmoothingLevel> level) : tag_(tag), level_(level) {}
  Tag tag_;
  std::optional<SmoothingLevel> level_;
};

enum class Check { checked, unchecked };

// 0 ln 0 is taken as 0. With Check::checked the arguments are validated against the
// divergence's domain and a DomainError is thrown instead of returning NaN/inf.
double divergence(const DivergenceKind& kind, std::span<const double> p, std::span<const double> q,
                  Check check = Check::checked);

struct RangeEnds {
  double low;
  double high;
};

// Interval reachable by a single R-logit component, endpoints -a/(K(1-a)) and
// (K-a)/(K(1-a)) returned in ascending order.
RangeEnds rlogit_range(const SmoothingLevel& level);

struct RegularizationTerms {
  double kl_term;       // (1 - a) KL(p || q)
  double uniform_term;  // a KL(1/K || q)
  double residual;      // remainder, independent of q
};

RegularizationTerms regularization_decomposition(const SimplexVector& p, const SimplexVector& q,
                                                 const SmoothingLevel& level);

// 2a / ((1-a)^2 K) * SKL_a(p || q) / ||p - q||^2, which tends to 1 as a -> 1.
double skl_limit_ratio(std::span<const double> p, std::span<const double> q,
                       const SmoothingLevel& level);

}  // namespace smoothkl
