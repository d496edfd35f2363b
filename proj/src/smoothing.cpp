#include "smoothkl/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "smoothkl/errors.hpp"

namespace smoothkl {

namespace {

void require_same_size(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    throw std::invalid_argument("dimension mismatch: " + std::to_string(p.size()) + " vs " +
                                std::to_string(q.size()));
  }
}

void require_dimension(std::span<const double> p, const SmoothingLevel& level) {
  if (p.size() != static_cast<std::size_t>(level.k())) {
    throw std::invalid_argument("vector has " + std::to_string(p.size()) +
                                " components, smoothing level expects K=" +
                                std::to_string(level.k()));
  }
}

// sum_k p_k ln(p_k / q_k) for p, q summing to one, written as
// sum_k q_k [(1 + r) log1p(r) - r] with r = (p_k - q_k) / q_k. Every term is
// nonnegative and second order in r, so near p = q nothing cancels. The
// difference is supplied separately so callers can pass it without cancellation.
double relative_entropy(std::span<const double> p, std::span<const double> q,
                        std::span<const double> diff) {
  double total = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    // components rounded to just below zero (e.g. s_a(1) at a = K / (K - 1)) carry no mass
    if (p[k] <= 0.0) {
      total += q[k];
      continue;
    }
    const double r = diff[k] / q[k];
    total += q[k] * ((1.0 + r) * std::log1p(r) - r);
  }
  return total;
}

void check_positive_support(std::span<const double> p, std::span<const double> q,
                            const char* what) {
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] > 0.0 && !(q[k] > 0.0)) {
      std::ostringstream msg;
      msg << what << ": second argument component " << k << " = " << q[k]
          << " is not positive where the first is " << p[k];
      throw DomainError(msg.str());
    }
  }
}

}  // namespace

SmoothingLevel::SmoothingLevel(double alpha, int k) : alpha_(alpha), k_(k) {
  if (k < 2) throw std::invalid_argument("class count must be at least 2");
  if (!std::isfinite(alpha) || alpha < 0.0 || alpha == 1.0 || alpha > upper_limit(k)) {
    std::ostringstream msg;
    msg << "smoothing level " << alpha << " outside [0,1) U (1," << upper_limit(k)
        << "] for K=" << k;
    throw std::invalid_argument(msg.str());
  }
}

SmoothingLevel SmoothingLevel::mirrored() const {
  if (!beyond_one()) throw std::invalid_argument("mirrored level needs a > 1");
  // Clamp the rounding residue at a = K/(K-1).
  double m = k_ - (k_ - 1) * alpha_;
  return SmoothingLevel(std::max(m, 0.0), k_);
}

std::vector<double> smooth(std::span<const double> p, const SmoothingLevel& level) {
  require_dimension(p, level);
  std::vector<double> out(p.size());
  std::transform(p.begin(), p.end(), out.begin(), [&](double v) { return level.smooth(v); });
  return out;
}

std::vector<double> unsmooth(std::span<const double> q, const SmoothingLevel& level) {
  require_dimension(q, level);
  std::vector<double> out(q.size());
  std::transform(q.begin(), q.end(), out.begin(), [&](double v) { return level.unsmooth(v); });
  return out;
}

bool in_simplex(std::span<const double> p, double component_tol, double sum_tol) {
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= -component_tol && v <= 1.0 + component_tol)) return false;
    sum += v;
  }
  return std::abs(sum - 1.0) <= sum_tol;
}

SimplexVector::SimplexVector(std::vector<double> p) : p_(std::move(p)) {
  if (p_.size() < 2 || !in_simplex(p_)) {
    throw std::invalid_argument("vector is not on the probability simplex");
  }
}

ExtendedProbVector::ExtendedProbVector(std::vector<double> q, const SmoothingLevel& level)
    : q_(std::move(q)) {
  require_dimension(q_, level);
  const RangeEnds r = rlogit_range(level);
  double sum = 0.0;
  for (double v : q_) {
    if (!(v >= r.low - kSumTolerance && v <= r.high + kSumTolerance)) {
      throw std::invalid_argument("component outside the R-logit range");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw std::invalid_argument("extended probability vector does not sum to one");
  }
}

double divergence(const DivergenceKind& kind, std::span<const double> p, std::span<const double> q,
                  Check check) {
  require_same_size(p, q);
  const std::size_t k = p.size();
  std::vector<double> diff(k);
  for (std::size_t i = 0; i < k; ++i) diff[i] = p[i] - q[i];

  switch (kind.tag()) {
    case DivergenceKind::Tag::sq: {
      double total = 0.0;
      for (double d : diff) total += d * d;
      return total;
    }
    case DivergenceKind::Tag::kl: {
      if (check == Check::checked) {
        if (!in_simplex(p) || !in_simplex(q)) throw DomainError("KL: arguments must lie on the simplex");
        check_positive_support(p, q, "KL");
      }
      return relative_entropy(p, q, diff);
    }
    case DivergenceKind::Tag::skl: {
      const SmoothingLevel& level = kind.level();
      require_dimension(p, level);
      const std::vector<double> sp = smooth(p, level);
      const std::vector<double> sq = smooth(q, level);
      if (check == Check::checked) {
        if (!in_simplex(sp) || !in_simplex(sq)) {
          throw DomainError("SKL: arguments must lie in the inverse-smoothed simplex");
        }
        check_positive_support(sp, sq, "SKL");
      }
      // s(p) - s(q) = (1 - a)(p - q), kept exact instead of differencing s(p), s(q).
      for (double& d : diff) d *= (1.0 - level.alpha());
      return relative_entropy(sp, sq, diff);
    }
  }
  return 0.0;
}

RangeEnds rlogit_range(const SmoothingLevel& level) {
  const double a = level.alpha();
  const double k = level.k();
  const double neg_end = -a / (k * (1.0 - a));
  const double pos_end = (k - a) / (k * (1.0 - a));
  return {std::min(neg_end, pos_end), std::max(neg_end, pos_end)};
}

RegularizationTerms regularization_decomposition(const SimplexVector& p, const SimplexVector& q,
                                                 const SmoothingLevel& level) {
  if (level.beyond_one()) throw std::invalid_argument("decomposition requires a in [0,1)");
  require_dimension(p.values(), level);
  require_dimension(q.values(), level);
  const double a = level.alpha();
  const std::vector<double> uniform(level.k(), 1.0 / level.k());
  const std::vector<double> sp = smooth(p.values(), level);

  const auto kl = DivergenceKind::kl();
  const double total = divergence(kl, sp, q.values());
  const double kl_term = (1.0 - a) * divergence(kl, p.values(), q.values());
  const double uniform_term = a == 0.0 ? 0.0 : a * divergence(kl, uniform, q.values());
  return {kl_term, uniform_term, total - kl_term - uniform_term};
}

double skl_limit_ratio(std::span<const double> p, std::span<const double> q,
                       const SmoothingLevel& level) {
  require_same_size(p, q);
  const double a = level.alpha();
  if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("limit ratio requires a in (0,1)");
  const double dist2 = divergence(DivergenceKind::sq(), p, q);
  if (dist2 == 0.0) throw DomainError("limit ratio undefined for p = q");
  const double d = divergence(DivergenceKind::skl(level), p, q);
  return 2.0 * a / ((1.0 - a) * (1.0 - a) * level.k()) * d / dist2;
}

}  // namespace smoothkl
