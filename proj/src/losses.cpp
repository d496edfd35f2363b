#include "smoothkl/losses.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "smoothkl/errors.hpp"

namespace smoothkl {

std::string to_string(Family family) {
  switch (family) {
    case Family::lr: return "LR";
    case Family::lslr: return "LSLR";
    case Family::mlslr: return "MLSLR";
    case Family::lsqlr: return "LSQLR";
  }
  return "?";
}

Family family_from_string(const std::string& name) {
  std::string upper = name;
  std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
  if (upper == "LR") return Family::lr;
  if (upper == "LSLR") return Family::lslr;
  if (upper == "MLSLR") return Family::mlslr;
  if (upper == "LSQLR") return Family::lsqlr;
  throw std::invalid_argument("unknown loss family '" + name + "'");
}

LossSpec LossSpec::make(Family family, double alpha, int k) {
  switch (family) {
    case Family::lr: return lr();
    case Family::lsqlr: return lsqlr();
    case Family::lslr: return lslr(SmoothingLevel(alpha, k));
    case Family::mlslr: return mlslr(SmoothingLevel(alpha, k));
  }
  throw std::invalid_argument("unknown loss family");
}

std::string LossSpec::name() const {
  return to_string(family_);
}

namespace {

// Pieces shared by every binary loss: sigma(v), sigma(-v) and log(1 + e^{-|v|}).
struct Logistic {
  double pos;
  double neg;
  double log1p_e;
};

Logistic logistic(double v) {
  const double e = std::exp(-std::abs(v));
  const double inv = 1.0 / (1.0 + e);
  if (v >= 0.0) return {inv, e * inv, std::log1p(e)};
  return {e * inv, inv, std::log1p(e)};
}

double binary_alpha(const LossSpec& spec) {
  if (!spec.level()) return 0.0;
  if (spec.level()->k() != 2) throw std::invalid_argument("binary loss needs a K=2 smoothing level");
  return spec.alpha();
}

}  // namespace

LossAndSlope binary_loss_with_grad(const LossSpec& spec, double v) {
  const Logistic s = logistic(v);
  const double softplus_neg = std::max(-v, 0.0) + s.log1p_e;  // -ln sigma(v)
  const double softplus_pos = std::max(v, 0.0) + s.log1p_e;   // -ln sigma(-v)
  double a = binary_alpha(spec);

  switch (spec.family()) {
    case Family::lr:
      return {softplus_neg, -s.neg};
    case Family::lslr: {
      const double w = 1.0 - a / 2.0;
      return {w * softplus_neg + (a / 2.0) * softplus_pos, -w * s.neg + (a / 2.0) * s.pos};
    }
    case Family::mlslr: {
      // For K = 2 the levels a and 2 - a define the same loss.
      if (a > 1.0) a = 2.0 - a;
      if (a == 0.0) return {softplus_neg, -s.neg};
      const double w = 1.0 - a / 2.0;
      const double arg_pos = (1.0 - a) * s.pos + a / 2.0;
      const double arg_neg = (1.0 - a) * s.neg + a / 2.0;
      const double dsig = s.pos * s.neg;
      const double loss = -w * std::log(arg_pos) - (a / 2.0) * std::log(arg_neg);
      const double slope = (1.0 - a) * dsig * (-w / arg_pos + (a / 2.0) / arg_neg);
      return {loss, slope};
    }
    case Family::lsqlr:
      return {0.5 * s.neg * s.neg, -s.pos * s.neg * s.neg};
  }
  return {0.0, 0.0};
}

double binary_loss(const LossSpec& spec, double v) {
  return binary_loss_with_grad(spec, v).loss;
}

double binary_loss_grad(const LossSpec& spec, double v) {
  return binary_loss_with_grad(spec, v).slope;
}

std::vector<double> one_hot(int y, int k) {
  if (y < 0 || y >= k) throw std::out_of_range("class label out of range");
  std::vector<double> t(k, 0.0);
  t[y] = 1.0;
  return t;
}

double multiclass_loss_with_grad(const LossSpec& spec, std::span<const double> v, int y,
                                 std::span<double> grad) {
  const int k = static_cast<int>(v.size());
  if (k < 2) throw std::invalid_argument("multiclass loss needs K >= 2");
  if (y < 0 || y >= k) throw std::out_of_range("class label out of range");
  if (grad.size() != v.size()) throw std::invalid_argument("gradient buffer has wrong size");
  if (spec.level() && spec.level()->k() != k) {
    throw std::invalid_argument("smoothing level K does not match logit dimension");
  }

  const double vmax = *std::max_element(v.begin(), v.end());
  double z = 0.0;
  for (int i = 0; i < k; ++i) z += std::exp(v[i] - vmax);
  const double lse = vmax + std::log(z);
  for (int i = 0; i < k; ++i) grad[i] = std::exp(v[i] - lse);  // softmax, overwritten below

  const double a = spec.alpha();
  switch (spec.family()) {
    case Family::lr:
      grad[y] -= 1.0;
      return lse - v[y];
    case Family::lslr: {
      const SmoothingLevel& level = *spec.level();
      double loss = 0.0;
      for (int i = 0; i < k; ++i) {
        const double target = level.smooth(i == y ? 1.0 : 0.0);
        loss += target * (lse - v[i]);
        grad[i] -= target;
      }
      return loss;
    }
    case Family::mlslr: {
      if (a == 0.0) {
        grad[y] -= 1.0;
        return lse - v[y];
      }
      const SmoothingLevel& level = *spec.level();
      double loss = 0.0;
      double weighted = 0.0;
      std::vector<double> ratio(k);
      for (int i = 0; i < k; ++i) {
        const double target = level.smooth(i == y ? 1.0 : 0.0);
        const double sq = level.smooth(grad[i]);
        if (target == 0.0) {
          ratio[i] = 0.0;
          continue;
        }
        if (!(sq > 0.0)) throw DomainError("MLSLR loss: smoothed probability is not positive");
        loss -= target * std::log(sq);
        ratio[i] = target / sq;
        weighted += ratio[i] * grad[i];
      }
      for (int i = 0; i < k; ++i) grad[i] = -(1.0 - a) * grad[i] * (ratio[i] - weighted);
      return loss;
    }
    case Family::lsqlr: {
      double loss = 0.0;
      double weighted = 0.0;
      for (int i = 0; i < k; ++i) {
        const double r = grad[i] - (i == y ? 1.0 : 0.0);
        loss += r * r;
        weighted += r * grad[i];
      }
      for (int i = 0; i < k; ++i) {
        const double r = grad[i] - (i == y ? 1.0 : 0.0);
        grad[i] = 2.0 * grad[i] * (r - weighted);
      }
      return loss;
    }
  }
  return 0.0;
}

double multiclass_loss(const LossSpec& spec, std::span<const double> v, int y) {
  std::vector<double> grad(v.size());
  return multiclass_loss_with_grad(spec, v, y, grad);
}

std::vector<double> multiclass_loss_grad(const LossSpec& spec, std::span<const double> v, int y) {
  std::vector<double> grad(v.size());
  multiclass_loss_with_grad(spec, v, y, grad);
  return grad;
}

// ---------------------------------------------------------------------------
// rho-transformations

RhoSpec::RhoSpec(Kind kind, double param) : kind_(kind), param_(param) {
  if ((kind == Kind::pregibon || kind == Kind::bianco_yohai || kind == Kind::croux_haesbroeck) &&
      !(param > 0.0 && std::isfinite(param))) {
    throw std::invalid_argument("rho tuning constant c must be positive");
  }
}

RhoSpec RhoSpec::mls(double alpha) {
  SmoothingLevel level(alpha, 2);
  return RhoSpec(Kind::mls, level.alpha());
}

bool RhoSpec::bounded() const {
  switch (kind_) {
    case Kind::pregibon: return false;
    case Kind::mls: return param_ != 0.0 && param_ != 2.0;
    default: return true;
  }
}

std::string RhoSpec::name() const {
  switch (kind_) {
    case Kind::pregibon: return "P";
    case Kind::bianco_yohai: return "BY";
    case Kind::croux_haesbroeck: return "CH";
    case Kind::mls: return "MLS";
    case Kind::lsq: return "LSQ";
  }
  return "?";
}

namespace {

double zeta1_by(double u, double c) {
  return u <= c ? u - u * u / (2.0 * c) : c / 2.0;
}

double zeta2_by(double s, double c) {
  const double ec = std::exp(-c);
  if (!(s >= ec)) return 0.0;
  return s - ec + (ec * (c + 1.0) + s * (std::log(s) - 1.0)) / c;
}

double zeta1_ch(double u, double c) {
  const double rc = std::sqrt(c);
  if (u <= c) return u * std::exp(-rc);
  const double ru = std::sqrt(u);
  return -2.0 * std::exp(-ru) * (1.0 + ru) + std::exp(-rc) * (2.0 * (1.0 + rc) + c);
}

double zeta1_ch_limit(double c) {
  const double rc = std::sqrt(c);
  return std::exp(-rc) * (2.0 * (1.0 + rc) + c);
}

// int_0^s zeta1_ch'(-ln t) dt with zeta1_ch'(w) = exp(-sqrt(max(w, c))).
double eta_ch(double s, double c) {
  if (s <= 0.0) return 0.0;
  const double ec = std::exp(-c);
  const double head_end = std::min(s, ec);
  // int_0^a exp(-sqrt(-ln t)) dt after t = exp(-w^2).
  const double w0 = std::sqrt(-std::log(head_end));
  const double head = std::exp(-w0 * w0 - w0) -
                      std::exp(0.25) * std::sqrt(std::numbers::pi) / 2.0 * std::erfc(w0 + 0.5);
  const double tail = s > ec ? std::exp(-std::sqrt(c)) * (s - ec) : 0.0;
  return head + tail;
}

double rho_mls(double u, double alpha) {
  double a = alpha > 1.0 ? 2.0 - alpha : alpha;
  const double survive = std::exp(-u);
  const double drop = -std::expm1(-u);
  double value = -(1.0 - a / 2.0) * std::log((1.0 - a) * survive + a / 2.0);
  if (a > 0.0) value -= (a / 2.0) * std::log((1.0 - a) * drop + a / 2.0);
  return value;
}

}  // namespace

double rho(const RhoSpec& spec, double u) {
  if (!(u >= 0.0)) throw std::invalid_argument("rho argument must be nonnegative");
  const double c = spec.parameter();
  switch (spec.kind()) {
    case RhoSpec::Kind::pregibon:
      return u <= c ? u : 2.0 * std::sqrt(c * u) - c;
    case RhoSpec::Kind::bianco_yohai:
      return zeta1_by(u, c) + zeta2_by(std::exp(-u), c) + zeta2_by(-std::expm1(-u), c);
    case RhoSpec::Kind::croux_haesbroeck:
      return zeta1_ch(u, c) + eta_ch(std::exp(-u), c) + eta_ch(-std::expm1(-u), c);
    case RhoSpec::Kind::mls:
      return rho_mls(u, c);
    case RhoSpec::Kind::lsq: {
      const double m = std::expm1(-u);
      return 0.5 * m * m;
    }
  }
  return 0.0;
}

double rho_limit(const RhoSpec& spec) {
  if (!spec.bounded()) throw std::invalid_argument("rho-transformation " + spec.name() + " is unbounded");
  const double c = spec.parameter();
  switch (spec.kind()) {
    case RhoSpec::Kind::bianco_yohai:
      return c / 2.0 + zeta2_by(1.0, c);
    case RhoSpec::Kind::croux_haesbroeck:
      return zeta1_ch_limit(c) + eta_ch(1.0, c);
    case RhoSpec::Kind::mls: {
      const double a = c > 1.0 ? 2.0 - c : c;
      return -(1.0 - a / 2.0) * std::log(a / 2.0) - (a / 2.0) * std::log(1.0 - a / 2.0);
    }
    case RhoSpec::Kind::lsq:
      return 0.5;
    case RhoSpec::Kind::pregibon:
      break;
  }
  throw std::invalid_argument("unbounded rho-transformation");
}

double rho_rescaled(const RhoSpec& spec, double u) {
  const double hi = rho_limit(spec);
  const double lo = rho(spec, 0.0);
  return (rho(spec, u) - lo) / (hi - lo);
}

}  // namespace smoothkl
