// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails. Usage: acceptance [path-to-smoothkl-cli] [--only N]

#include <Eigen/Dense>
#include <boost/math/tools/minima.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "../support/test_support.hpp"
#include "smoothkl/asymptotics.hpp"
#include "smoothkl/config.hpp"
#include "smoothkl/estimation.hpp"
#include "smoothkl/experiments.hpp"
#include "smoothkl/losses.hpp"
#include "smoothkl/network.hpp"
#include "smoothkl/predictors.hpp"
#include "smoothkl/random.hpp"
#include "smoothkl/smoothing.hpp"
#include "smoothkl/stats.hpp"

using namespace smoothkl;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Tracker {
 public:
  void require(bool ok, const std::string& what) {
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    failed_ = failed_ || !ok;
  }
  Outcome finish(std::string summary) const {
    Outcome out{!failed_, std::move(summary)};
    for (const auto& f : failures_) out.detail += "; " + f;
    return out;
  }

 private:
  bool failed_ = false;
  std::vector<std::string> failures_;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

double random_alpha(RandomStream& rng, int k, bool allow_beyond = true) {
  if (allow_beyond && rng.uniform() < 0.5) {
    return 1.0 + 1e-3 + (SmoothingLevel::upper_limit(k) - 1.0 - 1e-3) * rng.uniform();
  }
  return 0.999 * rng.uniform();
}

std::vector<double> softmax(std::span<const double> g) {
  return logit_probs(g);
}

// ---------------------------------------------------------------------------

Outcome are_table_values() {
  const double expected[9][5] = {
      {.9815, .9627, .9496, .9421, .9396}, {.9043, .8531, .8239, .8085, .8036}, {.7815, .7112, .6749, .6566, .6510},
      {.9604, .9286, .9085, .8972, .8937}, {.8844, .8282, .7969, .7805, .7754}, {.7760, .7051, .6688, .6504, .6447},
      {.8915, .8279, .7916, .7725, .7665}, {.8281, .7605, .7248, .7065, .7009}, {.7605, .6885, .6518, .6334, .6277}};
  const auto cfg = default_config().are_table;
  const auto start = std::chrono::steady_clock::now();
  const auto rows = run_are_table(cfg, 1);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  Tracker t;
  t.require(rows.size() == 45, "expected 45 entries");
  double worst = 0.0;
  for (std::size_t i = 0; i < rows.size() && i < 45; ++i) {
    const double err = std::abs(rows[i].are - expected[i / 5][i % 5]);
    worst = std::max(worst, err);
    t.require(err <= 0.003, "entry " + std::to_string(i) + " off by " + fmt(err));
  }
  t.require(cfg.nodes == 200, "default rule is not 200 nodes");
  t.require(seconds < 60.0, "runtime " + fmt(seconds) + " s");
  return t.finish("45 entries, max |err| " + fmt(worst) + ", " + fmt(seconds) + " s single-threaded");
}

Outcome quadrature_stability() {
  auto cfg = default_config().are_table;
  const auto coarse = run_are_table(cfg, 0);
  cfg.nodes = 400;
  const auto fine = run_are_table(cfg, 0);
  double worst = 0.0;
  for (std::size_t i = 0; i < coarse.size(); ++i) worst = std::max(worst, std::abs(coarse[i].are - fine[i].are));
  Tracker t;
  t.require(worst <= 1e-4, "max change " + fmt(worst));
  return t.finish("max |ARE(200) - ARE(400)| = " + fmt(worst));
}

// Damped Newton on h (h_K = 0) for min KL(a || softmax(h)); returns softmax(h).
std::vector<double> newton_skl_argmin(const std::vector<double>& p, const SmoothingLevel& level) {
  const int k = level.k();
  const std::vector<double> a = smooth(p, level);
  std::vector<double> h(k, 0.0);
  auto objective = [&](const std::vector<double>& hh) {
    return divergence(DivergenceKind::skl(level), p, unsmooth(softmax(hh), level), Check::unchecked);
  };
  double f = objective(h);
  for (int iter = 0; iter < 200; ++iter) {
    const auto pi = softmax(h);
    Eigen::VectorXd grad(k - 1);
    Eigen::MatrixXd hess(k - 1, k - 1);
    for (int j = 0; j < k - 1; ++j) {
      grad(j) = pi[j] - a[j];
      for (int l = 0; l < k - 1; ++l) hess(j, l) = (j == l ? pi[j] : 0.0) - pi[j] * pi[l];
    }
    if (grad.lpNorm<Eigen::Infinity>() < 1e-15) break;
    const Eigen::VectorXd step = hess.ldlt().solve(grad);
    double t = 1.0;
    std::vector<double> trial(h);
    for (int ls = 0; ls < 60; ++ls) {
      for (int j = 0; j < k - 1; ++j) trial[j] = h[j] - t * step(j);
      const double ft = objective(trial);
      if (std::isfinite(ft) && ft <= f) {
        f = ft;
        break;
      }
      t *= 0.5;
    }
    h = trial;
  }
  return softmax(h);
}

Outcome divergence_properties() {
  RandomStream rng(20240101, 0, StreamRole::problem);
  Tracker t;
  const int instances = 1000;
  double b1_worst = 0, b2_worst = 0, b3_worst = 0, b4_slack = INFINITY, b7_worst = 0, b8_worst = 0;

  for (int i = 0; i < instances; ++i) {
    const int k = 2 + static_cast<int>(rng.below(9));
    const SmoothingLevel level(random_alpha(rng, k), k);
    const auto g = testing::random_normal_vector(rng, k, 6.0);
    const auto q = rlogit_probs(g, level);
    const auto range = rlogit_range(level);
    for (double v : q) b1_worst = std::max({b1_worst, range.low - v, v - range.high});
    b2_worst = std::max(b2_worst, std::abs(std::accumulate(q.begin(), q.end(), 0.0) - 1.0));
    t.require(range.low <= 0.0 && range.high >= 1.0 - 1e-12, "R-logit interval does not cover [0, 1]");
  }
  t.require(b1_worst <= 1e-10, "R-logit range violated by " + fmt(b1_worst));
  t.require(b2_worst <= 1e-10, "sum sum off by " + fmt(b2_worst));

  for (int i = 0; i < instances; ++i) {
    const int k = 2 + static_cast<int>(rng.below(9));
    const SmoothingLevel level(random_alpha(rng, k), k);
    const auto p = testing::random_extended(rng, level);
    const auto q = unsmooth(newton_skl_argmin(p, level), level);
    b3_worst = std::max(b3_worst, testing::max_abs_diff(p, q));
    const auto other = testing::random_extended(rng, level);
    const double d = divergence(DivergenceKind::skl(level), p, other);
    t.require(d >= 0.0, "argmin negative divergence");
    t.require(divergence(DivergenceKind::skl(level), p, p) == 0.0, "argmin D(p||p) != 0");
  }
  t.require(b3_worst <= 1e-6, "argmin argmin off by " + fmt(b3_worst));

  for (int i = 0; i < instances; ++i) {
    const int k = 2 + static_cast<int>(rng.below(9));
    const SmoothingLevel level(random_alpha(rng, k), k);
    const auto p1 = testing::random_extended(rng, level), p2 = testing::random_extended(rng, level);
    const auto q1 = testing::random_extended(rng, level), q2 = testing::random_extended(rng, level);
    const double r = rng.uniform();
    std::vector<double> pm(k), qm(k);
    for (int j = 0; j < k; ++j) {
      pm[j] = r * p1[j] + (1 - r) * p2[j];
      qm[j] = r * q1[j] + (1 - r) * q2[j];
    }
    const auto kind = DivergenceKind::skl(level);
    const double slack = r * divergence(kind, p1, q1) + (1 - r) * divergence(kind, p2, q2) - divergence(kind, pm, qm);
    b4_slack = std::min(b4_slack, slack);
  }
  t.require(b4_slack >= -1e-10, "convexity slack " + fmt(b4_slack));

  // logit model: the divergence keeps decreasing along g1 up to 30.
  int b5_cases = 0;
  for (int k : {2, 5, 10}) {
    for (double alpha : {0.0, 0.2, 0.5, 0.8, 1.0 + 0.5 * (SmoothingLevel::upper_limit(k) - 1.0)}) {
      const SmoothingLevel level(alpha, k);
      std::vector<double> e1(k, 0.0);
      e1[0] = 1.0;
      const auto a = smooth(e1, level);
      auto f = [&](double g1) {
        std::vector<double> g(k, 0.0);
        g[0] = g1;
        return divergence(DivergenceKind::skl(level), e1, softmax(g));
      };
      bool decreasing = true, slope_negative = true;
      double prev = f(0.0);
      for (int step = 1; step <= 300; ++step) {
        const double g1 = 0.1 * step;
        const double cur = f(g1);
        decreasing = decreasing && cur <= prev;
        prev = cur;
        // d/dg1 = -(1 - a) q1 qk (K - 1) (a1 / s(q1) - ak / s(qk))
        const double qk = 1.0 / (std::exp(g1) + (k - 1));
        const double q1 = std::exp(g1) * qk;
        const double s1 = (1 - alpha) * q1 + alpha / k, sk = (1 - alpha) * qk + alpha / k;
        const double slope = -(1 - alpha) * q1 * qk * (k - 1) * (a[0] / s1 - a[1] / sk);
        slope_negative = slope_negative && slope < 0.0;
      }
      t.require(decreasing && slope_negative && f(30.0) < f(0.0),
                "logit descent K=" + std::to_string(k) + " a=" + fmt(alpha) + " not decreasing");
      ++b5_cases;
    }
  }

  // R-logit model: interior minimizer ln(K/a + 1 - K).
  double b6_worst = 0.0;
  for (int k : {2, 5, 10}) {
    for (double alpha : {0.2, 0.5, 0.8}) {
      const SmoothingLevel level(alpha, k);
      std::vector<double> e1(k, 0.0);
      e1[0] = 1.0;
      auto f = [&](double g1) {
        std::vector<double> g(k, 0.0);
        g[0] = g1;
        return divergence(DivergenceKind::skl(level), e1, rlogit_probs(g, level));
      };
      const auto [g_star, value] = boost::math::tools::brent_find_minima(f, -30.0, 30.0, 40);
      const double want = std::log(k / alpha + 1.0 - k);
      b6_worst = std::max(b6_worst, std::abs(g_star - want));
      t.require(std::abs(g_star - want) <= 1e-4, "R-logit minimizer K=" + std::to_string(k) + " a=" + fmt(alpha));
    }
    // edges: a = 0 runs off to +inf, a = K/(K-1) to -inf
    const SmoothingLevel top(SmoothingLevel::upper_limit(k), k);
    std::vector<double> e1(k, 0.0);
    e1[0] = 1.0;
    auto f_top = [&](double g1) {
      std::vector<double> g(k, 0.0);
      g[0] = g1;
      return divergence(DivergenceKind::skl(top), e1, rlogit_probs(g, top), Check::unchecked);
    };
    t.require(f_top(-20.0) < f_top(-10.0) && f_top(-10.0) < f_top(0.0),
              "R-logit minimizer top level not decreasing to -inf");
  }

  for (int i = 0; i < instances; ++i) {
    const int k = 2 + static_cast<int>(rng.below(9));
    const SmoothingLevel level(1.0 + (SmoothingLevel::upper_limit(k) - 1.0) * rng.uniform_open(), k);
    const double alpha_dual = k - (k - 1) * level.alpha();
    t.require(alpha_dual >= 0.0 && alpha_dual < 1.0, "mirror dual level outside [0, 1)");
    const SmoothingLevel dual(std::max(0.0, alpha_dual), k);
    const auto p = testing::random_extended(rng, level), q = testing::random_extended(rng, level);
    std::vector<double> pd(k), qd(k);
    for (int j = 0; j < k; ++j) {
      pd[j] = (1 - p[j]) / (k - 1);
      qd[j] = (1 - q[j]) / (k - 1);
    }
    t.require(in_simplex(smooth(pd, dual), 1e-12), "mirror dual point outside the dual domain");
    const double lhs = divergence(DivergenceKind::skl(level), p, q);
    const double rhs = divergence(DivergenceKind::skl(dual), pd, qd);
    b7_worst = std::max(b7_worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
    const auto g = testing::random_normal_vector(rng, k, 3.0);
    const double lhs_rl = divergence(DivergenceKind::skl(level), p, rlogit_probs(g, level));
    const double rhs_rl = divergence(DivergenceKind::skl(dual), pd, rlogit_probs(g, dual));
    b7_worst = std::max(b7_worst, std::abs(lhs_rl - rhs_rl) / std::max(1.0, std::abs(lhs_rl)));
  }
  t.require(b7_worst <= 1e-10, "mirror mismatch " + fmt(b7_worst));

  for (int i = 0; i < instances; ++i) {
    const SmoothingLevel level(1.0 + rng.uniform_open(), 2);
    const SmoothingLevel mirror(2.0 - level.alpha(), 2);
    const auto p = testing::random_extended(rng, level);
    const std::vector<double> flip{1 - p[0], 1 - p[1]};
    const std::vector<double> g{3 * rng.normal(), 3 * rng.normal()};
    const std::vector<double> neg{-g[0], -g[1]};
    const auto skl = [](const SmoothingLevel& l, std::span<const double> x, std::span<const double> y) {
      return divergence(DivergenceKind::skl(l), x, y);
    };
    const double a = skl(level, p, softmax(g));
    const double b = skl(mirror, flip, softmax(neg));
    const double c = skl(mirror, p, softmax(g));
    const double d = skl(level, p, rlogit_probs(g, level));
    const double e = skl(mirror, flip, rlogit_probs(g, mirror));
    const double f = skl(mirror, p, rlogit_probs(neg, mirror));
    b8_worst = std::max({b8_worst, std::abs(a - b), std::abs(a - c), std::abs(d - e), std::abs(d - f)});
    t.require(in_simplex(smooth(flip, mirror), 1e-12), "binary mirror 1 - p outside the mirrored domain");
  }
  t.require(b8_worst <= 1e-10, "binary mirror mismatch " + fmt(b8_worst));

  return t.finish("10^3 instances each; range " + fmt(b1_worst) + ", sum " + fmt(b2_worst) + ", argmin " +
                  fmt(b3_worst) + ", convexity min slack " + fmt(b4_slack) + ", logit descent " +
                  std::to_string(b5_cases) + " cases, R-logit minimizer " + fmt(b6_worst) + ", mirror " +
                  fmt(b7_worst) + ", binary mirror " + fmt(b8_worst));
}

Outcome limit_ratio() {
  RandomStream rng(20240101, 1, StreamRole::problem);
  Tracker t;
  double worst3 = 0.0, worst4 = 0.0;
  for (int k : {2, 10}) {
    for (int i = 0; i < 100; ++i) {
      const auto p = testing::random_simplex(rng, k);
      const auto q = testing::random_simplex(rng, k);
      const double r3 = skl_limit_ratio(p, q, SmoothingLevel(0.999, k));
      const double r4 = skl_limit_ratio(p, q, SmoothingLevel(0.9999, k));
      worst3 = std::max(worst3, std::abs(r3 - 1.0));
      worst4 = std::max(worst4, std::abs(r4 - 1.0));
    }
  }
  t.require(worst3 <= 5e-3, "a = 0.999: max |ratio - 1| = " + fmt(worst3));
  t.require(worst4 <= 5e-4, "a = 0.9999: max |ratio - 1| = " + fmt(worst4));
  return t.finish("K in {2, 10}, 100 pairs each; max |ratio - 1| " + fmt(worst3) + " at 0.999, " + fmt(worst4) +
                  " at 0.9999");
}

Outcome rho_composition() {
  Tracker t;
  double worst = 0.0;
  const int points = 10000;
  for (int i = 0; i < points; ++i) {
    const double v = -40.0 + 80.0 * i / (points - 1);
    const double lr = binary_loss(LossSpec::lr(), v);
    for (double a : {0.2, 0.4, 0.6, 0.8}) {
      const double mls = binary_loss(LossSpec::mlslr(SmoothingLevel(a, 2)), v);
      worst = std::max(worst, std::abs(rho(RhoSpec::mls(a), lr) - mls));
    }
    worst = std::max(worst, std::abs(rho(RhoSpec::lsq(), lr) - binary_loss(LossSpec::lsqlr(), v)));
  }
  t.require(worst <= 1e-12, "max deviation " + fmt(worst));
  return t.finish("10^4-point grid on [-40, 40], a in {0.2, 0.4, 0.6, 0.8} and LSQ; max |diff| " + fmt(worst));
}

Outcome gradient_oracles() {
  Tracker t;
  double binary_worst = 0.0, multi_worst = 0.0, net_worst = 0.0;
  std::vector<LossSpec> binary{LossSpec::lr(), LossSpec::lsqlr()};
  for (double a : {0.2, 0.5, 0.8, 1.3, 2.0}) {
    binary.push_back(LossSpec::lslr(SmoothingLevel(a, 2)));
    binary.push_back(LossSpec::mlslr(SmoothingLevel(a, 2)));
  }
  for (const auto& spec : binary) {
    for (int i = 0; i <= 4000; ++i) {
      const double v = -20.0 + 0.01 * i;
      const double fd = testing::central_difference([&](double x) { return binary_loss(spec, x); }, v, 1e-6);
      binary_worst = std::max(binary_worst, testing::rel_err(binary_loss_grad(spec, v), fd));
    }
  }
  t.require(binary_worst <= 1e-6, "binary rel err " + fmt(binary_worst));

  RandomStream rng(20240101, 2, StreamRole::problem);
  for (int i = 0; i < 100; ++i) {
    const int k = 2 + static_cast<int>(rng.below(9));
    const int y = static_cast<int>(rng.below(k));
    const auto v = testing::random_normal_vector(rng, k, 3.0);
    const double a = random_alpha(rng, k);
    for (const auto& spec :
         {LossSpec::lr(), LossSpec::lslr(SmoothingLevel(a, k)), LossSpec::mlslr(SmoothingLevel(a, k)),
                             LossSpec::lsqlr()}) {
      const auto grad = multiclass_loss_grad(spec, v, y);
      std::vector<double> fd(k);
      for (int j = 0; j < k; ++j) {
        fd[j] = testing::central_difference(
            [&](double x) {
              auto w = v;
              w[j] = x;
              return multiclass_loss(spec, w, y);
            },
            v[j], 1e-6);
      }
      const double rounding =
          std::sqrt(static_cast<double>(k)) * testing::fd_rounding(multiclass_loss(spec, v, y), 1e-6);
      const double err = testing::vector_rel_err(grad, fd);
      const double budget = 1e-6 + rounding / std::max(testing::norm2(fd), 1e-3);
      multi_worst = std::max(multi_worst, err / budget * 1e-6);
      t.require(err <= budget, spec.name() + " multiclass rel err " + fmt(err));
    }
  }

  const NetworkArch toy{1, {2}, 2, Activation::tanh};
  for (int rep = 0; rep < 20; ++rep) {
    Dataset data(1, 2);
    for (int i = 0; i < 8; ++i) {
      const double x = rng.normal();
      data.push_back(std::span<const double>(&x, 1), static_cast<int>(rng.below(2)));
    }
    Network net(toy);
    net.initialize(20240101, rep);
    for (double& b : net.parameters()) b += 0.2 * rng.normal();
    for (const auto& spec :
         {LossSpec::lr(), LossSpec::lslr(SmoothingLevel(0.4, 2)), LossSpec::mlslr(SmoothingLevel(1.6, 2)),
                             LossSpec::lsqlr()}) {
      std::vector<double> grad(net.parameter_count()), scratch(net.parameter_count());
      net.loss_and_grad(spec, data.features().data(), data.labels().data(), data.size(), grad);
      for (std::size_t p = 0; p < grad.size(); ++p) {
        const double fd = testing::central_difference(
            [&](double value) {
              Network copy = net;
              copy.parameters()[p] = value;
              return copy.loss_and_grad(spec, data.features().data(), data.labels().data(), data.size(), scratch);
            },
            net.parameters()[p], 1e-6);
        net_worst = std::max(net_worst, testing::rel_err(grad[p], fd));
      }
    }
  }
  t.require(Network(toy).parameter_count() == 10, "toy network is not 10 parameters");
  t.require(net_worst <= 1e-4, "network rel err " + fmt(net_worst));
  return t.finish("binary max rel err " + fmt(binary_worst) + "; multiclass within budget (worst scaled " +
                  fmt(multi_worst) + "); 10-parameter network " + fmt(net_worst));
}

Outcome consistency() {
  Tracker t;
  double pointwise_worst = 0.0;
  std::vector<LossSpec> specs{LossSpec::lr(), LossSpec::lsqlr()};
  for (double a : {0.2, 0.4, 0.6, 0.8}) {
    specs.push_back(LossSpec::lslr(SmoothingLevel(a, 2)));
    specs.push_back(LossSpec::mlslr(SmoothingLevel(a, 2)));
  }
  for (const auto& spec : specs) {
    for (int i = 1; i < 100; ++i) {
      const double p1 = i / 100.0;
      if (i == 50) continue;
      auto risk = [&](double v) { return p1 * binary_loss(spec, v) + (1 - p1) * binary_loss(spec, -v); };
      const auto [v_star, value] = boost::math::tools::brent_find_minima(risk, -40.0, 40.0, 50);
      const double sig = 1.0 / (1.0 + std::exp(-v_star));
      const double p_hat = spec.family() == Family::lslr ? SmoothingLevel(spec.alpha(), 2).unsmooth(sig) : sig;
      pointwise_worst = std::max(pointwise_worst, std::abs(p_hat - p1));
    }
  }
  t.require(pointwise_worst <= 1e-6, "pointwise recovery off by " + fmt(pointwise_worst));

  const auto measure = CovariateMeasure::intercept_and_normal();
  const TrueParameter truth({1.0, 2.0});
  const auto design = margin_design(sample_nominal(measure, truth, 100000, 20240101, 1));
  OptimizerConfig cfg;
  cfg.seed = 20240101;
  double sob_worst = 0.0;
  std::vector<LossSpec> fitted{LossSpec::lr(), LossSpec::lsqlr()};
  for (double a : {0.2, 0.4, 0.6, 0.8}) fitted.push_back(LossSpec::mlslr(SmoothingLevel(a, 2)));
  for (const auto& spec : fitted) {
    const double sob = eval_sob(fit_linear(design, spec, cfg, truth.values()).beta_hat, truth);
    sob_worst = std::max(sob_worst, sob);
    t.require(sob < 0.05, spec.name() + " SoB " + fmt(sob));
  }
  OptimizerConfig far;
  far.learning_rate_init = 0.05;
  far.epochs = 1500;
  far.decay_every_epochs = 500;
  far.multistart = 1;
  double far_worst = 0.0;
  for (const auto& spec : {LossSpec::lr(), LossSpec::mlslr(SmoothingLevel(0.8, 2)), LossSpec::lsqlr()}) {
    const double sob = eval_sob(fit_linear(design, spec, far, std::vector<double>{0.0, 0.0}).beta_hat, truth);
    far_worst = std::max(far_worst, sob);
    t.require(sob < 0.05, spec.name() + " SoB from origin " + fmt(sob));
  }
  return t.finish("pointwise max |p - p1| " + fmt(pointwise_worst) + "; n = 10^5 max SoB " + fmt(sob_worst) +
                  " (protocol), " + fmt(far_worst) + " (from origin)");
}

Outcome efficiency_ordering() {
  auto cfg = default_config().efficiency;
  cfg.n_grid = {200, 800};
  cfg.trials = 100;
  const auto start = std::chrono::steady_clock::now();
  const auto result = run_efficiency(cfg, 20240101, 0);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  Tracker t;
  std::string means;
  for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
    const auto small = mean_std(result.sob(200, m)).mean;
    const auto large = mean_std(result.sob(800, m)).mean;
    means += (m ? ", " : "") + cfg.methods[m].label() + " " + fmt(large);
    t.require(large < small, cfg.methods[m].label() + " SoB(800) " + fmt(large) + " >= SoB(200) " + fmt(small));
    if (m == 0) continue;
    const auto prev = result.sob(800, m - 1);
    const auto cur = result.sob(800, m);
    // a significant decrease would contradict the ordering
    const double frac = paired_bootstrap_le_fraction(cur, prev, 10000, 20240101 + m);
    t.require(frac < 0.95, cfg.methods[m].label() + " significantly below " + cfg.methods[m - 1].label());
  }
  t.require(seconds < 600.0, "runtime " + fmt(seconds) + " s");
  return t.finish("mean SoB at n=800: " + means + "; " + fmt(seconds) + " s");
}

Outcome robustness_direction() {
  auto cfg = default_config().robustness;
  cfg.beta = {1.0, 4.0};
  cfg.epsilon = 0.05;
  cfg.y_c = {-1};
  cfg.x_c1 = 1.0;
  cfg.x_c2_from = 10.0;
  cfg.x_c2_to = 10.0;
  cfg.trials = 20;
  cfg.methods = parse_methods("LR, MLSLR:0.2, MLSLR:0.4, MLSLR:0.6, MLSLR:0.8");
  const auto result = run_robustness(cfg, 20240101, 0);
  const std::size_t methods = cfg.methods.size();
  std::vector<std::vector<double>> sob(methods), ttr(methods);
  for (const auto& r : result.records) {
    sob[r.method].push_back(r.sob);
    ttr[r.method].push_back(r.ttr);
  }
  Tracker t;
  const double sob_lr = mean_std(sob[0]).mean, sob_08 = mean_std(sob[methods - 1]).mean;
  const double ttr_lr = mean_std(ttr[0]).mean, ttr_08 = mean_std(ttr[methods - 1]).mean;
  t.require(sob_lr > sob_08, "SoB(LR) " + fmt(sob_lr) + " <= SoB(MLSLR 0.8) " + fmt(sob_08));
  t.require(ttr_lr > ttr_08, "TTR(LR) " + fmt(ttr_lr) + " <= TTR(MLSLR 0.8) " + fmt(ttr_08));
  std::string means;
  for (std::size_t m = 0; m < methods; ++m) {
    means += (m ? ", " : "") + fmt(mean_std(sob[m]).mean);
    if (m == 0) continue;
    // a significant increase along a would break the monotone improvement
    const double frac = paired_bootstrap_le_fraction(sob[m - 1], sob[m], 10000, 20240201 + m);
    t.require(frac < 0.95, cfg.methods[m].label() + " significantly worse than " + cfg.methods[m - 1].label());
  }
  return t.finish("20 trials; mean SoB LR..MLSLR0.8: " + means + "; TTR LR " + fmt(ttr_lr) + " vs " + fmt(ttr_08));
}

Outcome deviation_metrics_check() {
  Tracker t;
  RandomStream rng(20240101, 3, StreamRole::problem);
  int mismatches = 0;
  for (int batch = 0; batch < 1000; ++batch) {
    const int k = 2 + static_cast<int>(rng.below(9));
    const SmoothingLevel level(random_alpha(rng, k), k);
    const int n = 1 + static_cast<int>(rng.below(30));
    std::vector<std::vector<double>> est;
    for (int i = 0; i < n; ++i) est.push_back(rlogit_probs(testing::random_normal_vector(rng, k, 4.0), level));
    double vec_out = 0, comp_out = 0, residual = 0;
    for (const auto& q : est) {
      bool any = false;
      for (double v : q) {
        if (v < -1e-12 || v > 1 + 1e-12) {
          any = true;
          comp_out += 1;
        }
        residual += std::max(0.0, std::abs(v - 0.5) - 0.5);
      }
      vec_out += any;
    }
    const double nk = static_cast<double>(n) * k;
    const auto rep = deviation_metrics(est);
    const double msor = comp_out / nk / nk * residual;
    if (std::abs(rep.opder - vec_out / n) > 1e-15 || std::abs(rep.oper - comp_out / nk) > 1e-15 ||
        std::abs(rep.msor - msor) > 1e-12 * std::max(1.0, msor)) {
      ++mismatches;
    }
  }
  t.require(mismatches == 0, std::to_string(mismatches) + " batches disagree");

  auto mc = default_config().multiclass;
  mc.n = 2000;
  mc.test_size = 2000;
  mc.trials = 3;
  mc.network.epochs = 10;
  mc.methods = parse_methods("LSLR:0.2, LSLR:0.4, LSLR:0.6, LSLR:0.8");
  const auto result = run_multiclass(mc, 20240101, 0);
  std::vector<double> opder(mc.methods.size(), 0.0);
  for (const auto& r : result.records) opder[r.method] += r.test.deviation.opder / mc.trials;
  std::string summary;
  for (std::size_t m = 0; m < opder.size(); ++m) {
    summary += (m ? ", " : "") + fmt(opder[m]);
    t.require(opder[m] > 0.0, mc.methods[m].label() + " test OPDER is 0");
  }
  return t.finish("10^3 batches match brute force; reduced multiclass LSLR test OPDER at a=0.2..0.8: " + summary);
}

Outcome cli_determinism(const std::string& cli) {
  Tracker t;
  if (cli.empty() || !std::filesystem::exists(cli)) {
    t.require(false, "CLI binary not found at '" + cli + "'");
    return t.finish("not run");
  }
  const auto dir = std::filesystem::temp_directory_path() / ("smoothkl_accept_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  const auto ini = dir / "small.ini";
  {
    std::ofstream out(ini);
    out << "[efficiency]\nn = 50, 100\ntrials = 4\ntest_size = 500\n"
           "[robustness]\nx_c2_from = -2\nx_c2_to = 2\nx_c2_step = 1\nn = 500\ntest_size = 500\ntrials = 2\n"
           "[multiclass]\nn = 400\ntest_size = 300\ntrials = 2\nepochs = 3\n"
           "methods = LR, LSLR:0.4, MLSLR:0.4, LSLR:10/9, MLSLR:10/9, LSQLR\n";
  }
  const std::vector<std::string> commands{"are-table", "efficiency", "robustness", "multiclass",
                                          "rho-curves", "rlogit-range", "sample", "defaults"};
  int compared = 0;
  for (const auto& cmd : commands) {
    std::vector<std::string> outputs;
    for (const char* threads : {"1", "3", "0"}) {
      const auto path = dir / (cmd + "_" + threads + ".csv");
      const std::string line = "\"" + cli + "\" " + cmd + " --config \"" + ini.string() + "\" --seed 77 --threads " +
                               threads + " --out \"" + path.string() + "\"";
      const int rc = std::system(line.c_str());
      t.require(rc == 0, cmd + " exited with " + std::to_string(rc));
      std::ifstream in(path, std::ios::binary);
      std::stringstream ss;
      ss << in.rdbuf();
      outputs.push_back(ss.str());
    }
    t.require(!outputs[0].empty(), cmd + " produced no output");
    t.require(outputs[0] == outputs[1] && outputs[1] == outputs[2], cmd + " output differs across runs");
    ++compared;
  }
  std::filesystem::remove_all(dir);
  return t.finish(std::to_string(compared) + " commands byte-identical across --threads 1/3/0");
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli;
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--only" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      cli = arg;
    }
  }
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"ARE table reproduction", are_table_values},
      {"quadrature stability", quadrature_stability},
      {"smoothing-divergence property suite", divergence_properties},
      {"limit ratio as a -> 1", limit_ratio},
      {"rho-composition identities", rho_composition},
      {"gradient oracles", gradient_oracles},
      {"consistency", consistency},
      {"efficiency ordering", efficiency_ordering},
      {"robustness direction", robustness_direction},
      {"deviation metrics", deviation_metrics_check},
      {"determinism", [&] { return cli_determinism(cli); }},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only && static_cast<int>(i) + 1 != only) continue;
    Outcome out;
    const auto start = std::chrono::steady_clock::now();
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !out.pass;
    std::printf("%s %2zu %s: %s [%.1f s]\n", out.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                out.detail.c_str(), seconds);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
