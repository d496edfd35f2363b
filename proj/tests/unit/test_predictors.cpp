#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "../support/test_support.hpp"
#include "smoothkl/predictors.hpp"
#include "smoothkl/random.hpp"

using namespace smoothkl;

namespace {

// Second implementation of the deviation metrics, written component by component.
DeviationReport brute_force_deviation(const std::vector<std::vector<double>>& estimates, MsorVariant variant) {
  const double n = static_cast<double>(estimates.size());
  const double k = static_cast<double>(estimates.front().size());
  double vectors_out = 0, components_out = 0, residual = 0;
  for (const auto& q : estimates) {
    bool any = false;
    for (double v : q) {
      const bool out = v < -1e-12 || v > 1.0 + 1e-12;
      if (out) {
        any = true;
        components_out += 1;
      }
      const double r = std::abs(v - 0.5) - 0.5;
      if (r > 0) residual += r;
    }
    if (any) vectors_out += 1;
  }
  DeviationReport rep;
  rep.opder = vectors_out / n;
  rep.oper = components_out / (n * k);
  if (variant == MsorVariant::as_printed) {
    rep.msor = rep.oper / (n * k) * residual;
  } else {
    rep.msor = components_out > 0 ? residual / components_out : 0.0;
  }
  return rep;
}

}  // namespace

TEST_CASE("logit probabilities") {
  const std::vector<double> zero(4, 0.0);
  for (double v : logit_probs(zero)) CHECK(v == doctest::Approx(0.25).epsilon(1e-15));
  const auto hot = logit_probs(std::vector<double>{800.0, 0.0});
  CHECK(hot[0] == 1.0);
  CHECK(hot[1] == 0.0);

  RandomStream rng(31, 0);
  for (int i = 0; i < 200; ++i) {
    const int k = 2 + static_cast<int>(rng.below(9));
    auto g = testing::random_normal_vector(rng, k, 4.0);
    const auto p = logit_probs(g);
    CHECK(std::abs(std::accumulate(p.begin(), p.end(), 0.0) - 1.0) <= 1e-14);
    const double shift = 50.0 * rng.normal();
    for (double& v : g) v += shift;
    CHECK(testing::max_abs_diff(p, logit_probs(g)) <= 1e-13);
  }
}

TEST_CASE("R-logit probabilities") {
  const SmoothingLevel level(0.2, 2);
  const auto end = rlogit_probs(std::vector<double>{40.0, 0.0}, level);
  CHECK(end[0] == doctest::Approx(1.125).epsilon(1e-12));
  CHECK(end[1] == doctest::Approx(-0.125).epsilon(1e-12));

  const std::vector<double> zero(5, 0.0);
  for (double v : rlogit_probs(zero, SmoothingLevel(0.7, 5))) CHECK(v == doctest::Approx(0.2).epsilon(1e-14));

  RandomStream rng(32, 0);
  for (int i = 0; i < 200; ++i) {
    const int k = 2 + static_cast<int>(rng.below(9));
    const auto g = testing::random_normal_vector(rng, k, 3.0);
    CHECK(testing::max_abs_diff(rlogit_probs(g, SmoothingLevel(0.0, k)), logit_probs(g)) <= 1e-15);
  }
}

TEST_CASE("cost-sensitive labeling") {
  const TaskLossMatrix cost(2, {0.0, 10.0, 1.0, 0.0});
  const std::vector<double> probs{0.3, 0.7};
  // expected costs: predict 0 -> 10 * 0.7, predict 1 -> 1 * 0.3
  const double c0 = probs[0] * cost(0, 0) + probs[1] * cost(0, 1);
  const double c1 = probs[0] * cost(1, 0) + probs[1] * cost(1, 1);
  CHECK(c0 == doctest::Approx(7.0));
  CHECK(c1 == doctest::Approx(0.3));
  CHECK(label(probs, cost) == 1);
  CHECK(label(std::vector<double>{0.95, 0.05}, cost) == 0);

  const auto zo = TaskLossMatrix::zero_one(4);
  CHECK(label(std::vector<double>{0.25, 0.25, 0.25, 0.25}, zo) == 0);
  CHECK(label(std::vector<double>{0.1, 0.4, 0.4, 0.1}, zo) == 1);
  CHECK_THROWS(TaskLossMatrix(2, {0.0, -1.0, 1.0, 0.0}));
  CHECK_THROWS(TaskLossMatrix(2, {0.0, 1.0, 1.0}));

  RandomStream rng(33, 0);
  for (int i = 0; i < 500; ++i) {
    const int k = 2 + static_cast<int>(rng.below(5));
    std::vector<double> costs(k * k);
    for (double& c : costs) c = 5.0 * rng.uniform();
    const TaskLossMatrix m(k, costs);
    const auto p = rlogit_probs(testing::random_normal_vector(rng, k, 3.0), SmoothingLevel(0.5, k));
    int best = 0;
    double best_cost = INFINITY;
    for (int l = 0; l < k; ++l) {
      double c = 0;
      for (int t = 0; t < k; ++t) c += p[t] * m(l, t);
      if (c < best_cost) {
        best_cost = c;
        best = l;
      }
    }
    CHECK(label(p, m) == best);

    // zero-one labels are unchanged by positive affine maps
    const auto q = testing::random_simplex(rng, k);
    std::vector<double> scaled(q);
    const double a = 0.1 + 10 * rng.uniform(), b = rng.normal();
    for (double& v : scaled) v = a * v + b;
    CHECK(label(scaled, TaskLossMatrix::zero_one(k)) == label(q, TaskLossMatrix::zero_one(k)));
  }
}

TEST_CASE("zero-one labeling from logits") {
  const std::vector<double> g{3.0, 1.0, 2.0};
  CHECK(label_zero_one_from_logits(g, LossSpec::lslr(SmoothingLevel(0.2, 3))) == 0);
  CHECK(label_zero_one_from_logits(g, LossSpec::lr()) == 0);
  CHECK(label_zero_one_from_logits(g, LossSpec::lsqlr()) == 0);

  std::vector<double> g10(10);
  for (int i = 0; i < 10; ++i) g10[i] = std::sin(i + 1.0);
  const SmoothingLevel top(10.0 / 9.0, 10);
  const auto argmax = std::max_element(g10.begin(), g10.end()) - g10.begin();
  const auto argmin = std::min_element(g10.begin(), g10.end()) - g10.begin();
  CHECK(label_zero_one_from_logits(g10, LossSpec::lslr(top)) == argmin);
  CHECK(label_zero_one_from_logits(g10, LossSpec::mlslr(top)) == argmax);
  CHECK(label_zero_one_from_logits(std::vector<double>{1.0, 1.0}, LossSpec::lr()) == 0);
  CHECK(label_zero_one_from_logits(std::vector<double>{1.0, 1.0}, LossSpec::lslr(SmoothingLevel(2.0, 2))) == 0);
}

TEST_CASE("deviation metric examples") {
  const std::vector<std::vector<double>> inside{{0.2, 0.8}, {1.0, 0.0}, {0.5, 0.5}};
  auto rep = deviation_metrics(inside);
  CHECK(rep.opder == 0.0);
  CHECK(rep.oper == 0.0);
  CHECK(rep.msor == 0.0);

  rep = deviation_metrics(std::vector<std::vector<double>>{{1.125, -0.125}});
  CHECK(rep.opder == 1.0);
  CHECK(rep.oper == 1.0);
  CHECK(rep.msor == doctest::Approx(0.125).epsilon(1e-15));

  // float noise at the bounds is not counted
  rep = deviation_metrics(std::vector<std::vector<double>>{{1.0 + 1e-14, -1e-14}});
  CHECK(rep.opder == 0.0);
  CHECK(rep.oper == 0.0);

  CHECK_THROWS(deviation_metrics(std::vector<std::vector<double>>{}));
  CHECK_THROWS(deviation_metrics(std::vector<std::vector<double>>{{0.5, 0.5}, {0.2, 0.3, 0.5}}));
}

TEST_CASE("deviation metrics agree with a brute-force implementation") {
  RandomStream rng(34, 0);
  for (int batch = 0; batch < 1000; ++batch) {
    const int k = 2 + static_cast<int>(rng.below(9));
    const double a = rng.uniform() < 0.5 ? 0.99 * rng.uniform()
                                         : 1.0 + (SmoothingLevel::upper_limit(k) - 1.0) * rng.uniform_open();
    const SmoothingLevel level(a, k);
    const int n = 1 + static_cast<int>(rng.below(20));
    std::vector<std::vector<double>> estimates;
    std::vector<double> flat;
    for (int i = 0; i < n; ++i) {
      estimates.push_back(rlogit_probs(testing::random_normal_vector(rng, k, 4.0), level));
      flat.insert(flat.end(), estimates.back().begin(), estimates.back().end());
    }
    for (auto variant : {MsorVariant::as_printed, MsorVariant::conditional_mean}) {
      const auto got = deviation_metrics(estimates, variant);
      const auto flat_got = deviation_metrics(flat, k, variant);
      const auto want = brute_force_deviation(estimates, variant);
      CHECK(got.opder == want.opder);
      CHECK(got.oper == want.oper);
      CHECK(got.msor == doctest::Approx(want.msor).epsilon(1e-12));
      CHECK(flat_got.opder == got.opder);
      CHECK(flat_got.oper == got.oper);
      CHECK(flat_got.msor == got.msor);
    }
  }
}
