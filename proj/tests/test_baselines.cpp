#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "decgd/baselines.hpp"

using decgd::NonFiniteError;
using decgd::baselines::Baseline;
using decgd::baselines::Hyper;
using decgd::baselines::Kind;

TEST_CASE("the first momentum step is plain gradient descent") {
  Hyper hp;
  hp.lr = 0.1;
  Baseline opt(Kind::Sgdm, hp);
  opt.reset(1);
  const auto x2 = opt.step({0.0}, {1.0});
  CHECK(opt.m()[0] == 1.0);
  CHECK(x2[0] == -0.1);

  // Second step accumulates: m = 0.9 * 1 + 1 = 1.9.
  const auto x3 = opt.step(x2, {1.0});
  CHECK(opt.m()[0] == 0.9 * 1.0 + 1.0);
  CHECK(x3[0] == x2[0] - 0.1 * 1.9);
}

TEST_CASE("adam's first bias-corrected step has magnitude close to lr") {
  Hyper hp; // lr = 0.01
  Baseline opt(Kind::Adam, hp);
  opt.reset(1);
  const auto x2 = opt.step({0.0}, {0.3});
  CHECK(std::abs(x2[0] - (-0.01)) < 1e-6);

  Baseline neg(Kind::Adam, hp);
  neg.reset(1);
  const auto y2 = neg.step({0.0}, {-4.0});
  CHECK(std::abs(y2[0] - 0.01) < 1e-6);
}

TEST_CASE("the max accumulator holds its peak when the second moment drops") {
  Hyper hp;
  hp.beta2 = 0.5;
  Baseline opt(Kind::AmsGrad, hp);
  opt.reset(1);
  auto x = opt.step({1.0}, {3.0});
  CHECK(opt.s()[0] == 0.5 * 9.0);
  CHECK(opt.s_max()[0] == 4.5);
  x = opt.step(x, {1.0});
  CHECK(opt.s()[0] == 0.5 * 4.5 + 0.5 * 1.0); // 2.75, decreased
  CHECK(opt.s_max()[0] == 4.5);               // peak retained
}

TEST_CASE("adam and its rectified variant agree while s is non-decreasing") {
  Hyper hp;
  Baseline adam(Kind::Adam, hp), ams(Kind::AmsGrad, hp);
  adam.reset(1);
  ams.reset(1);
  std::vector<double> xa = {0.5}, xb = {0.5};
  for (double g : {1.0, 2.0, 3.0}) {
    xa = adam.step(xa, {g});
    xb = ams.step(xb, {g});
    REQUIRE(xa == xb);
  }
  CHECK(adam.s() == ams.s());
}

TEST_CASE("second-moment invariants under random gradients") {
  Hyper hp;
  Baseline opt(Kind::AmsGrad, hp);
  opt.reset(3);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> gauss(0.0, 2.0);
  std::vector<double> x = {1.0, -1.0, 0.5};
  std::vector<double> prev_max = opt.s_max();
  bool s_nonneg = true, max_monotone = true;
  for (int t = 0; t < 500; ++t) {
    std::vector<double> g(3);
    for (double &gi : g)
      gi = gauss(rng);
    x = opt.step(x, g);
    for (std::size_t i = 0; i < 3; ++i) {
      s_nonneg = s_nonneg && opt.s()[i] >= 0.0;
      max_monotone = max_monotone && opt.s_max()[i] >= prev_max[i];
    }
    prev_max = opt.s_max();
  }
  CHECK(s_nonneg);
  CHECK(max_monotone);
}

TEST_CASE("every baseline reduces a 1-d convex quadratic") {
  for (Kind kind :
       {Kind::Sgdm, Kind::Adam, Kind::AmsGrad, Kind::AdaBelief}) {
    Baseline opt(kind, Hyper{}); // lr = 0.01
    opt.reset(1);
    double x = 1.0;
    const double initial = 0.5 * x * x;
    for (int t = 0; t < 1000; ++t)
      x = opt.step({x}, {x})[0]; // f = x^2 / 2, grad = x
    CHECK(0.5 * x * x < initial);
  }
}

TEST_CASE("belief variant's first step matches the hand formula") {
  Hyper hp;
  Baseline opt(Kind::AdaBelief, hp);
  opt.reset(1);
  const double g = 0.5, x = 2.0;
  const auto x2 = opt.step({x}, {g});

  const double m = (1.0 - hp.beta1) * g;
  const double diff = g - m;
  const double s = (1.0 - hp.beta2) * (diff * diff) + hp.eps;
  const double m_hat = m / (1.0 - hp.beta1);
  const double s_hat = s / (1.0 - hp.beta2);
  const double expect = x - hp.lr * m_hat / (std::sqrt(s_hat) + hp.eps);
  CHECK(std::abs(x2[0] - expect) <= 1e-15);
  CHECK(opt.s()[0] > 0.0);
}

TEST_CASE("effective learning rate reconstruction") {
  Hyper hp;
  Baseline sgdm(Kind::Sgdm, hp);
  sgdm.reset(2);
  CHECK(sgdm.effective_learning_rate() == std::vector<double>{0.01, 0.01});

  Baseline adam(Kind::Adam, hp);
  adam.reset(1);
  CHECK(adam.effective_learning_rate()[0] == hp.lr); // before any step
  adam.step({1.0}, {2.0});
  adam.step({1.0}, {-1.0});
  const double bc2 = 1.0 - std::pow(hp.beta2, 2.0);
  const double expect = hp.lr / (std::sqrt(adam.s()[0] / bc2) + hp.eps);
  CHECK(adam.effective_learning_rate()[0] == expect);

  Baseline ams(Kind::AmsGrad, hp);
  ams.reset(1);
  ams.step({1.0}, {3.0});
  ams.step({1.0}, {0.1});
  const double bc2b = 1.0 - std::pow(hp.beta2, 2.0);
  const double expect_b =
      hp.lr / (std::sqrt(ams.s_max()[0] / bc2b) + hp.eps);
  CHECK(ams.effective_learning_rate()[0] == expect_b);
}

TEST_CASE("hyperparameter validation") {
  Hyper hp;
  hp.lr = 0.0;
  CHECK_THROWS_AS(Baseline(Kind::Adam, hp), std::invalid_argument);
  hp = Hyper{};
  hp.beta1 = 1.0;
  CHECK_THROWS_AS(Baseline(Kind::Adam, hp), std::invalid_argument);
  hp = Hyper{};
  hp.beta2 = -0.1;
  CHECK_THROWS_AS(Baseline(Kind::Adam, hp), std::invalid_argument);
  hp = Hyper{};
  hp.eps = 0.0;
  CHECK_THROWS_AS(Baseline(Kind::Adam, hp), std::invalid_argument);
}

TEST_CASE("structural and numeric failure modes") {
  Baseline opt(Kind::Adam, Hyper{});
  CHECK_THROWS_AS(opt.step({1.0}, {1.0}), std::logic_error);
  CHECK_THROWS_AS(opt.reset(0), std::invalid_argument);

  opt.reset(2);
  CHECK_THROWS_AS(opt.step({1.0}, {1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(opt.step({1.0, 2.0}, {1.0}), std::invalid_argument);

  const double nan = std::numeric_limits<double>::quiet_NaN();
  try {
    opt.step({1.0, 1.0}, {1.0, nan});
    FAIL("expected NonFiniteError");
  } catch (const NonFiniteError &e) {
    CHECK(e.stage() == "gradient");
    CHECK(e.coordinate() == 1);
  }

  Hyper huge;
  huge.lr = 1e308;
  Baseline sgdm(Kind::Sgdm, huge);
  sgdm.reset(1);
  try {
    sgdm.step({1.0}, {1e10});
    FAIL("expected NonFiniteError");
  } catch (const NonFiniteError &e) {
    CHECK(e.stage() == "parameter update");
  }
}
