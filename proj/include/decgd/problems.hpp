#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace decgd::problems {

// A differentiable objective: evaluate() returns f(x) and fills grad with
// the gradient at x. Deterministic oracles must return bit-identical output
// for identical x; stochastic ones own their seeded stream.
class LossOracle {
public:
  virtual ~LossOracle() = default;

  virtual std::size_t dimension() const = 0;
  virtual double evaluate(const std::vector<double> &x,
                          std::vector<double> &grad) = 0;

  // A known lower bound on the objective, when the problem has one.
  virtual std::optional<double> lower_bound_hint() const {
    return std::nullopt;
  }
};

// 0.5 * sum_i a_i * (x_i - b_i)^2 with a_i > 0.
class Quadratic : public LossOracle {
public:
  Quadratic(std::vector<double> a, std::vector<double> b);

  std::size_t dimension() const override { return a_.size(); }
  double evaluate(const std::vector<double> &x,
                  std::vector<double> &grad) override;
  std::optional<double> lower_bound_hint() const override { return 0.0; }

private:
  std::vector<double> a_, b_;
};

// Sum over blocks of four coordinates (a, b, c, d):
//   (a + 10b)^2 + 5 (c - d)^2 + (b - 2c)^4 + 10 (a - d)^4
// Minimum value 0 at the origin. Dimension must be divisible by 4.
class PowellSingular : public LossOracle {
public:
  explicit PowellSingular(std::size_t dim);

  static std::vector<double> standard_start(std::size_t dim); // (3,-1,0,1,...)

  std::size_t dimension() const override { return dim_; }
  double evaluate(const std::vector<double> &x,
                  std::vector<double> &grad) override;
  std::optional<double> lower_bound_hint() const override { return 0.0; }

private:
  std::size_t dim_;
};

// Sum over pairs (u, w):  100 (u^2 - w)^2 + (w - 1)^2
// Minimum value 0 at (1, 1, ..., 1). Dimension must be divisible by 2.
class ExtendedRosenbrock : public LossOracle {
public:
  explicit ExtendedRosenbrock(std::size_t dim);

  static std::vector<double> standard_start(std::size_t dim); // (-1.2,1,...)

  std::size_t dimension() const override { return dim_; }
  double evaluate(const std::vector<double> &x,
                  std::vector<double> &grad) override;
  std::optional<double> lower_bound_hint() const override { return 0.0; }

private:
  std::size_t dim_;
};

// Wraps an oracle and adds i.i.d. Gaussian noise to each gradient
// coordinate. The loss value passes through untouched. noise_std == 0 skips
// the draws entirely, making the wrapper transparent.
class NoisyOracle : public LossOracle {
public:
  NoisyOracle(LossOracle &inner, double noise_std, std::uint64_t seed);

  std::size_t dimension() const override { return inner_.dimension(); }
  double evaluate(const std::vector<double> &x,
                  std::vector<double> &grad) override;
  std::optional<double> lower_bound_hint() const override {
    return inner_.lower_bound_hint();
  }

  long draws() const { return draws_; }

private:
  LossOracle &inner_;
  double noise_std_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> gauss_;
  long draws_ = 0;
};

// Wraps an oracle and distorts the first gradient coordinate; exists to
// give gradient checking a guaranteed failure to detect.
class BrokenGradient : public LossOracle {
public:
  explicit BrokenGradient(LossOracle &inner, double distortion = 0.05);

  std::size_t dimension() const override { return inner_.dimension(); }
  double evaluate(const std::vector<double> &x,
                  std::vector<double> &grad) override;

private:
  LossOracle &inner_;
  double distortion_;
};

// Central finite differences against the oracle's analytic gradient at x.
// Returns the max over coordinates of
//   |fd_i - grad_i| / max(|grad_i|, 1e-8).
// Only meaningful for deterministic oracles.
double finite_diff_check(LossOracle &oracle, const std::vector<double> &x,
                         double h = 1e-5);

} // namespace decgd::problems
