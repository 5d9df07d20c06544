#include "decgd/problems.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace decgd::problems {

namespace {

void check_point(const std::vector<double> &x, std::size_t dim) {
  if (x.size() != dim)
    throw std::invalid_argument("point dimension does not match the problem");
}

} // namespace

Quadratic::Quadratic(std::vector<double> a, std::vector<double> b)
    : a_(std::move(a)), b_(std::move(b)) {
  if (a_.empty() || a_.size() != b_.size())
    throw std::invalid_argument("quadratic needs matching a/b of dimension >= 1");
  for (double ai : a_)
    if (!(ai > 0.0))
      throw std::domain_error("quadratic curvature coordinates must be positive");
}

double Quadratic::evaluate(const std::vector<double> &x,
                           std::vector<double> &grad) {
  check_point(x, a_.size());
  grad.resize(x.size());
  double loss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double diff = x[i] - b_[i];
    loss += 0.5 * a_[i] * diff * diff;
    grad[i] = a_[i] * diff;
  }
  return loss;
}

PowellSingular::PowellSingular(std::size_t dim) : dim_(dim) {
  if (dim == 0 || dim % 4 != 0)
    throw std::domain_error("Powell Singular dimension must be divisible by 4");
}

std::vector<double> PowellSingular::standard_start(std::size_t dim) {
  if (dim == 0 || dim % 4 != 0)
    throw std::domain_error("Powell Singular dimension must be divisible by 4");
  std::vector<double> x(dim);
  static const double block[4] = {3.0, -1.0, 0.0, 1.0};
  for (std::size_t i = 0; i < dim; ++i)
    x[i] = block[i % 4];
  return x;
}

double PowellSingular::evaluate(const std::vector<double> &x,
                                std::vector<double> &grad) {
  check_point(x, dim_);
  grad.assign(dim_, 0.0);
  double loss = 0.0;
  for (std::size_t k = 0; k < dim_; k += 4) {
    const double a = x[k], b = x[k + 1], c = x[k + 2], d = x[k + 3];
    const double t1 = a + 10.0 * b;
    const double t2 = c - d;
    const double t3 = b - 2.0 * c;
    const double t4 = a - d;
    loss += t1 * t1 + 5.0 * t2 * t2 + t3 * t3 * t3 * t3 +
            10.0 * t4 * t4 * t4 * t4;
    grad[k] = 2.0 * t1 + 40.0 * t4 * t4 * t4;
    grad[k + 1] = 20.0 * t1 + 4.0 * t3 * t3 * t3;
    grad[k + 2] = 10.0 * t2 - 8.0 * t3 * t3 * t3;
    grad[k + 3] = -10.0 * t2 - 40.0 * t4 * t4 * t4;
  }
  return loss;
}

ExtendedRosenbrock::ExtendedRosenbrock(std::size_t dim) : dim_(dim) {
  if (dim == 0 || dim % 2 != 0)
    throw std::domain_error(
        "Extended Rosenbrock dimension must be divisible by 2");
}

std::vector<double> ExtendedRosenbrock::standard_start(std::size_t dim) {
  if (dim == 0 || dim % 2 != 0)
    throw std::domain_error(
        "Extended Rosenbrock dimension must be divisible by 2");
  std::vector<double> x(dim);
  for (std::size_t i = 0; i < dim; i += 2) {
    x[i] = -1.2;
    x[i + 1] = 1.0;
  }
  return x;
}

double ExtendedRosenbrock::evaluate(const std::vector<double> &x,
                                    std::vector<double> &grad) {
  check_point(x, dim_);
  grad.assign(dim_, 0.0);
  double loss = 0.0;
  for (std::size_t k = 0; k < dim_; k += 2) {
    const double u = x[k], w = x[k + 1];
    const double t1 = u * u - w;
    const double t2 = w - 1.0;
    loss += 100.0 * t1 * t1 + t2 * t2;
    grad[k] = 400.0 * u * t1;
    grad[k + 1] = -200.0 * t1 + 2.0 * t2;
  }
  return loss;
}

NoisyOracle::NoisyOracle(LossOracle &inner, double noise_std,
                         std::uint64_t seed)
    : inner_(inner), noise_std_(noise_std), rng_(seed), gauss_(0.0, 1.0) {
  if (!(noise_std >= 0.0))
    throw std::invalid_argument("noise_std must be >= 0");
}

double NoisyOracle::evaluate(const std::vector<double> &x,
                             std::vector<double> &grad) {
  const double loss = inner_.evaluate(x, grad);
  if (noise_std_ > 0.0) {
    for (double &gi : grad)
      gi += noise_std_ * gauss_(rng_);
    ++draws_;
  }
  return loss;
}

BrokenGradient::BrokenGradient(LossOracle &inner, double distortion)
    : inner_(inner), distortion_(distortion) {}

double BrokenGradient::evaluate(const std::vector<double> &x,
                                std::vector<double> &grad) {
  const double loss = inner_.evaluate(x, grad);
  if (!grad.empty())
    grad[0] = grad[0] * (1.0 + distortion_) + distortion_;
  return loss;
}

double finite_diff_check(LossOracle &oracle, const std::vector<double> &x,
                         double h) {
  if (!(h > 0.0))
    throw std::invalid_argument("finite-difference step h must be positive");
  std::vector<double> analytic, scratch;
  oracle.evaluate(x, analytic);
  std::vector<double> probe = x;
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double fp = oracle.evaluate(probe, scratch);
    probe[i] = x[i] - h;
    const double fm = oracle.evaluate(probe, scratch);
    probe[i] = x[i];
    const double fd = (fp - fm) / (2.0 * h);
    const double denom = std::max(std::abs(analytic[i]), 1e-8);
    worst = std::max(worst, std::abs(fd - analytic[i]) / denom);
  }
  return worst;
}

} // namespace decgd::problems
