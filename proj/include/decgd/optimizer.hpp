#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "decgd/hyperparams.hpp"

namespace decgd {

// Thrown when an update would produce NaN/Inf. The optimizer state is left
// exactly as it was before the failing call, so a driver can log the
// diagnostic and abort or retry with different settings.
class NonFiniteError : public std::runtime_error {
public:
  NonFiniteError(std::string stage, long coordinate);

  const std::string &stage() const { return stage_; }
  long coordinate() const { return coordinate_; } // -1 for scalar stages

private:
  std::string stage_;
  long coordinate_;
};

struct Decomposition {
  double g = 0.0;                // sqrt(loss + c)
  std::vector<double> surrogate; // grad / (2 g), so grad == 2 * g * surrogate
};

// Splits a gradient into the scalar g = sqrt(loss + c) and the surrogate
// gradient of g itself. Requires loss + c > 0 (std::domain_error otherwise).
Decomposition decompose_gradient(double loss, const std::vector<double> &grad,
                                 double c);

struct DecGdState {
  std::vector<double> m;      // momentum of the surrogate gradient
  std::vector<double> v;      // loss-based vector
  std::vector<double> v_star; // rectified vector actually used in updates
  std::vector<double> x_prev; // previous iterate (origin right after reset)
  long t = 0;                 // completed steps since reset

  // Negative v* coordinates seen in the last step, counted before any
  // v_floor clamp is applied.
  long negative_v_star = 0;
};

// Gradient-decomposition optimizer. Usage:
//
//   DecGd opt(hp);
//   opt.reset(x1, f(x1));
//   x2 = opt.step(x1, f(x1), grad_f(x1));
//   ...
//
// reset() pins the internal previous iterate at the origin, so the very
// first v update uses the displacement (x1 - 0) even though no step produced
// it. That is deliberate: the update history starts from the origin.
class DecGd {
public:
  explicit DecGd(Hyperparams hp);

  // Fresh state for a run starting at x1: m = 0, x_prev = 0, every
  // coordinate of v and v* equal to sqrt(initial_loss + c), t = 0.
  void reset(const std::vector<double> &x1, double initial_loss);

  // One update from iterate x with f(x) and its gradient; returns the next
  // iterate. Throws NonFiniteError (state untouched) on any non-finite
  // intermediate, std::domain_error if loss + c <= 0, std::invalid_argument
  // on dimension mismatch.
  std::vector<double> step(const std::vector<double> &x, double loss,
                           const std::vector<double> &grad);

  // Same update with decoupled weight decay: lambda * x is added to the
  // surrogate gradient and again to the parameter update. With lambda = 0
  // this is bit-identical to step().
  std::vector<double> step_wd(const std::vector<double> &x, double loss,
                              const std::vector<double> &grad);

  // Per-coordinate multiplier 2 * eta_t * v* that step t applies to the
  // momentum. Pure observer.
  std::vector<double> effective_learning_rate(long t) const;

  const Hyperparams &hyper() const { return hp_; }
  const DecGdState &state() const { return state_; }

private:
  std::vector<double> step_impl(const std::vector<double> &x, double loss,
                                const std::vector<double> &grad,
                                bool weight_decay);

  Hyperparams hp_;
  DecGdState state_;
  bool initialized_ = false;
};

} // namespace decgd
