#pragma once

#include <cmath>
#include <optional>

namespace decgd {

enum class LrSchedule { Constant, InverseSqrt };

// Momentum can stay fixed, decay geometrically (gamma * decay^(t-1)) or as
// gamma / sqrt(t). Fixed is the default; the others exist to exercise the
// theory-side experiments.
enum class MomentumSchedule { Fixed, Geometric, InverseSqrt };

struct Hyperparams {
  double eta = 0.01;    // base step size
  double c = 1.0;       // loss shift, keeps f + c positive
  double gamma = 0.9;   // momentum
  bool ams = false;     // rectify v* = min(v*, v_t)
  double lambda = 1e-4; // decoupled weight decay (step_wd only)
  LrSchedule schedule = LrSchedule::Constant;
  MomentumSchedule momentum_schedule = MomentumSchedule::Fixed;
  double momentum_decay = 0.99; // used by MomentumSchedule::Geometric only

  // Optional clamp for the rectified vector. v_t has no positivity guarantee,
  // so a coordinate can go negative and flip its update direction; by default
  // we leave that alone and only count it (see DecGdState::negative_v_star).
  std::optional<double> v_floor;

  double eta_at(long t) const {
    return schedule == LrSchedule::InverseSqrt
               ? eta / std::sqrt(static_cast<double>(t))
               : eta;
  }

  double gamma_at(long t) const {
    switch (momentum_schedule) {
    case MomentumSchedule::Geometric:
      return gamma * std::pow(momentum_decay, static_cast<double>(t - 1));
    case MomentumSchedule::InverseSqrt:
      return gamma / std::sqrt(static_cast<double>(t));
    default:
      return gamma;
    }
  }

  // Throws std::invalid_argument (std::domain_error for non-positive c).
  void validate() const;
};

} // namespace decgd
