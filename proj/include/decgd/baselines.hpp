#pragma once

#include <vector>

#include "decgd/optimizer.hpp" // NonFiniteError

namespace decgd::baselines {

enum class Kind { Sgdm, Adam, AmsGrad, AdaBelief };

struct Hyper {
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  void validate() const; // throws std::invalid_argument
};

// Reference optimizers behind one step interface, used for comparison runs.
// Exact update rules are written out in docs/derivations.md. Notable choices:
// AMSGrad keeps the running max of the *raw* second moment (so it walks in
// lockstep with Adam for as long as that moment is non-decreasing), and
// AdaBelief adds eps inside its belief update as well as in the denominator.
class Baseline {
public:
  Baseline(Kind kind, Hyper hyper);

  void reset(std::size_t dim);

  // One update; the loss value is not needed by any of these methods.
  std::vector<double> step(const std::vector<double> &x,
                           const std::vector<double> &grad);

  // Per-coordinate multiplier the last step applied to its (bias-corrected)
  // momentum: lr for SGDM, lr / (sqrt(s_hat) + eps) for the Adam family.
  std::vector<double> effective_learning_rate() const;

  Kind kind() const { return kind_; }
  const Hyper &hyper() const { return hp_; }
  const std::vector<double> &m() const { return m_; }
  const std::vector<double> &s() const { return s_; }
  const std::vector<double> &s_max() const { return s_max_; }
  long t() const { return t_; }

private:
  Kind kind_;
  Hyper hp_;
  std::vector<double> m_;     // first moment
  std::vector<double> s_;     // second moment / belief (unused for SGDM)
  std::vector<double> s_max_; // AMSGrad max accumulator
  long t_ = 0;
  bool initialized_ = false;
};

} // namespace decgd::baselines
