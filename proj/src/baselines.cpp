#include "decgd/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace decgd::baselines {

void Hyper::validate() const {
  if (!(std::isfinite(lr) && lr > 0.0))
    throw std::invalid_argument("lr must be positive and finite");
  if (!(std::isfinite(beta1) && beta1 >= 0.0 && beta1 < 1.0))
    throw std::invalid_argument("beta1 must lie in [0, 1)");
  if (!(std::isfinite(beta2) && beta2 >= 0.0 && beta2 < 1.0))
    throw std::invalid_argument("beta2 must lie in [0, 1)");
  if (!(std::isfinite(eps) && eps > 0.0))
    throw std::invalid_argument("eps must be positive and finite");
}

Baseline::Baseline(Kind kind, Hyper hyper) : kind_(kind), hp_(hyper) {
  hp_.validate();
}

void Baseline::reset(std::size_t dim) {
  if (dim == 0)
    throw std::invalid_argument("parameter vector needs dimension >= 1");
  m_.assign(dim, 0.0);
  s_.assign(dim, 0.0);
  s_max_.assign(dim, 0.0);
  t_ = 0;
  initialized_ = true;
}

std::vector<double> Baseline::step(const std::vector<double> &x,
                                   const std::vector<double> &grad) {
  if (!initialized_)
    throw std::logic_error("step() called before reset()");
  const std::size_t d = m_.size();
  if (x.size() != d || grad.size() != d)
    throw std::invalid_argument(
        "dimension mismatch between optimizer state and step inputs");
  for (std::size_t i = 0; i < d; ++i)
    if (!std::isfinite(grad[i]))
      throw NonFiniteError("gradient", static_cast<long>(i));

  const long t = t_ + 1;
  std::vector<double> m_new(d), s_new(d), s_max_new(d), x_next(d);

  if (kind_ == Kind::Sgdm) {
    for (std::size_t i = 0; i < d; ++i) {
      const double m = hp_.beta1 * m_[i] + grad[i];
      const double xn = x[i] - hp_.lr * m;
      if (!std::isfinite(xn))
        throw NonFiniteError("parameter update", static_cast<long>(i));
      m_new[i] = m;
      s_new[i] = 0.0;
      s_max_new[i] = 0.0;
      x_next[i] = xn;
    }
  } else {
    const double bc1 = 1.0 - std::pow(hp_.beta1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(hp_.beta2, static_cast<double>(t));
    for (std::size_t i = 0; i < d; ++i) {
      const double g = grad[i];
      const double m = hp_.beta1 * m_[i] + (1.0 - hp_.beta1) * g;
      double s;
      if (kind_ == Kind::AdaBelief) {
        const double diff = g - m;
        s = hp_.beta2 * s_[i] + (1.0 - hp_.beta2) * (diff * diff) + hp_.eps;
      } else {
        s = hp_.beta2 * s_[i] + (1.0 - hp_.beta2) * (g * g);
      }
      const double s_max =
          kind_ == Kind::AmsGrad ? std::max(s_max_[i], s) : s_max_[i];
      const double s_used = kind_ == Kind::AmsGrad ? s_max : s;
      const double m_hat = m / bc1;
      const double s_hat = s_used / bc2;
      const double xn = x[i] - hp_.lr * m_hat / (std::sqrt(s_hat) + hp_.eps);
      if (!std::isfinite(xn))
        throw NonFiniteError("parameter update", static_cast<long>(i));
      m_new[i] = m;
      s_new[i] = s;
      s_max_new[i] = s_max;
      x_next[i] = xn;
    }
  }

  m_.swap(m_new);
  s_.swap(s_new);
  s_max_.swap(s_max_new);
  t_ = t;
  return x_next;
}

std::vector<double> Baseline::effective_learning_rate() const {
  if (!initialized_)
    throw std::logic_error("effective_learning_rate() before reset()");
  std::vector<double> out(m_.size(), hp_.lr);
  if (kind_ == Kind::Sgdm || t_ == 0)
    return out;
  const double bc2 = 1.0 - std::pow(hp_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double s_used = kind_ == Kind::AmsGrad ? s_max_[i] : s_[i];
    out[i] = hp_.lr / (std::sqrt(s_used / bc2) + hp_.eps);
  }
  return out;
}

} // namespace decgd::baselines
