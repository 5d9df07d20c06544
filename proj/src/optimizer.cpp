#include "decgd/optimizer.hpp"

#include <algorithm>
#include <cmath>

namespace decgd {

namespace {

std::string describe(const std::string &stage, long coordinate) {
  std::string msg = "non-finite value at stage '" + stage + "'";
  if (coordinate >= 0)
    msg += ", coordinate " + std::to_string(coordinate);
  return msg;
}

} // namespace

NonFiniteError::NonFiniteError(std::string stage, long coordinate)
    : std::runtime_error(describe(stage, coordinate)),
      stage_(std::move(stage)), coordinate_(coordinate) {}

void Hyperparams::validate() const {
  if (!(std::isfinite(eta) && eta > 0.0))
    throw std::invalid_argument("eta must be positive and finite");
  if (!(std::isfinite(c) && c > 0.0))
    throw std::domain_error("c must be positive so that f + c stays positive");
  if (!(std::isfinite(gamma) && gamma >= 0.0 && gamma < 1.0))
    throw std::invalid_argument("gamma must lie in [0, 1)");
  if (!(std::isfinite(lambda) && lambda >= 0.0))
    throw std::invalid_argument("lambda must be >= 0");
  if (momentum_schedule == MomentumSchedule::Geometric &&
      !(std::isfinite(momentum_decay) && momentum_decay > 0.0 &&
        momentum_decay <= 1.0))
    throw std::invalid_argument("momentum_decay must lie in (0, 1]");
  if (v_floor && !std::isfinite(*v_floor))
    throw std::invalid_argument("v_floor must be finite");
}

Decomposition decompose_gradient(double loss, const std::vector<double> &grad,
                                 double c) {
  if (!std::isfinite(loss))
    throw NonFiniteError("loss", -1);
  if (!(loss + c > 0.0))
    throw std::domain_error(
        "loss + c must be positive to form sqrt(loss + c)");
  Decomposition out;
  out.g = std::sqrt(loss + c);
  out.surrogate.resize(grad.size());
  for (std::size_t i = 0; i < grad.size(); ++i) {
    if (!std::isfinite(grad[i]))
      throw NonFiniteError("gradient", static_cast<long>(i));
    out.surrogate[i] = grad[i] / (2.0 * out.g);
  }
  return out;
}

DecGd::DecGd(Hyperparams hp) : hp_(hp) { hp_.validate(); }

void DecGd::reset(const std::vector<double> &x1, double initial_loss) {
  if (x1.empty())
    throw std::invalid_argument("parameter vector needs dimension >= 1");
  if (!std::isfinite(initial_loss))
    throw NonFiniteError("loss", -1);
  if (!(initial_loss + hp_.c > 0.0))
    throw std::domain_error("initial loss + c must be positive");
  const double v0 = std::sqrt(initial_loss + hp_.c);
  const std::size_t d = x1.size();
  state_.m.assign(d, 0.0);
  state_.v.assign(d, v0);
  state_.v_star.assign(d, v0);
  state_.x_prev.assign(d, 0.0);
  state_.t = 0;
  state_.negative_v_star = 0;
  initialized_ = true;
}

std::vector<double> DecGd::step(const std::vector<double> &x, double loss,
                                const std::vector<double> &grad) {
  return step_impl(x, loss, grad, false);
}

std::vector<double> DecGd::step_wd(const std::vector<double> &x, double loss,
                                   const std::vector<double> &grad) {
  return step_impl(x, loss, grad, true);
}

std::vector<double> DecGd::step_impl(const std::vector<double> &x, double loss,
                                     const std::vector<double> &grad,
                                     bool weight_decay) {
  if (!initialized_)
    throw std::logic_error("step() called before reset()");
  const std::size_t d = state_.m.size();
  if (x.size() != d || grad.size() != d)
    throw std::invalid_argument(
        "dimension mismatch between optimizer state and step inputs");
  if (!std::isfinite(loss))
    throw NonFiniteError("loss", -1);
  if (!(loss + hp_.c > 0.0))
    throw std::domain_error("loss + c must be positive");
  for (std::size_t i = 0; i < d; ++i)
    if (!std::isfinite(x[i]))
      throw NonFiniteError("iterate", static_cast<long>(i));
  for (std::size_t i = 0; i < d; ++i)
    if (!std::isfinite(grad[i]))
      throw NonFiniteError("gradient", static_cast<long>(i));

  const long t = state_.t + 1;
  const double g = std::sqrt(loss + hp_.c);
  const double gamma_t = hp_.gamma_at(t);
  const double eta_t = hp_.eta_at(t);

  // Everything goes into scratch vectors first; state is only committed once
  // the whole step is known to be finite.
  std::vector<double> m_new(d), v_new(d), v_star_new(d), x_next(d);
  long negatives = 0;
  for (std::size_t i = 0; i < d; ++i) {
    double sg = grad[i] / (2.0 * g);
    if (weight_decay)
      sg += hp_.lambda * x[i];
    if (!std::isfinite(sg))
      throw NonFiniteError("surrogate gradient", static_cast<long>(i));

    const double m = gamma_t * state_.m[i] + sg;
    if (!std::isfinite(m))
      throw NonFiniteError("momentum", static_cast<long>(i));

    // New momentum, old displacement.
    const double v = state_.v[i] + m * (x[i] - state_.x_prev[i]);
    if (!std::isfinite(v))
      throw NonFiniteError("loss-based vector", static_cast<long>(i));

    double vs = hp_.ams ? std::min(state_.v_star[i], v) : v;
    if (vs < 0.0)
      ++negatives;
    if (hp_.v_floor && vs < *hp_.v_floor)
      vs = *hp_.v_floor;

    double upd = 2.0 * (vs * m);
    if (weight_decay)
      upd += hp_.lambda * x[i];
    const double xn = x[i] - eta_t * upd;
    if (!std::isfinite(xn))
      throw NonFiniteError("parameter update", static_cast<long>(i));

    m_new[i] = m;
    v_new[i] = v;
    v_star_new[i] = vs;
    x_next[i] = xn;
  }

  state_.m.swap(m_new);
  state_.v.swap(v_new);
  state_.v_star.swap(v_star_new);
  state_.x_prev = x;
  state_.t = t;
  state_.negative_v_star = negatives;
  return x_next;
}

std::vector<double> DecGd::effective_learning_rate(long t) const {
  if (!initialized_)
    throw std::logic_error("effective_learning_rate() before reset()");
  if (t < 1)
    throw std::invalid_argument("step index must be >= 1");
  const double eta_t = hp_.eta_at(t);
  std::vector<double> out(state_.v_star.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = 2.0 * eta_t * state_.v_star[i];
  return out;
}

} // namespace decgd
