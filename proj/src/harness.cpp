#include "decgd/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace decgd::harness {

namespace {

double l2_norm(const std::vector<double> &v) {
  double s = 0.0;
  for (double x : v)
    s += x * x;
  return std::sqrt(s);
}

bool is_decgd(const std::string &id) { return id == "decgd" || id == "decgd_wd"; }

class DecGdStepper : public Stepper {
public:
  DecGdStepper(Hyperparams hp, bool weight_decay)
      : opt_(hp), wd_(weight_decay) {}

  void init(const std::vector<double> &x1, double initial_loss) override {
    opt_.reset(x1, initial_loss);
    last_t_ = 0;
  }

  std::vector<double> step(const std::vector<double> &x, double loss,
                           const std::vector<double> &grad) override {
    auto out = wd_ ? opt_.step_wd(x, loss, grad) : opt_.step(x, loss, grad);
    last_t_ = opt_.state().t;
    return out;
  }

  std::vector<double> effective_learning_rate() const override {
    return opt_.effective_learning_rate(last_t_ > 0 ? last_t_ : 1);
  }

  double eta_last() const override {
    return opt_.hyper().eta_at(last_t_ > 0 ? last_t_ : 1);
  }

  long negative_v_star() const override {
    return opt_.state().negative_v_star;
  }

private:
  DecGd opt_;
  bool wd_;
  long last_t_ = 0;
};

class BaselineStepper : public Stepper {
public:
  BaselineStepper(baselines::Kind kind, baselines::Hyper hyper)
      : opt_(kind, hyper) {}

  void init(const std::vector<double> &x1, double) override {
    opt_.reset(x1.size());
  }

  std::vector<double> step(const std::vector<double> &x, double,
                           const std::vector<double> &grad) override {
    return opt_.step(x, grad);
  }

  std::vector<double> effective_learning_rate() const override {
    return opt_.effective_learning_rate();
  }

  double eta_last() const override { return opt_.hyper().lr; }

  long negative_v_star() const override { return 0; }

private:
  baselines::Baseline opt_;
};

double elapsed_seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

StepRow make_row(long t, const Stepper &stepper, double loss,
                 const std::vector<double> &grad,
                 std::chrono::steady_clock::time_point t0) {
  StepRow row;
  row.step = t;
  row.eta = stepper.eta_last();
  row.loss = loss;
  row.grad_norm = l2_norm(grad);
  const auto elr = stepper.effective_learning_rate();
  double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0.0;
  for (double e : elr) {
    lo = std::min(lo, e);
    hi = std::max(hi, e);
    sum += e;
  }
  row.elr_min = lo;
  row.elr_max = hi;
  row.elr_mean = sum / static_cast<double>(elr.size());
  row.neg_v_star = stepper.negative_v_star();
  row.wall_seconds = elapsed_seconds(t0);
  return row;
}

double fit_loglog_slope(const std::vector<RegretPoint> &curve) {
  std::vector<double> xs, ys;
  for (const auto &p : curve)
    if (p.regret > 0.0) {
      xs.push_back(std::log(static_cast<double>(p.horizon)));
      ys.push_back(std::log(p.regret));
    }
  if (xs.size() < 2)
    return 0.0;
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    num += (xs[i] - mx) * (ys[i] - my);
    den += (xs[i] - mx) * (xs[i] - mx);
  }
  return num / den;
}

} // namespace

std::unique_ptr<Stepper> make_stepper(const OptimizerSpec &spec) {
  if (spec.id == "decgd")
    return std::make_unique<DecGdStepper>(spec.decgd, false);
  if (spec.id == "decgd_wd")
    return std::make_unique<DecGdStepper>(spec.decgd, true);
  if (spec.id == "sgdm")
    return std::make_unique<BaselineStepper>(baselines::Kind::Sgdm,
                                             spec.baseline);
  if (spec.id == "adam")
    return std::make_unique<BaselineStepper>(baselines::Kind::Adam,
                                             spec.baseline);
  if (spec.id == "amsgrad")
    return std::make_unique<BaselineStepper>(baselines::Kind::AmsGrad,
                                             spec.baseline);
  if (spec.id == "adabelief")
    return std::make_unique<BaselineStepper>(baselines::Kind::AdaBelief,
                                             spec.baseline);
  throw std::invalid_argument("unknown optimizer id: " + spec.id);
}

RunRecord run_deterministic(problems::LossOracle &oracle,
                            const OptimizerSpec &opt,
                            const std::vector<double> &x1, long steps,
                            std::optional<double> stop_below,
                            const std::string &problem_id) {
  if (steps < 1)
    throw std::invalid_argument("steps must be >= 1");
  if (x1.size() != oracle.dimension())
    throw std::invalid_argument("start point does not match problem dimension");

  RunRecord rec;
  rec.optimizer_id = opt.id;
  rec.problem_id = problem_id;
  auto stepper = make_stepper(opt);
  const auto t0 = std::chrono::steady_clock::now();

  std::vector<double> x = x1, grad;
  double loss = oracle.evaluate(x, grad);
  rec.initial_loss = loss;
  if (!std::isfinite(loss)) {
    rec.diverged = true;
    rec.divergence_note = "non-finite loss at the start point";
    rec.final_loss = loss;
    return rec;
  }
  stepper->init(x, loss);

  long t = 0;
  while (t < steps) {
    if (stop_below && loss < *stop_below)
      break;
    ++t;
    std::vector<double> x_next;
    try {
      x_next = stepper->step(x, loss, grad);
    } catch (const NonFiniteError &e) {
      rec.diverged = true;
      rec.divergence_note =
          std::string(e.what()) + " at step " + std::to_string(t);
      --t;
      break;
    }
    rec.rows.push_back(make_row(t, *stepper, loss, grad, t0));
    x = std::move(x_next);
    loss = oracle.evaluate(x, grad);
    if (!std::isfinite(loss)) {
      rec.diverged = true;
      rec.divergence_note =
          "non-finite loss after step " + std::to_string(t);
      break;
    }
  }
  rec.steps_executed = static_cast<long>(rec.rows.size());
  rec.final_loss = loss;
  return rec;
}

QuadraticSequence::QuadraticSequence(const RegretExperiment &exp)
    : dim_(exp.dim), half_width_(exp.half_width), a_min_(exp.a_min),
      a_max_(exp.a_max), fixed_a_(exp.fixed_a), fixed_b_(exp.fixed_b),
      rng_(exp.seed) {}

void QuadraticSequence::next(std::vector<double> &a, std::vector<double> &b) {
  if (fixed_a_ && fixed_b_) {
    a = *fixed_a_;
    b = *fixed_b_;
    return;
  }
  a.resize(dim_);
  b.resize(dim_);
  std::uniform_real_distribution<double> ua(a_min_, a_max_);
  std::uniform_real_distribution<double> ub(-half_width_, half_width_);
  for (std::size_t i = 0; i < dim_; ++i)
    a[i] = ua(rng_);
  for (std::size_t i = 0; i < dim_; ++i)
    b[i] = ub(rng_);
}

double best_fixed_value(const std::vector<double> &A,
                        const std::vector<double> &B,
                        const std::vector<double> &C, double half_width) {
  if (A.size() != B.size() || A.size() != C.size())
    throw std::invalid_argument("comparator accumulator sizes differ");
  double total = 0.0;
  for (std::size_t i = 0; i < A.size(); ++i) {
    if (!(A[i] > 0.0))
      throw std::domain_error("comparator needs positive total curvature");
    const double x = std::clamp(B[i] / A[i], -half_width, half_width);
    total += 0.5 * A[i] * x * x - B[i] * x + C[i];
  }
  return total;
}

static void validate_regret(const RegretExperiment &exp) {
  if (exp.dim == 0)
    throw std::invalid_argument("regret suite needs dimension >= 1");
  if (exp.horizon < 1)
    throw std::invalid_argument("horizon must be >= 1");
  if (!(exp.half_width > 0.0))
    throw std::invalid_argument("half_width must be positive");
  if (!(exp.a_min > 0.0 && exp.a_max >= exp.a_min))
    throw std::invalid_argument("need 0 < a_min <= a_max");
  if (exp.fixed_a.has_value() != exp.fixed_b.has_value())
    throw std::invalid_argument("fixed_a and fixed_b come as a pair");
  if (exp.fixed_a &&
      (exp.fixed_a->size() != exp.dim || exp.fixed_b->size() != exp.dim))
    throw std::invalid_argument("fixed sequence dimension mismatch");
  if (exp.fixed_a)
    for (double ai : *exp.fixed_a)
      if (!(ai > 0.0))
        throw std::invalid_argument("fixed curvature must be positive");
  if (exp.x_start && exp.x_start->size() != exp.dim)
    throw std::invalid_argument("x_start dimension mismatch");
}

RegretResult run_regret(const RegretExperiment &exp,
                        const OptimizerSpec &opt) {
  validate_regret(exp);
  std::vector<long> cps;
  for (long c : exp.checkpoints)
    if (c >= 1 && c <= exp.horizon)
      cps.push_back(c);
  std::sort(cps.begin(), cps.end());
  cps.erase(std::unique(cps.begin(), cps.end()), cps.end());
  if (cps.empty())
    cps.push_back(exp.horizon);

  const std::size_t d = exp.dim;
  const double h = exp.half_width;

  RegretResult res;
  res.record.optimizer_id = opt.id;
  res.record.problem_id = "oco_quadratic";
  res.record.seed = exp.seed;

  std::vector<double> x(d, 0.0);
  if (exp.x_start)
    x = *exp.x_start;
  for (double xi : x)
    if (std::abs(xi) > h)
      throw std::invalid_argument("x_start lies outside the feasible box");

  QuadraticSequence seq(exp);
  auto stepper = make_stepper(opt);
  const auto t0 = std::chrono::steady_clock::now();

  std::vector<double> a, b, grad(d);
  std::vector<double> A(d, 0.0), B(d, 0.0), C(d, 0.0);
  double cum_loss = 0.0;
  res.max_abs_iterate = 0.0;
  for (double xi : x)
    res.max_abs_iterate = std::max(res.max_abs_iterate, std::abs(xi));

  auto eval_current = [&](double &loss_out) {
    double loss = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double diff = x[i] - b[i];
      loss += 0.5 * a[i] * diff * diff;
      grad[i] = a[i] * diff;
    }
    loss_out = loss;
  };

  seq.next(a, b);
  double loss;
  eval_current(loss);
  res.record.initial_loss = loss;
  stepper->init(x, loss);

  std::size_t ci = 0;
  for (long t = 1; t <= exp.horizon; ++t) {
    cum_loss += loss;
    for (std::size_t i = 0; i < d; ++i) {
      A[i] += a[i];
      B[i] += a[i] * b[i];
      C[i] += 0.5 * a[i] * b[i] * b[i];
    }

    std::vector<double> x_next;
    try {
      x_next = stepper->step(x, loss, grad);
    } catch (const NonFiniteError &e) {
      res.record.diverged = true;
      res.record.divergence_note =
          std::string(e.what()) + " at step " + std::to_string(t);
      break;
    }
    res.record.rows.push_back(make_row(t, *stepper, loss, grad, t0));
    for (std::size_t i = 0; i < d; ++i)
      x[i] = std::clamp(x_next[i], -h, h); // projection onto the box
    for (double xi : x)
      res.max_abs_iterate = std::max(res.max_abs_iterate, std::abs(xi));

    if (ci < cps.size() && cps[ci] == t) {
      const double best = best_fixed_value(A, B, C, h);
      RegretPoint p;
      p.horizon = t;
      p.regret = cum_loss - best;
      p.avg_regret = p.regret / static_cast<double>(t);
      res.curve.push_back(p);
      ++ci;
    }

    if (t < exp.horizon) {
      seq.next(a, b);
      eval_current(loss);
    }
  }
  res.record.steps_executed = static_cast<long>(res.record.rows.size());
  res.record.final_loss = loss;
  res.fitted_slope = fit_loglog_slope(res.curve);

  // Bounds follow from the construction: every iterate and every center
  // lives in the box, curvatures are capped by a_max, and f >= 0 keeps
  // sqrt(f + c) >= sqrt(c).
  const double c_shift = is_decgd(opt.id) ? opt.decgd.c : 1.0;
  const double rootd = std::sqrt(static_cast<double>(d));
  res.bounds.D = 2.0 * h * rootd;
  res.bounds.H = 2.0 * exp.a_max * h * rootd;
  res.bounds.G = res.bounds.H / (2.0 * std::sqrt(c_shift));
  res.bounds.L =
      std::sqrt(2.0 * exp.a_max * h * h * static_cast<double>(d) + c_shift);
  return res;
}

DecayResult run_nonconvex_decay(problems::LossOracle &inner,
                                const OptimizerSpec &opt,
                                const std::vector<double> &x1, long steps,
                                int restarts, double noise_std,
                                std::uint64_t seed,
                                const std::vector<long> &checkpoints) {
  if (restarts < 1)
    throw std::invalid_argument("need at least one restart");
  if (steps < 1)
    throw std::invalid_argument("steps must be >= 1");
  if (x1.size() != inner.dimension())
    throw std::invalid_argument("start point does not match problem dimension");
  if (is_decgd(opt.id) && opt.decgd.schedule != LrSchedule::InverseSqrt)
    throw std::invalid_argument(
        "the decay experiment requires the inverse-sqrt step schedule");

  std::vector<long> cps;
  for (long c : checkpoints)
    if (c >= 1 && c <= steps)
      cps.push_back(c);
  std::sort(cps.begin(), cps.end());
  cps.erase(std::unique(cps.begin(), cps.end()), cps.end());
  if (cps.empty())
    throw std::invalid_argument("no checkpoints within the step budget");

  DecayResult res;
  res.checkpoints = cps;
  res.restarts = restarts;
  std::vector<double> sums(cps.size(), 0.0);
  int completed = 0;

  for (int r = 0; r < restarts; ++r) {
    problems::NoisyOracle noisy(inner, noise_std,
                                seed + static_cast<std::uint64_t>(r));
    auto stepper = make_stepper(opt);
    std::vector<double> x = x1, grad, true_grad;
    std::vector<double> mins(cps.size(), 0.0);
    double running_min = std::numeric_limits<double>::infinity();

    double loss = noisy.evaluate(x, grad);
    if (!std::isfinite(loss)) {
      ++res.diverged_restarts;
      continue;
    }
    stepper->init(x, loss);

    bool bad = false;
    std::size_t ci = 0;
    for (long t = 1; t <= steps; ++t) {
      inner.evaluate(x, true_grad);
      double gsq = 0.0;
      for (double gi : true_grad)
        gsq += gi * gi;
      running_min = std::min(running_min, gsq);
      if (ci < cps.size() && cps[ci] == t) {
        mins[ci] = running_min;
        ++ci;
      }
      try {
        x = stepper->step(x, loss, grad);
      } catch (const NonFiniteError &) {
        bad = true;
        break;
      }
      if (t < steps) {
        loss = noisy.evaluate(x, grad);
        if (!std::isfinite(loss)) {
          bad = true;
          break;
        }
      }
    }
    if (bad || ci != cps.size()) {
      ++res.diverged_restarts;
      continue;
    }
    ++completed;
    for (std::size_t i = 0; i < cps.size(); ++i)
      sums[i] += mins[i];
  }

  if (completed == 0)
    throw std::runtime_error("all restarts diverged");
  res.avg_min_grad_sq.resize(cps.size());
  for (std::size_t i = 0; i < cps.size(); ++i)
    res.avg_min_grad_sq[i] = sums[i] / static_cast<double>(completed);
  return res;
}

TrainResult train_mlp(const TrainConfig &cfg) {
  if (cfg.steps < 1)
    throw std::invalid_argument("steps must be >= 1");
  cfg.spec.validate();

  TrainResult res;
  res.weights = cfg.spec.init_weights();
  res.initial_train_loss = mlp::dataset_loss(cfg.spec, res.weights, cfg.train);

  mlp::MlpOracle oracle(cfg.spec, cfg.train);
  const long spe = static_cast<long>(oracle.batches_per_epoch());
  auto stepper = make_stepper(cfg.optimizer);

  std::vector<double> grad;
  double loss = oracle.evaluate(res.weights, grad);
  stepper->init(res.weights, loss);

  long last_recorded = 0;
  auto record_epoch = [&](long t) {
    EpochRow row;
    row.epoch = (t + spe - 1) / spe;
    row.train_loss = mlp::dataset_loss(cfg.spec, res.weights, cfg.train);
    row.test_loss = mlp::dataset_loss(cfg.spec, res.weights, cfg.test);
    row.train_acc = mlp::accuracy(cfg.spec, res.weights, cfg.train);
    row.test_acc = mlp::accuracy(cfg.spec, res.weights, cfg.test);
    res.epochs.push_back(row);
    last_recorded = t;
  };

  long t = 0;
  while (t < cfg.steps) {
    ++t;
    try {
      res.weights = stepper->step(res.weights, loss, grad);
    } catch (const NonFiniteError &) {
      res.diverged = true;
      --t;
      break;
    }
    if (t % spe == 0 || t == cfg.steps)
      record_epoch(t);
    if (t < cfg.steps) {
      loss = oracle.evaluate(res.weights, grad);
      if (!std::isfinite(loss)) {
        res.diverged = true;
        break;
      }
    }
  }
  res.steps_executed = t;
  if (res.diverged && t > 0 && last_recorded != t)
    record_epoch(t);

  res.final_train_loss = mlp::dataset_loss(cfg.spec, res.weights, cfg.train);
  res.final_test_loss = mlp::dataset_loss(cfg.spec, res.weights, cfg.test);
  res.final_train_acc = mlp::accuracy(cfg.spec, res.weights, cfg.train);
  res.final_test_acc = mlp::accuracy(cfg.spec, res.weights, cfg.test);
  return res;
}

std::vector<SweepRow> sweep_c(const TrainConfig &base,
                              const std::vector<double> &c_values) {
  if (c_values.size() < 2)
    throw std::invalid_argument("a sweep needs at least two values of c");
  if (!is_decgd(base.optimizer.id))
    throw std::invalid_argument("sweep_c only applies to decgd optimizers");
  std::vector<SweepRow> rows;
  rows.reserve(c_values.size());
  for (double c : c_values) {
    TrainConfig cfg = base;
    cfg.optimizer.decgd.c = c;
    const TrainResult r = train_mlp(cfg);
    SweepRow row;
    row.c = c;
    row.final_train_loss = r.final_train_loss;
    row.final_test_loss = r.final_test_loss;
    row.final_train_acc = r.final_train_acc;
    row.final_test_acc = r.final_test_acc;
    row.converged = !r.diverged && r.final_train_loss < r.initial_train_loss;
    rows.push_back(row);
  }
  return rows;
}

} // namespace decgd::harness
