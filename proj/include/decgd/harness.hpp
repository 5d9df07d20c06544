#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "decgd/baselines.hpp"
#include "decgd/mlp.hpp"
#include "decgd/optimizer.hpp"
#include "decgd/problems.hpp"

namespace decgd::harness {

// Which method to run plus its knobs. `id` selects among
//   decgd, decgd_wd, sgdm, adam, amsgrad, adabelief;
// the first two read `decgd`, the rest read `baseline`.
struct OptimizerSpec {
  std::string id = "decgd";
  Hyperparams decgd;
  baselines::Hyper baseline;
};

// Uniform stepping interface so the experiment drivers don't care which
// method they drive.
class Stepper {
public:
  virtual ~Stepper() = default;

  virtual void init(const std::vector<double> &x1, double initial_loss) = 0;
  virtual std::vector<double> step(const std::vector<double> &x, double loss,
                                   const std::vector<double> &grad) = 0;

  // Telemetry about the most recent step.
  virtual std::vector<double> effective_learning_rate() const = 0;
  virtual double eta_last() const = 0;
  virtual long negative_v_star() const = 0;
};

std::unique_ptr<Stepper> make_stepper(const OptimizerSpec &spec);

struct StepRow {
  long step = 0;
  double eta = 0.0;
  double loss = 0.0;      // objective at the iterate the step consumed
  double grad_norm = 0.0; // l2 norm of the gradient fed to the optimizer
  double elr_min = 0.0, elr_max = 0.0, elr_mean = 0.0;
  long neg_v_star = 0;
  double wall_seconds = 0.0; // cumulative; in-memory telemetry only, never
                             // serialized (it would break byte-level
                             // reproducibility of the CSV output)
};

struct RunRecord {
  std::string optimizer_id;
  std::string problem_id;
  std::uint64_t seed = 0;
  bool diverged = false;
  std::string divergence_note;
  long steps_executed = 0;
  double initial_loss = 0.0;
  double final_loss = 0.0; // at the last evaluated iterate
  std::vector<StepRow> rows;
};

// Runs `steps` updates of the chosen optimizer on the oracle, starting from
// x1, recording one row per executed step. Stops early once the evaluated
// loss drops below stop_below (when set) or when anything goes non-finite
// (record flagged diverged). Bit-reproducible for identical inputs.
RunRecord run_deterministic(problems::LossOracle &oracle,
                            const OptimizerSpec &opt,
                            const std::vector<double> &x1, long steps,
                            std::optional<double> stop_below = std::nullopt,
                            const std::string &problem_id = "");

// Exact bounds of an experiment's construction (not estimates): feasible-set
// diameter D, surrogate-gradient bound G, bound L on sqrt(f + c), gradient
// bound H.
struct TheoryBounds {
  double D = 0.0, G = 0.0, L = 0.0, H = 0.0;
};

// Online convex suite: at each step t an axis-aligned quadratic
//   f_t(x) = 0.5 * sum_i a_i (x_i - b_i)^2
// is drawn with a ~ U(a_min, a_max) and b uniform in the box
// [-half_width, half_width]^dim; iterates are clamped back into the box
// after every optimizer step. fixed_a/fixed_b freeze the sequence to one
// quadratic; x_start overrides the default start at the box center.
struct RegretExperiment {
  std::size_t dim = 4;
  double half_width = 1.0;
  long horizon = 8192;
  std::uint64_t seed = 7;
  std::vector<long> checkpoints = {256, 512, 1024, 2048, 4096, 8192};
  double a_min = 0.5, a_max = 2.0;
  std::optional<std::vector<double>> fixed_a, fixed_b;
  std::optional<std::vector<double>> x_start;
};

// The seeded loss-sequence generator behind run_regret, exposed so tests can
// replay the exact sequence an experiment saw.
class QuadraticSequence {
public:
  explicit QuadraticSequence(const RegretExperiment &exp);
  void next(std::vector<double> &a, std::vector<double> &b);

private:
  std::size_t dim_;
  double half_width_, a_min_, a_max_;
  std::optional<std::vector<double>> fixed_a_, fixed_b_;
  std::mt19937_64 rng_;
};

// Best fixed decision in hindsight for accumulated per-coordinate sums
// A = sum a, B = sum a*b, C = 0.5 * sum a*b^2 over the box: per coordinate
// the summed loss is 0.5*A*x^2 - B*x + C, minimized at clamp(B/A).
double best_fixed_value(const std::vector<double> &A,
                        const std::vector<double> &B,
                        const std::vector<double> &C, double half_width);

struct RegretPoint {
  long horizon = 0;
  double regret = 0.0;
  double avg_regret = 0.0;
};

struct RegretResult {
  std::vector<RegretPoint> curve;
  double fitted_slope = 0.0;    // log-log least-squares slope of R(T)
  double max_abs_iterate = 0.0; // across all recorded iterates
  TheoryBounds bounds;
  RunRecord record;
};

RegretResult run_regret(const RegretExperiment &exp, const OptimizerSpec &opt);

struct DecayResult {
  std::vector<long> checkpoints;
  std::vector<double> avg_min_grad_sq; // averaged over completed restarts
  int restarts = 0;
  int diverged_restarts = 0;
};

// Stochastic non-convex experiment: runs `restarts` noisy trajectories
// (noise seeds seed, seed+1, ...) and averages min over t <= T' of the TRUE
// gradient norm squared (from the inner, noise-free oracle) at each
// checkpoint. DecGD configurations must use the InverseSqrt step schedule.
// Diverged restarts are excluded from the averages and counted.
DecayResult run_nonconvex_decay(
    problems::LossOracle &inner, const OptimizerSpec &opt,
    const std::vector<double> &x1, long steps, int restarts, double noise_std,
    std::uint64_t seed,
    const std::vector<long> &checkpoints = {64, 128, 256, 512, 1024, 2048,
                                            4096});

struct TrainConfig {
  mlp::MlpSpec spec;
  mlp::Dataset train;
  mlp::Dataset test;
  OptimizerSpec optimizer;
  long steps = 500;
};

struct EpochRow {
  long epoch = 0;
  double train_loss = 0.0, test_loss = 0.0;
  double train_acc = 0.0, test_acc = 0.0;
};

struct TrainResult {
  std::vector<EpochRow> epochs;
  std::vector<double> weights;
  double initial_train_loss = 0.0;
  double final_train_loss = 0.0, final_test_loss = 0.0;
  double final_train_acc = 0.0, final_test_acc = 0.0;
  bool diverged = false;
  long steps_executed = 0;
};

// Minibatch training; an epoch is ceil(n / batch_size) optimizer steps and
// gets one metrics row (full-dataset losses and accuracies), plus a final
// partial-epoch row if the step budget ends mid-epoch.
TrainResult train_mlp(const TrainConfig &cfg);

struct SweepRow {
  double c = 0.0;
  double final_train_loss = 0.0, final_test_loss = 0.0;
  double final_train_acc = 0.0, final_test_acc = 0.0;
  bool converged = false; // final full train loss < initial
};

// Reruns the identical training job for each value of c (>= 2 values,
// DecGD-family optimizers only); everything else, seeds included, stays
// fixed.
std::vector<SweepRow> sweep_c(const TrainConfig &base,
                              const std::vector<double> &c_values);

} // namespace decgd::harness
