#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "decgd/csv_io.hpp"
#include "decgd/harness.hpp"

namespace fs = std::filesystem;
using decgd::csv::format_double;

namespace {

struct OptimOpts {
  std::string optimizer = "decgd";
  double lr = 0.01;
  double c = 1.0;
  double gamma = 0.9;
  bool ams = false;
  double lambda = 1e-4;
  std::string schedule = "constant";
  std::string momentum_schedule = "fixed";
  double momentum_decay = 0.99;
  std::optional<double> v_floor;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  decgd::harness::OptimizerSpec to_spec() const {
    decgd::harness::OptimizerSpec spec;
    spec.id = optimizer;
    spec.decgd.eta = lr;
    spec.decgd.c = c;
    spec.decgd.gamma = gamma;
    spec.decgd.ams = ams;
    spec.decgd.lambda = lambda;
    spec.decgd.schedule = schedule == "inv_sqrt"
                              ? decgd::LrSchedule::InverseSqrt
                              : decgd::LrSchedule::Constant;
    if (momentum_schedule == "geometric")
      spec.decgd.momentum_schedule = decgd::MomentumSchedule::Geometric;
    else if (momentum_schedule == "inv_sqrt")
      spec.decgd.momentum_schedule = decgd::MomentumSchedule::InverseSqrt;
    spec.decgd.momentum_decay = momentum_decay;
    spec.decgd.v_floor = v_floor;
    spec.baseline.lr = lr;
    spec.baseline.beta1 = beta1;
    spec.baseline.beta2 = beta2;
    spec.baseline.eps = eps;
    return spec;
  }
};

void add_optim_options(CLI::App *cmd, OptimOpts &o) {
  cmd->add_option("--optimizer", o.optimizer, "method to run")
      ->check(CLI::IsMember({"decgd", "decgd_wd", "sgdm", "adam", "amsgrad",
                             "adabelief"}))
      ->capture_default_str();
  cmd->add_option("--lr", o.lr, "step size (eta for decgd, lr for baselines)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--c", o.c, "loss shift constant (decgd)")
      ->capture_default_str();
  cmd->add_option("--gamma", o.gamma, "momentum (decgd)")
      ->capture_default_str();
  cmd->add_flag("--ams", o.ams, "rectify v* = min(v*, v_t)");
  cmd->add_option("--lambda", o.lambda, "decoupled weight decay (decgd_wd)")
      ->capture_default_str();
  cmd->add_option("--schedule", o.schedule, "step-size schedule (decgd)")
      ->check(CLI::IsMember({"constant", "inv_sqrt"}))
      ->capture_default_str();
  cmd->add_option("--momentum-schedule", o.momentum_schedule,
                  "momentum schedule (decgd)")
      ->check(CLI::IsMember({"fixed", "geometric", "inv_sqrt"}))
      ->capture_default_str();
  cmd->add_option("--momentum-decay", o.momentum_decay,
                  "decay factor for the geometric momentum schedule")
      ->capture_default_str();
  cmd->add_option("--v-floor", o.v_floor,
                  "optional clamp for v* (disabled when unset)");
  cmd->add_option("--beta1", o.beta1, "baseline first-moment decay")
      ->capture_default_str();
  cmd->add_option("--beta2", o.beta2, "baseline second-moment decay")
      ->capture_default_str();
  cmd->add_option("--eps", o.eps, "baseline denominator offset")
      ->capture_default_str();
}

struct OutOpts {
  std::string out = "out";
  bool emit_plot = false;
};

void add_out_options(CLI::App *cmd, OutOpts &o) {
  cmd->add_option("--out", o.out, "output directory")
      ->envname("DECGD_OUT_DIR")
      ->capture_default_str();
  cmd->add_flag("--emit-plot", o.emit_plot,
                "write a plot.py script next to the CSV output");
}

void write_text(const fs::path &path, const std::string &text) {
  fs::create_directories(path.parent_path().empty() ? fs::path(".")
                                                    : path.parent_path());
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot write file: " + path.string());
  out << text;
}

void write_meta_with_config(const fs::path &path, CLI::App &app,
                            std::vector<std::pair<std::string, std::string>>
                                entries) {
  std::string text;
  for (const auto &[k, v] : entries)
    text += k + "=" + v + "\n";
  text += "# effective configuration\n";
  text += app.config_to_str(true, false);
  write_text(path, text);
}

// ---------------------------------------------------------------- bench ---

struct BenchOpts {
  std::string problem = "rosenbrock";
  long steps = 1000;
  std::size_t dim = 0; // 0 = per-problem default
  std::optional<double> stop_below;
  OptimOpts optim;
  OutOpts out;
};

int run_bench(CLI::App &app, const BenchOpts &o) {
  std::size_t dim = o.dim;
  std::unique_ptr<decgd::problems::LossOracle> oracle;
  std::vector<double> x1;
  if (o.problem == "powell") {
    if (dim == 0)
      dim = 100;
    oracle = std::make_unique<decgd::problems::PowellSingular>(dim);
    x1 = decgd::problems::PowellSingular::standard_start(dim);
  } else if (o.problem == "rosenbrock") {
    if (dim == 0)
      dim = 1000;
    oracle = std::make_unique<decgd::problems::ExtendedRosenbrock>(dim);
    x1 = decgd::problems::ExtendedRosenbrock::standard_start(dim);
  } else {
    if (dim == 0)
      dim = 10;
    oracle = std::make_unique<decgd::problems::Quadratic>(
        std::vector<double>(dim, 1.0), std::vector<double>(dim, 0.0));
    x1.assign(dim, 1.0);
  }

  const auto t0 = std::chrono::steady_clock::now();
  const auto rec = decgd::harness::run_deterministic(
      *oracle, o.optim.to_spec(), x1, o.steps, o.stop_below, o.problem);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  const fs::path dir(o.out.out);
  decgd::csv::write_run_csv(dir / "run.csv", rec);
  write_meta_with_config(
      dir / "meta.txt", app,
      {{"command", "bench"},
       {"problem", o.problem},
       {"dim", std::to_string(dim)},
       {"optimizer", rec.optimizer_id},
       {"steps_requested", std::to_string(o.steps)},
       {"steps_executed", std::to_string(rec.steps_executed)},
       {"initial_loss", format_double(rec.initial_loss)},
       {"final_loss", format_double(rec.final_loss)},
       {"diverged", rec.diverged ? "1" : "0"},
       {"wall_seconds", format_double(wall)}});
  if (o.out.emit_plot)
    write_text(dir / "plot.py",
               "import csv\n"
               "import matplotlib.pyplot as plt\n"
               "\n"
               "steps, losses = [], []\n"
               "with open(\"run.csv\") as f:\n"
               "    for row in csv.DictReader(f):\n"
               "        steps.append(int(row[\"step\"]))\n"
               "        losses.append(float(row[\"loss\"]))\n"
               "plt.semilogy(steps, losses)\n"
               "plt.xlabel(\"step\")\n"
               "plt.ylabel(\"loss\")\n"
               "plt.title(\"bench\")\n"
               "plt.savefig(\"run.png\", dpi=150)\n");

  if (rec.diverged) {
    std::cerr << "run diverged: " << rec.divergence_note << "\n";
    return 2;
  }
  std::cout << "bench done: " << rec.steps_executed
            << " steps, final loss " << format_double(rec.final_loss) << "\n";
  return 0;
}

// --------------------------------------------------------------- regret ---

struct RegretOpts {
  long horizon = 8192;
  std::size_t dim = 4;
  std::uint64_t seed = 7;
  double half_width = 1.0;
  OptimOpts optim;
  OutOpts out;
};

int run_regret_cmd(CLI::App &app, const RegretOpts &o) {
  decgd::harness::RegretExperiment exp;
  exp.dim = o.dim;
  exp.horizon = o.horizon;
  exp.seed = o.seed;
  exp.half_width = o.half_width;
  exp.checkpoints.clear();
  for (long c = 256; c <= o.horizon; c *= 2)
    exp.checkpoints.push_back(c);
  if (exp.checkpoints.empty() || exp.checkpoints.back() != o.horizon)
    exp.checkpoints.push_back(o.horizon);

  const auto t0 = std::chrono::steady_clock::now();
  const auto res = decgd::harness::run_regret(exp, o.optim.to_spec());
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  const fs::path dir(o.out.out);
  decgd::csv::write_regret_csv(dir / "regret.csv", res);
  write_meta_with_config(
      dir / "meta.txt", app,
      {{"command", "regret"},
       {"horizon", std::to_string(o.horizon)},
       {"dim", std::to_string(o.dim)},
       {"seed", std::to_string(o.seed)},
       {"optimizer", res.record.optimizer_id},
       {"fitted_slope", format_double(res.fitted_slope)},
       {"max_abs_iterate", format_double(res.max_abs_iterate)},
       {"bound_D", format_double(res.bounds.D)},
       {"bound_G", format_double(res.bounds.G)},
       {"bound_L", format_double(res.bounds.L)},
       {"bound_H", format_double(res.bounds.H)},
       {"diverged", res.record.diverged ? "1" : "0"},
       {"wall_seconds", format_double(wall)}});
  if (o.out.emit_plot)
    write_text(dir / "plot.py",
               "import csv\n"
               "import matplotlib.pyplot as plt\n"
               "\n"
               "ts, r, avg = [], [], []\n"
               "with open(\"regret.csv\") as f:\n"
               "    for row in csv.DictReader(f):\n"
               "        ts.append(int(row[\"horizon\"]))\n"
               "        r.append(float(row[\"regret\"]))\n"
               "        avg.append(float(row[\"avg_regret\"]))\n"
               "fig, (a1, a2) = plt.subplots(1, 2, figsize=(9, 4))\n"
               "a1.loglog(ts, r, marker=\"o\")\n"
               "a1.set_xlabel(\"T\")\n"
               "a1.set_ylabel(\"R(T)\")\n"
               "a2.semilogx(ts, avg, marker=\"o\")\n"
               "a2.set_xlabel(\"T\")\n"
               "a2.set_ylabel(\"R(T)/T\")\n"
               "fig.tight_layout()\n"
               "fig.savefig(\"regret.png\", dpi=150)\n");

  if (res.record.diverged) {
    std::cerr << "run diverged: " << res.record.divergence_note << "\n";
    return 2;
  }
  std::cout << "regret done: slope " << format_double(res.fitted_slope)
            << "\n";
  return 0;
}

// ---------------------------------------------------------------- train ---

struct TrainOpts {
  std::string dataset = "synthetic";
  std::string train_csv, test_csv;
  std::size_t per_class = 100;
  double separation = 4.0;
  std::uint64_t data_seed = 42;
  std::vector<std::size_t> hidden = {16};
  std::string activation = "tanh";
  std::string loss_fn = "ce";
  std::size_t classes = 0; // 0 = infer
  std::size_t batch = 32;
  long steps = 500;
  std::uint64_t init_seed = 1;
  std::uint64_t shuffle_seed = 11;
  std::vector<double> sweep_c;
  OptimOpts optim;
  OutOpts out;
};

int run_train(CLI::App &app, const TrainOpts &o) {
  decgd::mlp::Dataset train, test;
  if (o.dataset == "synthetic") {
    train = decgd::mlp::make_two_gaussians(o.per_class, o.separation,
                                           o.data_seed);
    test = decgd::mlp::make_two_gaussians(o.per_class, o.separation,
                                          o.data_seed + 1);
  } else {
    if (o.train_csv.empty())
      throw std::invalid_argument("--train-csv is required with --dataset csv");
    train = decgd::mlp::load_csv_dataset(o.train_csv);
    test = o.test_csv.empty() ? train
                              : decgd::mlp::load_csv_dataset(o.test_csv);
  }

  std::size_t classes = o.classes;
  if (classes == 0) {
    int max_label = 0;
    for (int l : train.labels)
      max_label = std::max(max_label, l);
    classes = static_cast<std::size_t>(max_label) + 1;
    if (o.dataset == "synthetic")
      classes = 2;
  }

  decgd::harness::TrainConfig cfg;
  cfg.spec.layer_sizes.push_back(train.features.at(0).size());
  for (std::size_t hsize : o.hidden)
    cfg.spec.layer_sizes.push_back(hsize);
  cfg.spec.layer_sizes.push_back(classes);
  cfg.spec.activation = o.activation == "relu"
                            ? decgd::mlp::Activation::ReLU
                            : decgd::mlp::Activation::Tanh;
  cfg.spec.loss = o.loss_fn == "mse"
                      ? decgd::mlp::LossKind::MSE
                      : decgd::mlp::LossKind::SoftmaxCrossEntropy;
  cfg.spec.init_seed = o.init_seed;

  train.batch_size = std::min(o.batch, train.size());
  train.shuffle_seed = o.shuffle_seed;
  test.batch_size = test.size();
  cfg.train = std::move(train);
  cfg.test = std::move(test);
  cfg.optimizer = o.optim.to_spec();
  cfg.steps = o.steps;

  const fs::path dir(o.out.out);
  const auto t0 = std::chrono::steady_clock::now();

  if (!o.sweep_c.empty()) {
    const auto rows = decgd::harness::sweep_c(cfg, o.sweep_c);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    decgd::csv::write_sweep_csv(dir / "sweep.csv", rows);
    bool any_bad = false;
    double acc_lo = 1.0, acc_hi = 0.0;
    for (const auto &r : rows) {
      any_bad = any_bad || !r.converged;
      acc_lo = std::min(acc_lo, r.final_test_acc);
      acc_hi = std::max(acc_hi, r.final_test_acc);
    }
    write_meta_with_config(
        dir / "meta.txt", app,
        {{"command", "train"},
         {"mode", "sweep_c"},
         {"runs", std::to_string(rows.size())},
         {"all_converged", any_bad ? "0" : "1"},
         {"test_acc_spread", format_double(acc_hi - acc_lo)},
         {"wall_seconds", format_double(wall)}});
    if (o.out.emit_plot)
      write_text(dir / "plot.py",
                 "import csv\n"
                 "import matplotlib.pyplot as plt\n"
                 "\n"
                 "cs, accs = [], []\n"
                 "with open(\"sweep.csv\") as f:\n"
                 "    for row in csv.DictReader(f):\n"
                 "        cs.append(float(row[\"c\"]))\n"
                 "        accs.append(float(row[\"final_test_acc\"]))\n"
                 "plt.semilogx(cs, accs, marker=\"o\")\n"
                 "plt.xlabel(\"c\")\n"
                 "plt.ylabel(\"final test accuracy\")\n"
                 "plt.ylim(0, 1)\n"
                 "plt.savefig(\"sweep.png\", dpi=150)\n");
    if (any_bad) {
      std::cerr << "sweep had non-converged runs\n";
      return 2;
    }
    std::cout << "sweep done: " << rows.size() << " runs, accuracy spread "
              << format_double(acc_hi - acc_lo) << "\n";
    return 0;
  }

  const auto res = decgd::harness::train_mlp(cfg);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  decgd::csv::write_train_csv(dir / "train.csv", res.epochs);
  write_meta_with_config(
      dir / "meta.txt", app,
      {{"command", "train"},
       {"train_samples", std::to_string(cfg.train.size())},
       {"test_samples", std::to_string(cfg.test.size())},
       {"classes", std::to_string(classes)},
       {"optimizer", cfg.optimizer.id},
       {"steps_executed", std::to_string(res.steps_executed)},
       {"initial_train_loss", format_double(res.initial_train_loss)},
       {"final_train_loss", format_double(res.final_train_loss)},
       {"final_test_loss", format_double(res.final_test_loss)},
       {"final_train_acc", format_double(res.final_train_acc)},
       {"final_test_acc", format_double(res.final_test_acc)},
       {"diverged", res.diverged ? "1" : "0"},
       {"wall_seconds", format_double(wall)}});
  if (o.out.emit_plot)
    write_text(dir / "plot.py",
               "import csv\n"
               "import matplotlib.pyplot as plt\n"
               "\n"
               "ep, trl, tel, tra, tea = [], [], [], [], []\n"
               "with open(\"train.csv\") as f:\n"
               "    for row in csv.DictReader(f):\n"
               "        ep.append(int(row[\"epoch\"]))\n"
               "        trl.append(float(row[\"train_loss\"]))\n"
               "        tel.append(float(row[\"test_loss\"]))\n"
               "        tra.append(float(row[\"train_acc\"]))\n"
               "        tea.append(float(row[\"test_acc\"]))\n"
               "fig, (a1, a2) = plt.subplots(1, 2, figsize=(9, 4))\n"
               "a1.plot(ep, trl, label=\"train\")\n"
               "a1.plot(ep, tel, label=\"test\")\n"
               "a1.set_xlabel(\"epoch\")\n"
               "a1.set_ylabel(\"loss\")\n"
               "a1.legend()\n"
               "a2.plot(ep, tra, label=\"train\")\n"
               "a2.plot(ep, tea, label=\"test\")\n"
               "a2.set_xlabel(\"epoch\")\n"
               "a2.set_ylabel(\"accuracy\")\n"
               "a2.legend()\n"
               "fig.tight_layout()\n"
               "fig.savefig(\"train.png\", dpi=150)\n");

  if (res.diverged) {
    std::cerr << "training diverged after " << res.steps_executed
              << " steps\n";
    return 2;
  }
  std::cout << "train done: test accuracy "
            << format_double(res.final_test_acc) << "\n";
  return 0;
}

// ------------------------------------------------------------ gradcheck ---

struct GradcheckOpts {
  std::string problem = "powell";
  std::size_t dim = 0;
  double h = 1e-5;
};

int run_gradcheck(const GradcheckOpts &o) {
  double err = 0.0;
  if (o.problem == "powell") {
    decgd::problems::PowellSingular oracle(o.dim == 0 ? 100 : o.dim);
    err = decgd::problems::finite_diff_check(
        oracle,
        decgd::problems::PowellSingular::standard_start(oracle.dimension()),
        o.h);
  } else if (o.problem == "rosenbrock") {
    decgd::problems::ExtendedRosenbrock oracle(o.dim == 0 ? 1000 : o.dim);
    err = decgd::problems::finite_diff_check(
        oracle,
        decgd::problems::ExtendedRosenbrock::standard_start(
            oracle.dimension()),
        o.h);
  } else if (o.problem == "quadratic") {
    const std::size_t dim = o.dim == 0 ? 10 : o.dim;
    std::vector<double> a(dim), b(dim), x(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      a[i] = 1.0 + 0.5 * static_cast<double>(i % 4);
      b[i] = -1.0 + 0.4 * static_cast<double>(i % 6);
      x[i] = 0.3 * (static_cast<double>(i % 5) - 2.0);
    }
    decgd::problems::Quadratic oracle(a, b);
    err = decgd::problems::finite_diff_check(oracle, x, o.h);
  } else if (o.problem == "mlp") {
    decgd::mlp::MlpSpec spec;
    spec.layer_sizes = {2, 16, 3};
    spec.activation = decgd::mlp::Activation::Tanh;
    spec.loss = decgd::mlp::LossKind::SoftmaxCrossEntropy;
    spec.init_seed = 7;
    decgd::mlp::Dataset data;
    std::mt19937_64 rng(123);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int i = 0; i < 50; ++i) {
      data.features.push_back({gauss(rng), gauss(rng)});
      data.labels.push_back(i % 3);
    }
    data.batch_size = data.size(); // full batch: deterministic
    decgd::mlp::MlpOracle oracle(spec, data);
    err = decgd::problems::finite_diff_check(oracle, spec.init_weights(), o.h);
  } else { // debug-badgrad: deliberately corrupted gradient
    decgd::problems::PowellSingular inner(8);
    decgd::problems::BrokenGradient oracle(inner);
    err = decgd::problems::finite_diff_check(
        oracle, decgd::problems::PowellSingular::standard_start(8), o.h);
  }
  std::cout << "max relative error: " << format_double(err) << "\n";
  return err <= 1e-4 ? 0 : 2;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"DecGD optimizer experiment runner"};
  app.require_subcommand(1);
  app.set_config("--config", "",
                 "key=value config file, one section per subcommand");
  app.allow_config_extras(CLI::config_extras_mode::error);

  BenchOpts bench_opts;
  CLI::App *bench = app.add_subcommand(
      "bench", "deterministic benchmark on a test function");
  bench->add_option("--problem", bench_opts.problem)
      ->check(CLI::IsMember({"powell", "rosenbrock", "quadratic"}))
      ->capture_default_str();
  bench->add_option("--steps", bench_opts.steps)
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench->add_option("--dim", bench_opts.dim,
                    "problem dimension (0 = per-problem default)")
      ->capture_default_str();
  bench->add_option("--stop-below", bench_opts.stop_below,
                    "stop once the loss falls below this value");
  add_optim_options(bench, bench_opts.optim);
  add_out_options(bench, bench_opts.out);

  RegretOpts regret_opts;
  regret_opts.optim.lr = 0.05;
  regret_opts.optim.schedule = "inv_sqrt";
  CLI::App *regret = app.add_subcommand(
      "regret", "online convex suite with seeded random quadratics");
  regret->add_option("--horizon", regret_opts.horizon)
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  regret->add_option("--dim", regret_opts.dim)
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  regret->add_option("--seed", regret_opts.seed)->capture_default_str();
  regret->add_option("--half-width", regret_opts.half_width,
                     "feasible box is [-half_width, half_width]^dim")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_optim_options(regret, regret_opts.optim);
  add_out_options(regret, regret_opts.out);

  TrainOpts train_opts;
  CLI::App *train =
      app.add_subcommand("train", "train the toy MLP classifier");
  train->add_option("--dataset", train_opts.dataset)
      ->check(CLI::IsMember({"synthetic", "csv"}))
      ->capture_default_str();
  train->add_option("--train-csv", train_opts.train_csv,
                    "training data (label,f0,f1,... with header)");
  train->add_option("--test-csv", train_opts.test_csv,
                    "test data; defaults to the training file");
  train->add_option("--per-class", train_opts.per_class)
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train->add_option("--separation", train_opts.separation)
      ->capture_default_str();
  train->add_option("--data-seed", train_opts.data_seed)
      ->capture_default_str();
  train->add_option("--hidden", train_opts.hidden,
                    "hidden layer sizes, comma separated")
      ->delimiter(',')
      ->capture_default_str();
  train->add_option("--activation", train_opts.activation)
      ->check(CLI::IsMember({"tanh", "relu"}))
      ->capture_default_str();
  train->add_option("--loss-fn", train_opts.loss_fn)
      ->check(CLI::IsMember({"ce", "mse"}))
      ->capture_default_str();
  train->add_option("--classes", train_opts.classes,
                    "number of classes (0 = infer from labels)")
      ->capture_default_str();
  train->add_option("--batch", train_opts.batch)
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train->add_option("--steps", train_opts.steps)
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train->add_option("--init-seed", train_opts.init_seed)
      ->capture_default_str();
  train->add_option("--shuffle-seed", train_opts.shuffle_seed)
      ->capture_default_str();
  train->add_option("--sweep-c", train_opts.sweep_c,
                    "rerun training for each c, e.g. 10,1,1e-3,1e-8")
      ->delimiter(',');
  add_optim_options(train, train_opts.optim);
  add_out_options(train, train_opts.out);

  GradcheckOpts gc_opts;
  CLI::App *gradcheck = app.add_subcommand(
      "gradcheck", "finite-difference check of an analytic gradient");
  gradcheck->add_option("--problem", gc_opts.problem)
      ->check(CLI::IsMember(
          {"powell", "rosenbrock", "quadratic", "mlp", "debug-badgrad"}))
      ->capture_default_str();
  gradcheck->add_option("--dim", gc_opts.dim,
                        "problem dimension (0 = per-problem default)")
      ->capture_default_str();
  gradcheck->add_option("--fd-step", gc_opts.h, "finite-difference step")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*bench)
      return run_bench(app, bench_opts);
    if (*regret)
      return run_regret_cmd(app, regret_opts);
    if (*train)
      return run_train(app, train_opts);
    if (*gradcheck)
      return run_gradcheck(gc_opts);
  } catch (const decgd::NonFiniteError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
