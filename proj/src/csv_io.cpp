#include "decgd/csv_io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace decgd::csv {

namespace {

std::ofstream open_out(const std::filesystem::path &path) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot write file: " + path.string());
  return out;
}

} // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_run_csv(const std::filesystem::path &path,
                   const harness::RunRecord &rec) {
  auto out = open_out(path);
  out << kRunHeader << '\n';
  for (const auto &r : rec.rows)
    out << r.step << ',' << format_double(r.eta) << ','
        << format_double(r.loss) << ',' << format_double(r.grad_norm) << ','
        << format_double(r.elr_min) << ',' << format_double(r.elr_max) << ','
        << format_double(r.elr_mean) << ',' << r.neg_v_star << '\n';
}

void write_regret_csv(const std::filesystem::path &path,
                      const harness::RegretResult &res) {
  auto out = open_out(path);
  out << kRegretHeader << '\n';
  for (const auto &p : res.curve)
    out << p.horizon << ',' << format_double(p.regret) << ','
        << format_double(p.avg_regret) << ','
        << format_double(res.fitted_slope) << '\n';
}

void write_train_csv(const std::filesystem::path &path,
                     const std::vector<harness::EpochRow> &rows) {
  auto out = open_out(path);
  out << kTrainHeader << '\n';
  for (const auto &r : rows)
    out << r.epoch << ',' << format_double(r.train_loss) << ','
        << format_double(r.test_loss) << ',' << format_double(r.train_acc)
        << ',' << format_double(r.test_acc) << '\n';
}

void write_sweep_csv(const std::filesystem::path &path,
                     const std::vector<harness::SweepRow> &rows) {
  auto out = open_out(path);
  out << kSweepHeader << '\n';
  for (const auto &r : rows)
    out << format_double(r.c) << ',' << format_double(r.final_train_loss)
        << ',' << format_double(r.final_test_loss) << ','
        << format_double(r.final_train_acc) << ','
        << format_double(r.final_test_acc) << ',' << (r.converged ? 1 : 0)
        << '\n';
}

void write_meta(const std::filesystem::path &path,
                const std::vector<std::pair<std::string, std::string>> &entries) {
  auto out = open_out(path);
  for (const auto &[k, v] : entries)
    out << k << '=' << v << '\n';
}

} // namespace decgd::csv
