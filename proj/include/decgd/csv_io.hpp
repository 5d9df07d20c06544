#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "decgd/harness.hpp"

namespace decgd::csv {

// Column sets are fixed; tests pin these strings as golden values. Note that
// per-step wall time is deliberately absent: output files must be
// byte-identical across reruns of the same seeded config.
inline constexpr const char *kRunHeader =
    "step,eta,loss,grad_norm,elr_min,elr_max,elr_mean,neg_vstar";
inline constexpr const char *kRegretHeader = "horizon,regret,avg_regret,slope";
inline constexpr const char *kTrainHeader =
    "epoch,train_loss,test_loss,train_acc,test_acc";
inline constexpr const char *kSweepHeader =
    "c,final_train_loss,final_test_loss,final_train_acc,final_test_acc,"
    "converged";

// 17 significant digits, '.' decimal point: round-trips any double exactly.
std::string format_double(double v);

void write_run_csv(const std::filesystem::path &path,
                   const harness::RunRecord &rec);
void write_regret_csv(const std::filesystem::path &path,
                      const harness::RegretResult &res);
void write_train_csv(const std::filesystem::path &path,
                     const std::vector<harness::EpochRow> &rows);
void write_sweep_csv(const std::filesystem::path &path,
                     const std::vector<harness::SweepRow> &rows);

// key=value lines, one per entry, in the given order.
void write_meta(const std::filesystem::path &path,
                const std::vector<std::pair<std::string, std::string>> &entries);

} // namespace decgd::csv
