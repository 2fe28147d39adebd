#pragma once

// Command-line surface: classify, analyze, simulate, transient, verify.
//
// Exit codes: 0 ok, 1 validation, 2 numerical failure, 3 I/O, 4 verification failed.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ou_irrev/model.hpp"

namespace ouirr::cli {

enum ExitCode : int {
  kOk = 0,
  kValidation = 1,
  kNumerical = 2,
  kIo = 3,
  kVerificationFailed = 4,
};

struct RunConfig {
  std::string model_path;
  std::uint64_t seed = 42;
  double dt = 0.01;
  double t_max = 100.0;
  std::optional<std::size_t> steps;  // overrides t_max / dt
  std::size_t paths = 200;
  double burn_in = 10.0;
  std::vector<double> tau_list{0.1, 0.5, 1.0};
  std::string out_path;
  std::vector<double> x0;
  bool json = false;
  std::string scheme = "exact";
  // transient
  std::size_t points = 101;
  std::vector<double> t_grid;
  /// 0 = OU_IRREV_THREADS or the OpenMP default
  int threads = 0;

  std::size_t resolved_steps() const;
};

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

int cmd_classify(const RunConfig& cfg, std::ostream& out);
int cmd_analyze(const RunConfig& cfg, std::ostream& out);
int cmd_simulate(const RunConfig& cfg, std::ostream& out);
int cmd_transient(const RunConfig& cfg, std::ostream& out);
int cmd_verify(const RunConfig& cfg, std::ostream& out);

nlohmann::json classify_report(const LinearModel& model);
nlohmann::json analyze_report(const LinearModel& model, std::span<const double> taus);
/// Returns the report; report["pass"] is the overall verdict.
nlohmann::json verify_report(const LinearModel& model, const RunConfig& cfg);
std::string transient_csv(const LinearModel& model, std::span<const double> x0,
                          std::span<const double> t_grid);

}  // namespace ouirr::cli
