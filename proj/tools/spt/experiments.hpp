#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "spt/grid.hpp"
#include "spt/model.hpp"
#include "spt/table.hpp"

namespace spt::cli {

struct ExperimentConfig {
  std::string experiment;
  SystemParams params{};
  double gamma = 0.0;
  double gamma_p = 0.0;
  int n1 = 1;
  int n2 = 10;
  std::string units = "g2";
  std::optional<std::pair<std::string, GridSpec>> sweep;
  std::uint64_t seed = 1;
  int threads = 0;

  // experiment specific
  std::string method;
  double drive = 0.0;
  double tau_kappa1 = 10.0;
  double center_tau = 5.0;
  int points = 401;
  double t_end = 0.0;
  int n_traj = 0;
  double duration = 0.0;
  std::string input = "e00";
  /// trajectories: emit the per-jump log instead of the count histogram.
  bool jump_log = true;
  double gain = 0.0;
  int modes = 0;
  double zeta = 2.0;
  double mode_duration = 0.0;
  std::string model = "exponential";
  std::string histogram;
  long samples = 0;
  double window = 0.0;
};

/// Names accepted by --sweep (and the --<name>-grid shortcuts).
const std::vector<std::string>& sweepable_parameters();

/// Runs one experiment. Invalid configurations throw DomainError; numerical
/// failures propagate as NumericalError.
Table run_experiment(ExperimentConfig config);

/// Full command-line entry point; returns the process exit code
/// (0 success, 2 configuration error, 3 numerical failure).
int main(int argc, char** argv);

}  // namespace spt::cli
