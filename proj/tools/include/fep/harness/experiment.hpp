#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fep/observables.hpp"
#include "fep/params.hpp"
#include "fep/pde.hpp"

namespace fep::harness {

/// Initial density profile together with a printable description.
struct InitialProfile {
  std::function<double(double)> rho;
  std::string description;

  /// u -> left + (right - left) u.
  static InitialProfile linear(double left, double right);
  static InitialProfile constant(double value);
};

struct ExperimentSpec {
  std::string name = "experiment";
  SystemParams params;
  InitialProfile initial;
  std::vector<double> checkpoints;
  int replicas = 16;
  std::uint64_t seed = 1;
  std::string output_dir;
  unsigned workers = 0;

  /// Throws std::invalid_argument: replicas >= 1, checkpoints positive and
  /// ascending, parameters valid, initial profile supercritical on a fine grid.
  void validate() const;
};

struct HydroOptions {
  /// PDE grid cells; 0 picks max(N, 256).
  int pde_cells = 0;
  /// Half-width of the smoothing window in sites; 0 picks N / 16.
  int smoothing = 0;
  double tolerance = 0.02;
  /// Extra observation times whose snapshots are averaged per replica
  /// (the boundary-pinning readout).
  std::vector<double> window_times;
};

struct CheckpointComparison {
  double t = 0.0;
  Profile profile;
  DensityGrid pde;
  /// (1/N) sum_x |smoothed sim - smoothed PDE|, both smoothed with the
  /// same clipped windows.
  double l1 = 0.0;
  /// Same without smoothing.
  double raw_l1 = 0.0;
  /// max_x |sim - PDE| / stderr.
  double max_z = 0.0;
  bool pass = false;
};

struct ComparisonReport {
  ExperimentSpec spec;
  HydroOptions options;
  Regime regime = Regime::Dirichlet;
  std::vector<CheckpointComparison> checkpoints;
  /// Per-replica snapshot average over window_times (empty if none).
  Profile window_profile;
  /// Block density at site 1 of the window average, per replica.
  std::vector<double> window_block_left;
  std::vector<double> window_block_right;

  [[nodiscard]] bool pass() const;
};

/// Runs the replicas from the initial law of `spec.initial`, averages the
/// profiles at each checkpoint and compares with the PDE of the regime
/// selected by theta.
ComparisonReport run_hydro(const ExperimentSpec& spec, const HydroOptions& options = {});

/// Writes profile_t<t>.csv, pde_t<t>.csv and report.csv into `dir`.
void write_report(const ComparisonReport& report, const std::string& dir);

/// Name used for checkpoint files, e.g. 0.05 -> "0.05".
std::string format_time(double t);

/// Mean and standard error of a list of numbers.
struct MeanError {
  double mean = 0.0;
  double std_error = 0.0;
};
MeanError mean_error(const std::vector<double>& values);

}  // namespace fep::harness
