#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fep/measures.hpp"
#include "fep/observables.hpp"
#include "fep/params.hpp"

namespace fep::harness {

/// Stationary field estimate from time averages of eta_x and h_x.
struct StationaryEstimate {
  Profile density;
  Profile active;
  double burn_in = 0.0;
  double batch_length = 0.0;
  int batches = 0;
  double averaging_time = 0.0;
  /// max_x |first half mean - second half mean| / combined stderr, density.
  double half_gap_z = 0.0;
  [[nodiscard]] double max_std_error() const;
};

struct LongRunOptions {
  double burn_in = 2.0;
  int batches = 32;
  double initial_batch_length = 1.0;
  double target_std_error = 0.005;
  double max_averaging_time = 20000.0;
};

/// One long trajectory with batch means. Runs `batches` batches; while the
/// largest standard error (density or active field) exceeds the target,
/// runs as many again and merges neighbouring batches pairwise, so the
/// batch count stays fixed and the batch length doubles.
StationaryEstimate estimate_long_run(const SystemParams& params, const MeasureSpec& initial, std::uint64_t seed,
                                     const LongRunOptions& options = {});

/// Independent replicas, each contributing its own time average as one batch.
StationaryEstimate estimate_replicas(const SystemParams& params, const MeasureSpec& initial, int replicas,
                                     std::uint64_t seed, double burn_in, double window, unsigned workers = 0);

/// One row of the stationary comparison table.
struct StationaryRow {
  int x = 0;
  double u = 0.0;
  double density = 0.0;
  double density_stderr = 0.0;
  double density_prediction = 0.0;  // rho^ss(x/N)
  double active = 0.0;
  double active_stderr = 0.0;
  double active_exact = 0.0;        // closed-form stationary active field
};

struct Fig3Report {
  SystemParams params;
  StationaryEstimate estimate;
  std::vector<StationaryRow> rows;
  double max_density_gap = 0.0;     // max_x |density - prediction|
  double max_active_z = 0.0;        // max_x |active - exact| / stderr
  double density_tolerance = 0.03;
  double z_tolerance = 4.0;
  [[nodiscard]] bool active_pass() const { return max_active_z <= z_tolerance; }
  [[nodiscard]] bool density_pass() const { return max_density_gap <= density_tolerance; }
  [[nodiscard]] bool pass() const { return active_pass() && density_pass(); }
};

Fig3Report run_fig3(const SystemParams& params, std::uint64_t seed, const LongRunOptions& options = {});
void write_fig3(const Fig3Report& report, const std::string& dir);

}  // namespace fep::harness
