#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "fep/configuration.hpp"
#include "fep/fenwick.hpp"
#include "fep/kernel.hpp"
#include "fep/params.hpp"
#include "fep/rng.hpp"

namespace fep {

/// Continuous-time simulation of the diffusively accelerated chain.
///
/// Rates live in a Fenwick tree with one slot per bulk edge plus one per
/// reservoir. Slots store rates of L_N (bulk c, flips kappa N^-theta b);
/// the N^2 acceleration is applied to time, so `time()` is macroscopic.
/// After a move only the slots whose rate can change are recomputed: a
/// swap on {x, x+1} touches edges x-2 ... x+2 and, near an end, the
/// adjacent reservoir.
class SimulationState {
 public:
  /// Full rebuild of the index every this many events.
  static constexpr std::uint64_t kRebuildInterval = std::uint64_t{1} << 20;

  /// `params` must agree with `cfg` on N; alpha and beta may be anywhere
  /// in [0, 1] here so that degenerate reservoirs can be studied.
  SimulationState(Configuration cfg, SystemParams params, double time = 0.0);

  [[nodiscard]] const Configuration& configuration() const noexcept { return cfg_; }
  [[nodiscard]] const SystemParams& params() const noexcept { return params_; }
  [[nodiscard]] double time() const noexcept { return time_; }
  [[nodiscard]] std::uint64_t events() const noexcept { return events_; }

  /// Total accelerated rate N^2 * sum of enabled move rates.
  [[nodiscard]] double total_rate() const noexcept { return scale_ * rates_.total(); }

  /// Accelerated rate of one move in the current configuration.
  [[nodiscard]] double rate(const Move& move) const;

  /// Recomputes every slot from scratch and checks the incremental total
  /// against it (relative 1e-9). Throws std::logic_error on disagreement.
  void rebuild_rates();

  /// Advances the clock without an event; callers rely on memorylessness.
  void advance_to(double t);

  /// The move whose cumulative rate bracket contains `target`, where
  /// 0 <= target < total_rate() / N^2.
  [[nodiscard]] Move select(double target) const { return move_at(rates_.find(target)); }

  /// Applies a move and refreshes the affected rates. The caller is
  /// responsible for the move having positive rate.
  void apply(const Move& move);

 private:
  [[nodiscard]] std::size_t slot(const Move& move) const;
  [[nodiscard]] Move move_at(std::size_t slot) const;
  void refresh_slot(std::size_t s);
  void refresh_edges(int lo, int hi);

  Configuration cfg_;
  SystemParams params_;
  double speed_;
  double scale_;
  double time_;
  std::uint64_t events_ = 0;
  FenwickTree rates_;
};

struct StepResult {
  Move move;
  double elapsed;
};

/// One exact stochastic-simulation step. Returns nullopt (and leaves the
/// state unchanged) when no move is enabled.
std::optional<StepResult> step(SimulationState& state, RngStream& rng);

/// Callback fired at fixed macroscopic times with the configuration in
/// force at that instant.
struct Observer {
  std::vector<double> times;
  std::function<void(const SimulationState&, double)> callback;
};

/// Called just before a move is applied, with the event time.
using MoveHook = std::function<void(const SimulationState&, const Move&, double)>;

/// Runs until `t_end`. Observer times below the current time are ignored;
/// those in [time, t_end] fire in order, including t_end itself. The hook,
/// when set, sees every event.
void run_until(SimulationState& state, double t_end, std::span<Observer> observers, RngStream& rng,
               const MoveHook& hook = {});

}  // namespace fep
