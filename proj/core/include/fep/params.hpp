#pragma once

namespace fep {

/// Model constants of the boundary-driven facilitated exclusion process.
///
/// The bulk is the lattice {1, ..., N-1}; `n` stores N. Reservoir densities
/// are `alpha` (left) and `beta` (right); the reservoirs act at speed
/// kappa * N^-theta relative to the bulk jumps.
struct SystemParams {
  int n = 0;
  double alpha = 0.5;
  double beta = 0.5;
  double theta = 0.0;
  double kappa = 1.0;

  /// kappa * N^-theta.
  [[nodiscard]] double boundary_speed() const;

  /// N^2, the diffusive acceleration of the generator.
  [[nodiscard]] double time_scale() const;

  /// Throws std::invalid_argument unless 0 < alpha, beta < 1, kappa > 0,
  /// N >= 4 and the boundary speed is finite and positive.
  void validate() const;
};

/// Builds and validates a parameter set.
SystemParams make_params(int n, double alpha, double beta, double theta = 0.0,
                         double kappa = 1.0);

}  // namespace fep
