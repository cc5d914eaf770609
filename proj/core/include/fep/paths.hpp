#pragma once

#include <vector>

#include "fep/configuration.hpp"
#include "fep/kernel.hpp"

namespace fep {

/// Moves that take an ergodic configuration to the full one, filling the
/// leftmost hole first: a hole at site 1 is filled by the left reservoir,
/// any other hole is filled by the particle on its left.
///
/// Every move has positive rate when applied in order and every visited
/// configuration is ergodic. Throws std::invalid_argument for a
/// non-ergodic input.
std::vector<Move> irreducibility_path(const Configuration& cfg);

/// Edge list that carries the particle at `origin` to the hole at
/// `origin + ell`, i.e. maps cfg to cfg with the two sites exchanged.
///
/// The list always has exactly 3 ell - 4 entries: edges origin+1 ...
/// origin+ell-1, then origin ... origin+ell-2, then origin+ell-3 down to
/// origin. Some of these jumps are blocked along the way; replaying with
/// replay_edges skips them.
///
/// Preconditions (std::invalid_argument, naming the failed one):
/// ell >= 2; origin-1 and origin+ell+1 inside the bulk; eta_origin = 1;
/// eta_{origin+ell} = 0; cfg and the exchanged configuration ergodic.
std::vector<int> long_jump_path(const Configuration& cfg, int origin, int ell);

/// Replays a list of bulk edges, performing each exchange only when its
/// jump rate is positive in the current configuration. When `visited` is
/// non-null every intermediate configuration (including the start) is
/// appended to it.
Configuration replay_edges(const Configuration& cfg, const SystemParams& params,
                           const std::vector<int>& edges,
                           std::vector<Configuration>* visited = nullptr);

}  // namespace fep
