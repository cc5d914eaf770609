#include "fep/paths.hpp"

#include <stdexcept>
#include <string>

namespace fep {

std::vector<Move> irreducibility_path(const Configuration& cfg) {
  if (!is_ergodic(cfg)) {
    throw std::invalid_argument("irreducibility_path: configuration is not ergodic");
  }
  std::vector<Move> path;
  Configuration cur = cfg;
  const int last = cur.n() - 1;
  for (;;) {
    int hole = 1;
    while (hole <= last && cur[hole]) ++hole;
    if (hole > last) break;
    // The site left of the leftmost hole is occupied, and so is the one
    // before it (or it is the left reservoir), so the jump is allowed.
    const Move m = hole == 1 ? Move::flip_left() : Move::swap(hole - 1);
    apply_move_in_place(cur, m);
    path.push_back(m);
  }
  return path;
}

std::vector<int> long_jump_path(const Configuration& cfg, int origin, int ell) {
  const int last = cfg.n() - 1;
  if (ell < 2) throw std::invalid_argument("long_jump_path: ell must be >= 2");
  if (origin - 1 < 1) throw std::invalid_argument("long_jump_path: origin-1 outside the bulk");
  if (origin + ell + 1 > last) {
    throw std::invalid_argument("long_jump_path: origin+ell+1 outside the bulk");
  }
  if (!cfg[origin]) throw std::invalid_argument("long_jump_path: site origin is empty");
  if (cfg[origin + ell]) throw std::invalid_argument("long_jump_path: site origin+ell is occupied");
  if (!is_ergodic(cfg)) throw std::invalid_argument("long_jump_path: configuration not ergodic");
  Configuration target = cfg;
  target.swap_sites(origin, origin + ell);
  if (!is_ergodic(target)) {
    throw std::invalid_argument("long_jump_path: exchanged configuration not ergodic");
  }

  std::vector<int> edges;
  edges.reserve(static_cast<std::size_t>(3 * ell - 4));
  // A particle from origin+1 crosses to origin+ell.
  for (int k = 1; k <= ell - 1; ++k) edges.push_back(origin + k);
  // The origin particle crosses the segment behind it.
  for (int k = 0; k <= ell - 2; ++k) edges.push_back(origin + k);
  // The (particle, hole) pair it left behind walks back to the origin.
  for (int k = ell - 3; k >= 0; --k) edges.push_back(origin + k);
  return edges;
}

Configuration replay_edges(const Configuration& cfg, const SystemParams& params,
                           const std::vector<int>& edges, std::vector<Configuration>* visited) {
  Configuration cur = cfg;
  if (visited) visited->push_back(cur);
  for (const int x : edges) {
    if (bulk_rate(cur, params, x) > 0.0) {
      cur.swap_sites(x, x + 1);
      if (visited) visited->push_back(cur);
    }
  }
  return cur;
}

}  // namespace fep
