#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "fep/configuration.hpp"
#include "fep/params.hpp"

namespace fep::testing {

// Occupations with the reservoir values at 0 and N, as plain doubles.
inline std::vector<double> extended(const Configuration& cfg, const SystemParams& p) {
  std::vector<double> e(static_cast<std::size_t>(cfg.n() + 1));
  e[0] = p.alpha;
  e.back() = p.beta;
  for (int x = 1; x < cfg.n(); ++x) e[static_cast<std::size_t>(x)] = cfg.at(x) ? 1.0 : 0.0;
  return e;
}

// Jump rate read off the verbal rule: a particle moves to an empty
// neighbour when its other neighbour is occupied (reservoirs count with
// their density).
inline double rule_rate(const Configuration& cfg, const SystemParams& p, int x) {
  const auto e = extended(cfg, p);
  const auto i = static_cast<std::size_t>(x);
  double r = 0.0;
  if (e[i] == 1.0 && e[i + 1] == 0.0) r += e[i - 1];
  if (e[i] == 0.0 && e[i + 1] == 1.0) r += e[i + 2];
  return r;
}

// Site holds a particle with at least one occupied neighbour.
inline double rule_active(const Configuration& cfg, const SystemParams& p, int x) {
  if (x == 0) return p.alpha;
  if (x == cfg.n()) return p.beta;
  const auto e = extended(cfg, p);
  const auto i = static_cast<std::size_t>(x);
  if (e[i] == 0.0) return 0.0;
  // P(at least one neighbour occupied) with independent reservoir values.
  return 1.0 - (1.0 - e[i - 1]) * (1.0 - e[i + 1]);
}

inline bool no_adjacent_holes(const std::string& s) { return s.find("00") == std::string::npos; }

// Random ergodic configuration: independent biased bits, except that a
// hole is always followed by a particle.
inline Configuration random_ergodic(int n, std::mt19937_64& gen, double p_one = 0.7) {
  std::bernoulli_distribution bit(p_one);
  std::string s;
  for (int x = 1; x < n; ++x) s.push_back((!s.empty() && s.back() == '0') || bit(gen) ? '1' : '0');
  return Configuration::from_string(s);
}

// All 0/1 strings of length len.
inline std::vector<std::string> all_words(int len) {
  std::vector<std::string> out;
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << len); ++m) {
    std::string s;
    for (int i = 0; i < len; ++i) s.push_back(((m >> i) & 1U) ? '1' : '0');
    out.push_back(s);
  }
  return out;
}

}  // namespace fep::testing
