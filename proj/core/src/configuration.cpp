#include "fep/configuration.hpp"

#include <bit>
#include <stdexcept>

namespace fep {

namespace {

std::size_t word_count(int n) { return (static_cast<std::size_t>(n) + 1 + 63) / 64; }

}  // namespace

Configuration::Configuration(int n, bool filled) : n_(n) {
  if (n < 2) throw std::invalid_argument("Configuration needs N >= 2");
  words_.assign(word_count(n), 0);
  if (filled) {
    for (int x = 1; x < n; ++x) set(x, true);
  }
}

Configuration Configuration::from_string(std::string_view bits) {
  Configuration cfg(static_cast<int>(bits.size()) + 1);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    const char c = bits[i];
    if (c != '0' && c != '1') throw std::invalid_argument("configuration string must be 0/1");
    cfg.set(static_cast<int>(i) + 1, c == '1');
  }
  return cfg;
}

Configuration Configuration::from_pattern(std::uint64_t pattern, int n) {
  if (n - 1 > 64) throw std::invalid_argument("from_pattern needs N - 1 <= 64");
  Configuration cfg(n);
  for (int x = 1; x < n; ++x) cfg.set(x, ((pattern >> (x - 1)) & 1U) != 0);
  return cfg;
}

void Configuration::check_site(int x) const {
  if (x < 1 || x >= n_) {
    throw std::out_of_range("site " + std::to_string(x) + " outside {1,...," +
                            std::to_string(n_ - 1) + "}");
  }
}

bool Configuration::at(int x) const {
  check_site(x);
  return (*this)[x];
}

void Configuration::set(int x, bool value) {
  check_site(x);
  const std::uint64_t mask = std::uint64_t{1} << (x & 63);
  auto& w = words_[static_cast<std::size_t>(x) >> 6];
  w = value ? (w | mask) : (w & ~mask);
}

void Configuration::flip(int x) {
  check_site(x);
  words_[static_cast<std::size_t>(x) >> 6] ^= std::uint64_t{1} << (x & 63);
}

void Configuration::swap_sites(int x, int y) {
  check_site(x);
  check_site(y);
  const bool a = (*this)[x];
  const bool b = (*this)[y];
  if (a != b) {
    flip(x);
    flip(y);
  }
}

int Configuration::count() const {
  int total = 0;
  for (auto w : words_) total += std::popcount(w);
  return total;
}

std::uint64_t Configuration::pattern() const {
  if (n_ - 1 > 64) throw std::logic_error("pattern() needs N - 1 <= 64");
  std::uint64_t p = 0;
  for (int x = 1; x < n_; ++x) {
    if ((*this)[x]) p |= std::uint64_t{1} << (x - 1);
  }
  return p;
}

std::string Configuration::to_string() const {
  std::string s;
  s.reserve(static_cast<std::size_t>(sites()));
  for (int x = 1; x < n_; ++x) s.push_back((*this)[x] ? '1' : '0');
  return s;
}

}  // namespace fep
