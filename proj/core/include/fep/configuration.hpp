#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace fep {

/// Occupancy of the bulk {1, ..., N-1}, packed one bit per site.
///
/// Site x lives at bit x of the word array; bits 0 and N are padding and
/// always zero, so neighbour lookups at the extreme sites never branch on
/// storage.
class Configuration {
 public:
  Configuration() = default;

  /// Empty (or, with `filled`, full) configuration for lattice size N.
  explicit Configuration(int n, bool filled = false);

  /// Parses "1011..." as eta_1 ... eta_{N-1}; N = length + 1.
  static Configuration from_string(std::string_view bits);

  /// Bit (x-1) of `pattern` is eta_x. Requires N - 1 <= 64.
  static Configuration from_pattern(std::uint64_t pattern, int n);

  static Configuration full(int n) { return Configuration(n, true); }

  [[nodiscard]] int n() const noexcept { return n_; }
  [[nodiscard]] int sites() const noexcept { return n_ - 1; }

  /// Unchecked read, 1 <= x <= N-1 (0 and N read as empty).
  [[nodiscard]] bool operator[](int x) const noexcept {
    return (words_[static_cast<std::size_t>(x) >> 6] >> (x & 63)) & 1U;
  }

  /// Checked read; throws std::out_of_range outside {1, ..., N-1}.
  [[nodiscard]] bool at(int x) const;

  void set(int x, bool value);

  /// Unchecked toggle of site x, 1 <= x <= N-1.
  void toggle(int x) noexcept { words_[static_cast<std::size_t>(x) >> 6] ^= std::uint64_t{1} << (x & 63); }

  void flip(int x);
  void swap_sites(int x, int y);

  [[nodiscard]] int count() const;

  /// Inverse of from_pattern. Requires N - 1 <= 64.
  [[nodiscard]] std::uint64_t pattern() const;

  [[nodiscard]] std::string to_string() const;

  friend bool operator==(const Configuration&, const Configuration&) = default;

 private:
  void check_site(int x) const;

  int n_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace fep
