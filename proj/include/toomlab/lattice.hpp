#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "toomlab/rule.hpp"

namespace toomlab {

/// Periodic box Z_{L_1} x ... x Z_{L_d}. Sites are indexed row-major (last
/// coordinate fastest); a "row" is a line along the last axis.
class Torus {
 public:
  explicit Torus(std::vector<int> dims);

  int dimension() const noexcept { return static_cast<int>(dims_.size()); }
  const std::vector<int>& dims() const noexcept { return dims_; }
  std::uint64_t sites() const noexcept { return sites_; }
  int row_length() const noexcept { return dims_.back(); }
  std::uint64_t rows() const noexcept { return sites_ / dims_.back(); }
  std::size_t words_per_row() const noexcept { return words_per_row_; }

  std::uint64_t index(std::span<const int> coords) const;  // coordinates are wrapped
  std::vector<int> coords(std::uint64_t site) const;
  /// Site reached from `site` by adding `offset` (periodically).
  std::uint64_t neighbor(std::uint64_t site, const Offset& offset) const;

  /// Every side must be at least 2 * max |u|_inf + 1 so that no site is its
  /// own neighbor's alias; throws ConfigError otherwise.
  void require_fits(const RuleSpec& rule) const;

  bool operator==(const Torus&) const = default;

 private:
  std::vector<int> dims_;
  std::uint64_t sites_;
  std::size_t words_per_row_;
};

/// Bit-packed spin configuration (bit 1 means spin +1). Each row occupies
/// words_per_row() 64-bit words; padding bits past the row end stay zero.
class LatticeState {
 public:
  explicit LatticeState(Torus torus, bool plus = true);

  static LatticeState all_plus(Torus torus) { return LatticeState(std::move(torus), true); }
  static LatticeState all_minus(Torus torus) { return LatticeState(std::move(torus), false); }
  /// Bit x of `code` is site x; valid for at most 64 sites.
  static LatticeState from_code(Torus torus, std::uint64_t code);

  const Torus& torus() const noexcept { return torus_; }
  std::uint64_t sites() const noexcept { return torus_.sites(); }

  Spin get(std::uint64_t site) const;
  bool plus(std::uint64_t site) const;
  void set(std::uint64_t site, Spin s);

  std::uint64_t count_plus() const;
  std::uint64_t count_minus() const { return sites() - count_plus(); }
  bool is_all_plus() const { return count_plus() == sites(); }
  double magnetization() const;

  std::uint64_t code() const;  // inverse of from_code

  /// State translated so that new(x) = old(x + shift).
  LatticeState shifted(const Offset& shift) const;

  std::span<std::uint64_t> row(std::uint64_t r);
  std::span<const std::uint64_t> row(std::uint64_t r) const;
  std::span<const std::uint64_t> words() const noexcept { return words_; }
  std::span<std::uint64_t> words() noexcept { return words_; }

  bool operator==(const LatticeState&) const = default;

 private:
  Torus torus_;
  std::vector<std::uint64_t> words_;
};

/// Sitewise order: a <= b iff every +1 of a is +1 in b.
bool leq(const LatticeState& a, const LatticeState& b);

}  // namespace toomlab
