#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace toomlab {

enum class Spin : std::int8_t { Minus = -1, Plus = 1 };

constexpr Spin operator-(Spin s) noexcept {
  return s == Spin::Plus ? Spin::Minus : Spin::Plus;
}
constexpr int value(Spin s) noexcept { return static_cast<int>(s); }
constexpr Spin spin_from_bit(bool plus) noexcept {
  return plus ? Spin::Plus : Spin::Minus;
}

using Offset = std::vector<int>;

// Local configurations are bitmasks over the neighborhood: bit i set means
// spin +1 at offset u_i.
using LocalConfig = std::uint32_t;

inline constexpr int kMaxNeighborhood = 20;

/// A memoryless monotone binary tessellation rule: neighborhood offsets in
/// Z^d plus the full truth table over 2^R local configurations.
///
/// Construction validates shape only (R in [1, 20], distinct offsets of the
/// stated dimension, table of length 2^R). Monotonicity and non-constancy are
/// reported by check_monotone, so that invalid tables can still be inspected.
class RuleSpec {
 public:
  RuleSpec(int dimension, std::vector<Offset> neighborhood, std::vector<bool> table,
           std::string name = {});

  int dimension() const noexcept { return dimension_; }
  int size() const noexcept { return static_cast<int>(neighborhood_.size()); }
  const std::vector<Offset>& neighborhood() const noexcept { return neighborhood_; }
  const Offset& offset(int i) const { return neighborhood_.at(i); }
  const std::vector<bool>& table() const noexcept { return table_; }
  const std::string& name() const noexcept { return name_; }

  bool output(LocalConfig config) const { return table_[config]; }
  std::size_t table_size() const noexcept { return table_.size(); }

  // max over U of the sup norm / Manhattan norm
  int max_linf() const noexcept;
  int max_l1() const noexcept;

  bool operator==(const RuleSpec&) const = default;

 private:
  int dimension_;
  std::vector<Offset> neighborhood_;
  std::vector<bool> table_;
  std::string name_;
};

Spin evaluate(const RuleSpec& rule, std::span<const Spin> local);

LocalConfig encode_local(std::span<const Spin> local);

struct MonotoneViolation {
  LocalConfig lo;  // lo <= hi componentwise, rule(lo) = +1, rule(hi) = -1
  LocalConfig hi;
};

struct MonotoneVerdict {
  bool monotone = true;
  bool non_constant = true;
  std::optional<MonotoneViolation> witness;

  bool pass() const noexcept { return monotone && non_constant; }
};

MonotoneVerdict check_monotone(const RuleSpec& rule);

/// Inclusion-minimal plus sets, each a sorted list of offset indices, in
/// lexicographic order.
struct PlusSetFamily {
  std::vector<std::vector<int>> sets;

  bool operator==(const PlusSetFamily&) const = default;
};

PlusSetFamily minimal_plus_sets(const RuleSpec& rule);

/// Minimal monotone extension: +1 exactly on configurations whose plus
/// positions contain one of the given sets.
RuleSpec rule_from_plus_sets(int dimension, std::vector<Offset> neighborhood,
                             const std::vector<std::vector<int>>& plus_sets,
                             std::string name = {});

RuleSpec builtin(std::string_view name);
std::vector<std::string> builtin_names();

// Hex table encoding: table bit k (local configuration k) lives in byte k/8 at
// bit position k%8; bytes are written in increasing order, two lowercase hex
// digits each.
std::string table_to_hex(const std::vector<bool>& table);
std::vector<bool> table_from_hex(std::string_view hex, std::size_t bits);

}  // namespace toomlab
