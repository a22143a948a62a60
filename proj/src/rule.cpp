#include "toomlab/rule.hpp"

#include <algorithm>
#include <bit>
#include <cstdlib>
#include <set>

#include "toomlab/error.hpp"

namespace toomlab {

RuleSpec::RuleSpec(int dimension, std::vector<Offset> neighborhood, std::vector<bool> table,
                   std::string name)
    : dimension_(dimension),
      neighborhood_(std::move(neighborhood)),
      table_(std::move(table)),
      name_(std::move(name)) {
  if (dimension_ < 1) throw InputShapeError("rule dimension must be positive");
  const auto r = neighborhood_.size();
  if (r < 1 || r > static_cast<std::size_t>(kMaxNeighborhood))
    throw InputShapeError("neighborhood size must be in [1, " +
                          std::to_string(kMaxNeighborhood) + "]");
  std::set<Offset> seen;
  for (const auto& u : neighborhood_) {
    if (static_cast<int>(u.size()) != dimension_)
      throw InputShapeError("neighborhood offset has wrong dimension");
    if (!seen.insert(u).second) throw InputShapeError("neighborhood offsets must be distinct");
  }
  if (table_.size() != (std::size_t{1} << r))
    throw InputShapeError("truth table must have 2^R entries");
}

int RuleSpec::max_linf() const noexcept {
  int m = 0;
  for (const auto& u : neighborhood_)
    for (int c : u) m = std::max(m, std::abs(c));
  return m;
}

int RuleSpec::max_l1() const noexcept {
  int m = 0;
  for (const auto& u : neighborhood_) {
    int s = 0;
    for (int c : u) s += std::abs(c);
    m = std::max(m, s);
  }
  return m;
}

LocalConfig encode_local(std::span<const Spin> local) {
  LocalConfig c = 0;
  for (std::size_t i = 0; i < local.size(); ++i)
    if (local[i] == Spin::Plus) c |= LocalConfig{1} << i;
  return c;
}

Spin evaluate(const RuleSpec& rule, std::span<const Spin> local) {
  if (static_cast<int>(local.size()) != rule.size())
    throw InputShapeError("local configuration has " + std::to_string(local.size()) +
                          " entries, rule expects " + std::to_string(rule.size()));
  return spin_from_bit(rule.output(encode_local(local)));
}

MonotoneVerdict check_monotone(const RuleSpec& rule) {
  MonotoneVerdict verdict;
  const auto& t = rule.table();
  const auto n = static_cast<LocalConfig>(t.size());
  const int r = rule.size();
  for (LocalConfig lo = 0; lo < n && verdict.monotone; ++lo) {
    if (!t[lo]) continue;
    for (int i = 0; i < r; ++i) {
      const LocalConfig hi = lo | (LocalConfig{1} << i);
      if (hi != lo && !t[hi]) {
        verdict.monotone = false;
        verdict.witness = MonotoneViolation{lo, hi};
        break;
      }
    }
  }
  const bool first = t.front();
  verdict.non_constant = std::any_of(t.begin(), t.end(), [&](bool b) { return b != first; });
  return verdict;
}

PlusSetFamily minimal_plus_sets(const RuleSpec& rule) {
  const auto verdict = check_monotone(rule);
  if (!verdict.monotone) throw ValidationError("rule is not monotone");
  if (!verdict.non_constant) throw ValidationError("rule is constant");

  // For a monotone rule, Z is a plus set iff the configuration that is +1
  // exactly on Z maps to +1.
  const auto& t = rule.table();
  const int r = rule.size();
  PlusSetFamily family;
  for (LocalConfig s = 0; s < t.size(); ++s) {
    if (!t[s]) continue;
    bool minimal = true;
    for (int i = 0; i < r && minimal; ++i)
      if ((s >> i & 1u) && t[s & ~(LocalConfig{1} << i)]) minimal = false;
    if (!minimal) continue;
    std::vector<int> set;
    for (int i = 0; i < r; ++i)
      if (s >> i & 1u) set.push_back(i);
    family.sets.push_back(std::move(set));
  }
  std::sort(family.sets.begin(), family.sets.end());
  return family;
}

RuleSpec rule_from_plus_sets(int dimension, std::vector<Offset> neighborhood,
                             const std::vector<std::vector<int>>& plus_sets, std::string name) {
  const int r = static_cast<int>(neighborhood.size());
  if (r < 1 || r > kMaxNeighborhood) throw InputShapeError("neighborhood size out of range");
  if (plus_sets.empty()) throw ValidationError("plus-set list is empty (constant rule)");
  std::vector<LocalConfig> masks;
  for (const auto& z : plus_sets) {
    if (z.empty()) throw ValidationError("empty plus set forces a constant rule");
    LocalConfig m = 0;
    for (int i : z) {
      if (i < 0 || i >= r) throw InputShapeError("plus-set index out of range");
      m |= LocalConfig{1} << i;
    }
    masks.push_back(m);
  }
  std::vector<bool> table(std::size_t{1} << r, false);
  for (LocalConfig s = 0; s < table.size(); ++s)
    table[s] = std::any_of(masks.begin(), masks.end(), [s](LocalConfig m) { return (s & m) == m; });
  return RuleSpec(dimension, std::move(neighborhood), std::move(table), std::move(name));
}

namespace {

std::vector<bool> table_of(int r, bool (*f)(LocalConfig)) {
  std::vector<bool> t(std::size_t{1} << r);
  for (LocalConfig s = 0; s < t.size(); ++s) t[s] = f(s);
  return t;
}

}  // namespace

RuleSpec builtin(std::string_view name) {
  if (name == "stavskaya") {
    // -1 iff both inputs are -1
    return RuleSpec(1, {{0}, {1}}, table_of(2, [](LocalConfig s) { return s != 0; }),
                    "stavskaya");
  }
  if (name == "nec") {
    return RuleSpec(2, {{0, 0}, {1, 0}, {0, 1}},
                    table_of(3, [](LocalConfig s) { return std::popcount(s) >= 2; }), "nec");
  }
  if (name == "majority1d") {
    return RuleSpec(1, {{-1}, {0}, {1}},
                    table_of(3, [](LocalConfig s) { return std::popcount(s) >= 2; }),
                    "majority1d");
  }
  if (name == "identity") {
    return RuleSpec(1, {{0}}, table_of(1, [](LocalConfig s) { return s == 1; }), "identity");
  }
  throw LookupError("unknown builtin rule '" + std::string(name) + "'");
}

std::vector<std::string> builtin_names() { return {"stavskaya", "nec", "majority1d", "identity"}; }

std::string table_to_hex(const std::vector<bool>& table) {
  static constexpr char digits[] = "0123456789abcdef";
  const std::size_t bytes = (table.size() + 7) / 8;
  std::string out;
  out.reserve(2 * bytes);
  for (std::size_t b = 0; b < bytes; ++b) {
    unsigned v = 0;
    for (std::size_t k = 0; k < 8 && 8 * b + k < table.size(); ++k)
      if (table[8 * b + k]) v |= 1u << k;
    out.push_back(digits[v >> 4]);
    out.push_back(digits[v & 15]);
  }
  return out;
}

std::vector<bool> table_from_hex(std::string_view hex, std::size_t bits) {
  const std::size_t bytes = (bits + 7) / 8;
  if (hex.size() != 2 * bytes)
    throw InputShapeError("hex table has " + std::to_string(hex.size()) + " digits, expected " +
                          std::to_string(2 * bytes));
  auto nibble = [](char c) -> unsigned {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw InputShapeError(std::string("invalid hex digit '") + c + "'");
  };
  std::vector<bool> table(bits);
  for (std::size_t b = 0; b < bytes; ++b) {
    const unsigned v = nibble(hex[2 * b]) << 4 | nibble(hex[2 * b + 1]);
    for (std::size_t k = 0; k < 8; ++k) {
      const bool bit = v >> k & 1u;
      if (8 * b + k < bits)
        table[8 * b + k] = bit;
      else if (bit)
        throw InputShapeError("hex table sets bits beyond 2^R");
    }
  }
  return table;
}

}  // namespace toomlab
