#include "toomlab/lattice.hpp"

#include <algorithm>
#include <bit>
#include <cstdlib>

#include "toomlab/error.hpp"

namespace toomlab {

namespace {
int wrap(long long v, int n) {
  long long m = v % n;
  return static_cast<int>(m < 0 ? m + n : m);
}
}  // namespace

Torus::Torus(std::vector<int> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw ConfigError("torus needs at least one dimension");
  sites_ = 1;
  for (int l : dims_) {
    if (l < 1) throw ConfigError("torus side lengths must be positive");
    sites_ *= static_cast<std::uint64_t>(l);
  }
  words_per_row_ = (static_cast<std::size_t>(dims_.back()) + 63) / 64;
}

std::uint64_t Torus::index(std::span<const int> coords) const {
  if (coords.size() != dims_.size()) throw InputShapeError("coordinate has wrong dimension");
  std::uint64_t x = 0;
  for (std::size_t i = 0; i < dims_.size(); ++i) x = x * dims_[i] + wrap(coords[i], dims_[i]);
  return x;
}

std::vector<int> Torus::coords(std::uint64_t site) const {
  std::vector<int> c(dims_.size());
  for (std::size_t i = dims_.size(); i-- > 0;) {
    c[i] = static_cast<int>(site % dims_[i]);
    site /= dims_[i];
  }
  return c;
}

std::uint64_t Torus::neighbor(std::uint64_t site, const Offset& offset) const {
  auto c = coords(site);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] += offset[i];
  return index(c);
}

void Torus::require_fits(const RuleSpec& rule) const {
  if (rule.dimension() != dimension())
    throw ConfigError("torus dimension " + std::to_string(dimension()) +
                      " differs from rule dimension " + std::to_string(rule.dimension()));
  const int need = 2 * rule.max_linf() + 1;
  for (int l : dims_)
    if (l < need)
      throw ConfigError("torus side " + std::to_string(l) + " is below 2*max|u|+1 = " +
                        std::to_string(need));
}

LatticeState::LatticeState(Torus torus, bool plus)
    : torus_(std::move(torus)), words_(torus_.rows() * torus_.words_per_row(), 0) {
  if (!plus) return;
  const int l = torus_.row_length();
  const std::size_t wpr = torus_.words_per_row();
  for (std::uint64_t r = 0; r < torus_.rows(); ++r)
    for (std::size_t j = 0; j < wpr; ++j) {
      const int bits = std::min(64, l - static_cast<int>(64 * j));
      words_[r * wpr + j] = bits == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits) - 1;
    }
}

LatticeState LatticeState::from_code(Torus torus, std::uint64_t code) {
  if (torus.sites() > 64) throw ResourceError("state codes cover at most 64 sites");
  LatticeState s(std::move(torus), false);
  for (std::uint64_t x = 0; x < s.sites(); ++x)
    if (code >> x & 1u) s.set(x, Spin::Plus);
  return s;
}

std::uint64_t LatticeState::code() const {
  if (sites() > 64) throw ResourceError("state codes cover at most 64 sites");
  std::uint64_t c = 0;
  for (std::uint64_t x = 0; x < sites(); ++x)
    if (plus(x)) c |= std::uint64_t{1} << x;
  return c;
}

bool LatticeState::plus(std::uint64_t site) const {
  const std::uint64_t l = torus_.row_length();
  const std::uint64_t r = site / l, col = site % l;
  return words_[r * torus_.words_per_row() + col / 64] >> (col % 64) & 1u;
}

Spin LatticeState::get(std::uint64_t site) const { return spin_from_bit(plus(site)); }

void LatticeState::set(std::uint64_t site, Spin s) {
  const std::uint64_t l = torus_.row_length();
  const std::uint64_t r = site / l, col = site % l;
  auto& w = words_[r * torus_.words_per_row() + col / 64];
  const std::uint64_t bit = std::uint64_t{1} << (col % 64);
  if (s == Spin::Plus)
    w |= bit;
  else
    w &= ~bit;
}

std::uint64_t LatticeState::count_plus() const {
  std::uint64_t n = 0;
  for (auto w : words_) n += std::popcount(w);
  return n;
}

double LatticeState::magnetization() const {
  return (2.0 * static_cast<double>(count_plus()) - static_cast<double>(sites())) /
         static_cast<double>(sites());
}

LatticeState LatticeState::shifted(const Offset& shift) const {
  LatticeState out(torus_, false);
  for (std::uint64_t x = 0; x < sites(); ++x)
    if (plus(torus_.neighbor(x, shift))) out.set(x, Spin::Plus);
  return out;
}

std::span<std::uint64_t> LatticeState::row(std::uint64_t r) {
  return {words_.data() + r * torus_.words_per_row(), torus_.words_per_row()};
}

std::span<const std::uint64_t> LatticeState::row(std::uint64_t r) const {
  return {words_.data() + r * torus_.words_per_row(), torus_.words_per_row()};
}

bool leq(const LatticeState& a, const LatticeState& b) {
  if (!(a.torus() == b.torus())) throw InputShapeError("states live on different tori");
  const auto wa = a.words(), wb = b.words();
  for (std::size_t i = 0; i < wa.size(); ++i)
    if (wa[i] & ~wb[i]) return false;
  return true;
}

}  // namespace toomlab
