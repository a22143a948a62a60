#include "toomlab/engine.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <thread>

#include "toomlab/error.hpp"

namespace toomlab {

namespace {

long long mod(long long v, long long n) {
  const long long m = v % n;
  return m < 0 ? m + n : m;
}

// dst = src rotated so that dst bit j = src bit (j + s) mod len, over `len`
// bits stored in src.size() words whose padding bits are zero.
void rotate_row(std::span<const std::uint64_t> src, int len, int s, std::uint64_t* dst) {
  const std::size_t w = src.size();
  if (s == 0) {
    std::copy(src.begin(), src.end(), dst);
    return;
  }
  auto at = [&](long long i) -> std::uint64_t {
    return i >= 0 && i < static_cast<long long>(w) ? src[i] : 0;
  };
  const int rs = s / 64, rb = s % 64;
  const int ls = (len - s) / 64, lb = (len - s) % 64;
  for (std::size_t j = 0; j < w; ++j) {
    const long long jj = static_cast<long long>(j);
    std::uint64_t right = at(jj + rs) >> rb;
    if (rb) right |= at(jj + rs + 1) << (64 - rb);
    std::uint64_t left = at(jj - ls) << lb;
    if (lb) left |= at(jj - ls - 1) >> (64 - lb);
    dst[j] = right | left;
  }
  const int tail = len - 64 * static_cast<int>(w - 1);
  if (tail < 64) dst[w - 1] &= (std::uint64_t{1} << tail) - 1;
}

}  // namespace

Engine::Engine(RuleSpec rule, Torus torus, std::optional<NoiseModel> noise)
    : rule_(std::move(rule)),
      torus_(std::move(torus)),
      noise_(std::move(noise)),
      kernels_(&kernels::active()) {
  torus_.require_fits(rule_);
  for (const auto& z : minimal_plus_sets(rule_).sets) {
    std::uint32_t m = 0;
    for (int i : z) m |= std::uint32_t{1} << i;
    set_masks_.push_back(m);
  }
  if (noise_) {
    noise_->require_covers(rule_);
    if (noise_->factors_through_rule(rule_)) {
      thr_plus_ = probability_threshold(noise_->p_plus_given_plus(rule_));
      thr_minus_ = probability_threshold(noise_->p_plus_given_minus(rule_));
    } else {
      table_noise_ = true;
      for (LocalConfig c = 0; c < rule_.table_size(); ++c)
        thr_table_.push_back(probability_threshold(noise_->p_plus(rule_, c)));
      const int r = rule_.size();
      neighbor_index_.resize(torus_.sites() * r);
      for (std::uint64_t x = 0; x < torus_.sites(); ++x)
        for (int i = 0; i < r; ++i) neighbor_index_[x * r + i] = torus_.neighbor(x, rule_.offset(i));
    }
  }
  set_threads(1);
}

void Engine::set_threads(int threads) {
  if (threads < 1) throw ConfigError("thread count must be >= 1");
  threads_ = threads;
  workspaces_.assign(threads_, Workspace{});
  const std::size_t wpr = torus_.words_per_row();
  for (auto& ws : workspaces_) {
    ws.shifted.assign(wpr * rule_.size(), 0);
    ws.phi.assign(wpr, 0);
    ws.uniforms.assign(static_cast<std::size_t>(torus_.row_length()) + 8, 0);
    ws.ptrs.resize(rule_.size());
  }
}

void Engine::check_state(const LatticeState& s) const {
  if (!(s.torus() == torus_)) throw ConfigError("state torus differs from engine torus");
}

LatticeState Engine::step(const LatticeState& in) const {
  LatticeState out(torus_, false);
  step_into(in, out);
  return out;
}

LatticeState Engine::step(const LatticeState& in, RngKey key, std::uint64_t t) const {
  LatticeState out(torus_, false);
  step_into(in, out, key, t);
  return out;
}

void Engine::step_into(const LatticeState& in, LatticeState& out) const {
  check_state(in);
  check_state(out);
  run(in, out, nullptr, 0);
}

void Engine::step_into(const LatticeState& in, LatticeState& out, RngKey key,
                       std::uint64_t t) const {
  check_state(in);
  check_state(out);
  if (!noise_) throw ConfigError("engine has no noise model");
  run(in, out, &key, t);
}

void Engine::run(const LatticeState& in, LatticeState& out, const RngKey* key,
                 std::uint64_t t) const {
  if (&in == &out) throw ConfigError("synchronous update needs distinct input and output");
  const std::uint64_t rows = torus_.rows();
  const int workers = static_cast<int>(std::min<std::uint64_t>(threads_, rows));
  auto work = [&](int w) {
    const std::uint64_t begin = rows * w / workers, end = rows * (w + 1) / workers;
    if (key && table_noise_)
      sites_table_path(in, out, *key, t, begin, end);
    else
      rows_word_path(in, out, key, t, begin, end, workspaces_[w]);
  };
  if (workers <= 1) {
    work(0);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (int w = 1; w < workers; ++w) pool.emplace_back(work, w);
  work(0);
}

void Engine::rows_word_path(const LatticeState& in, LatticeState& out, const RngKey* key,
                            std::uint64_t t, std::uint64_t row_begin, std::uint64_t row_end,
                            Workspace& ws) const {
  const int d = torus_.dimension();
  const int len = torus_.row_length();
  const std::size_t wpr = torus_.words_per_row();
  const auto& dims = torus_.dims();
  const int r = rule_.size();
  std::vector<int> row_coords(d - 1);
  for (std::uint64_t row = row_begin; row < row_end; ++row) {
    std::uint64_t rem = row;
    for (int a = d - 2; a >= 0; --a) {
      row_coords[a] = static_cast<int>(rem % dims[a]);
      rem /= dims[a];
    }
    for (int i = 0; i < r; ++i) {
      const Offset& u = rule_.offset(i);
      std::uint64_t src_row = 0;
      for (int a = 0; a < d - 1; ++a) src_row = src_row * dims[a] + mod(row_coords[a] + u[a], dims[a]);
      std::uint64_t* dst = ws.shifted.data() + i * wpr;
      rotate_row(in.row(src_row), len, static_cast<int>(mod(u[d - 1], len)), dst);
      ws.ptrs[i] = dst;
    }
    auto target = out.row(row);
    std::uint64_t* phi = key ? ws.phi.data() : target.data();
    kernels_->combine_plus_sets(ws.ptrs.data(), set_masks_.data(),
                                static_cast<int>(set_masks_.size()), wpr, phi);
    if (!key) continue;

    const std::uint64_t first_site = row * static_cast<std::uint64_t>(len);
    const std::uint64_t first_block = first_site / 4;
    const std::uint64_t last_block = (first_site + len - 1) / 4;
    kernels_->philox_uniforms(*key, t, first_block, last_block - first_block + 1,
                              ws.uniforms.data());
    const std::uint32_t* u = ws.uniforms.data() + first_site % 4;
    for (std::size_t j = 0; j < wpr; ++j) {
      const int n = std::min(64, len - 64 * static_cast<int>(j));
      const std::uint64_t p = kernels_->below_threshold(u + 64 * j, n, thr_plus_);
      const std::uint64_t m = kernels_->below_threshold(u + 64 * j, n, thr_minus_);
      const std::uint64_t valid = n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
      target[j] = ((phi[j] & p) | (~phi[j] & m)) & valid;
    }
  }
}

void Engine::sites_table_path(const LatticeState& in, LatticeState& out, const RngKey& key,
                              std::uint64_t t, std::uint64_t row_begin,
                              std::uint64_t row_end) const {
  const std::uint64_t len = torus_.row_length();
  const int r = rule_.size();
  for (std::uint64_t x = row_begin * len; x < row_end * len; ++x) {
    LocalConfig c = 0;
    for (int i = 0; i < r; ++i)
      if (in.plus(neighbor_index_[x * r + i])) c |= LocalConfig{1} << i;
    out.set(x, spin_from_bit(key.site_uniform(t, x) < thr_table_[c]));
  }
}

LatticeState step_deterministic(const LatticeState& state, const RuleSpec& rule) {
  return Engine(rule, state.torus()).step(state);
}

LatticeState step_noisy(const LatticeState& state, const RuleSpec& rule, const NoiseModel& noise,
                        RngKey key, std::uint64_t t, int threads) {
  Engine engine(rule, state.torus(), noise);
  engine.set_threads(threads);
  return engine.step(state, key, t);
}

namespace {

LocalConfig gather(const LatticeState& state, const RuleSpec& rule, std::uint64_t x) {
  const Torus& torus = state.torus();
  const auto base = torus.coords(x);
  LocalConfig c = 0;
  std::vector<int> at(base.size());
  for (int i = 0; i < rule.size(); ++i) {
    for (std::size_t a = 0; a < base.size(); ++a) at[a] = base[a] + rule.offset(i)[a];
    if (state.plus(torus.index(at))) c |= LocalConfig{1} << i;
  }
  return c;
}

}  // namespace

LatticeState reference_step_deterministic(const LatticeState& state, const RuleSpec& rule) {
  state.torus().require_fits(rule);
  LatticeState out(state.torus(), false);
  for (std::uint64_t x = 0; x < state.sites(); ++x)
    out.set(x, spin_from_bit(rule.output(gather(state, rule, x))));
  return out;
}

LatticeState reference_step_noisy(const LatticeState& state, const RuleSpec& rule,
                                  const NoiseModel& noise, RngKey key, std::uint64_t t,
                                  const std::function<std::uint64_t(std::uint64_t)>& site_key) {
  state.torus().require_fits(rule);
  noise.require_covers(rule);
  LatticeState out(state.torus(), false);
  for (std::uint64_t x = 0; x < state.sites(); ++x) {
    const LocalConfig c = gather(state, rule, x);
    const std::uint64_t k = site_key ? site_key(x) : x;
    const std::uint64_t thr = probability_threshold(noise.p_plus(rule, c));
    out.set(x, spin_from_bit(key.site_uniform(t, k) < thr));
  }
  return out;
}

int island_diameter(const std::vector<Offset>& island) {
  if (island.empty()) return 0;
  int diam = 0;
  for (std::size_t a = 0; a < island.front().size(); ++a) {
    int lo = island.front()[a], hi = lo;
    for (const auto& p : island) {
      lo = std::min(lo, p[a]);
      hi = std::max(hi, p[a]);
    }
    diam = std::max(diam, hi - lo);
  }
  return diam;
}

std::uint64_t default_erosion_cutoff(const std::vector<Offset>& island) {
  return 64 * (static_cast<std::uint64_t>(island_diameter(island)) + 1);
}

namespace {
std::uint64_t light_cone_side(const RuleSpec& rule, const std::vector<Offset>& island,
                              std::uint64_t cutoff) {
  return 2 * cutoff * static_cast<std::uint64_t>(rule.max_l1()) +
         static_cast<std::uint64_t>(island_diameter(island));
}
}  // namespace

Torus erosion_torus(const RuleSpec& rule, const std::vector<Offset>& island, std::uint64_t cutoff) {
  const std::uint64_t side = std::max<std::uint64_t>(light_cone_side(rule, island, cutoff),
                                                     2 * rule.max_linf() + 1);
  if (side > std::numeric_limits<int>::max()) throw ConfigError("erosion torus too large");
  return Torus(std::vector<int>(rule.dimension(), static_cast<int>(side)));
}

ErosionResult erosion_time(const RuleSpec& rule, const std::vector<Offset>& island,
                           const Torus& torus, std::uint64_t cutoff) {
  if (island.empty()) throw InputShapeError("island must contain at least one site");
  for (const auto& p : island)
    if (static_cast<int>(p.size()) != rule.dimension())
      throw InputShapeError("island site has wrong dimension");
  const std::uint64_t need = light_cone_side(rule, island, cutoff);
  for (int l : torus.dims())
    if (static_cast<std::uint64_t>(l) < need)
      throw ConfigError("torus side " + std::to_string(l) + " lets the light cone wrap within " +
                        std::to_string(cutoff) + " steps (need >= " + std::to_string(need) + ")");
  Engine engine(rule, torus);
  LatticeState cur = LatticeState::all_plus(torus);
  for (const auto& p : island) cur.set(torus.index(p), Spin::Minus);
  LatticeState next(torus, false);
  ErosionResult result;
  result.minus_counts.push_back(cur.count_minus());
  for (std::uint64_t n = 1; n <= cutoff; ++n) {
    engine.step_into(cur, next);
    std::swap(cur, next);
    result.minus_counts.push_back(cur.count_minus());
    if (result.minus_counts.back() == 0) {
      result.erased = true;
      result.steps = n;
      return result;
    }
    // A fixed point persists for every remaining step.
    if (cur == next) break;
  }
  result.erased = false;
  result.steps = cutoff;
  return result;
}

}  // namespace toomlab
