#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "toomlab/kernels.hpp"
#include "toomlab/lattice.hpp"
#include "toomlab/noise.hpp"
#include "toomlab/rng.hpp"
#include "toomlab/rule.hpp"

namespace toomlab {

/// Synchronous updater for one (rule, torus, noise) triple.
///
/// The word path applies the rule as OR over minimal plus sets of AND over
/// shifted copies of each row, 64 sites per word, and draws noise through the
/// active kernel set. Noise tables that do not factor through phi fall back
/// to a per-site table lookup. Results never depend on the thread count.
///
/// An Engine owns scratch buffers, so one instance must not be stepped from
/// two threads at once; create one engine per worker instead.
class Engine {
 public:
  Engine(RuleSpec rule, Torus torus, std::optional<NoiseModel> noise = std::nullopt);

  const RuleSpec& rule() const noexcept { return rule_; }
  const Torus& torus() const noexcept { return torus_; }
  const std::optional<NoiseModel>& noise() const noexcept { return noise_; }

  void set_threads(int threads);
  int threads() const noexcept { return threads_; }
  void set_kernels(const kernels::KernelSet& k) { kernels_ = &k; }
  const kernels::KernelSet& kernel_set() const noexcept { return *kernels_; }

  LatticeState step(const LatticeState& in) const;
  LatticeState step(const LatticeState& in, RngKey key, std::uint64_t t) const;

  /// Allocation-free variants; `out` must live on the same torus.
  void step_into(const LatticeState& in, LatticeState& out) const;
  void step_into(const LatticeState& in, LatticeState& out, RngKey key, std::uint64_t t) const;

 private:
  struct Workspace {
    std::vector<std::uint64_t> shifted;   // R rows
    std::vector<std::uint64_t> phi;       // one row
    std::vector<std::uint32_t> uniforms;  // one row of draws plus block slack
    std::vector<const std::uint64_t*> ptrs;
  };

  void run(const LatticeState& in, LatticeState& out, const RngKey* key, std::uint64_t t) const;
  void rows_word_path(const LatticeState& in, LatticeState& out, const RngKey* key,
                      std::uint64_t t, std::uint64_t row_begin, std::uint64_t row_end,
                      Workspace& ws) const;
  void sites_table_path(const LatticeState& in, LatticeState& out, const RngKey& key,
                        std::uint64_t t, std::uint64_t row_begin, std::uint64_t row_end) const;
  void check_state(const LatticeState& s) const;

  RuleSpec rule_;
  Torus torus_;
  std::optional<NoiseModel> noise_;
  std::vector<std::uint32_t> set_masks_;
  bool table_noise_ = false;  // noise needs the full local configuration
  std::uint64_t thr_plus_ = 0, thr_minus_ = 0;
  std::vector<std::uint64_t> thr_table_;
  std::vector<std::uint64_t> neighbor_index_;  // sites x R, table path only
  int threads_ = 1;
  const kernels::KernelSet* kernels_;
  mutable std::vector<Workspace> workspaces_;
};

LatticeState step_deterministic(const LatticeState& state, const RuleSpec& rule);
LatticeState step_noisy(const LatticeState& state, const RuleSpec& rule, const NoiseModel& noise,
                        RngKey key, std::uint64_t t, int threads = 1);

/// Per-site reference implementations, written independently of the word
/// path: neighbor coordinates are computed explicitly and the truth table is
/// consulted directly. `site_key` maps a site to the index used for its draw
/// (identity by default); the optimized path must agree with the identity map.
LatticeState reference_step_deterministic(const LatticeState& state, const RuleSpec& rule);
LatticeState reference_step_noisy(const LatticeState& state, const RuleSpec& rule,
                                  const NoiseModel& noise, RngKey key, std::uint64_t t,
                                  const std::function<std::uint64_t(std::uint64_t)>& site_key = {});

struct ErosionResult {
  bool erased = false;
  std::uint64_t steps = 0;  // erasure time, or the cutoff when the island persists
  std::vector<std::uint64_t> minus_counts;  // per step, starting with the initial island
};

/// Per-axis extent minus one; a single site has diameter 0.
int island_diameter(const std::vector<Offset>& island);
std::uint64_t default_erosion_cutoff(const std::vector<Offset>& island);
/// Smallest cubic torus on which `cutoff` steps cannot wrap the island's
/// light cone: side >= 2 * cutoff * v + diameter with v = max |u|_1.
Torus erosion_torus(const RuleSpec& rule, const std::vector<Offset>& island, std::uint64_t cutoff);

ErosionResult erosion_time(const RuleSpec& rule, const std::vector<Offset>& island,
                           const Torus& torus, std::uint64_t cutoff);

}  // namespace toomlab
