#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "toomlab/lattice.hpp"
#include "toomlab/noise.hpp"
#include "toomlab/rule.hpp"

namespace toomlab::exact {

inline constexpr int kMaxSites = 24;
inline constexpr int kMaxDenseSites = 12;  // noise tables that do not factor through phi

/// Probability vector over all 2^N configurations of a tiny torus, indexed by
/// LatticeState::code() (bit x set iff site x is +1).
class StateDistribution {
 public:
  StateDistribution(Torus torus, std::vector<double> probs);

  static StateDistribution point_mass(Torus torus, std::uint64_t code);
  static StateDistribution all_plus(Torus torus);
  static StateDistribution all_minus(Torus torus);
  static StateDistribution uniform(Torus torus);

  const Torus& torus() const noexcept { return torus_; }
  int sites() const noexcept { return static_cast<int>(torus_.sites()); }
  std::size_t states() const noexcept { return probs_.size(); }
  const std::vector<double>& probs() const noexcept { return probs_; }
  double operator[](std::size_t code) const { return probs_[code]; }

 private:
  Torus torus_;
  std::vector<double> probs_;
};

/// Real observable depending on the spins of finitely many sites.
struct CylinderFunction {
  std::vector<Offset> window;  // site coordinates, wrapped onto the torus when evaluated
  std::vector<double> table;   // 2^|window| values, bit i set iff window site i is +1

  static CylinderFunction constant(double c);
  /// omega at a single site.
  static CylinderFunction spin(const Offset& site);
  /// Product of spins over the window.
  static CylinderFunction spin_product(std::vector<Offset> sites);

  double operator()(std::uint32_t window_bits) const { return table[window_bits]; }
  void validate() const;
};

/// The one-step transfer operator of a (rule, noise) pair on a tiny torus.
/// For noise that factors through phi, one application costs O(2^N * N):
/// push the measure forward along the deterministic map, then mix each site
/// with its 2x2 error kernel. Other noise tables use the dense O(4^N) sum.
class TransferOperator {
 public:
  TransferOperator(RuleSpec rule, NoiseModel noise, Torus torus);

  const Torus& torus() const noexcept { return torus_; }
  std::size_t states() const noexcept { return std::size_t{1} << torus_.sites(); }

  /// Linear action on (possibly signed) measures, no renormalization.
  void apply(std::span<const double> in, std::span<double> out) const;
  /// Dual action on observables: (T f)(omega) = sum_xi P[xi | omega] f(xi).
  void apply_dual(std::span<const double> f, std::span<double> out) const;

  /// Normalized application on a probability vector; mass drift above 1e-12
  /// raises NumericalError.
  StateDistribution operator()(const StateDistribution& dist) const;

  /// Deterministic image of a configuration code.
  std::uint32_t image(std::uint32_t code) const { return image_[code]; }
  // States the chain never leaves.
  std::vector<std::uint32_t> absorbing_states() const;
  // Indicator of the states from which `target` is reached with positive
  // probability in finitely many steps.
  std::vector<bool> reaches(std::uint32_t target) const;

 private:
  void mix_sites(std::span<double> v, bool transpose) const;

  RuleSpec rule_;
  NoiseModel noise_;
  Torus torus_;
  bool factored_;
  double pp_ = 0, pm_ = 0;  // p(+1 | phi = +1), p(+1 | phi = -1)
  std::vector<std::uint32_t> image_;
  std::vector<std::uint32_t> local_config_;  // dense path: per (state, site)
};

StateDistribution transfer_apply(const StateDistribution& dist, const RuleSpec& rule,
                                 const NoiseModel& noise);

struct StationaryOptions {
  double tol = 1e-10;
  std::uint64_t max_iterations = 1'000'000;
  std::uint64_t cesaro_after = 10'000;  // plain iterations without progress
};

struct StationaryResult {
  StateDistribution distribution;
  std::uint64_t iterations;
  bool cesaro;
  double residual;  // TV(T pi, pi)
};

/// Power iteration from the all-plus point mass; switches to Cesaro averages
/// when plain iteration stalls.
StationaryResult stationary_distribution(const RuleSpec& rule, const NoiseModel& noise,
                                         const Torus& torus, const StationaryOptions& opts = {});

double tv_distance(const StateDistribution& a, const StateDistribution& b);

double cylinder_expectation(const StateDistribution& dist, const CylinderFunction& f);

/// Full-state table of a cylinder function on a torus (2^N entries).
std::vector<double> expand(const CylinderFunction& f, const Torus& torus);

/// Sum over window sites of sup |f(omega) - f(omega with that spin flipped)|.
double seminorm(const CylinderFunction& f);

/// Per-site probabilities of a minus spin under a product measure. A uniform
/// spec stands for the same probability on every site of Z^d.
struct ProductMeasureSpec {
  std::vector<double> minus_probs;
  bool uniform = false;

  static ProductMeasureSpec uniform_value(double m) { return {{m}, true}; }
  void validate() const;
};

/// Whether prod_{x in L} m_x <= K eps'^{|L|} for every finite nonempty L.
bool basin_membership(const ProductMeasureSpec& spec, double K, double eps_prime);

/// Product measure as a distribution on a tiny torus.
StateDistribution product_measure(const Torus& torus, const ProductMeasureSpec& spec);

/// Marginal of `dist` on the window sites (2^|window| entries).
std::vector<double> window_marginal(const StateDistribution& dist, const std::vector<Offset>& window);

/// Max absolute difference between the window marginals of T^n delta_plus on
/// the two tori. Requires window radius + n * v < min(small dims) / 2 with
/// v = max |u|_1; the marginals then agree exactly.
double window_marginal_consistency(const RuleSpec& rule, const NoiseModel& noise,
                                   const std::vector<Offset>& window, int n,
                                   const Torus& small, const Torus& large);

/// TV(T^n delta_plus, pi) for n = 0..steps.
std::vector<double> tv_curve(const TransferOperator& op, const StateDistribution& pi, int steps);

/// Stationary covariance of omega_a and omega_b at equal times.
double stationary_covariance(const StateDistribution& pi, const Offset& a, const Offset& b);

/// Stationary covariance of omega_x(t) and omega_x(t + lag) (any fixed site;
/// averaged over all sites).
double stationary_autocovariance(const TransferOperator& op, const StateDistribution& pi, int lag);

/// Stationary probability of a minus spin, averaged over sites.
double stationary_minus_density(const StateDistribution& pi);

}  // namespace toomlab::exact
