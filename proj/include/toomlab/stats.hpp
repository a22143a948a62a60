#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "toomlab/lattice.hpp"
#include "toomlab/noise.hpp"
#include "toomlab/rule.hpp"

namespace toomlab::stats {

struct Estimate {
  double mean = 0;
  double se = 0;
  std::uint64_t n = 0;
};

/// Mean with the standard error of independent samples.
Estimate mean_and_se(const std::vector<double>& samples);
/// Mean with a batch-means standard error for an autocorrelated series.
Estimate batch_means(const std::vector<double>& series, int batches = 20);

struct FitResult {
  double rate = 0;       // exp(slope), in (0, 1] when valid
  double intercept = 0;  // of log|y|
  double residual = 0;   // residual sum of squares in log space
  double r_squared = 0;
  int points = 0;
  bool valid = false;
};

/// Least-squares fit of log|y| against x over points with |y| strictly above
/// floor_se * se (all nonzero points when `se` is empty). Invalid with fewer
/// than 3 usable points or a fitted rate above 1.
FitResult fit_log_decay(const std::vector<double>& x, const std::vector<double>& y,
                        const std::vector<double>& se = {}, double floor_se = 2.0);

struct SimSetup {
  RuleSpec rule;
  NoiseModel noise;
  Torus torus;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct CorrelationPoint {
  int separation = 0;  // Manhattan distance or time lag
  double estimate = 0;
  double se = 0;
  std::uint64_t n = 0;
};

struct RunSummary {
  std::vector<double> density;  // minus density per step, step 0 included (replica average)
  Estimate stationary_density;  // post-burn-in
  std::vector<CorrelationPoint> correlations;
  std::uint64_t steps = 0;
  std::uint64_t burn_in = 0;
  std::uint64_t replicas = 1;
};

/// Minus density from all-plus. With one replica the post-burn-in error bar
/// uses batch means; with several, each replica contributes its post-burn-in
/// time average as one independent sample.
RunSummary minus_density_run(const SimSetup& setup, std::uint64_t steps, std::uint64_t burn_in,
                             std::uint64_t replicas = 1);

enum class NoiseFamily { Symmetric, BiasedPlus, BiasedMinus };
NoiseModel family_member(NoiseFamily family, double eps);

struct ScanRow {
  double eps;
  Estimate density;
};

std::vector<ScanRow> density_vs_epsilon_scan(const RuleSpec& rule, NoiseFamily family,
                                             const std::vector<double>& eps_grid,
                                             const Torus& torus, std::uint64_t steps,
                                             std::uint64_t burn_in, std::uint64_t seed,
                                             int threads = 1);

/// Nondecreasing in eps up to `tolerance_se` combined standard errors.
bool scan_monotone(const std::vector<ScanRow>& rows, double tolerance_se = 3.0);

struct CorrelationRun {
  RunSummary summary;
  FitResult fit;
};

/// Equal-time covariance of omega_x and omega_{x + d e_a}, averaged over sites
/// and axes, from independent replicas run `burn_in` steps from all-plus.
CorrelationRun spatial_correlation(const SimSetup& setup, const std::vector<int>& distances,
                                   std::uint64_t replicas, std::uint64_t burn_in);

/// Covariance of omega_x(t) and omega_x(t + lag) after `burn_in` steps.
CorrelationRun temporal_autocorrelation(const SimSetup& setup, const std::vector<int>& lags,
                                        std::uint64_t replicas, std::uint64_t burn_in);

enum class PhaseVerdict { Merged, Separated, Undecided, Inapplicable };
std::string to_string(PhaseVerdict v);

struct DivergenceRun {
  std::vector<double> mag_plus, mag_minus, gap;  // per step, step 0 included
  Estimate post_burn_in_gap;
  PhaseVerdict verdict = PhaseVerdict::Inapplicable;
  long long coalesced_at = -1;  // first step with identical chains, -1 if never
};

/// Flip-symmetric rule and noise: runs chains from all-plus and all-minus
/// driven by the same draws. MERGED when the post-burn-in gap is within 3 SE
/// of 0, SEPARATED above 10 SE, UNDECIDED otherwise.
DivergenceRun two_phase_divergence(const SimSetup& setup, std::uint64_t steps,
                                   std::uint64_t burn_in);

bool flip_symmetric(const RuleSpec& rule, const NoiseModel& noise);

}  // namespace toomlab::stats

namespace toomlab::stats {

/// Log-linear fit of an exact TV curve over n >= from, keeping points above
/// `floor` (round-off level).
FitResult fit_tv_curve(const std::vector<double>& tv, int from, double floor = 1e-13);

}  // namespace toomlab::stats
