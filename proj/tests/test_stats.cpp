#include <doctest.h>

#include <cmath>

#include "toomlab/error.hpp"
#include "toomlab/exact.hpp"
#include "toomlab/stats.hpp"

using namespace toomlab;
using namespace toomlab::stats;

TEST_SUITE("stats") {
  TEST_CASE("mean and standard error") {
    const auto e = mean_and_se({1, 2, 3, 4});
    CHECK(e.mean == 2.5);
    CHECK(e.se == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
    CHECK(e.n == 4);
    const auto b = batch_means(std::vector<double>(100, 0.25));
    CHECK(b.mean == 0.25);
    CHECK(b.se == 0.0);
  }

  TEST_CASE("log decay fit") {
    std::vector<double> x, y, se;
    for (int i = 0; i < 8; ++i) {
      x.push_back(i);
      y.push_back(3.0 * std::pow(0.6, i));
      se.push_back(1e-6);
    }
    auto f = fit_log_decay(x, y, se);
    CHECK(f.valid);
    CHECK(f.rate == doctest::Approx(0.6));
    CHECK(f.r_squared == doctest::Approx(1.0));
    CHECK(f.points == 8);
    // Points at the noise floor are dropped; too few left means invalid.
    se.assign(8, 1.0);
    f = fit_log_decay(x, y, se);
    CHECK_FALSE(f.valid);
    // Growth is never reported as a rate.
    std::vector<double> g{1, 2, 4, 8};
    CHECK_FALSE(fit_log_decay({0, 1, 2, 3}, g).valid);
  }

  TEST_CASE("zero noise keeps density zero") {
    const SimSetup s{builtin("nec"), NoiseModel::symmetric(0), Torus({16, 16}), 1, 1};
    const auto run = minus_density_run(s, 20, 5);
    for (double d : run.density) CHECK(d == 0.0);
    CHECK(run.density.size() == 21);
    const auto sp = spatial_correlation(s, {1, 2}, 20, 5);
    for (const auto& p : sp.summary.correlations) CHECK(p.estimate == 0.0);
    CHECK_FALSE(sp.fit.valid);
  }

  TEST_CASE("steps = 0 reports the initial state") {
    const SimSetup s{builtin("nec"), NoiseModel::symmetric(0.1), Torus({8, 8}), 1, 1};
    const auto run = minus_density_run(s, 0, 0);
    CHECK(run.density == std::vector<double>{0.0});
  }

  TEST_CASE("half noise: density one half, no correlations") {
    const SimSetup s{builtin("nec"), NoiseModel::symmetric(0.5), Torus({32, 32}), 4, 2};
    const auto run = minus_density_run(s, 200, 10);
    CHECK(std::abs(run.stationary_density.mean - 0.5) < 4 * run.stationary_density.se);
    const auto sp = spatial_correlation(s, {1, 2, 3}, 400, 2);
    for (const auto& p : sp.summary.correlations) CHECK(std::abs(p.estimate) < 4 * p.se);
    const auto tp = temporal_autocorrelation(s, {1, 2}, 400, 2);
    for (const auto& p : tp.summary.correlations) CHECK(std::abs(p.estimate) < 4 * p.se);
  }

  TEST_CASE("lag zero autocovariance is the variance") {
    const SimSetup s{builtin("stavskaya"), NoiseModel::symmetric(0.1), Torus({8}), 3, 1};
    const auto tp = temporal_autocorrelation(s, {0}, 2000, 50);
    CHECK(tp.summary.correlations[0].estimate >= 0);
  }

  TEST_CASE("results do not depend on thread count") {
    SimSetup s{builtin("nec"), NoiseModel::symmetric(0.1), Torus({40, 40}), 9, 1};
    const auto a = minus_density_run(s, 30, 10, 4);
    const auto sa = spatial_correlation(s, {1, 3}, 16, 5);
    s.threads = 4;
    const auto b = minus_density_run(s, 30, 10, 4);
    const auto sb = spatial_correlation(s, {1, 3}, 16, 5);
    CHECK(a.density == b.density);
    for (std::size_t i = 0; i < sa.summary.correlations.size(); ++i)
      CHECK(sa.summary.correlations[i].estimate == sb.summary.correlations[i].estimate);
  }

  TEST_CASE("scan") {
    const auto zeros = density_vs_epsilon_scan(builtin("nec"), NoiseFamily::Symmetric, {0}, Torus({16, 16}), 20, 5, 1);
    CHECK(zeros[0].density.mean == 0.0);
    const auto rows = density_vs_epsilon_scan(builtin("nec"), NoiseFamily::Symmetric,
                                              {0.005, 0.01, 0.02, 0.04}, Torus({64, 64}), 400, 100, 3);
    CHECK(scan_monotone(rows));
    CHECK(rows.back().density.mean - rows.front().density.mean >
          5 * std::hypot(rows.back().density.se, rows.front().density.se));
    CHECK_THROWS(density_vs_epsilon_scan(builtin("nec"), NoiseFamily::Symmetric, {0.1, 0.05},
                                         Torus({16, 16}), 10, 5, 1));
  }

  TEST_CASE("divergence") {
    const SimSetup half{builtin("nec"), NoiseModel::symmetric(0.5), Torus({32, 32}), 1, 1};
    const auto m = two_phase_divergence(half, 10, 2);
    CHECK(m.verdict == PhaseVerdict::Merged);
    CHECK(m.coalesced_at == 1);
    const SimSetup stav{builtin("stavskaya"), NoiseModel::symmetric(0.1), Torus({32}), 1, 1};
    CHECK(two_phase_divergence(stav, 10, 2).verdict == PhaseVerdict::Inapplicable);
    CHECK(flip_symmetric(builtin("nec"), NoiseModel::symmetric(0.1)));
    CHECK_FALSE(flip_symmetric(builtin("nec"), NoiseModel::biased(0.1, 0.2)));
  }

  TEST_CASE("reproducibility") {
    const SimSetup s{builtin("stavskaya"), NoiseModel::symmetric(0.1), Torus({100}), 42, 1};
    CHECK(minus_density_run(s, 50, 10).density == minus_density_run(s, 50, 10).density);
  }
}
