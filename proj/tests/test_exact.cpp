#include <doctest.h>

#include <cmath>
#include <random>

#include "test_support.hpp"
#include "toomlab/engine.hpp"
#include "toomlab/error.hpp"
#include "toomlab/exact.hpp"

using namespace toomlab;
using namespace toomlab::exact;

namespace {

// Dense 2^N x 2^N kernel built entry by entry from the per-site product.
std::vector<double> dense_apply(const std::vector<double>& in, const RuleSpec& rule,
                                const NoiseModel& noise, const Torus& torus) {
  const std::size_t S = in.size();
  const auto n = torus.sites();
  std::vector<double> out(S, 0.0);
  for (std::size_t w = 0; w < S; ++w) {
    std::vector<LocalConfig> local(n);
    for (std::uint64_t x = 0; x < n; ++x)
      for (int i = 0; i < rule.size(); ++i)
        if (w >> torus.neighbor(x, rule.offset(i)) & 1) local[x] |= 1u << i;
    for (std::size_t xi = 0; xi < S; ++xi) {
      double p = in[w];
      for (std::uint64_t x = 0; x < n; ++x)
        p *= noise.p(rule, local[x], spin_from_bit(xi >> x & 1));
      out[xi] += p;
    }
  }
  return out;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

std::vector<double> random_dist(std::size_t n, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> v(n);
  double s = 0;
  for (auto& x : v) s += (x = u(gen));
  for (auto& x : v) x /= s;
  return v;
}

}  // namespace

TEST_SUITE("exact") {
  TEST_CASE("transfer operator matches the dense kernel") {
    std::mt19937_64 gen(3);
    const std::vector<std::pair<RuleSpec, Torus>> cases = {
        {builtin("stavskaya"), Torus({6})}, {builtin("majority1d"), Torus({7})},
        {builtin("nec"), Torus({3, 3})}};
    for (const auto& [rule, torus] : cases) {
      const auto in = random_dist(std::size_t{1} << torus.sites(), gen);
      std::vector<double> table(rule.table_size());
      for (auto& p : table) p = (1 + gen() % 998) / 1000.0;
      for (const auto& noise : {NoiseModel::symmetric(0.1), NoiseModel::biased(0.2, 0.03),
                                NoiseModel::table(table)}) {
        const TransferOperator op(rule, noise, torus);
        std::vector<double> out(in.size());
        op.apply(in, out);
        CHECK(max_abs_diff(out, dense_apply(in, rule, noise, torus)) < 1e-14);
      }
    }
  }

  TEST_CASE("zero noise pushes point masses along the deterministic map") {
    const Torus t({8});
    const RuleSpec r = builtin("stavskaya");
    for (std::uint64_t code : {0ull, 0b10110101ull, 0b11100011ull, 255ull}) {
      const auto out = transfer_apply(StateDistribution::point_mass(t, code), r, NoiseModel::symmetric(0));
      const auto next = step_deterministic(LatticeState::from_code(t, code), r).code();
      CHECK(out[next] == 1.0);
    }
  }

  TEST_CASE("half noise gives the uniform distribution") {
    const Torus t({3, 3});
    const auto out = transfer_apply(StateDistribution::all_plus(t), builtin("nec"), NoiseModel::symmetric(0.5));
    CHECK(tv_distance(out, StateDistribution::uniform(t)) < 1e-15);
    const auto st = stationary_distribution(builtin("nec"), NoiseModel::symmetric(0.5), t);
    CHECK(tv_distance(st.distribution, StateDistribution::uniform(t)) < 1e-12);
  }

  TEST_CASE("biased Stavskaya is absorbed in all-minus") {
    const Torus t({6});
    const auto st = stationary_distribution(builtin("stavskaya"), NoiseModel::biased(0.1, 0.0), t);
    CHECK(st.distribution[0] == 1.0);
    CHECK(st.residual == 0.0);
    // From all-plus the mass on all-minus only grows.
    const TransferOperator op(builtin("stavskaya"), NoiseModel::biased(0.1, 0.0), t);
    auto mu = StateDistribution::all_plus(t);
    double prev = 0.0;
    for (int n = 0; n < 2000; ++n) {
      mu = op(mu);
      CHECK(mu[0] >= prev);
      prev = mu[0];
    }
    CHECK(mu[0] > 0.0);
  }

  TEST_CASE("NEC stationary measure is flip symmetric") {
    const Torus t({3, 3});
    const auto pi = stationary_distribution(builtin("nec"), NoiseModel::symmetric(0.3), t).distribution;
    double asym = 0;
    const std::size_t full = pi.states() - 1;
    for (std::size_t c = 0; c < pi.states(); ++c) asym += std::abs(pi[c] - pi[full ^ c]);
    CHECK(asym / 2 < 1e-9);
  }

  TEST_CASE("distance and expectations") {
    const Torus t({5});
    CHECK(tv_distance(StateDistribution::all_plus(t), StateDistribution::all_minus(t)) == 1.0);
    CHECK(tv_distance(StateDistribution::uniform(t), StateDistribution::uniform(t)) == 0.0);
    CHECK(tv_distance(StateDistribution::uniform(t), StateDistribution::all_plus(t)) ==
          doctest::Approx(1 - 1.0 / 32).epsilon(1e-15));
    CHECK_THROWS(tv_distance(StateDistribution::uniform(t), StateDistribution::uniform(Torus({6}))));
    CHECK(cylinder_expectation(StateDistribution::uniform(t), CylinderFunction::constant(1)) ==
          doctest::Approx(1.0));
    CHECK(std::abs(cylinder_expectation(StateDistribution::uniform(t), CylinderFunction::spin({0}))) < 1e-15);
    CHECK(cylinder_expectation(StateDistribution::all_plus(t), CylinderFunction::spin({0})) == 1.0);
    CHECK_THROWS(StateDistribution(t, std::vector<double>(32, 0.5)));
    CHECK_THROWS_AS(StateDistribution::uniform(Torus({25})), ResourceError);
  }

  TEST_CASE("seminorm") {
    CHECK(seminorm(CylinderFunction::spin({0})) == 2.0);
    CHECK(seminorm(CylinderFunction::constant(3.0)) == 0.0);
    CHECK(seminorm(CylinderFunction::spin_product({{0}, {1}})) == 4.0);
  }

  TEST_CASE("duality on random observables") {
    std::mt19937_64 gen(8);
    const std::vector<std::pair<RuleSpec, Torus>> cases = {
        {builtin("stavskaya"), Torus({10})}, {builtin("nec"), Torus({3, 3})}};
    for (const auto& [rule, torus] : cases) {
      std::vector<double> table(rule.table_size());
      for (auto& p : table) p = (1 + gen() % 998) / 1000.0;
      for (const auto& noise : {NoiseModel::symmetric(0.15), NoiseModel::table(table)}) {
        const TransferOperator op(rule, noise, torus);
        const auto mu = random_dist(op.states(), gen);
        std::vector<double> f(op.states()), Tf(op.states()), Tmu(op.states());
        std::uniform_real_distribution<double> u(-1, 1);
        for (auto& v : f) v = u(gen);
        op.apply(mu, Tmu);
        op.apply_dual(f, Tf);
        double lhs = 0, rhs = 0;
        for (std::size_t i = 0; i < f.size(); ++i) {
          lhs += Tmu[i] * f[i];
          rhs += mu[i] * Tf[i];
        }
        CHECK(std::abs(lhs - rhs) < 1e-13);
      }
    }
  }

  TEST_CASE("basin membership") {
    CHECK(basin_membership(ProductMeasureSpec::uniform_value(0.0), 1, 0));
    CHECK(basin_membership(ProductMeasureSpec::uniform_value(0.05), 1, 0.1));
    CHECK_FALSE(basin_membership(ProductMeasureSpec::uniform_value(0.2), 1, 0.1));
    CHECK_FALSE(basin_membership(ProductMeasureSpec::uniform_value(0.05), 1, 0.0));
    CHECK_FALSE(basin_membership(ProductMeasureSpec::uniform_value(0.05), 0.4, 0.1));
    // Finite list: the worst subset takes every factor above one.
    CHECK(basin_membership({{0.2, 0.01, 0.01}, false}, 2.0, 0.1));
    CHECK_FALSE(basin_membership({{0.2, 0.2, 0.01}, false}, 2.0, 0.1));
    CHECK(basin_membership({{0.2, 0.2, 0.01}, false}, 4.0, 0.1));
    CHECK(basin_membership({{0.0, 0.0}, false}, 0.0, 0.0));
  }

  TEST_CASE("product measures") {
    const Torus t({4});
    const auto mu = product_measure(t, ProductMeasureSpec::uniform_value(0.25));
    CHECK(mu[0] == doctest::Approx(std::pow(0.25, 4)));
    CHECK(cylinder_expectation(mu, CylinderFunction::spin({2})) == doctest::Approx(0.5));
  }

  TEST_CASE("light cone consistency") {
    const auto noise = NoiseModel::symmetric(0.1);
    CHECK(window_marginal_consistency(builtin("stavskaya"), noise, {{0}}, 0, Torus({8}), Torus({12})) == 0.0);
    CHECK(window_marginal_consistency(builtin("stavskaya"), noise, {{0}}, 2, Torus({8}), Torus({12})) < 1e-12);
    CHECK(window_marginal_consistency(builtin("nec"), noise, {{0, 0}}, 1, Torus({3, 3}), Torus({4, 4})) < 1e-12);
    CHECK_THROWS_AS(
        window_marginal_consistency(builtin("stavskaya"), noise, {{0}}, 4, Torus({8}), Torus({12})),
        DomainError);
  }

  TEST_CASE("Stavskaya covariances decay with distance") {
    const Torus t({12});
    const auto pi = stationary_distribution(builtin("stavskaya"), NoiseModel::symmetric(0.05), t).distribution;
    double prev = std::abs(stationary_covariance(pi, {0}, {0}));
    for (int x = 1; x <= 6; ++x) {
      const double c = std::abs(stationary_covariance(pi, {0}, {x}));
      CHECK(c <= prev + 1e-12);
      prev = c;
    }
  }

  TEST_CASE("autocovariance at lag zero is the variance") {
    const Torus t({8});
    const RuleSpec r = builtin("stavskaya");
    const auto noise = NoiseModel::symmetric(0.1);
    const TransferOperator op(r, noise, t);
    const auto pi = stationary_distribution(r, noise, t).distribution;
    CHECK(stationary_autocovariance(op, pi, 0) ==
          doctest::Approx(stationary_covariance(pi, {0}, {0})).epsilon(1e-12));
    CHECK(stationary_autocovariance(op, pi, 0) >= 0);
  }

  TEST_CASE("TV curve is log-linear") {
    const Torus t({10});
    const RuleSpec r = builtin("stavskaya");
    const auto noise = NoiseModel::symmetric(0.05);
    const TransferOperator op(r, noise, t);
    StationaryOptions opts;
    opts.tol = 1e-14;
    const auto pi = stationary_distribution(r, noise, t, opts).distribution;
    const auto curve = tv_curve(op, pi, 40);
    CHECK(curve[0] == doctest::Approx(tv_distance(StateDistribution::all_plus(t), pi)));
    // Decreasing until the accuracy of pi is reached.
    for (std::size_t n = 1; n < curve.size() && curve[n] > 1e-12; ++n) CHECK(curve[n] < curve[n - 1]);
  }
}
