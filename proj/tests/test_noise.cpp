#include <doctest.h>

#include <cmath>
#include <limits>

#include "toomlab/error.hpp"
#include "toomlab/noise.hpp"

using namespace toomlab;

TEST_SUITE("noise") {
  TEST_CASE("symmetric and biased kernels satisfy the assumptions with alpha 0") {
    for (double e : {0.0, 0.05, 0.1}) {
      for (const auto& name : builtin_names()) {
        const auto k = check_assumptions(NoiseModel::symmetric(e), builtin(name));
        CHECK(k.eps == e);
        CHECK(k.alpha == 0.0);
      }
      const auto b = check_assumptions(NoiseModel::biased(e, 0.0), builtin("stavskaya"));
      CHECK(b.eps == e);
      CHECK(b.alpha == 0.0);
    }
  }

  TEST_CASE("kernel probabilities") {
    const RuleSpec s = builtin("stavskaya");
    const auto n = NoiseModel::biased(0.1, 0.02);
    CHECK(n.p(s, 0b11, Spin::Minus) == 0.1);
    CHECK(n.p(s, 0b00, Spin::Plus) == 0.02);
    CHECK(n.p(s, 0b00, Spin::Minus) + n.p(s, 0b00, Spin::Plus) == doctest::Approx(1.0));
    CHECK(n.factors_through_rule(s));
    CHECK(NoiseModel::symmetric(0).is_deterministic(s));
  }

  TEST_CASE("table kernels") {
    const RuleSpec s = builtin("stavskaya");
    // Depends on the neighbor even when phi does not change: alpha > 0.
    const auto t = NoiseModel::table({0.05, 0.9, 0.95, 0.99});
    const auto k = check_assumptions(t, s);
    CHECK(k.eps == doctest::Approx(0.1));
    // cfg 01 -> set bit 1 to a = +1 -> cfg 11: minus prob 0.1 vs 0.01, relative change 0.9.
    CHECK(k.alpha == doctest::Approx(0.9));
    CHECK_FALSE(t.factors_through_rule(s));
    // A zero base probability with a nonzero change makes the bound unsatisfiable.
    const auto z = NoiseModel::table({0.0, 1.0, 1.0, 0.8});
    CHECK(std::isinf(check_assumptions(z, s).alpha));
    CHECK_THROWS(NoiseModel::table({0.0, 1.0, 1.0}).require_covers(s));
    CHECK_THROWS(NoiseModel::symmetric(1.5));
    CHECK_THROWS(NoiseModel::table({0.0, 1.2, 1.0, 1.0}));
  }

  TEST_CASE("thresholds") {
    CHECK(probability_threshold(0.0) == 0);
    CHECK(probability_threshold(1.0) == std::uint64_t{1} << 32);
    CHECK(probability_threshold(0.5) == std::uint64_t{1} << 31);
  }
}
