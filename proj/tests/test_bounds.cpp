#include <doctest.h>

#include <cmath>
#include <random>

#include "toomlab/bounds.hpp"
#include "toomlab/error.hpp"

using namespace toomlab;
using namespace toomlab::bounds;

TEST_SUITE("bounds") {
  TEST_CASE("sigma examples") {
    CHECK(sigma({2, 1, 1.0, 0.1, 0.0, 0.0, 1.0}) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(sigma({3, 1, 1.0, 0.0, 0.0, 0.0, 1.0}) == 0.0);
    const double es = epsilon_star(2, 1, 1.0, 0.0);
    CHECK(std::abs(sigma({2, 1, 1.0, 0.0, es, 0.0, 1.0}) - 1.0) < 1e-12);
  }

  TEST_CASE("alpha and epsilon star") {
    CHECK(alpha_star(2) == 0.5);
    CHECK(alpha_star(3) == 1.0 / 3.0);
    CHECK(alpha_star(1) == 1.0);
    const double expected = std::pow(0.5 / 1024.0, 3.0);
    CHECK(epsilon_star(2, 1, 1.0, 0.0) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(std::abs(expected - 1.1642e-10) < 1e-14);
    CHECK_THROWS_AS(epsilon_star(2, 1, 1.0, 0.5), DomainError);
    CHECK(epsilon_star(2, 1, 1.0, 0.5 - 1e-12) < 1e-40);
    double prev = epsilon_star(3, 2, 0.5, 0.0);
    for (int i = 1; i < 50; ++i) {
      const double cur = epsilon_star(3, 2, 0.5, i / 150.0);
      CHECK(cur < prev);
      CHECK(cur > 0);
      prev = cur;
    }
  }

  TEST_CASE("sigma is nondecreasing in alpha, eps and eps_prime") {
    for (int i = 0; i < 20; ++i)
      for (int j = 0; j < 20; ++j) {
        const double a = i * 0.02, e = j * 1e-7;
        BoundParams p{3, 2, 0.75, a, e, 0.0, 1.0};
        const double base = sigma(p);
        p.alpha += 0.01;
        CHECK(sigma(p) >= base);
        p.alpha -= 0.01;
        p.eps += 1e-8;
        CHECK(sigma(p) >= base);
        p.eps -= 1e-8;
        p.eps_prime = e + 1e-8;
        CHECK(sigma(p) >= base);
      }
  }

  TEST_CASE("sigma below one strictly under epsilon star") {
    const double es = epsilon_star(3, 3, 1.0, 0.1);
    for (double f : {0.1, 0.5, 0.9, 0.999}) CHECK(sigma({3, 3, 1.0, 0.1, f * es, 0.0, 1.0}) < 1.0);
  }

  TEST_CASE("graph count bound") {
    auto g = graph_count_bound({2, 1, 1}, 1, 2);
    CHECK(g.binomial_form == 512);
    CHECK(g.loose_form == 1024);
    CHECK(graph_count_bound({2, 3, 1}, 1, 2).binomial_form == 0);
    CHECK(graph_count_bound({5, 2, 0}, 1, 2).binomial_form == 10);
    for (long long n = 0; n < 12; ++n)
      for (long long c = 0; c <= n + 1; ++c)
        for (long long m = 0; m < 4; ++m) {
          const auto b = graph_count_bound({n, c, m}, 2, 3);
          CHECK(b.binomial_form <= b.loose_form);
        }
    // Far beyond 64 bits.
    CHECK(graph_count_bound({100, 50, 40}, 3, 5).loose_form > BigInt("1" + std::string(60, '0')));
  }

  TEST_CASE("edge error inequality") {
    CHECK(edge_error_inequality(0, 1, 1, 1) == 1);
    CHECK(edge_error_inequality(3, 1, 1, 1) == 2);
    CHECK(edge_error_inequality(4, 2, 2, 1) == 3);
    CHECK(edge_error_inequality(5, 0, 1, Rational(1, 2)) == 1);  // 5/5
  }

  TEST_CASE("constants C") {
    auto c = constants_C({2, 1, 1.0, 0.0, 0.0, 0.0, 1.0});
    CHECK(c.C == 2.0);
    CHECK(c.C_inv == 2.0);
    c = constants_C({2, 1, 1.0, 0.0, 0.0, 0.0, 3.5});
    CHECK(c.C == 7.0);
    CHECK_THROWS_AS(constants_C({2, 1, 1.0, 0.0, 1e-6, 0.0, 1.0}), DomainError);
    // Grows without bound as admissibility is lost.
    double prev = 0;
    const double limit = std::pow(1.0 / 256.0, 3.0);
    for (double f : {0.1, 0.5, 0.9, 0.99, 0.999}) {
      const auto k = constants_C({2, 1, 1.0, 0.0, f * limit, 0.0, 1.0});
      CHECK(k.C > prev);
      CHECK(k.C >= 2.0);
      CHECK(k.C_inv >= 2.0);
      prev = k.C;
    }
  }

  TEST_CASE("series check") {
    auto s = series_check({2, 1, 1.0, 0.0, 0.0, 0.0, 1.0}, 10, 1);
    CHECK(s.partial == 0.0);
    CHECK(s.closed == 0.0);
    // eps = 1e-6 gives B^2 eps^{1/3} = 2.56, so the series diverges.
    CHECK_THROWS_AS(series_check({2, 1, 1.0, 0.0, 1e-6, 0.0, 1.0}, 50, 1), DomainError);
    const BoundParams p{2, 1, 1.0, 0.0, 1e-9, 0.0, 1.0};
    s = series_check(p, 50, 1);
    CHECK(s.partial <= s.closed);
    CHECK(s.gap < 1e-12 * s.closed);
    double prev = 0;
    for (int n = 1; n < 30; ++n) {
      const double cur = series_check(p, n, 2).partial;
      CHECK(cur >= prev);
      prev = cur;
    }
  }

  TEST_CASE("closed form C matches the summed series") {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> unit(0.05, 0.6);
    for (int i = 0; i < 20; ++i) {
      BoundParams p{2 + i % 3, 1 + i % 2, 0.5 + 0.25 * (i % 3), 0.0, 0.0, 0.0, 0.5 + i % 4};
      // Pick eps so that the growth ratio lands at a sampled value below one.
      const double ratio = unit(gen);
      p.eps = std::pow(ratio / (p.edge_types() * p.edge_types()), p.spread());
      REQUIRE(p.admissible());
      const double closed = constants_C(p).C;
      CHECK(std::abs(summed_C(p, 400) - closed) <= 1e-9 * closed);
    }
  }

  TEST_CASE("decay constants") {
    const auto d = decay_constants(1.0, 0.25, builtin("stavskaya"));
    CHECK(d.v == 1);
    CHECK(d.C_prime == 8.0);
    CHECK(*d.eta == doctest::Approx(0.5));
    CHECK(decay_constants(1.0, 0.25, builtin("nec")).v == 1);
    const auto id = decay_constants(1.0, 0.25, builtin("identity"));
    CHECK(id.v == 0);
    CHECK_FALSE(id.eta.has_value());
    CHECK_THROWS_AS(decay_constants(1.0, 1.0, builtin("nec")), DomainError);
  }

  TEST_CASE("validation") {
    CHECK_THROWS(validate({0, 1, 1.0, 0.0, 0.0, 0.0, 1.0}));
    CHECK_THROWS(validate({2, 1, -1.0, 0.0, 0.0, 0.0, 1.0}));
    CHECK_THROWS(validate({2, 1, 1.0, 0.0, 1.5, 0.0, 1.0}));
  }
}
