#include <doctest.h>

#include <cmath>
#include <random>

#include "test_support.hpp"
#include "toomlab/engine.hpp"
#include "toomlab/error.hpp"
#include "toomlab/eroder.hpp"

using namespace toomlab;

namespace {

LatticeState random_state(const Torus& torus, std::mt19937_64& gen, double p_plus = 0.5) {
  std::bernoulli_distribution b(p_plus);
  LatticeState s(torus, false);
  for (std::uint64_t x = 0; x < torus.sites(); ++x) s.set(x, spin_from_bit(b(gen)));
  return s;
}

std::vector<bool> bits(const LatticeState& s) {
  std::vector<bool> out(s.sites());
  for (std::uint64_t x = 0; x < s.sites(); ++x) out[x] = s.plus(x);
  return out;
}

// Naive synchronous update straight from the coordinates, independent of the
// packed layout.
std::vector<bool> naive_step(const std::vector<bool>& in, const Torus& torus, const RuleSpec& rule) {
  std::vector<bool> out(in.size());
  for (std::uint64_t x = 0; x < in.size(); ++x) {
    const auto c = torus.coords(x);
    LocalConfig cfg = 0;
    for (int i = 0; i < rule.size(); ++i) {
      std::vector<int> y(c);
      for (int a = 0; a < torus.dimension(); ++a) y[a] += rule.offset(i)[a];
      if (in[torus.index(y)]) cfg |= 1u << i;
    }
    out[x] = rule.output(cfg);
  }
  return out;
}

}  // namespace

TEST_SUITE("lattice") {
  TEST_CASE("torus indexing") {
    const Torus t({3, 5, 70});
    CHECK(t.sites() == 1050);
    CHECK(t.words_per_row() == 2);
    for (std::uint64_t x = 0; x < t.sites(); x += 7) CHECK(t.index(t.coords(x)) == x);
    CHECK(t.index(std::vector<int>{-1, 0, 0}) == t.index(std::vector<int>{2, 0, 0}));
    CHECK(t.neighbor(0, {0, 0, -1}) == 69);
    CHECK_THROWS_AS(Torus({}), ConfigError);
    CHECK_THROWS_AS(Torus({0}), ConfigError);
  }

  TEST_CASE("require_fits") {
    CHECK_NOTHROW(Torus({3}).require_fits(builtin("majority1d")));
    CHECK_THROWS_AS(Torus({2}).require_fits(builtin("majority1d")), ConfigError);
    CHECK_THROWS_AS(Torus({5}).require_fits(builtin("nec")), ConfigError);
  }

  TEST_CASE("state accessors and padding") {
    const Torus t({3, 70});
    LatticeState s(t, true);
    CHECK(s.count_plus() == 210);
    CHECK(s.is_all_plus());
    s.set(69, Spin::Minus);
    CHECK(s.get(69) == Spin::Minus);
    CHECK(s.count_minus() == 1);
    CHECK(s.magnetization() == doctest::Approx(208.0 / 210.0));
    // Padding bits beyond the row stay clear.
    CHECK((s.row(0)[1] >> 6) == 0);
    const LatticeState c = LatticeState::from_code(Torus({8}), 0b10110001);
    CHECK(c.code() == 0b10110001);
    CHECK(c.plus(0));
    CHECK_FALSE(c.plus(1));
  }

  TEST_CASE("shift") {
    std::mt19937_64 gen(1);
    const Torus t({6, 67});
    const LatticeState s = random_state(t, gen);
    const LatticeState sh = s.shifted({2, -5});
    for (std::uint64_t x = 0; x < t.sites(); ++x) {
      auto c = t.coords(x);
      c[0] += 2;
      c[1] -= 5;
      CHECK(sh.plus(x) == s.plus(t.index(c)));
    }
  }
}

TEST_SUITE("engine") {
  TEST_CASE("deterministic examples") {
    const Torus ring({8});
    LatticeState s = LatticeState::all_plus(ring);
    for (int x : {2, 3, 4}) s.set(x, Spin::Minus);
    const LatticeState out = step_deterministic(s, builtin("stavskaya"));
    CHECK(out.count_minus() == 2);
    CHECK_FALSE(out.plus(2));
    CHECK_FALSE(out.plus(3));
    CHECK(s.count_minus() == 3);

    const Torus sq({5, 5});
    LatticeState n = LatticeState::all_plus(sq);
    n.set(0, Spin::Minus);
    CHECK(step_deterministic(n, builtin("nec")).is_all_plus());
    for (const auto& name : builtin_names()) {
      const RuleSpec r = builtin(name);
      const Torus t(std::vector<int>(r.dimension(), 7));
      CHECK(step_deterministic(LatticeState::all_plus(t), r).is_all_plus());
      CHECK(step_deterministic(LatticeState::all_minus(t), r).count_plus() == 0);
    }
    CHECK_THROWS_AS(step_deterministic(LatticeState::all_plus(Torus({2})), builtin("majority1d")),
                    ConfigError);
  }

  TEST_CASE("word path matches naive update on random rules and shapes") {
    std::mt19937_64 gen(17);
    for (int trial = 0; trial < 60; ++trial) {
      const int d = 1 + trial % 3;
      const RuleSpec rule = testing::random_monotone_rule(gen, d, 1 + trial % 6, 2);
      std::vector<int> dims(d);
      for (auto& L : dims) L = 5 + gen() % (d == 1 ? 200 : d == 2 ? 80 : 12);
      const Torus t(dims);
      const LatticeState s = random_state(t, gen);
      const LatticeState out = step_deterministic(s, rule);
      CHECK(bits(out) == naive_step(bits(s), t, rule));
      CHECK(out == reference_step_deterministic(s, rule));
    }
  }

  TEST_CASE("monotone coupling") {
    std::mt19937_64 gen(23);
    for (int trial = 0; trial < 40; ++trial) {
      const RuleSpec rule = testing::random_monotone_rule(gen, 2, 2 + trial % 5, 1);
      const Torus t({9, 33});
      LatticeState lo = random_state(t, gen, 0.4);
      LatticeState hi = lo;
      for (std::uint64_t x = 0; x < t.sites(); ++x)
        if (gen() % 3 == 0) hi.set(x, Spin::Plus);
      REQUIRE(leq(lo, hi));
      CHECK(leq(step_deterministic(lo, rule), step_deterministic(hi, rule)));
      const auto noise = NoiseModel::symmetric(0.2);
      CHECK(leq(step_noisy(lo, rule, noise, RngKey{5}, 3), step_noisy(hi, rule, noise, RngKey{5}, 3)));
    }
  }

  TEST_CASE("noisy step matches the per-site reference") {
    std::mt19937_64 gen(31);
    for (int trial = 0; trial < 40; ++trial) {
      const int d = 1 + trial % 2;
      const RuleSpec rule = testing::random_monotone_rule(gen, d, 2 + trial % 4, 2);
      const Torus t(d == 1 ? std::vector<int>{int(5 + gen() % 300)}
                           : std::vector<int>{int(5 + gen() % 9), int(5 + gen() % 150)});
      const LatticeState s = random_state(t, gen);
      const RngKey key{gen()};
      for (const auto& noise : {NoiseModel::symmetric(0.13), NoiseModel::biased(0.3, 0.01),
                                NoiseModel::symmetric(0.0), NoiseModel::symmetric(0.5)}) {
        CHECK(step_noisy(s, rule, noise, key, 9) == reference_step_noisy(s, rule, noise, key, 9));
      }
      std::vector<double> table(rule.table_size());
      for (auto& p : table) p = (gen() % 1000) / 1000.0;
      const auto tn = NoiseModel::table(table);
      CHECK(step_noisy(s, rule, tn, key, 2) == reference_step_noisy(s, rule, tn, key, 2));
    }
  }

  TEST_CASE("zero noise equals the deterministic step") {
    std::mt19937_64 gen(37);
    const Torus t({40, 40});
    const LatticeState s = random_state(t, gen);
    CHECK(step_noisy(s, builtin("nec"), NoiseModel::symmetric(0.0), RngKey{1}, 0) ==
          step_deterministic(s, builtin("nec")));
  }

  TEST_CASE("kernel variants give identical trajectories") {
    std::mt19937_64 gen(41);
    const Torus t({64, 200});
    const LatticeState s0 = random_state(t, gen, 0.9);
    std::vector<LatticeState> finals;
    for (const auto* ks : kernels::available()) {
      Engine e(builtin("nec"), t, NoiseModel::symmetric(0.07));
      e.set_kernels(*ks);
      LatticeState s = s0;
      for (int step = 0; step < 20; ++step) s = e.step(s, RngKey{77}, step);
      finals.push_back(s);
    }
    for (const auto& f : finals) CHECK(f == finals.front());
  }

  TEST_CASE("thread count invariance") {
    std::mt19937_64 gen(43);
    const Torus t({97, 131});
    const LatticeState s0 = random_state(t, gen, 0.8);
    std::vector<LatticeState> finals;
    for (int threads : {1, 2, 3, 8}) {
      Engine e(builtin("nec"), t, NoiseModel::biased(0.05, 0.1));
      e.set_threads(threads);
      LatticeState s = s0;
      for (int step = 0; step < 15; ++step) s = e.step(s, RngKey{5}, step);
      finals.push_back(s);
    }
    for (const auto& f : finals) CHECK(f == finals.front());
  }

  TEST_CASE("translation covariance") {
    std::mt19937_64 gen(47);
    const RuleSpec rule = builtin("nec");
    const Torus t({11, 13});
    const LatticeState s = random_state(t, gen);
    const Offset shift{3, -4};
    CHECK(step_deterministic(s.shifted(shift), rule) == step_deterministic(s, rule).shifted(shift));
    // Noisy: the shifted run must read the draw of the site it came from.
    const auto noise = NoiseModel::symmetric(0.2);
    const RngKey key{9};
    const auto site_key = [&](std::uint64_t x) {
      auto c = t.coords(x);
      for (int a = 0; a < 2; ++a) c[a] += shift[a];
      return t.index(c);
    };
    CHECK(reference_step_noisy(s.shifted(shift), rule, noise, key, 4, site_key) ==
          step_noisy(s, rule, noise, key, 4).shifted(shift));
  }

  TEST_CASE("half noise gives unbiased magnetization") {
    const Torus t({64, 64});
    Engine e(builtin("nec"), t, NoiseModel::symmetric(0.5));
    LatticeState s = LatticeState::all_plus(t);
    double sum = 0;
    for (int step = 0; step < 100; ++step) {
      s = e.step(s, RngKey{2}, step);
      sum += s.magnetization();
    }
    const double se = 1.0 / std::sqrt(100.0 * 4096.0);
    CHECK(std::abs(sum / 100.0) < 4 * se);
  }

  TEST_CASE("erosion times") {
    const RuleSpec st = builtin("stavskaya");
    for (int k = 1; k <= 32; ++k) {
      std::vector<Offset> island;
      for (int i = 0; i < k; ++i) island.push_back({i});
      const auto cutoff = default_erosion_cutoff(island);
      const auto r = erosion_time(st, island, erosion_torus(st, island, cutoff), cutoff);
      CHECK(r.erased);
      CHECK(r.steps == static_cast<std::uint64_t>(k));
      CHECK(r.minus_counts.front() == static_cast<std::uint64_t>(k));
    }
    const RuleSpec nec = builtin("nec");
    const std::vector<Offset> one{{0, 0}};
    auto r = erosion_time(nec, one, erosion_torus(nec, one, 64), 64);
    CHECK(r.erased);
    CHECK(r.steps == 1);

    std::vector<Offset> square;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) square.push_back({i, j});
    r = erosion_time(nec, square, erosion_torus(nec, square, 256), 256);
    CHECK(r.erased);
    CHECK(r.steps == 5);

    const RuleSpec maj = builtin("majority1d");
    const std::vector<Offset> two{{0}, {1}};
    r = erosion_time(maj, two, erosion_torus(maj, two, 1000), 1000);
    CHECK_FALSE(r.erased);
    CHECK(r.steps == 1000);
    CHECK_THROWS_AS(erosion_time(maj, two, Torus({50}), 1000), ConfigError);
  }

  TEST_CASE("certified eroders erase small islands") {
    std::mt19937_64 gen(53);
    int checked = 0;
    for (int trial = 0; trial < 60 && checked < 20; ++trial) {
      const RuleSpec rule = testing::random_monotone_rule(gen, 2, 3 + trial % 3, 1);
      const auto cert = check_eroder(hull_family(rule, minimal_plus_sets(rule)));
      if (cert.verdict != Verdict::Eroder) continue;
      ++checked;
      std::vector<Offset> island;
      const int side = 1 + gen() % 4;
      for (int i = 0; i < side; ++i)
        for (int j = 0; j < side; ++j)
          if (gen() % 4) island.push_back({i, j});
      if (island.empty()) island.push_back({0, 0});
      const auto cutoff = default_erosion_cutoff(island);
      CHECK(erosion_time(rule, island, erosion_torus(rule, island, cutoff), cutoff).erased);
    }
    CHECK(checked > 5);
  }
}
