#include <doctest.h>

#include <algorithm>
#include <random>

#include "test_support.hpp"
#include "toomlab/error.hpp"
#include "toomlab/eroder.hpp"

using namespace toomlab;

namespace {

ErosionCertificate certify(const RuleSpec& r) {
  return check_eroder(hull_family(r, minimal_plus_sets(r)));
}

// Hulls in one dimension are intervals; they share a point iff the largest
// left end is at most the smallest right end.
bool intervals_intersect(const RuleSpec& rule) {
  int lo = -1000, hi = 1000;
  for (const auto& z : minimal_plus_sets(rule).sets) {
    int a = 1000, b = -1000;
    for (int i : z) {
      a = std::min(a, rule.offset(i)[0]);
      b = std::max(b, rule.offset(i)[0]);
    }
    lo = std::max(lo, a);
    hi = std::min(hi, b);
  }
  return lo <= hi;
}

Rational functional_at(const std::vector<Rational>& f, const std::vector<Rational>& x) {
  Rational s = 0;
  for (std::size_t c = 0; c < f.size(); ++c) s += f[c] * x[c];
  return s;
}

}  // namespace

TEST_SUITE("eroder") {
  TEST_CASE("verdicts on builtins") {
    const auto s = certify(builtin("stavskaya"));
    CHECK(s.verdict == Verdict::Eroder);
    const auto n = certify(builtin("nec"));
    CHECK(n.verdict == Verdict::Eroder);
    const auto m = certify(builtin("majority1d"));
    CHECK(m.verdict == Verdict::NonEroder);
    CHECK(m.witness == std::vector<Rational>{0});
    const auto id = certify(builtin("identity"));
    CHECK(id.verdict == Verdict::NonEroder);
    CHECK(id.witness == std::vector<Rational>{0});
    for (const auto& name : builtin_names()) {
      const RuleSpec r = builtin(name);
      CHECK(verify_certificate(hull_family(r, minimal_plus_sets(r)), certify(r)));
    }
  }

  TEST_CASE("certificate constants") {
    const auto s = certificate_constants(certify(builtin("stavskaya")));
    CHECK(s.q == 2);
    CHECK(s.r > 0);
    const auto n = certificate_constants(certify(builtin("nec")));
    CHECK(n.q == 3);
    CHECK(n.r > 0);
    CHECK_THROWS_AS(certificate_constants(certify(builtin("majority1d"))), DomainError);
  }

  TEST_CASE("normalized functionals have largest coefficient one") {
    const auto c = certify(builtin("nec"));
    Rational biggest = 0;
    for (const auto& f : c.functionals)
      for (const auto& v : f) biggest = std::max(biggest, Rational(abs(v)));
    CHECK(biggest == 1);
  }

  TEST_CASE("tampered certificates fail") {
    const RuleSpec r = builtin("stavskaya");
    const auto fam = hull_family(r, minimal_plus_sets(r));
    auto c = certify(r);
    for (auto& b : c.bounds) b = 0;
    CHECK_FALSE(verify_certificate(fam, c));

    auto m = certify(builtin("majority1d"));
    const auto mfam = hull_family(builtin("majority1d"), minimal_plus_sets(builtin("majority1d")));
    m.witness[0] = Rational(1, 2);
    CHECK_FALSE(verify_certificate(mfam, m));
    m = certify(builtin("majority1d"));
    m.weights[0][0] = Rational(-1);
    CHECK_FALSE(verify_certificate(mfam, m));

    auto bad = certify(r);
    bad.functionals.pop_back();
    CHECK_THROWS_AS(verify_certificate(fam, bad), ValidationError);
  }

  TEST_CASE("input errors") {
    CHECK_THROWS(check_eroder(HullFamily{1, {}}));
    CHECK_THROWS(check_eroder(HullFamily{2, {{{0}}}}));
  }

  TEST_CASE("d = 1 agrees with interval intersection, exhaustively for R <= 4") {
    for (int R = 1; R <= 4; ++R) {
      std::vector<Offset> nb;
      for (int i = 0; i < R; ++i) nb.push_back({2 * i - R});
      const std::size_t n = std::size_t{1} << R;
      for (std::uint64_t code = 0; code < (std::uint64_t{1} << n); ++code) {
        std::vector<bool> t(n);
        for (std::size_t c = 0; c < n; ++c) t[c] = code >> c & 1;
        const RuleSpec rule(1, nb, t);
        if (!check_monotone(rule).pass()) continue;
        const auto cert = certify(rule);
        CHECK((cert.verdict == Verdict::NonEroder) == intervals_intersect(rule));
      }
    }
  }

  TEST_CASE("soundness and exclusivity on random rules") {
    std::mt19937_64 gen(2024);
    for (int trial = 0; trial < 300; ++trial) {
      const int d = 1 + trial % 3, R = 2 + trial % 7;
      const RuleSpec rule = testing::random_monotone_rule(gen, d, R);
      const auto fam = hull_family(rule, minimal_plus_sets(rule));
      const auto cert = check_eroder(fam);
      REQUIRE(verify_certificate(fam, cert));
      if (cert.verdict == Verdict::Eroder) {
        CHECK(cert.q <= d + 1);
        CHECK(certificate_constants(cert).r > 0);
        // No point of the lattice box lies in every hull: sum f_i = 0 < sum c_i.
        Rational total_c = 0;
        for (const auto& c : cert.bounds) total_c += c;
        std::vector<Rational> x(d, Rational(1, 3));
        Rational total_f = 0;
        for (const auto& f : cert.functionals) total_f += functional_at(f, x);
        CHECK(total_f < total_c);
      }
    }
  }
}
