#include "toomlab/bounds.hpp"
#include <string>

#include <algorithm>
#include <cmath>
#include <limits>

#include "toomlab/error.hpp"

namespace toomlab::bounds {

double BoundParams::eps_tilde() const noexcept { return std::max(eps, eps_prime); }

double BoundParams::spread() const noexcept { return 1.0 + 2.0 * q / r; }

double BoundParams::edge_types() const noexcept {
  return std::ldexp(static_cast<double>(R) * R + 2.0 * R, q);
}

double BoundParams::growth_ratio() const noexcept {
  const double b = edge_types();
  return b * b * std::pow(eps_tilde(), 1.0 / spread());
}

bool BoundParams::admissible() const noexcept { return growth_ratio() < 1.0; }

void validate(const BoundParams& p) {
  if (p.R < 1) throw DomainError("R must be >= 1");
  if (p.q < 1) throw DomainError("q must be >= 1");
  if (!(p.r > 0) || !std::isfinite(p.r)) throw DomainError("r must be positive and finite");
  if (!(p.alpha >= 0)) throw DomainError("alpha must be >= 0");
  if (!(p.eps >= 0 && p.eps <= 1)) throw DomainError("eps must lie in [0, 1]");
  if (!(p.eps_prime >= 0 && p.eps_prime <= 1)) throw DomainError("eps' must lie in [0, 1]");
  if (!(p.K >= 0)) throw DomainError("K must be >= 0");
}

double sigma(const BoundParams& p) {
  validate(p);
  const double b = p.edge_types();
  return p.R * (p.alpha + 4.0 * b * b * std::pow(p.eps_tilde(), 1.0 / p.spread()));
}

double alpha_star(int R) {
  if (R < 1) throw DomainError("R must be >= 1");
  return 1.0 / R;
}

double epsilon_star(int R, int q, double r, double alpha) {
  BoundParams p{R, q, r, alpha};
  validate(p);
  const double headroom = 1.0 / R - alpha;
  if (!(headroom > 0)) throw DomainError("epsilon_star requires alpha < 1/R");
  const double b = p.edge_types();
  return std::pow(headroom / (4.0 * b * b), p.spread());
}

GraphCount graph_count_bound(const GraphClassParams& g, int q, int R) {
  if (g.gamma_minus_size < 0 || g.parts < 0 || g.edges < 0)
    throw DomainError("graph class parameters must be nonnegative");
  if (q < 1 || R < 1) throw DomainError("q and R must be >= 1");
  const BigInt b = BigInt(R * R + 2 * R) << q;
  BigInt edges_factor;
  mpz_pow_ui(edges_factor.get_mpz_t(), b.get_mpz_t(), 2 * static_cast<unsigned long>(g.edges));
  GraphCount out;
  if (g.parts > g.gamma_minus_size) {
    out.binomial_form = 0;
  } else {
    BigInt binom;
    mpz_bin_uiui(binom.get_mpz_t(), g.gamma_minus_size, g.parts);
    out.binomial_form = binom * edges_factor;
  }
  out.loose_form = (BigInt(1) << g.gamma_minus_size) * edges_factor;
  return out;
}

BigInt edge_error_inequality(long long edges, long long parts, int q, const Rational& r) {
  if (edges < 0 || parts < 0) throw DomainError("edge and part counts must be nonnegative");
  if (q < 1 || sgn(r) <= 0) throw DomainError("q must be >= 1 and r > 0");
  // |E| / (1 + 2q/r) = |E| r / (r + 2q)
  const Rational value = Rational(BigInt(std::to_string(edges))) * r / (r + 2 * q) + Rational(BigInt(std::to_string(parts)));
  BigInt out;
  mpz_cdiv_q(out.get_mpz_t(), value.get_num_mpz_t(), value.get_den_mpz_t());
  return out;
}

namespace {

// (1 - B^2 e^{1/s}) (1 - B^{-2} e^{(s-1)/s}) with s = 1 + 2q/r
double series_denominator(const BoundParams& p, double e) {
  const double b2 = p.edge_types() * p.edge_types();
  const double s = p.spread();
  return (1.0 - b2 * std::pow(e, 1.0 / s)) * (1.0 - std::pow(e, (s - 1.0) / s) / b2);
}

void require_admissible(const BoundParams& p) {
  validate(p);
  if (!p.admissible())
    throw DomainError("B^2 * eps_tilde^{1/(1+2q/r)} >= 1: the graph series diverges");
}

}  // namespace

Constants constants_C(const BoundParams& p) {
  require_admissible(p);
  return {2.0 * p.K / series_denominator(p, p.eps_tilde()), 2.0 / series_denominator(p, p.eps)};
}

SeriesCheck series_check(const BoundParams& p, int truncation, long long gamma_minus_size) {
  require_admissible(p);
  if (truncation < 1) throw DomainError("truncation must be >= 1");
  if (gamma_minus_size < 0) throw DomainError("|gamma-| must be >= 0");
  const double b2 = p.edge_types() * p.edge_types();
  const double s = p.spread();
  const double e = p.eps_tilde();
  const double g = static_cast<double>(gamma_minus_size);
  // Term(c, k) = 2^g B^{2(g - c + k)} e^{(g + (s-1) c + k)/s}, evaluated in
  // log space so that large truncations neither overflow nor produce 0 * inf.
  const double log_b2 = std::log(b2);
  const double log_e = std::log(e);
  double partial = 0.0;
  for (int c = 0; c < truncation; ++c) {
    for (int k = 0; k < truncation; ++k) {
      const double exponent_e = (g + (s - 1.0) * c + k) / s;
      if (e == 0.0) {
        if (exponent_e == 0.0) partial += 1.0;
        continue;
      }
      partial += std::exp(g * std::log(2.0) + (g - c + k) * log_b2 + exponent_e * log_e);
    }
  }
  const double lead = 2.0 * b2 * std::pow(e, 1.0 / s);
  const double closed = std::pow(lead, g) / series_denominator(p, e);
  return {partial, closed, closed - partial};
}

double summed_C(const BoundParams& p, int truncation) {
  return 2.0 * p.K * series_check(p, truncation, 0).partial;
}

DecayConstants decay_constants(double C, double sigma, const RuleSpec& rule) {
  if (!(sigma > 0 && sigma < 1)) throw DomainError("decay constants require 0 < sigma < 1");
  DecayConstants out;
  out.v = rule.max_l1();
  out.C_prime = 2.0 * C / sigma;
  if (out.v > 0) out.eta = std::pow(sigma, 1.0 / (2.0 * out.v));
  return out;
}

}  // namespace toomlab::bounds
