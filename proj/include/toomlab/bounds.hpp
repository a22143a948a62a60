#pragma once

#include <optional>

#include "toomlab/rational.hpp"
#include "toomlab/rule.hpp"

namespace toomlab::bounds {

/// Parameters of the low-noise bound formulas.
///
/// `R` is the neighborhood size, (q, r) come from an erosion certificate,
/// `alpha` and `eps` are the verified noise constants, `eps_prime` and `K`
/// describe the initial measure's basin.
struct BoundParams {
  int R = 1;
  int q = 1;
  double r = 1.0;
  double alpha = 0.0;
  double eps = 0.0;
  double eps_prime = 0.0;
  double K = 1.0;

  double eps_tilde() const noexcept;
  /// 1 + 2q/r, the exponent denominator shared by every bound.
  double spread() const noexcept;
  /// B = 2^q (R^2 + 2R), the number of edge types at a vertex.
  double edge_types() const noexcept;
  /// B^2 * eps_tilde^{1/(1+2q/r)}; the series converge iff this is < 1.
  double growth_ratio() const noexcept;
  bool admissible() const noexcept;
};

/// Validates ranges (R, q >= 1, r > 0, alpha >= 0, eps and eps' in [0, 1],
/// K >= 0); throws DomainError otherwise.
void validate(const BoundParams& p);

double sigma(const BoundParams& p);
double alpha_star(int R);
/// The unique eps_tilde at which sigma reaches 1, for alpha in [0, 1/R).
double epsilon_star(int R, int q, double r, double alpha);

struct GraphClassParams {
  long long gamma_minus_size = 0;
  long long parts = 0;  // c
  long long edges = 0;  // m
};

struct GraphCount {
  BigInt binomial_form;  // binom(|gamma-|, c) * B^{2m}
  BigInt loose_form;     // 2^{|gamma-|} * B^{2m}
};

GraphCount graph_count_bound(const GraphClassParams& g, int q, int R);

/// Least integer error count compatible with |E_G| <= (1+2q/r)(|V_G| - c):
/// ceil(|E_G| / (1 + 2q/r) + c), evaluated exactly.
BigInt edge_error_inequality(long long edges, long long parts, int q, const Rational& r);

struct Constants {
  double C;
  double C_inv;
};

Constants constants_C(const BoundParams& p);

struct SeriesCheck {
  double partial;
  double closed;
  double gap;
};

/// Truncated double sum over c, k in [0, N) of the path-graph majorization for
/// a fixed |gamma-|, against its closed form.
SeriesCheck series_check(const BoundParams& p, int truncation, long long gamma_minus_size = 1);

/// Same sum with the prefactor 2K and |gamma-| = 0; converges to constants_C(p).C.
double summed_C(const BoundParams& p, int truncation);

struct DecayConstants {
  double C_prime;
  std::optional<double> eta;  // undefined when v = 0
  int v;
};

DecayConstants decay_constants(double C, double sigma, const RuleSpec& rule);

}  // namespace toomlab::bounds
