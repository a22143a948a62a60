#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "toomlab/rule.hpp"

namespace toomlab {

/// Local error kernel p(xi_x | omega_{U(x)}).
///
/// SYMMETRIC(eps): the prescription phi_x is violated with probability eps.
/// BIASED(eps_plus, eps_minus): a prescribed +1 becomes -1 with probability
/// eps_plus; a prescribed -1 becomes +1 with probability eps_minus.
/// TABLE: p(+1 | local configuration) given explicitly for all 2^R configurations.
class NoiseModel {
 public:
  enum class Kind { Symmetric, Biased, Table };

  static NoiseModel symmetric(double eps);
  static NoiseModel biased(double eps_plus, double eps_minus);
  static NoiseModel table(std::vector<double> p_plus);

  Kind kind() const noexcept { return kind_; }
  double eps_plus() const noexcept { return eps_plus_; }
  double eps_minus() const noexcept { return eps_minus_; }
  const std::vector<double>& p_plus_table() const noexcept { return p_plus_; }

  /// p(+1 | local configuration) under `rule`.
  double p_plus(const RuleSpec& rule, LocalConfig config) const;
  double p(const RuleSpec& rule, LocalConfig config, Spin target) const;

  /// Depends on the local configuration only through phi (true for the
  /// symmetric and biased kinds, and for tables that happen to be so).
  bool factors_through_rule(const RuleSpec& rule) const;

  /// p(+1 | phi = +1) and p(+1 | phi = -1); requires factors_through_rule.
  double p_plus_given_plus(const RuleSpec& rule) const;
  double p_plus_given_minus(const RuleSpec& rule) const;

  /// Checks coverage of the rule's configurations (TABLE kind); throws
  /// InputShapeError otherwise.
  void require_covers(const RuleSpec& rule) const;

  bool is_deterministic(const RuleSpec& rule) const;

 private:
  NoiseModel(Kind kind, double ep, double em, std::vector<double> table);

  Kind kind_;
  double eps_plus_ = 0.0;
  double eps_minus_ = 0.0;
  std::vector<double> p_plus_;
};

/// Simulation threshold for probability p: a site draws +1 iff its 32-bit
/// uniform is below round(p * 2^32). 2^32 means "always".
std::uint64_t probability_threshold(double p);

struct AssumptionConstants {
  double eps;    // least eps with p(xi != phi | omega) <= eps
  double alpha;  // least alpha for the pure-phase decoupling bound; +inf if none
};

AssumptionConstants check_assumptions(const NoiseModel& noise, const RuleSpec& rule);

}  // namespace toomlab
