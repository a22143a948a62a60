#include "toomlab/noise.hpp"

#include <algorithm>
#include <cmath>

#include "toomlab/error.hpp"

namespace toomlab {

namespace {
void require_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError(std::string(what) + " must lie in [0, 1]");
}
}  // namespace

NoiseModel::NoiseModel(Kind kind, double ep, double em, std::vector<double> table)
    : kind_(kind), eps_plus_(ep), eps_minus_(em), p_plus_(std::move(table)) {}

NoiseModel NoiseModel::symmetric(double eps) {
  require_probability(eps, "eps");
  return NoiseModel(Kind::Symmetric, eps, eps, {});
}

NoiseModel NoiseModel::biased(double eps_plus, double eps_minus) {
  require_probability(eps_plus, "eps_plus");
  require_probability(eps_minus, "eps_minus");
  return NoiseModel(Kind::Biased, eps_plus, eps_minus, {});
}

NoiseModel NoiseModel::table(std::vector<double> p_plus) {
  if (p_plus.empty()) throw InputShapeError("noise table is empty");
  for (double p : p_plus) require_probability(p, "table probability");
  return NoiseModel(Kind::Table, 0.0, 0.0, std::move(p_plus));
}

void NoiseModel::require_covers(const RuleSpec& rule) const {
  if (kind_ == Kind::Table && p_plus_.size() != rule.table_size())
    throw InputShapeError("noise table must cover all 2^R local configurations");
}

double NoiseModel::p_plus(const RuleSpec& rule, LocalConfig config) const {
  if (kind_ == Kind::Table) {
    require_covers(rule);
    return p_plus_[config];
  }
  return rule.output(config) ? 1.0 - eps_plus_ : eps_minus_;
}

double NoiseModel::p(const RuleSpec& rule, LocalConfig config, Spin target) const {
  if (kind_ != Kind::Table) {
    if (rule.output(config)) return target == Spin::Plus ? 1.0 - eps_plus_ : eps_plus_;
    return target == Spin::Plus ? eps_minus_ : 1.0 - eps_minus_;
  }
  const double pp = p_plus(rule, config);
  return target == Spin::Plus ? pp : 1.0 - pp;
}

bool NoiseModel::factors_through_rule(const RuleSpec& rule) const {
  if (kind_ != Kind::Table) return true;
  require_covers(rule);
  std::optional<double> on_plus, on_minus;
  for (LocalConfig c = 0; c < p_plus_.size(); ++c) {
    auto& slot = rule.output(c) ? on_plus : on_minus;
    if (!slot)
      slot = p_plus_[c];
    else if (*slot != p_plus_[c])
      return false;
  }
  return true;
}

double NoiseModel::p_plus_given_plus(const RuleSpec& rule) const {
  if (!factors_through_rule(rule)) throw DomainError("noise table depends on more than phi");
  return p_plus(rule, static_cast<LocalConfig>(rule.table_size() - 1));
}

double NoiseModel::p_plus_given_minus(const RuleSpec& rule) const {
  if (!factors_through_rule(rule)) throw DomainError("noise table depends on more than phi");
  return p_plus(rule, 0);
}

bool NoiseModel::is_deterministic(const RuleSpec& rule) const {
  for (LocalConfig c = 0; c < rule.table_size(); ++c) {
    const double pp = p_plus(rule, c);
    if (pp != (rule.output(c) ? 1.0 : 0.0)) return false;
  }
  return true;
}

std::uint64_t probability_threshold(double p) {
  require_probability(p, "probability");
  return static_cast<std::uint64_t>(std::llround(std::ldexp(p, 32)));
}

AssumptionConstants check_assumptions(const NoiseModel& noise, const RuleSpec& rule) {
  noise.require_covers(rule);
  AssumptionConstants out{0.0, 0.0};
  const int r = rule.size();
  for (LocalConfig c = 0; c < rule.table_size(); ++c) {
    const bool phi = rule.output(c);
    const Spin prescribed = spin_from_bit(phi);
    out.eps = std::max(out.eps, noise.p(rule, c, -prescribed));
    // Set each neighbor to the prescribed value a = phi_x(omega); sites outside
    // U(x) leave the kernel unchanged.
    for (int i = 0; i < r; ++i) {
      const LocalConfig sub = phi ? (c | LocalConfig{1} << i) : (c & ~(LocalConfig{1} << i));
      for (Spin target : {Spin::Plus, Spin::Minus}) {
        const double base = noise.p(rule, c, target);
        const double diff = std::abs(base - noise.p(rule, sub, target));
        if (diff == 0.0) continue;
        if (base == 0.0) {
          out.alpha = std::numeric_limits<double>::infinity();
          continue;
        }
        out.alpha = std::max(out.alpha, diff / base);
      }
    }
  }
  return out;
}

}  // namespace toomlab
