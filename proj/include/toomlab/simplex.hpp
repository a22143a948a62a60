#pragma once

#include <variant>
#include <vector>

#include "toomlab/rational.hpp"

namespace toomlab::lp {

/// Dense equality system A v = b with v >= 0, all in exact arithmetic.
struct EqualitySystem {
  std::vector<std::vector<Rational>> a;  // rows x cols
  std::vector<Rational> b;

  std::size_t rows() const noexcept { return a.size(); }
  std::size_t cols() const noexcept { return a.empty() ? 0 : a.front().size(); }
};

struct Feasible {
  std::vector<Rational> point;  // v >= 0 with A v = b
};

/// Farkas alternative: y^T A <= 0 componentwise and y^T b > 0.
struct Infeasible {
  std::vector<Rational> farkas;
};

using FeasibilityResult = std::variant<Feasible, Infeasible>;

/// Phase-one primal simplex with Bland's rule; terminates on every input.
/// Rows with negative right-hand side are negated internally, and the Farkas
/// vector is reported in terms of the original rows.
FeasibilityResult solve_feasibility(const EqualitySystem& system);

}  // namespace toomlab::lp
