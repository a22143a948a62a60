#include "toomlab/simplex.hpp"

#include <cassert>

#include "toomlab/error.hpp"

namespace toomlab::lp {

namespace {

// Tableau layout: columns [0, n) original variables, [n, n+m) artificials,
// last column the right-hand side. Row m is the phase-one reduced-cost row.
class Tableau {
 public:
  explicit Tableau(const EqualitySystem& sys) : m_(sys.rows()), n_(sys.cols()) {
    sign_.assign(m_, 1);
    t_.assign(m_ + 1, std::vector<Rational>(n_ + m_ + 1));
    basis_.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      if (sys.a[i].size() != n_) throw InputShapeError("ragged constraint matrix");
      if (sgn(sys.b[i]) < 0) sign_[i] = -1;
      for (std::size_t j = 0; j < n_; ++j) t_[i][j] = sign_[i] * sys.a[i][j];
      t_[i][n_ + i] = 1;
      t_[i][rhs()] = sign_[i] * sys.b[i];
      basis_[i] = n_ + i;
    }
    // reduced costs of the phase-one objective sum(artificials)
    for (std::size_t j = 0; j < n_; ++j)
      for (std::size_t i = 0; i < m_; ++i) t_[m_][j] -= t_[i][j];
    for (std::size_t i = 0; i < m_; ++i) t_[m_][rhs()] -= t_[i][rhs()];
  }

  void run() {
    while (true) {
      // Bland: lowest-index improving column, lowest-index leaving basic var.
      std::size_t enter = cols();
      for (std::size_t j = 0; j < n_ + m_; ++j)
        if (sgn(t_[m_][j]) < 0) {
          enter = j;
          break;
        }
      if (enter == cols()) return;
      std::size_t leave = m_;
      Rational best;
      for (std::size_t i = 0; i < m_; ++i) {
        if (sgn(t_[i][enter]) <= 0) continue;
        Rational ratio = t_[i][rhs()] / t_[i][enter];
        if (leave == m_ || ratio < best || (ratio == best && basis_[i] < basis_[leave])) {
          leave = i;
          best = ratio;
        }
      }
      // Phase one is bounded below by zero, so some row always qualifies.
      assert(leave != m_);
      pivot(leave, enter);
    }
  }

  Rational objective() const { return -t_[m_][rhs()]; }

  std::vector<Rational> primal() const {
    std::vector<Rational> v(n_);
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] < n_) v[basis_[i]] = t_[i][rhs()];
    return v;
  }

  // Phase-one duals: the reduced cost of artificial i equals 1 - y_i.
  std::vector<Rational> duals() const {
    std::vector<Rational> y(m_);
    for (std::size_t i = 0; i < m_; ++i) y[i] = sign_[i] * (1 - t_[m_][n_ + i]);
    return y;
  }

 private:
  std::size_t cols() const { return n_ + m_ + 1; }
  std::size_t rhs() const { return n_ + m_; }

  void pivot(std::size_t row, std::size_t col) {
    const Rational p = t_[row][col];
    for (auto& x : t_[row]) x /= p;
    for (std::size_t i = 0; i <= m_; ++i) {
      if (i == row || sgn(t_[i][col]) == 0) continue;
      const Rational f = t_[i][col];
      for (std::size_t j = 0; j < cols(); ++j)
        if (sgn(t_[row][j]) != 0) t_[i][j] -= f * t_[row][j];
    }
    basis_[row] = col;
  }

  std::size_t m_, n_;
  std::vector<int> sign_;
  std::vector<std::vector<Rational>> t_;
  std::vector<std::size_t> basis_;
};

}  // namespace

FeasibilityResult solve_feasibility(const EqualitySystem& system) {
  if (system.b.size() != system.rows()) throw InputShapeError("rhs length differs from row count");
  if (system.rows() == 0) return Feasible{std::vector<Rational>(system.cols())};
  Tableau tab(system);
  tab.run();
  if (sgn(tab.objective()) == 0) return Feasible{tab.primal()};
  return Infeasible{tab.duals()};
}

}  // namespace toomlab::lp
