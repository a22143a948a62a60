#include "toomlab/eroder.hpp"

#include <algorithm>
#include <numeric>

#include "toomlab/error.hpp"
#include "toomlab/simplex.hpp"

namespace toomlab {

HullFamily hull_family(const RuleSpec& rule, const PlusSetFamily& family) {
  HullFamily out{rule.dimension(), {}};
  for (const auto& z : family.sets) {
    PointSet pts;
    for (int i : z) pts.push_back(rule.offset(i));
    out.sets.push_back(std::move(pts));
  }
  return out;
}

namespace {

void validate_family(const HullFamily& family) {
  if (family.dimension < 1) throw InputShapeError("dimension must be positive");
  if (family.sets.empty()) throw InputShapeError("empty plus-set family");
  for (const auto& s : family.sets) {
    if (s.empty()) throw InputShapeError("empty plus set in family");
    for (const auto& z : s)
      if (static_cast<int>(z.size()) != family.dimension)
        throw InputShapeError("plus-set offset has wrong dimension");
  }
}

struct Subproblem {
  lp::EqualitySystem system;
  std::vector<std::size_t> column_start;  // first column of each set
};

// Unknowns: convex weights per set. Rows: one normalization row per set,
// then d rows per set i >= 1 equating its weighted point with set 0's.
Subproblem build(const HullFamily& family, const std::vector<int>& members) {
  const int d = family.dimension;
  const std::size_t k = members.size();
  Subproblem sp;
  std::size_t cols = 0;
  for (int m : members) {
    sp.column_start.push_back(cols);
    cols += family.sets[m].size();
  }
  const std::size_t rows = k + (k - 1) * d;
  sp.system.a.assign(rows, std::vector<Rational>(cols));
  sp.system.b.assign(rows, Rational(0));
  for (std::size_t i = 0; i < k; ++i) {
    const auto& pts = family.sets[members[i]];
    for (std::size_t j = 0; j < pts.size(); ++j) sp.system.a[i][sp.column_start[i] + j] = 1;
    sp.system.b[i] = 1;
  }
  const auto& base = family.sets[members[0]];
  for (std::size_t i = 1; i < k; ++i) {
    const auto& pts = family.sets[members[i]];
    for (int c = 0; c < d; ++c) {
      auto& row = sp.system.a[k + (i - 1) * d + c];
      for (std::size_t j = 0; j < pts.size(); ++j) row[sp.column_start[i] + j] = pts[j][c];
      for (std::size_t j = 0; j < base.size(); ++j) row[sp.column_start[0] + j] -= base[j][c];
    }
  }
  return sp;
}

Rational evaluate_functional(const std::vector<Rational>& f, const Offset& z) {
  Rational s = 0;
  for (std::size_t c = 0; c < f.size(); ++c) s += f[c] * z[c];
  return s;
}

ErosionCertificate eroder_from_farkas(const HullFamily& family, const std::vector<int>& members,
                                      const std::vector<Rational>& y) {
  const int d = family.dimension;
  const std::size_t k = members.size();
  ErosionCertificate cert;
  cert.verdict = Verdict::Eroder;
  cert.dimension = d;
  cert.selected = members;
  cert.functionals.assign(k, std::vector<Rational>(d));
  // With g_i the multipliers of the coupling rows: f_i = -g_i for i >= 1 and
  // f_0 = sum_{i>=1} g_i; c_i are the normalization-row multipliers.
  for (std::size_t i = 1; i < k; ++i)
    for (int c = 0; c < d; ++c) {
      const Rational& g = y[k + (i - 1) * d + c];
      cert.functionals[i][c] = -g;
      cert.functionals[0][c] += g;
    }
  // Tighten each bound to the minimum over its set, then rescale.
  cert.bounds.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    const auto& pts = family.sets[members[i]];
    Rational lo = evaluate_functional(cert.functionals[i], pts.front());
    for (const auto& z : pts) lo = std::min(lo, evaluate_functional(cert.functionals[i], z));
    cert.bounds[i] = lo;
  }
  Rational scale = 0;
  for (const auto& f : cert.functionals)
    for (const auto& v : f) scale = std::max(scale, Rational(abs(v)));
  if (sgn(scale) > 0) {
    for (auto& f : cert.functionals)
      for (auto& v : f) v /= scale;
    for (auto& c : cert.bounds) c /= scale;
  }
  cert.q = static_cast<int>(k);
  cert.r = std::accumulate(cert.bounds.begin(), cert.bounds.end(), Rational(0));
  return cert;
}

// Visits k-subsets of {0..n-1} in lexicographic order until `visit` returns true.
template <class Visit>
bool for_each_subset(int n, int k, Visit&& visit) {
  std::vector<int> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    if (visit(idx)) return true;
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return false;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace

ErosionCertificate check_eroder(const HullFamily& family) {
  validate_family(family);
  const int m = static_cast<int>(family.sets.size());
  std::vector<int> all(m);
  std::iota(all.begin(), all.end(), 0);

  const Subproblem full = build(family, all);
  const auto result = lp::solve_feasibility(full.system);
  if (const auto* feas = std::get_if<lp::Feasible>(&result)) {
    ErosionCertificate cert;
    cert.verdict = Verdict::NonEroder;
    cert.dimension = family.dimension;
    cert.witness.assign(family.dimension, Rational(0));
    for (int i = 0; i < m; ++i) {
      const auto& pts = family.sets[i];
      std::vector<Rational> w(feas->point.begin() + full.column_start[i],
                              feas->point.begin() + full.column_start[i] + pts.size());
      if (i == 0)
        for (std::size_t j = 0; j < pts.size(); ++j)
          for (int c = 0; c < family.dimension; ++c) cert.witness[c] += w[j] * pts[j][c];
      cert.weights.push_back(std::move(w));
    }
    return cert;
  }

  // Helly: in R^d some subfamily of size <= d+1 is already infeasible.
  const int max_k = std::min(m, family.dimension + 1);
  ErosionCertificate cert;
  for (int k = 2; k <= max_k; ++k) {
    const bool found = for_each_subset(m, k, [&](const std::vector<int>& members) {
      const Subproblem sp = build(family, members);
      const auto res = lp::solve_feasibility(sp.system);
      if (const auto* inf = std::get_if<lp::Infeasible>(&res)) {
        cert = eroder_from_farkas(family, members, inf->farkas);
        return true;
      }
      return false;
    });
    if (found) return cert;
  }
  // Unreachable by Helly's theorem; fall back to the full family's certificate.
  return eroder_from_farkas(family, all, std::get<lp::Infeasible>(result).farkas);
}

bool verify_certificate(const HullFamily& family, const ErosionCertificate& cert) {
  validate_family(family);
  const int d = family.dimension;
  if (cert.dimension != d) throw ValidationError("certificate dimension differs from family");
  const std::size_t m = family.sets.size();

  if (cert.verdict == Verdict::NonEroder) {
    if (cert.witness.size() != static_cast<std::size_t>(d))
      throw ValidationError("witness has wrong dimension");
    if (cert.weights.size() != m) throw ValidationError("one weight vector per plus set required");
    for (std::size_t i = 0; i < m; ++i) {
      const auto& pts = family.sets[i];
      const auto& w = cert.weights[i];
      if (w.size() != pts.size()) throw ValidationError("weight vector length mismatch");
      Rational total = 0;
      std::vector<Rational> point(d);
      for (std::size_t j = 0; j < pts.size(); ++j) {
        if (sgn(w[j]) < 0) return false;
        total += w[j];
        for (int c = 0; c < d; ++c) point[c] += w[j] * pts[j][c];
      }
      if (total != 1 || point != cert.witness) return false;
    }
    return true;
  }

  const std::size_t k = cert.selected.size();
  if (k == 0) throw ValidationError("eroder certificate selects no plus sets");
  if (cert.functionals.size() != k || cert.bounds.size() != k)
    throw ValidationError("one functional and bound per selected set required");
  for (int s : cert.selected)
    if (s < 0 || static_cast<std::size_t>(s) >= m)
      throw ValidationError("selected plus-set index out of range");
  for (const auto& f : cert.functionals)
    if (f.size() != static_cast<std::size_t>(d)) throw ValidationError("functional has wrong dimension");

  std::vector<Rational> sum_f(d);
  Rational sum_c = 0;
  for (std::size_t i = 0; i < k; ++i) {
    for (int c = 0; c < d; ++c) sum_f[c] += cert.functionals[i][c];
    sum_c += cert.bounds[i];
    for (const auto& z : family.sets[cert.selected[i]])
      if (evaluate_functional(cert.functionals[i], z) < cert.bounds[i]) return false;
  }
  for (const auto& v : sum_f)
    if (sgn(v) != 0) return false;
  if (sgn(sum_c) <= 0) return false;
  return cert.q == static_cast<int>(k) && cert.r == sum_c;
}

CertificateConstants certificate_constants(const ErosionCertificate& cert) {
  if (cert.verdict != Verdict::Eroder)
    throw DomainError("constants (q, r) exist only for eroder certificates");
  Rational scale = 0;
  for (const auto& f : cert.functionals)
    for (const auto& v : f) scale = std::max(scale, Rational(abs(v)));
  if (sgn(scale) == 0) throw DomainError("eroder certificate has only zero functionals");
  Rational r = 0;
  for (const auto& c : cert.bounds) r += c;
  return {static_cast<int>(cert.functionals.size()), r / scale};
}

}  // namespace toomlab
