#pragma once

#include <utility>
#include <vector>

#include "toomlab/rational.hpp"
#include "toomlab/rule.hpp"

namespace toomlab {

/// Finite point set in Z^d; the convex hull of a plus set.
using PointSet = std::vector<Offset>;

/// The hulls whose common intersection decides the erosion criterion.
struct HullFamily {
  int dimension = 0;
  std::vector<PointSet> sets;
};

HullFamily hull_family(const RuleSpec& rule, const PlusSetFamily& family);

enum class Verdict { Eroder, NonEroder };

/// Exact certificate for the erosion criterion.
///
/// NonEroder: `witness` lies in every hull, with `weights[i]` the convex
/// weights over `family.sets[i]` reproducing it.
///
/// Eroder: for the selected subfamily Z_1..Z_q, linear functionals f_i and
/// bounds c_i with sum_i f_i = 0, f_i(z) >= c_i on Z_i and sum_i c_i = r > 0.
/// Functionals are normalized so that the largest absolute coefficient is 1,
/// and each c_i is tight (the minimum of f_i over Z_i).
struct ErosionCertificate {
  Verdict verdict = Verdict::NonEroder;
  int dimension = 0;

  std::vector<Rational> witness;
  std::vector<std::vector<Rational>> weights;

  std::vector<int> selected;
  std::vector<std::vector<Rational>> functionals;
  std::vector<Rational> bounds;
  int q = 0;
  Rational r;
};

ErosionCertificate check_eroder(const HullFamily& family);

/// Re-checks every certificate invariant in exact arithmetic without any LP
/// solve. Returns false for a well-formed but invalid certificate; throws
/// ValidationError when the certificate does not even match the family's shape.
bool verify_certificate(const HullFamily& family, const ErosionCertificate& cert);

struct CertificateConstants {
  int q;
  Rational r;
};

CertificateConstants certificate_constants(const ErosionCertificate& cert);

}  // namespace toomlab
