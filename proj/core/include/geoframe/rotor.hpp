#pragma once

#include "geoframe/multivector.hpp"

namespace geoframe {

/// Even-grade unit multivector R with R * reverse(R) = 1.
class Rotor {
 public:
  /// Validates unitarity and evenness; throws UnitViolation otherwise.
  explicit Rotor(Multivector value, double tolerance = kUnitTolerance);

  static Rotor identity(int dimension);

  /// Normalizes `value` before validating. Used for (1 + A B^dagger)-style
  /// constructions whose denominator is the coefficient norm.
  static Rotor normalized(const Multivector& value);

  const Multivector& value() const noexcept { return value_; }
  int dimension() const noexcept { return value_.dimension(); }
  double coefficient(BladeMask mask) const noexcept { return value_.coefficient(mask); }

  /// Rotor composition: (*this) applied after `first`.
  Rotor compose_after(const Rotor& first) const;
  Rotor inverse() const;

  friend bool operator==(const Rotor&, const Rotor&) = default;

 private:
  Multivector value_;
};

/// Max coefficient deviation of R * reverse(R) from 1.
double unitarity_error(const Multivector& r);

/// cos(theta/2) + sin(theta/2) * plane for a unit simple bivector plane.
Rotor exp_simple_bivector(double theta, const Multivector& plane);

/// R X reverse(R). Cross-grade residue (grades absent from X) with magnitude
/// below kPruneRelative * max|c| is dropped.
Multivector sandwich(const Rotor& r, const Multivector& x);
/// Checks unitarity first; throws UnitViolation on a non-unit rotor.
Multivector sandwich(const Multivector& r, const Multivector& x);

}  // namespace geoframe
