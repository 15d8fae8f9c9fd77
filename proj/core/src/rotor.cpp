#include "geoframe/rotor.hpp"

#include <cmath>

namespace geoframe {

namespace {

constexpr std::uint32_t kOddGrades = 0xAAAAAAAAu;

void validate_rotor(const Multivector& r, double tolerance) {
  if (r.grade_set() & kOddGrades) throw UnitViolation("rotor has odd-grade terms");
  const double err = std::max(std::abs(norm(r) - 1.0), unitarity_error(r));
  if (!(err <= tolerance)) {
    throw UnitViolation("rotor is not unit: deviation " + std::to_string(err));
  }
}

}  // namespace

double unitarity_error(const Multivector& r) {
  return max_abs_difference(geometric_product(r, reverse(r)), Multivector::scalar(r.dimension(), 1.0));
}

Rotor::Rotor(Multivector value, double tolerance) : value_(std::move(value)) {
  validate_rotor(value_, tolerance);
}

Rotor Rotor::identity(int dimension) { return Rotor(Multivector::scalar(dimension, 1.0)); }

Rotor Rotor::normalized(const Multivector& value) { return Rotor(normalize(value)); }

Rotor Rotor::compose_after(const Rotor& first) const {
  return Rotor(geometric_product(value_, first.value_));
}

Rotor Rotor::inverse() const { return Rotor(reverse(value_)); }

Rotor exp_simple_bivector(double theta, const Multivector& plane) {
  if (plane.grade_set() & ~(1u << 2)) throw NotSimple("rotation plane must be a pure bivector");
  if (std::abs(norm(plane) - 1.0) > kUnitTolerance) {
    throw UnitViolation("rotation plane must be a unit bivector");
  }
  if (outer_product(plane, plane).max_abs_coefficient() > kUnitTolerance) {
    throw NotSimple("rotation plane is not a simple bivector");
  }
  const Multivector r =
      Multivector::scalar(plane.dimension(), std::cos(0.5 * theta)) + std::sin(0.5 * theta) * plane;
  return Rotor(r);
}

Multivector sandwich(const Rotor& r, const Multivector& x) {
  const Multivector raw = geometric_product(geometric_product(r.value(), x), reverse(r.value()));
  const std::uint32_t keep = x.grade_set();
  const double threshold = kPruneRelative * raw.max_abs_coefficient();
  std::vector<Term> terms;
  terms.reserve(raw.terms().size());
  for (const Term& t : raw.terms()) {
    const bool same_grade = (keep >> blade_grade(t.mask)) & 1u;
    if (same_grade || std::abs(t.coeff) > threshold) terms.push_back(t);
  }
  return Multivector(raw.dimension(), std::move(terms));
}

Multivector sandwich(const Multivector& r, const Multivector& x) { return sandwich(Rotor(r), x); }

}  // namespace geoframe
