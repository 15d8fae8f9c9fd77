#pragma once

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace geoframe {

// Numerical tolerances shared across the library.
inline constexpr double kZeroTolerance = 1e-12;   // degenerate magnitude
inline constexpr double kUnitTolerance = 1e-9;    // rotor unitarity
inline constexpr double kPruneRelative = 1e-12;   // post-sandwich cleanup, relative to max |c|

inline constexpr int kMaxDimension = 16;

/// Bitmask of basis factors: bit i set means sigma_{i+1} is a factor.
using BladeMask = std::uint16_t;

class AlgebraError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SignatureMismatch : public AlgebraError {
 public:
  SignatureMismatch(int lhs, int rhs);
};

class DegenerateMagnitude : public AlgebraError {
 public:
  explicit DegenerateMagnitude(double magnitude);
  double magnitude() const noexcept { return magnitude_; }

 private:
  double magnitude_;
};

class NotSimple : public AlgebraError {
 public:
  using AlgebraError::AlgebraError;
};

class UnitViolation : public AlgebraError {
 public:
  using AlgebraError::AlgebraError;
};

constexpr int blade_grade(BladeMask mask) noexcept { return std::popcount(mask); }

/// Sign of the reordering needed to bring the factors of `a` followed by the
/// factors of `b` into ascending order (Euclidean metric, so repeated factors
/// square to +1).
constexpr double reorder_sign(BladeMask a, BladeMask b) noexcept {
  unsigned shifted = static_cast<unsigned>(a) >> 1;
  int swaps = 0;
  while (shifted != 0) {
    swaps += std::popcount(shifted & b);
    shifted >>= 1;
  }
  return (swaps & 1) ? -1.0 : 1.0;
}

/// Builds a blade mask from 1-based factor indices, e.g. blade_of({1, 3}) is sigma_13.
constexpr BladeMask blade_of(std::initializer_list<int> factors) {
  unsigned mask = 0;
  for (int f : factors) {
    if (f < 1 || f > kMaxDimension) throw std::out_of_range("blade factor index out of range");
    mask |= 1u << (f - 1);
  }
  return static_cast<BladeMask>(mask);
}

/// "0" for the scalar blade, "12" for sigma_12; indices above 9 are joined by '.'.
std::string blade_label(BladeMask mask, int dimension);

struct Term {
  BladeMask mask;
  double coeff;

  friend bool operator==(const Term&, const Term&) = default;
};

/// Sparse multivector over the n-dimensional Euclidean geometric algebra.
///
/// Terms are kept sorted by blade mask and never store an exact zero
/// coefficient. Values are immutable once built; every operation returns a
/// new multivector.
class Multivector {
 public:
  explicit Multivector(int dimension);
  Multivector(int dimension, std::vector<Term> terms);

  static Multivector scalar(int dimension, double value);
  static Multivector blade(int dimension, BladeMask mask, double coeff = 1.0);
  /// Grade-1 multivector with components[i] on sigma_{i+1}.
  static Multivector vector(std::span<const double> components);
  static Multivector vector(std::initializer_list<double> components) {
    return vector(std::span<const double>(components.begin(), components.size()));
  }

  int dimension() const noexcept { return dimension_; }
  std::span<const Term> terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }

  double coefficient(BladeMask mask) const noexcept;
  double scalar_part() const noexcept { return coefficient(0); }
  /// Dense grade-1 coefficients (length = dimension).
  std::vector<double> vector_components() const;
  /// Set of grades present, bit k set for grade k.
  std::uint32_t grade_set() const noexcept;
  double max_abs_coefficient() const noexcept;

  Multivector operator-() const;
  Multivector& operator+=(const Multivector& rhs);
  Multivector& operator-=(const Multivector& rhs);
  Multivector& operator*=(double s);

  friend Multivector operator+(Multivector lhs, const Multivector& rhs) { return lhs += rhs; }
  friend Multivector operator-(Multivector lhs, const Multivector& rhs) { return lhs -= rhs; }
  friend Multivector operator*(Multivector lhs, double s) { return lhs *= s; }
  friend Multivector operator*(double s, Multivector rhs) { return rhs *= s; }
  friend Multivector operator/(Multivector lhs, double s) { return lhs *= 1.0 / s; }

  friend bool operator==(const Multivector&, const Multivector&) = default;

 private:
  int dimension_;
  std::vector<Term> terms_;
};

Multivector geometric_product(const Multivector& a, const Multivector& b);
Multivector outer_product(const Multivector& a, const Multivector& b);
Multivector left_contraction(const Multivector& a, const Multivector& b);
/// (AB - BA) / 2
Multivector commutator_product(const Multivector& a, const Multivector& b);
Multivector reverse(const Multivector& a);
Multivector grade_project(const Multivector& a, int grade);

/// Euclidean coefficient norm sqrt(sum c^2).
double norm(const Multivector& a);
/// a / norm(a); throws DegenerateMagnitude when norm(a) <= kZeroTolerance.
Multivector normalize(const Multivector& a);

/// Drops terms with |c| <= tolerance.
Multivector prune(const Multivector& a, double tolerance);

/// Largest absolute coefficient of (a - b).
double max_abs_difference(const Multivector& a, const Multivector& b);

inline Multivector operator*(const Multivector& a, const Multivector& b) {
  return geometric_product(a, b);
}

std::string to_string(const Multivector& a, int precision = 6);

}  // namespace geoframe
