#include "geoframe/multivector.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace geoframe {

namespace {

void check_dimension(int dimension) {
  if (dimension < 2 || dimension > kMaxDimension) {
    throw std::invalid_argument("algebra dimension must be in [2, 16], got " +
                                std::to_string(dimension));
  }
}

void check_same(const Multivector& a, const Multivector& b) {
  if (a.dimension() != b.dimension()) throw SignatureMismatch(a.dimension(), b.dimension());
}

// Sorts by mask, merges duplicates and removes exact zeros.
std::vector<Term> canonicalize(std::vector<Term> terms) {
  std::sort(terms.begin(), terms.end(),
            [](const Term& x, const Term& y) { return x.mask < y.mask; });
  std::vector<Term> out;
  out.reserve(terms.size());
  for (const Term& t : terms) {
    if (!out.empty() && out.back().mask == t.mask) {
      out.back().coeff += t.coeff;
    } else {
      out.push_back(t);
    }
  }
  std::erase_if(out, [](const Term& t) { return t.coeff == 0.0; });
  return out;
}

template <typename Keep>
Multivector graded_product(const Multivector& a, const Multivector& b, Keep keep) {
  check_same(a, b);
  std::vector<Term> raw;
  raw.reserve(a.terms().size() * b.terms().size());
  for (const Term& x : a.terms()) {
    const int gx = blade_grade(x.mask);
    for (const Term& y : b.terms()) {
      const BladeMask m = x.mask ^ y.mask;
      if (!keep(gx, blade_grade(y.mask), blade_grade(m))) continue;
      raw.push_back({m, reorder_sign(x.mask, y.mask) * x.coeff * y.coeff});
    }
  }
  return Multivector(a.dimension(), std::move(raw));
}

Multivector combine(const Multivector& a, const Multivector& b, double sign) {
  check_same(a, b);
  std::vector<Term> merged;
  merged.reserve(a.terms().size() + b.terms().size());
  auto ia = a.terms().begin();
  auto ib = b.terms().begin();
  while (ia != a.terms().end() || ib != b.terms().end()) {
    if (ib == b.terms().end() || (ia != a.terms().end() && ia->mask < ib->mask)) {
      merged.push_back(*ia++);
    } else if (ia == a.terms().end() || ib->mask < ia->mask) {
      merged.push_back({ib->mask, sign * ib->coeff});
      ++ib;
    } else {
      merged.push_back({ia->mask, ia->coeff + sign * ib->coeff});
      ++ia;
      ++ib;
    }
  }
  std::erase_if(merged, [](const Term& t) { return t.coeff == 0.0; });
  return Multivector(a.dimension(), std::move(merged));
}

}  // namespace

SignatureMismatch::SignatureMismatch(int lhs, int rhs)
    : AlgebraError("signature mismatch: dimension " + std::to_string(lhs) + " vs " +
                   std::to_string(rhs)) {}

DegenerateMagnitude::DegenerateMagnitude(double magnitude)
    : AlgebraError("degenerate magnitude " + std::to_string(magnitude)), magnitude_(magnitude) {}

std::string blade_label(BladeMask mask, int dimension) {
  if (mask == 0) return "0";
  std::string label;
  for (int i = 0; i < kMaxDimension; ++i) {
    if (!(mask & (1u << i))) continue;
    if (dimension > 9 && !label.empty()) label += '.';
    label += std::to_string(i + 1);
  }
  return label;
}

Multivector::Multivector(int dimension) : dimension_(dimension) { check_dimension(dimension); }

Multivector::Multivector(int dimension, std::vector<Term> terms)
    : dimension_(dimension), terms_(canonicalize(std::move(terms))) {
  check_dimension(dimension);
  const unsigned full = (1u << dimension) - 1u;
  for (const Term& t : terms_) {
    if (t.mask & ~full) throw std::out_of_range("blade outside algebra of dimension " +
                                                std::to_string(dimension));
  }
}

Multivector Multivector::scalar(int dimension, double value) {
  return Multivector(dimension, {{0, value}});
}

Multivector Multivector::blade(int dimension, BladeMask mask, double coeff) {
  return Multivector(dimension, {{mask, coeff}});
}

Multivector Multivector::vector(std::span<const double> components) {
  std::vector<Term> terms;
  terms.reserve(components.size());
  for (std::size_t i = 0; i < components.size(); ++i) {
    terms.push_back({static_cast<BladeMask>(1u << i), components[i]});
  }
  return Multivector(static_cast<int>(components.size()), std::move(terms));
}

double Multivector::coefficient(BladeMask mask) const noexcept {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), mask,
                             [](const Term& t, BladeMask m) { return t.mask < m; });
  return (it != terms_.end() && it->mask == mask) ? it->coeff : 0.0;
}

std::vector<double> Multivector::vector_components() const {
  std::vector<double> out(static_cast<std::size_t>(dimension_), 0.0);
  for (const Term& t : terms_) {
    if (blade_grade(t.mask) == 1) out[static_cast<std::size_t>(std::countr_zero(t.mask))] = t.coeff;
  }
  return out;
}

std::uint32_t Multivector::grade_set() const noexcept {
  std::uint32_t grades = 0;
  for (const Term& t : terms_) grades |= 1u << blade_grade(t.mask);
  return grades;
}

double Multivector::max_abs_coefficient() const noexcept {
  double m = 0.0;
  for (const Term& t : terms_) m = std::max(m, std::abs(t.coeff));
  return m;
}

Multivector Multivector::operator-() const {
  Multivector out = *this;
  for (Term& t : out.terms_) t.coeff = -t.coeff;
  return out;
}

Multivector& Multivector::operator+=(const Multivector& rhs) { return *this = combine(*this, rhs, 1.0); }

Multivector& Multivector::operator-=(const Multivector& rhs) { return *this = combine(*this, rhs, -1.0); }

Multivector& Multivector::operator*=(double s) {
  for (Term& t : terms_) t.coeff *= s;
  std::erase_if(terms_, [](const Term& t) { return t.coeff == 0.0; });
  return *this;
}

Multivector geometric_product(const Multivector& a, const Multivector& b) {
  return graded_product(a, b, [](int, int, int) { return true; });
}

Multivector outer_product(const Multivector& a, const Multivector& b) {
  return graded_product(a, b, [](int ga, int gb, int g) { return g == ga + gb; });
}

Multivector left_contraction(const Multivector& a, const Multivector& b) {
  return graded_product(a, b, [](int ga, int gb, int g) { return gb >= ga && g == gb - ga; });
}

Multivector commutator_product(const Multivector& a, const Multivector& b) {
  return (geometric_product(a, b) - geometric_product(b, a)) * 0.5;
}

Multivector reverse(const Multivector& a) {
  std::vector<Term> terms(a.terms().begin(), a.terms().end());
  for (Term& t : terms) {
    const int k = blade_grade(t.mask);
    if ((k * (k - 1) / 2) % 2 != 0) t.coeff = -t.coeff;
  }
  return Multivector(a.dimension(), std::move(terms));
}

Multivector grade_project(const Multivector& a, int grade) {
  if (grade < 0 || grade > a.dimension()) {
    throw std::invalid_argument("grade " + std::to_string(grade) + " outside 0.." +
                                std::to_string(a.dimension()));
  }
  std::vector<Term> terms;
  for (const Term& t : a.terms()) {
    if (blade_grade(t.mask) == grade) terms.push_back(t);
  }
  return Multivector(a.dimension(), std::move(terms));
}

double norm(const Multivector& a) {
  double sum = 0.0;
  for (const Term& t : a.terms()) sum += t.coeff * t.coeff;
  return std::sqrt(sum);
}

Multivector normalize(const Multivector& a) {
  const double n = norm(a);
  if (!(n > kZeroTolerance)) throw DegenerateMagnitude(n);
  return a / n;
}

Multivector prune(const Multivector& a, double tolerance) {
  std::vector<Term> terms;
  for (const Term& t : a.terms()) {
    if (std::abs(t.coeff) > tolerance) terms.push_back(t);
  }
  return Multivector(a.dimension(), std::move(terms));
}

double max_abs_difference(const Multivector& a, const Multivector& b) {
  return (a - b).max_abs_coefficient();
}

std::string to_string(const Multivector& a, int precision) {
  if (a.is_zero()) return "0";
  std::ostringstream os;
  os.precision(precision);
  bool first = true;
  for (const Term& t : a.terms()) {
    const double mag = std::abs(t.coeff);
    if (first) {
      if (t.coeff < 0) os << '-';
    } else {
      os << (t.coeff < 0 ? " - " : " + ");
    }
    os << mag;
    if (t.mask != 0) os << "*s" << blade_label(t.mask, a.dimension());
    first = false;
  }
  return os.str();
}

}  // namespace geoframe
