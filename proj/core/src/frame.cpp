#include "geoframe/frame.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace geoframe {

namespace {

const BladeMask kS1 = blade_of({1});
const BladeMask kS12 = blade_of({1, 2});
const BladeMask kS13 = blade_of({1, 3});
const BladeMask kS23 = blade_of({2, 3});

double dot(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

double euclid(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void require_dimension_at_least_3(int n) {
  if (n < 3) throw std::invalid_argument("frame alignment needs at least 3 phases");
}

void require_same_size(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("sample vectors differ in length (" + std::to_string(a.size()) +
                                " vs " + std::to_string(b.size()) + ")");
  }
}

// Drops roundoff debris (below kPruneRelative * max|c|) so rotors keep the
// blade structure exact arithmetic gives them.
Rotor tidy(const Rotor& r) {
  return Rotor(prune(r.value(), kPruneRelative * r.value().max_abs_coefficient()));
}

// Rotor (1 + target * reverse(source)) / |.|, taking `source` onto `target`.
// When the two are antipodal the sum vanishes; `source` is then first
// half-turned in `fallback` and the well-conditioned remainder is composed
// on top, so exact antipodes yield exactly the fallback half-turn.
Rotor align_blade(const Multivector& target, const Multivector& source, BladeMask fallback) {
  const int n = source.dimension();
  const Multivector one = Multivector::scalar(n, 1.0);
  const Multivector sum = one + geometric_product(target, reverse(source));
  if (norm(sum) > kAntipodalTolerance) return tidy(Rotor::normalized(sum));

  const Rotor half_turn(Multivector::blade(n, fallback));
  const Multivector turned = sandwich(half_turn, source);
  const Multivector rest = one + geometric_product(target, reverse(turned));
  return tidy(Rotor::normalized(rest).compose_after(half_turn));
}

FrameTransform make_frame(const Multivector& plane, double theta, std::optional<Multivector> axis,
                          Rotor rotor, AlignMethod method) {
  return FrameTransform{plane, theta, std::move(axis), std::move(rotor), method, 0.0, 0.0,
                        std::nullopt, std::nullopt};
}

}  // namespace

const char* to_string(AlignMethod method) noexcept {
  switch (method) {
    case AlignMethod::Direct3D: return "Direct3D";
    case AlignMethod::TwoStepND: return "TwoStepND";
  }
  return "?";
}

const char* to_string(DegeneracyKind kind) noexcept {
  switch (kind) {
    case DegeneracyKind::Collinear: return "Collinear";
    case DegeneracyKind::ZeroVector: return "ZeroVector";
    case DegeneracyKind::NearHalfPeriod: return "NearHalfPeriod";
  }
  return "?";
}

DegenerateSamples::DegenerateSamples(DegeneracyReport report)
    : std::runtime_error(std::string("degenerate samples: ") + to_string(report.kind) +
                         " (conditioning " + std::to_string(report.conditioning) + ")"),
      report_(report) {}

double sample_conditioning(std::span<const double> v1, std::span<const double> v2) {
  require_same_size(v1, v2);
  const double n1 = euclid(v1);
  const double n2 = euclid(v2);
  if (n1 == 0.0 || n2 == 0.0) return 0.0;
  // |v1 ^ v2|^2 = sum_{i<j} (v1_i v2_j - v1_j v2_i)^2
  double area2 = 0.0;
  for (std::size_t i = 0; i < v1.size(); ++i) {
    for (std::size_t j = i + 1; j < v1.size(); ++j) {
      const double c = v1[i] * v2[j] - v1[j] * v2[i];
      area2 += c * c;
    }
  }
  return std::min(1.0, std::sqrt(area2) / (n1 * n2));
}

std::optional<DegeneracyReport> assess_samples(std::span<const double> v1, std::span<const double> v2,
                                               double collinear_tolerance) {
  require_same_size(v1, v2);
  if (!(euclid(v1) > kZeroTolerance) || !(euclid(v2) > kZeroTolerance)) {
    return DegeneracyReport{DegeneracyKind::ZeroVector, 0.0};
  }
  const double cond = sample_conditioning(v1, v2);
  if (!(cond > collinear_tolerance)) return DegeneracyReport{DegeneracyKind::Collinear, cond};
  if (cond < kIllConditioned && dot(v1, v2) < 0.0) {
    return DegeneracyReport{DegeneracyKind::NearHalfPeriod, cond};
  }
  return std::nullopt;
}

Multivector identify_plane(std::span<const double> v1, std::span<const double> v2,
                           double collinear_tolerance) {
  if (auto report = assess_samples(v1, v2, collinear_tolerance);
      report && report->kind != DegeneracyKind::NearHalfPeriod) {
    throw DegenerateSamples(*report);
  }
  return outer_product(Multivector::vector(v1), Multivector::vector(v2));
}

double plane_angle(const Multivector& plane) {
  const double magnitude = norm(plane);
  if (!(magnitude > kZeroTolerance)) throw DegenerateMagnitude(magnitude);
  // atan2 form of arccos(<s12 B^dagger>_0 / |B|), accurate near 0 and pi.
  const double in_plane = plane.coefficient(kS12);
  double off2 = 0.0;
  for (const Term& t : plane.terms()) {
    if (t.mask != kS12) off2 += t.coeff * t.coeff;
  }
  return std::atan2(std::sqrt(off2), in_plane);
}

std::optional<Multivector> rotation_plane(const Multivector& plane) {
  if (plane.dimension() != 3) throw std::invalid_argument("rotation_plane is defined for 3-D bivectors");
  const double b13 = plane.coefficient(kS13);
  const double b23 = plane.coefficient(kS23);
  const double r = std::hypot(b13, b23);
  if (!(r > kZeroTolerance * norm(plane))) return std::nullopt;
  return Multivector(3, {{kS13, -b23 / r}, {kS23, b13 / r}});
}

FrameTransform rotor_align_3d(const Multivector& plane) {
  if (plane.dimension() != 3) throw std::invalid_argument("Direct3D alignment needs a 3-D bivector");
  const double theta = plane_angle(plane);
  auto axis = rotation_plane(plane);
  if (axis) {
    return make_frame(plane, theta, axis, exp_simple_bivector(theta, *axis), AlignMethod::Direct3D);
  }
  if (plane.coefficient(kS12) > 0.0) {
    return make_frame(plane, theta, std::nullopt, Rotor::identity(3), AlignMethod::Direct3D);
  }
  // Antipodal: half-turn about sigma_1.
  const Multivector half_turn_plane = Multivector::blade(3, kS23);
  return make_frame(plane, theta, half_turn_plane, Rotor(half_turn_plane), AlignMethod::Direct3D);
}

FrameTransform rotor_align_nd(std::span<const double> v1, const Multivector& plane) {
  const int n = plane.dimension();
  require_dimension_at_least_3(n);
  if (v1.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("v1 length does not match the bivector dimension");
  }
  const Multivector v = Multivector::vector(v1);
  const double v_norm = norm(v);
  const double b_norm = norm(plane);
  if (!(v_norm > kZeroTolerance)) throw DegenerateMagnitude(v_norm);
  if (!(b_norm > kZeroTolerance)) throw DegenerateMagnitude(b_norm);
  if (outer_product(v, plane).max_abs_coefficient() > kAlignTolerance * v_norm * b_norm) {
    throw InconsistentInput("v1 does not lie in the plane of B");
  }

  const Multivector v_hat = v / v_norm;
  const Multivector b_hat = plane / b_norm;
  const Rotor r1 = align_blade(Multivector::blade(n, kS1), v_hat, kS12);
  const Multivector b_cross = sandwich(r1, b_hat);
  const Rotor r2 = align_blade(Multivector::blade(n, kS12), b_cross, kS23);

  FrameTransform frame =
      make_frame(plane, plane_angle(plane), std::nullopt, tidy(r2.compose_after(r1)), AlignMethod::TwoStepND);
  frame.vector_rotor = r1;
  frame.plane_rotor = r2;
  return frame;
}

FrameTransform identify_frame(std::span<const double> v1, std::span<const double> v2, double t1,
                              double t2, MethodChoice method, double collinear_tolerance) {
  require_same_size(v1, v2);
  require_dimension_at_least_3(static_cast<int>(v1.size()));
  const Multivector plane = identify_plane(v1, v2, collinear_tolerance);
  const bool direct = method == MethodChoice::Direct3D ||
                      (method == MethodChoice::Auto && plane.dimension() == 3);
  FrameTransform frame = direct ? rotor_align_3d(plane) : rotor_align_nd(v1, plane);
  frame.t1 = t1;
  frame.t2 = t2;
  return frame;
}

double alignment_residual(const FrameTransform& frame) {
  const Multivector aligned = sandwich(frame.rotor, normalize(frame.plane));
  double worst = std::abs(aligned.coefficient(kS12) - 1.0);
  for (const Term& t : aligned.terms()) {
    if (t.mask != kS12) worst = std::max(worst, std::abs(t.coeff));
  }
  return worst;
}

TransformedSample transform_sample(const FrameTransform& frame, std::span<const double> v) {
  const int n = frame.rotor.dimension();
  if (v.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("sample length does not match the frame dimension");
  }
  const std::vector<double> c = sandwich(frame.rotor, Multivector::vector(v)).vector_components();
  return {c[0], c[1], std::vector<double>(c.begin() + 2, c.end())};
}

std::vector<double> inverse_transform(const FrameTransform& frame, const TransformedSample& sample) {
  const int n = frame.rotor.dimension();
  if (sample.residual.size() + 2 != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("transformed sample length does not match the frame dimension");
  }
  std::vector<double> c{sample.p, sample.s};
  c.insert(c.end(), sample.residual.begin(), sample.residual.end());
  return sandwich(frame.rotor.inverse(), Multivector::vector(c)).vector_components();
}

ClarkeComponents clarke_transform(std::span<const double> v) {
  if (v.size() != 3) throw std::invalid_argument("Clarke transform needs a three-phase sample");
  const double k = std::sqrt(2.0 / 3.0);
  return {k * (v[0] - 0.5 * v[1] - 0.5 * v[2]),
          k * (std::numbers::sqrt3 / 2.0) * (v[1] - v[2]),
          (v[0] + v[1] + v[2]) / std::numbers::sqrt3};
}

std::vector<double> inverse_clarke(const ClarkeComponents& c) {
  // Orthonormal matrix: the inverse is the transpose.
  const double k = std::sqrt(2.0 / 3.0);
  const double z = c.zero / std::numbers::sqrt3;
  const double h = k * std::numbers::sqrt3 / 2.0;
  return {k * c.alpha + z, -0.5 * k * c.alpha + h * c.beta + z, -0.5 * k * c.alpha - h * c.beta + z};
}

UnbalanceDiagnostic unbalance_diagnostic(const Multivector& plane) {
  const double theta = plane_angle(plane);
  return {theta, std::sin(theta)};
}

}  // namespace geoframe
