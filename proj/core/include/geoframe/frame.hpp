#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "geoframe/multivector.hpp"
#include "geoframe/rotor.hpp"

namespace geoframe {

/// Below this sin(angle between samples) a pair is reported as collinear.
inline constexpr double kCollinearTolerance = 1e-6;
/// Tolerance on the alignment residual of a built frame.
inline constexpr double kAlignTolerance = 1e-9;
/// Denominator |1 + A B^dagger| below which the half-turn fallback engages.
inline constexpr double kAntipodalTolerance = 1e-6;
/// Conditioning below which nearly antiparallel samples are flagged.
inline constexpr double kIllConditioned = 1e-3;

enum class AlignMethod { Direct3D, TwoStepND };
enum class MethodChoice { Auto, Direct3D, TwoStepND };
enum class DegeneracyKind { Collinear, ZeroVector, NearHalfPeriod };

const char* to_string(AlignMethod method) noexcept;
const char* to_string(DegeneracyKind kind) noexcept;

struct DegeneracyReport {
  DegeneracyKind kind;
  double conditioning;  // sin of the angle between v1 and v2, in [0, 1]
};

/// Two samples that do not determine a plane (zero-sequence-only data or a
/// half-period separation).
class DegenerateSamples : public std::runtime_error {
 public:
  explicit DegenerateSamples(DegeneracyReport report);
  const DegeneracyReport& report() const noexcept { return report_; }

 private:
  DegeneracyReport report_;
};

class InconsistentInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Identified plane and the rotor that carries it onto sigma_12.
struct FrameTransform {
  Multivector plane;                         // B = v1 ^ v2, not normalized
  double theta = 0.0;                        // angle between B and sigma_12, [0, pi]
  std::optional<Multivector> rotation_plane; // L-hat, Direct3D only
  Rotor rotor;
  AlignMethod method = AlignMethod::Direct3D;
  double t1 = 0.0;
  double t2 = 0.0;
  // TwoStepND intermediate rotors: vector_rotor sends v1-hat to sigma_1,
  // plane_rotor then sends the rotated plane to sigma_12.
  std::optional<Rotor> vector_rotor;
  std::optional<Rotor> plane_rotor;
};

/// sin of the angle between two vectors (0 for zero vectors).
double sample_conditioning(std::span<const double> v1, std::span<const double> v2);

/// Non-throwing classification of a sample pair; nullopt when well conditioned.
std::optional<DegeneracyReport> assess_samples(std::span<const double> v1, std::span<const double> v2,
                                               double collinear_tolerance = kCollinearTolerance);

/// v1 ^ v2, rejecting zero or collinear samples with DegenerateSamples.
Multivector identify_plane(std::span<const double> v1, std::span<const double> v2,
                           double collinear_tolerance = kCollinearTolerance);

/// Angle in [0, pi] between bivector B and sigma_12.
double plane_angle(const Multivector& plane);

/// (-B23 s13 + B13 s23) / sqrt(B13^2 + B23^2) for a 3-D bivector; nullopt
/// when B already lies in sigma_12 (up to orientation).
std::optional<Multivector> rotation_plane(const Multivector& plane);

FrameTransform rotor_align_3d(const Multivector& plane);
FrameTransform rotor_align_nd(std::span<const double> v1, const Multivector& plane);

/// identify_plane followed by the alignment route for the dimension
/// (Direct3D when n == 3, TwoStepND otherwise) unless overridden.
FrameTransform identify_frame(std::span<const double> v1, std::span<const double> v2, double t1 = 0.0,
                              double t2 = 0.0, MethodChoice method = MethodChoice::Auto,
                              double collinear_tolerance = kCollinearTolerance);

/// Largest non-sigma_12 coefficient of sandwich(rotor, normalize(B)), plus
/// the deviation of its sigma_12 coefficient from 1.
double alignment_residual(const FrameTransform& frame);

struct TransformedSample {
  double p = 0.0;
  double s = 0.0;
  std::vector<double> residual;  // n - 2 remaining components
};

TransformedSample transform_sample(const FrameTransform& frame, std::span<const double> v);
/// Maps (p, s, residual...) back to phase coordinates.
std::vector<double> inverse_transform(const FrameTransform& frame, const TransformedSample& sample);

struct ClarkeComponents {
  double alpha;
  double beta;
  double zero;
};

/// Power-invariant Clarke transform of a three-phase sample.
ClarkeComponents clarke_transform(std::span<const double> v);
std::vector<double> inverse_clarke(const ClarkeComponents& c);

struct UnbalanceDiagnostic {
  double theta;
  double degree;  // sin(theta); 0 when the locus already lies in sigma_12
};

UnbalanceDiagnostic unbalance_diagnostic(const Multivector& plane);

}  // namespace geoframe
