#pragma once

#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "geoframe/frame.hpp"

namespace geoframe {

struct EstimatorConfig {
  std::size_t kappa = 8;          // sample separation of the two vectors
  double sample_period = 100e-6;  // Ts, seconds
  double collinear_tolerance = kCollinearTolerance;
  bool hold_last_on_degenerate = true;
  MethodChoice method = MethodChoice::Auto;
  /// Out-of-plane residual of a buffered intermediate sample, relative to
  /// its norm, above which an estimate is flagged as a transition.
  double transition_threshold = 1e-6;

  void validate() const;
};

struct FrameEstimate {
  FrameTransform frame;
  bool held = false;        // previous frame returned after a degenerate pair
  bool transition = false;  // window straddles a change of plane
};

/// Recursive frame identification from the pair (v(t - kappa Ts), v(t)).
///
/// One producer calls push_sample; any thread may read current_frame, which
/// returns a consistent snapshot.
class FrameEstimator {
 public:
  explicit FrameEstimator(std::size_t phase_count, EstimatorConfig config = {});

  /// Returns the estimate for this step, or nullopt during warm-up and on a
  /// degenerate pair when hold_last_on_degenerate is off. Throws
  /// std::invalid_argument on a non-increasing timestamp or wrong arity.
  std::optional<FrameEstimate> push_sample(std::span<const double> v, double t);

  std::optional<FrameTransform> current_frame() const;

  std::size_t phase_count() const noexcept { return phase_count_; }
  const EstimatorConfig& config() const noexcept { return config_; }
  std::size_t degenerate_count() const noexcept { return degenerate_count_; }
  std::size_t buffered() const noexcept { return filled_; }
  bool warmed_up() const noexcept { return filled_ == config_.kappa + 1; }

 private:
  std::span<const double> slot(std::size_t age) const;  // age 0 = newest
  double slot_time(std::size_t age) const;
  bool straddles_change(const FrameTransform& frame) const;

  std::size_t phase_count_;
  EstimatorConfig config_;
  std::vector<double> ring_;
  std::vector<double> ring_times_;
  std::size_t head_ = 0;  // index of the newest slot
  std::size_t filled_ = 0;
  std::size_t degenerate_count_ = 0;

  mutable std::mutex snapshot_mutex_;
  std::shared_ptr<const FrameTransform> last_;
};

}  // namespace geoframe
