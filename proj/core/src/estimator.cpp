#include "geoframe/estimator.hpp"

#include <algorithm>
#include <cmath>

namespace geoframe {

void EstimatorConfig::validate() const {
  if (kappa < 1) throw std::invalid_argument("kappa must be at least 1");
  if (!(sample_period > 0.0)) throw std::invalid_argument("sample period must be positive");
  if (!(collinear_tolerance >= 0.0)) throw std::invalid_argument("collinear tolerance must be >= 0");
}

FrameEstimator::FrameEstimator(std::size_t phase_count, EstimatorConfig config)
    : phase_count_(phase_count), config_(config) {
  config_.validate();
  if (phase_count_ < 3) throw std::invalid_argument("estimator needs at least 3 phases");
  ring_.assign((config_.kappa + 1) * phase_count_, 0.0);
  ring_times_.assign(config_.kappa + 1, 0.0);
}

std::span<const double> FrameEstimator::slot(std::size_t age) const {
  const std::size_t cap = config_.kappa + 1;
  const std::size_t index = (head_ + cap - age) % cap;
  return std::span<const double>(ring_).subspan(index * phase_count_, phase_count_);
}

double FrameEstimator::slot_time(std::size_t age) const {
  const std::size_t cap = config_.kappa + 1;
  return ring_times_[(head_ + cap - age) % cap];
}

bool FrameEstimator::straddles_change(const FrameTransform& frame) const {
  for (std::size_t age = 1; age < config_.kappa; ++age) {
    const auto v = slot(age);
    double n2 = 0.0;
    for (double x : v) n2 += x * x;
    if (n2 == 0.0) continue;
    const TransformedSample ts = transform_sample(frame, v);
    for (double r : ts.residual) {
      if (std::abs(r) > config_.transition_threshold * std::sqrt(n2)) return true;
    }
  }
  return false;
}

std::optional<FrameEstimate> FrameEstimator::push_sample(std::span<const double> v, double t) {
  if (v.size() != phase_count_) {
    throw std::invalid_argument("sample has " + std::to_string(v.size()) + " phases, expected " +
                                std::to_string(phase_count_));
  }
  if (filled_ > 0 && !(t > slot_time(0))) {
    throw std::invalid_argument("estimator timestamps must be strictly increasing");
  }

  const std::size_t cap = config_.kappa + 1;
  head_ = filled_ == 0 ? 0 : (head_ + 1) % cap;
  std::copy(v.begin(), v.end(), ring_.begin() + static_cast<std::ptrdiff_t>(head_ * phase_count_));
  ring_times_[head_] = t;
  if (filled_ < cap) ++filled_;
  if (filled_ < cap) return std::nullopt;

  const auto oldest = slot(config_.kappa);
  try {
    FrameTransform frame = identify_frame(oldest, v, slot_time(config_.kappa), t, config_.method,
                                          config_.collinear_tolerance);
    const bool transition = straddles_change(frame);
    auto snapshot = std::make_shared<const FrameTransform>(frame);
    {
      std::lock_guard lock(snapshot_mutex_);
      last_ = std::move(snapshot);
    }
    return FrameEstimate{std::move(frame), false, transition};
  } catch (const DegenerateSamples&) {
    ++degenerate_count_;
  }

  if (!config_.hold_last_on_degenerate) return std::nullopt;
  std::shared_ptr<const FrameTransform> held;
  {
    std::lock_guard lock(snapshot_mutex_);
    held = last_;
  }
  if (!held) return std::nullopt;
  return FrameEstimate{*held, true, false};
}

std::optional<FrameTransform> FrameEstimator::current_frame() const {
  std::lock_guard lock(snapshot_mutex_);
  if (!last_) return std::nullopt;
  return *last_;
}

}  // namespace geoframe
