#pragma once

#include <Eigen/Core>

namespace bsfwm {

/// Inclusive evenly spaced axis lo, lo + step, ... ≤ hi.
struct AxisSpec {
  double lo = 0.0;
  double hi = 0.0;
  double step = 1.0;

  /// Throws ConfigError for a non-positive step or hi < lo.
  Eigen::Index size() const;
  /// Points are lo + k·step, so halving the step reproduces every old point exactly.
  Eigen::ArrayXd points() const;
};

}  // namespace bsfwm
