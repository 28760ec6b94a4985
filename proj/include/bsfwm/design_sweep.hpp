#pragma once

#include <Eigen/Core>

#include <optional>
#include <string>
#include <vector>

#include "bsfwm/contour.hpp"
#include "bsfwm/grid.hpp"
#include "bsfwm/pcf_model.hpp"

namespace bsfwm {

struct SweepGrid {
  AxisSpec pitch_um{0.8, 3.0, 0.02};
  AxisSpec d_over_pitch{0.25, 0.7, 0.005};
  double threshold = 5e7;  // m/s

  /// Throws ConfigError on an empty axis or a negative threshold.
  void validate() const;
};

struct ModelConfig {
  ModelData data;
  double derivative_step = DispersionModel::kDefaultDerivativeStep;
  Interval zdw_window_um = kDefaultZdwWindow;
};

enum class CellStatus { ok, no_zdw, invalid_domain, truncated };

std::string to_string(CellStatus status);

struct SweepCell {
  double pitch_um = 0.0;
  double d_over_pitch = 0.0;
  std::optional<double> zdw_um;
  std::optional<double> bandwidth_um;
  CellStatus status = CellStatus::invalid_domain;
  std::string note;
};

/// One record per grid cell, pitch-major: index = i_pitch · n_ratio + i_ratio.
struct SweepResult {
  Eigen::ArrayXd pitch_um;
  Eigen::ArrayXd d_over_pitch;
  double threshold = 0.0;
  std::vector<SweepCell> cells;

  const SweepCell& at(Eigen::Index i_pitch, Eigen::Index i_ratio) const {
    return cells[static_cast<std::size_t>(i_pitch * d_over_pitch.size() + i_ratio)];
  }
  /// ZDW field indexed (pitch, ratio), NaN where absent.
  Eigen::ArrayXXd zdw_field() const;
  Eigen::ArrayXXd bandwidth_field() const;
};

/// Evaluates one design: validity, first ZDW and symmetry bandwidth.
SweepCell evaluate_cell(const FibreGeometry& geometry, const ModelConfig& config, double threshold);

/// Evaluates every cell; output is independent of `threads`. ConfigError if no
/// cell lies in the validity domain.
SweepResult run_sweep(const SweepGrid& grid, const ModelConfig& config, unsigned threads = 1);

struct ContourLevel {
  double level = 0.0;
  std::vector<Polyline> lines;  // points are (pitch µm, d/Λ)
};

/// ZDW iso-lines of a sweep; requires at least four cells with a ZDW.
std::vector<ContourLevel> extract_zdw_contours(const SweepResult& result, const std::vector<double>& levels_um);

}  // namespace bsfwm
