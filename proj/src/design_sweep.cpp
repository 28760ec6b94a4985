#include "bsfwm/design_sweep.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <limits>

#include "bsfwm/errors.hpp"
#include "bsfwm/parallel.hpp"
#include "bsfwm/phase_matching.hpp"

namespace bsfwm {

std::string to_string(CellStatus status) {
  switch (status) {
    case CellStatus::ok:
      return "ok";
    case CellStatus::no_zdw:
      return "no-zdw";
    case CellStatus::invalid_domain:
      return "invalid-domain";
    case CellStatus::truncated:
      return "truncated";
  }
  return "unknown";
}

void SweepGrid::validate() const {
  // size() rejects empty or inverted ranges; single-point axes are allowed.
  (void)pitch_um.size();
  (void)d_over_pitch.size();
  if (!(threshold >= 0.0)) throw ConfigError(fmt::format("threshold {} m/s must be non-negative", threshold));
}

SweepCell evaluate_cell(const FibreGeometry& geometry, const ModelConfig& config, double threshold) {
  SweepCell cell;
  cell.pitch_um = geometry.pitch_um;
  cell.d_over_pitch = geometry.d_over_pitch;
  try {
    const DispersionModel model(geometry, config.data, config.derivative_step);
    const auto window = usable_zdw_window(model, config.zdw_window_um);
    if (window.empty()) {
      cell.note = model.lambda_window().empty() ? check_validity(geometry, 1.0, config.data).reason
                                                : "ZDW search window outside the validity domain";
      return cell;
    }
    const bool clipped = window.lo > config.zdw_window_um.lo || window.hi < config.zdw_window_um.hi;
    try {
      cell.zdw_um = find_zdw(model, window).lambda_um;
    } catch (const NotFoundError& e) {
      // Without a sign change in a clipped window the ZDW may lie beyond the fitted range.
      cell.status = clipped ? CellStatus::invalid_domain : CellStatus::no_zdw;
      cell.note = e.what();
      return cell;
    }
    const auto band = symmetry_bandwidth(model, threshold, window);
    cell.bandwidth_um = band.span_um;
    cell.status = band.truncated ? CellStatus::truncated : CellStatus::ok;
  } catch (const DomainError& e) {
    cell = SweepCell{geometry.pitch_um, geometry.d_over_pitch, {}, {}, CellStatus::invalid_domain, e.what()};
  } catch (const ConfigError& e) {
    cell = SweepCell{geometry.pitch_um, geometry.d_over_pitch, {}, {}, CellStatus::invalid_domain, e.what()};
  }
  return cell;
}

SweepResult run_sweep(const SweepGrid& grid, const ModelConfig& config, unsigned threads) {
  grid.validate();
  SweepResult result;
  result.pitch_um = grid.pitch_um.points();
  result.d_over_pitch = grid.d_over_pitch.points();
  result.threshold = grid.threshold;
  const auto nr = result.d_over_pitch.size();
  const auto total = static_cast<std::size_t>(result.pitch_um.size() * nr);
  result.cells.resize(total);
  parallel_for(total, threads, [&](std::size_t index) {
    const auto i = static_cast<Eigen::Index>(index) / nr;
    const auto j = static_cast<Eigen::Index>(index) % nr;
    result.cells[index] = evaluate_cell({result.pitch_um[i], result.d_over_pitch[j]}, config, grid.threshold);
  });
  const bool any_valid = std::any_of(result.cells.begin(), result.cells.end(),
                                     [](const SweepCell& c) { return c.status != CellStatus::invalid_domain; });
  if (!any_valid) throw ConfigError("no sweep cell lies inside the empirical validity domain");
  return result;
}

namespace {

Eigen::ArrayXXd field_of(const SweepResult& result, std::optional<double> SweepCell::*member) {
  const auto np = result.pitch_um.size();
  const auto nr = result.d_over_pitch.size();
  Eigen::ArrayXXd field(np, nr);
  for (Eigen::Index i = 0; i < np; ++i) {
    for (Eigen::Index j = 0; j < nr; ++j) {
      const auto& value = result.at(i, j).*member;
      field(i, j) = value ? *value : std::numeric_limits<double>::quiet_NaN();
    }
  }
  return field;
}

}  // namespace

Eigen::ArrayXXd SweepResult::zdw_field() const { return field_of(*this, &SweepCell::zdw_um); }

Eigen::ArrayXXd SweepResult::bandwidth_field() const { return field_of(*this, &SweepCell::bandwidth_um); }

std::vector<ContourLevel> extract_zdw_contours(const SweepResult& result, const std::vector<double>& levels_um) {
  const auto with_zdw = std::count_if(result.cells.begin(), result.cells.end(),
                                      [](const SweepCell& c) { return c.zdw_um.has_value(); });
  if (with_zdw < 4) throw ConfigError("contouring needs at least four cells with a ZDW");
  const auto field = result.zdw_field();
  std::vector<ContourLevel> out;
  out.reserve(levels_um.size());
  for (const double level : levels_um) {
    out.push_back({level, contour_lines(result.pitch_um, result.d_over_pitch, field, level)});
  }
  return out;
}

}  // namespace bsfwm
