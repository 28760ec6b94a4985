#include "bsfwm/grid.hpp"

#include <fmt/format.h>

#include <cmath>

#include "bsfwm/errors.hpp"

namespace bsfwm {

Eigen::Index AxisSpec::size() const {
  if (!(step > 0.0) || !std::isfinite(step)) throw ConfigError(fmt::format("axis step {} must be positive", step));
  if (!(hi >= lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw ConfigError(fmt::format("axis range [{}, {}] is empty", lo, hi));
  }
  return static_cast<Eigen::Index>(std::floor((hi - lo) / step + 1e-9)) + 1;
}

Eigen::ArrayXd AxisSpec::points() const {
  const auto n = size();
  Eigen::ArrayXd out(n);
  for (Eigen::Index k = 0; k < n; ++k) out[k] = lo + static_cast<double>(k) * step;
  return out;
}

}  // namespace bsfwm
