#pragma once

#include <Eigen/Core>

#include <vector>

namespace bsfwm {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

using Polyline = std::vector<Point2>;

/// Marching-squares iso-lines of `field` at `level`. `field(i, j)` is the
/// sample at (x[i], y[j]); NaN samples mask every cell that touches them.
/// Segments are chained into maximal polylines; closed loops repeat their
/// first point at the end. Ambiguous saddles are resolved by the cell mean.
std::vector<Polyline> contour_lines(const Eigen::ArrayXd& x, const Eigen::ArrayXd& y,
                                    const Eigen::ArrayXXd& field, double level);

}  // namespace bsfwm
