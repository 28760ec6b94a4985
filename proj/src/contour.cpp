#include "bsfwm/contour.hpp"

#include <fmt/format.h>

#include <array>
#include <cmath>
#include <map>

#include "bsfwm/errors.hpp"

namespace bsfwm {
namespace {

// A crossing point is identified by the grid edge it lies on: horizontal edges
// join (i, j)-(i+1, j), vertical edges join (i, j)-(i, j+1).
struct EdgeKey {
  int i;
  int j;
  bool vertical;
  auto operator<=>(const EdgeKey&) const = default;
};

struct Segment {
  EdgeKey a;
  EdgeKey b;
};

}  // namespace

std::vector<Polyline> contour_lines(const Eigen::ArrayXd& x, const Eigen::ArrayXd& y,
                                    const Eigen::ArrayXXd& field, double level) {
  if (field.rows() != x.size() || field.cols() != y.size()) {
    throw ConfigError(fmt::format("contour field is {}x{} but axes have {} and {} points", field.rows(),
                                  field.cols(), x.size(), y.size()));
  }
  const int nx = static_cast<int>(x.size());
  const int ny = static_cast<int>(y.size());

  const auto point_on = [&](const EdgeKey& e) {
    const int i2 = e.vertical ? e.i : e.i + 1;
    const int j2 = e.vertical ? e.j + 1 : e.j;
    const double f1 = field(e.i, e.j);
    const double f2 = field(i2, j2);
    const double t = f1 == f2 ? 0.5 : (level - f1) / (f2 - f1);
    return Point2{x[e.i] + t * (x[i2] - x[e.i]), y[e.j] + t * (y[j2] - y[e.j])};
  };

  std::vector<Segment> segments;
  for (int i = 0; i + 1 < nx; ++i) {
    for (int j = 0; j + 1 < ny; ++j) {
      // Corners counter-clockwise: (i,j), (i+1,j), (i+1,j+1), (i,j+1).
      const std::array<double, 4> v{field(i, j), field(i + 1, j), field(i + 1, j + 1), field(i, j + 1)};
      if (std::isnan(v[0]) || std::isnan(v[1]) || std::isnan(v[2]) || std::isnan(v[3])) continue;
      int mask = 0;
      for (int k = 0; k < 4; ++k) mask |= (v[k] >= level ? 1 : 0) << k;
      if (mask == 0 || mask == 15) continue;
      // Edge k joins corner k and corner k+1.
      const std::array<EdgeKey, 4> edge{EdgeKey{i, j, false}, EdgeKey{i + 1, j, true},
                                        EdgeKey{i, j + 1, false}, EdgeKey{i, j, true}};
      const auto crosses = [&](int k) { return ((mask >> k) & 1) != ((mask >> ((k + 1) % 4)) & 1); };
      if (mask == 5 || mask == 10) {
        const double mean = 0.25 * (v[0] + v[1] + v[2] + v[3]);
        const bool center_high = mean >= level;
        // Corner 0 high (mask 5) with a high centre connects corners 0 and 2.
        if ((mask == 5) == center_high) {
          segments.push_back({edge[0], edge[1]});
          segments.push_back({edge[2], edge[3]});
        } else {
          segments.push_back({edge[3], edge[0]});
          segments.push_back({edge[1], edge[2]});
        }
        continue;
      }
      std::array<int, 2> hit{};
      int count = 0;
      for (int k = 0; k < 4; ++k) {
        if (crosses(k)) hit[count++] = k;
      }
      segments.push_back({edge[hit[0]], edge[hit[1]]});
    }
  }

  std::map<EdgeKey, std::vector<std::size_t>> by_edge;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    by_edge[segments[s].a].push_back(s);
    by_edge[segments[s].b].push_back(s);
  }
  std::vector<bool> used(segments.size(), false);

  const auto next_from = [&](const EdgeKey& at, std::size_t current) -> std::ptrdiff_t {
    for (auto s : by_edge[at]) {
      if (s != current && !used[s]) return static_cast<std::ptrdiff_t>(s);
    }
    return -1;
  };

  // Walk from one end of the chain; start at open ends first so open curves come out whole.
  std::vector<std::size_t> order;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    if (by_edge[segments[s].a].size() == 1 || by_edge[segments[s].b].size() == 1) order.push_back(s);
  }
  for (std::size_t s = 0; s < segments.size(); ++s) order.push_back(s);

  std::vector<Polyline> lines;
  for (auto start : order) {
    if (used[start]) continue;
    used[start] = true;
    EdgeKey head = segments[start].a;
    EdgeKey tail = segments[start].b;
    if (by_edge[tail].size() == 1) std::swap(head, tail);
    std::vector<EdgeKey> keys{head, tail};
    std::size_t current = start;
    while (true) {
      const auto next = next_from(keys.back(), current);
      if (next < 0) break;
      const auto n = static_cast<std::size_t>(next);
      used[n] = true;
      keys.push_back(segments[n].a == keys.back() ? segments[n].b : segments[n].a);
      current = n;
    }
    Polyline line;
    line.reserve(keys.size());
    for (const auto& k : keys) line.push_back(point_on(k));
    lines.push_back(std::move(line));
  }
  return lines;
}

}  // namespace bsfwm
