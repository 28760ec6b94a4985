#include <doctest.h>

#include <cmath>
#include <functional>
#include <limits>

#include "bsfwm/design_sweep.hpp"
#include "bsfwm/errors.hpp"

using namespace bsfwm;

namespace {

const ModelConfig& config() {
  static const ModelConfig c{ModelData::bundled()};
  return c;
}

void check_record_invariants(const SweepResult& r) {
  REQUIRE(r.cells.size() == static_cast<std::size_t>(r.pitch_um.size() * r.d_over_pitch.size()));
  for (Eigen::Index i = 0; i < r.pitch_um.size(); ++i) {
    for (Eigen::Index j = 0; j < r.d_over_pitch.size(); ++j) {
      const auto& c = r.at(i, j);
      CHECK(c.pitch_um == r.pitch_um[i]);
      CHECK(c.d_over_pitch == r.d_over_pitch[j]);
      if (c.bandwidth_um) {
        CHECK(c.zdw_um.has_value());
        CHECK((c.status == CellStatus::ok || c.status == CellStatus::truncated));
      }
      if (c.status == CellStatus::invalid_domain) {
        CHECK_FALSE(c.zdw_um.has_value());
        CHECK_FALSE(c.bandwidth_um.has_value());
      }
    }
  }
}

SweepResult synthetic(const std::function<double(double, double)>& zdw) {
  SweepResult r;
  r.pitch_um = Eigen::ArrayXd::LinSpaced(11, 1.0, 2.0);
  r.d_over_pitch = Eigen::ArrayXd::LinSpaced(6, 0.3, 0.55);
  for (Eigen::Index i = 0; i < 11; ++i) {
    for (Eigen::Index j = 0; j < 6; ++j) {
      SweepCell c{r.pitch_um[i], r.d_over_pitch[j], zdw(r.pitch_um[i], r.d_over_pitch[j]), 0.1, CellStatus::ok, {}};
      r.cells.push_back(c);
    }
  }
  return r;
}

}  // namespace

TEST_CASE("status names") {
  CHECK(to_string(CellStatus::ok) == "ok");
  CHECK(to_string(CellStatus::no_zdw) == "no-zdw");
  CHECK(to_string(CellStatus::invalid_domain) == "invalid-domain");
  CHECK(to_string(CellStatus::truncated) == "truncated");
}

TEST_CASE("single-cell sweep at the first published design") {
  SweepGrid g;
  g.pitch_um = {1.39, 1.39, 0.02};
  g.d_over_pitch = {0.55, 0.55, 0.005};
  const auto r = run_sweep(g, config());
  REQUIRE(r.cells.size() == 1);
  REQUIRE(r.cells[0].zdw_um);
  CHECK(std::abs(*r.cells[0].zdw_um - 0.794) < 0.005);
  // At 5e7 m/s the symmetric window reaches the fitted range before the threshold.
  CHECK(r.cells[0].status == CellStatus::truncated);
  g.threshold = 1e3;
  CHECK(run_sweep(g, config()).cells[0].status == CellStatus::ok);
}

TEST_CASE("lower-left corner is outside the model") {
  const auto cell = evaluate_cell({0.8, 0.25}, config(), 5e7);
  CHECK(cell.status == CellStatus::invalid_domain);
  CHECK_FALSE(cell.zdw_um);
  CHECK_FALSE(cell.bandwidth_um);
  CHECK_FALSE(cell.note.empty());
  const auto outside = evaluate_cell({1.5, 0.9}, config(), 5e7);
  CHECK(outside.status == CellStatus::invalid_domain);
  CHECK(outside.note.find("d/pitch") != std::string::npos);
}

TEST_CASE("symmetric design has a wide symmetry bandwidth") {
  const auto cell = evaluate_cell({1.78, 0.437}, config(), 5e7);
  REQUIRE(cell.bandwidth_um);
  CHECK(*cell.bandwidth_um >= 0.4);
  CHECK(std::abs(*cell.zdw_um - 0.912926792975) < 1e-5);
}

TEST_CASE("grid validation") {
  SweepGrid g;
  g.pitch_um = {2.0, 1.0, 0.1};
  CHECK_THROWS_AS(run_sweep(g, config()), ConfigError);
  g.pitch_um = {1.0, 2.0, 0.0};
  CHECK_THROWS_AS(run_sweep(g, config()), ConfigError);
  g.pitch_um = {1.0, 2.0, 0.1};
  g.threshold = -1.0;
  CHECK_THROWS_AS(run_sweep(g, config()), ConfigError);
  // Every cell outside the fitted d/pitch range.
  SweepGrid bad;
  bad.pitch_um = {1.0, 1.2, 0.1};
  bad.d_over_pitch = {0.85, 0.95, 0.05};
  CHECK_THROWS_AS(run_sweep(bad, config()), ConfigError);
}

TEST_CASE("record invariants, determinism and serial/parallel equivalence") {
  SweepGrid g;
  g.pitch_um = {0.8, 3.0, 0.2};
  g.d_over_pitch = {0.25, 0.7, 0.05};
  const auto serial = run_sweep(g, config(), 1);
  const auto again = run_sweep(g, config(), 1);
  const auto parallel = run_sweep(g, config(), 8);
  check_record_invariants(serial);
  bool any_invalid = false, any_ok = false;
  for (std::size_t k = 0; k < serial.cells.size(); ++k) {
    const auto& a = serial.cells[k];
    for (const auto* b : {&again.cells[k], &parallel.cells[k]}) {
      CHECK(a.status == b->status);
      CHECK(a.zdw_um == b->zdw_um);
      CHECK(a.bandwidth_um == b->bandwidth_um);
      CHECK(a.note == b->note);
    }
    any_invalid |= a.status == CellStatus::invalid_domain;
    any_ok |= a.status == CellStatus::ok || a.status == CellStatus::truncated;
  }
  CHECK(any_invalid);
  CHECK(any_ok);
}

TEST_CASE("halving the steps keeps the status of shared cells") {
  SweepGrid coarse;
  coarse.pitch_um = {0.8, 2.4, 0.4};
  coarse.d_over_pitch = {0.25, 0.65, 0.1};
  SweepGrid fine = coarse;
  fine.pitch_um.step = 0.2;
  fine.d_over_pitch.step = 0.05;
  const auto a = run_sweep(coarse, config(), 4);
  const auto b = run_sweep(fine, config(), 4);
  for (Eigen::Index i = 0; i < a.pitch_um.size(); ++i) {
    for (Eigen::Index j = 0; j < a.d_over_pitch.size(); ++j) {
      const auto& ca = a.at(i, j);
      const auto& cb = b.at(2 * i, 2 * j);
      CHECK(ca.pitch_um == cb.pitch_um);
      CHECK(ca.d_over_pitch == cb.d_over_pitch);
      CHECK(ca.status == cb.status);
      CHECK(ca.zdw_um == cb.zdw_um);
    }
  }
}

TEST_CASE("contours of synthetic fields") {
  const auto constant = synthetic([](double, double) { return 0.9; });
  for (const auto& level : extract_zdw_contours(constant, {0.8, 1.0})) CHECK(level.lines.empty());

  const auto linear = synthetic([](double pitch, double) { return pitch; });
  const auto levels = extract_zdw_contours(linear, {1.45, 1.8, 2.5});
  REQUIRE(levels.size() == 3);
  REQUIRE(levels[0].lines.size() == 1);
  for (const auto& p : levels[0].lines[0]) CHECK(p.x == doctest::Approx(1.45).epsilon(1e-12));
  REQUIRE(levels[1].lines.size() == 1);
  for (const auto& p : levels[1].lines[0]) CHECK(p.x == doctest::Approx(1.8).epsilon(1e-12));
  CHECK(levels[2].lines.empty());

  SweepResult tiny = synthetic([](double pitch, double) { return pitch; });
  for (std::size_t k = 3; k < tiny.cells.size(); ++k) tiny.cells[k].zdw_um.reset();
  CHECK_THROWS_AS(extract_zdw_contours(tiny, {1.0}), ConfigError);
}

TEST_CASE("ZDW contour of a real sweep passes the design it was drawn through") {
  SweepGrid g;
  g.pitch_um = {1.68, 1.88, 0.02};
  g.d_over_pitch = {0.412, 0.462, 0.005};
  const auto r = run_sweep(g, config(), 4);
  const double level = *evaluate_cell({1.78, 0.437}, config(), 5e7).zdw_um;
  const auto levels = extract_zdw_contours(r, {level});
  REQUIRE_FALSE(levels[0].lines.empty());
  double best = std::numeric_limits<double>::infinity();
  for (const auto& line : levels[0].lines) {
    for (const auto& p : line) best = std::min(best, std::hypot((p.x - 1.78) / 0.02, (p.y - 0.437) / 0.005));
  }
  CHECK(best <= 1.0);
}
