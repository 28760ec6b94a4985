#include <doctest.h>

#include <cmath>
#include <string>

#include "bsfwm/errors.hpp"
#include "bsfwm/pump_compensation.hpp"
#include "bsfwm/units.hpp"

using namespace bsfwm;

namespace {

const DispersionModel& nominal() {
  static const DispersionModel m({1.78, 0.437}, ModelData::bundled());
  return m;
}

// Oracle pump wavelengths (nm) at λ_t = 1550 nm.
constexpr double kNominalPump = 640.345965439;
constexpr double kPitchMinus1 = 640.532381174;
constexpr double kPitchPlus1 = 640.340628629;
constexpr double kRatioPlus1 = 635.513756832;

}  // namespace

TEST_CASE("perturbation axis names and validation") {
  CHECK(to_string(PerturbationAxis::pitch) == "pitch");
  CHECK(to_string(PerturbationAxis::ratio) == "ratio");
  CHECK(perturbation_axis_from_string("ratio") == PerturbationAxis::ratio);
  CHECK_THROWS_AS(perturbation_axis_from_string("diameter"), ConfigError);
  CHECK_THROWS_AS(Perturbation({PerturbationAxis::pitch, 0.1}).validate(), ConfigError);
  CHECK_NOTHROW(Perturbation({PerturbationAxis::pitch, -0.099}).validate());
  const auto g = Perturbation{PerturbationAxis::ratio, 0.01}.apply({1.78, 0.437});
  CHECK(g.pitch_um == 1.78);
  CHECK(g.d_over_pitch == doctest::Approx(0.44137).epsilon(1e-15));
}

TEST_CASE("odd dispersion mirrors the pump about the expansion point") {
  const long double w0 = 2.2e15L, b1 = 4.9e-9L, b3 = 3e-41L, b5 = 1e-70L;
  const auto beta = [&](long double w) {
    const long double x = w - w0;
    return 5e6L + b1 * x + b3 * x * x * x / 6.0L + b5 * x * x * x * x * x / 120.0L;
  };
  const double wt = omega_from_nm(1550.0);
  const auto sol = solve_pump(beta, {omega_from_nm(3000.0), omega_from_nm(450.0)}, wt, static_cast<double>(w0));
  const double expected = 2.0 * static_cast<double>(w0) - wt;
  CHECK(omega_from_nm(sol.lambda_p_nm) == doctest::Approx(expected).epsilon(1e-6));
  CHECK(omega_from_nm(sol.degeneracy_nm) == doctest::Approx(static_cast<double>(w0)).epsilon(1e-6));
  // The trivial root ω_p = ω_t is excluded.
  CHECK(std::abs(sol.lambda_p_nm - 1550.0) > 1.0);
  CHECK(sol.root_count == 1);
}

TEST_CASE("no nontrivial root is a not-found error") {
  // Purely quadratic β: f = β₂(ω_p − ω_t)²/4 vanishes only at ω_p = ω_t.
  const auto beta = [](long double w) { return 1e-26L * (w - 1e15L) * (w - 1e15L); };
  CHECK_THROWS_AS(solve_pump(beta, {omega_from_nm(3000.0), omega_from_nm(450.0)}, omega_from_nm(1550.0), 2e15),
                  NotFoundError);
}

TEST_CASE("fixed pump for the symmetric design") {
  const auto sol = pump_for_target(nominal(), 1550.0);
  CHECK(std::abs(sol.lambda_p_nm - kNominalPump) < 1e-4);
  CHECK(std::abs(sol.degeneracy_nm - 906.282625751) < 1e-4);
  CHECK_FALSE(sol.at_edge);
  const double wt = omega_from_nm(1550.0);
  const double wp = omega_from_nm(sol.lambda_p_nm);
  CHECK(std::abs(sol.residual) < 1e-10 * nominal().beta(wt));
  CHECK(std::abs(wp - wt) > omega_width_from_nm(0.5, 1550.0));
  const double f = nominal().beta(wp) + nominal().beta(wt) - 2.0 * nominal().beta(0.5 * (wp + wt));
  CHECK(std::abs(f) < 1e-10 * nominal().beta(wt));
}

TEST_CASE("target outside the model is a domain error") {
  CHECK_THROWS_AS(pump_for_target(nominal(), 5000.0), DomainError);
}

TEST_CASE("compensation curve: identity, signs, distinct axes") {
  const auto pitch = compensation_curve(nominal(), PerturbationAxis::pitch, {-0.01, 0.0, 0.01}, 1550.0);
  REQUIRE(pitch.size() == 3);
  for (const auto& p : pitch) REQUIRE(p.ok);
  CHECK(pitch[1].shift_nm == 0.0);
  CHECK(std::abs(pitch[0].lambda_p_nm - kPitchMinus1) < 1e-4);
  CHECK(std::abs(pitch[2].lambda_p_nm - kPitchPlus1) < 1e-4);
  CHECK(pitch[0].shift_nm > 0.0);
  CHECK(pitch[2].shift_nm < 0.0);

  const auto ratio = compensation_curve(nominal(), PerturbationAxis::ratio, {-0.01, 0.0, 0.01}, 1550.0);
  CHECK(std::abs(ratio[2].lambda_p_nm - kRatioPlus1) < 1e-4);
  CHECK(std::abs(ratio[0].shift_nm - pitch[0].shift_nm) > 1.0);
  CHECK(std::abs(ratio[2].shift_nm - pitch[2].shift_nm) > 1.0);
}

TEST_CASE("compensation curve matches direct perturbation") {
  const std::vector<double> fractions{-0.02, -0.007, 0.003, 0.015};
  for (auto axis : {PerturbationAxis::pitch, PerturbationAxis::ratio}) {
    const auto curve = compensation_curve(nominal(), axis, fractions, 1550.0, 3);
    for (std::size_t k = 0; k < fractions.size(); ++k) {
      const auto g = Perturbation{axis, fractions[k]}.apply(nominal().geometry());
      CHECK(curve[k].lambda_p_nm == pump_for_target(nominal().with_geometry(g), 1550.0).lambda_p_nm);
    }
  }
}

TEST_CASE("compensation curve is continuous on a dense grid") {
  std::vector<double> fractions;
  for (int k = -30; k <= 30; ++k) fractions.push_back(0.001 * k);
  for (auto axis : {PerturbationAxis::pitch, PerturbationAxis::ratio}) {
    const auto curve = compensation_curve(nominal(), axis, fractions, 1550.0);
    double max_step = 0.0;
    for (std::size_t k = 0; k + 1 < curve.size(); ++k) {
      REQUIRE(curve[k].ok);
      max_step = std::max(max_step, std::abs(curve[k + 1].shift_nm - curve[k].shift_nm));
    }
    CHECK(max_step < (axis == PerturbationAxis::pitch ? 0.1 : 1.0));
    // A sign change happens only by passing close to zero, never by a jump.
    for (std::size_t k = 0; k + 1 < curve.size(); ++k) {
      const double a = curve[k].shift_nm, b = curve[k + 1].shift_nm;
      if (std::signbit(a) != std::signbit(b)) CHECK(std::abs(a) + std::abs(b) <= max_step + 1e-12);
    }
  }
}

TEST_CASE("failing points are reported, the rest still computed") {
  const auto curve = compensation_curve(nominal(), PerturbationAxis::ratio, {0.5, 0.0, 0.01}, 1550.0);
  CHECK_FALSE(curve[0].ok);
  CHECK_FALSE(curve[0].message.empty());
  CHECK(curve[1].ok);
  CHECK(curve[2].ok);
}

TEST_CASE("unperturbed envelope reproduces the nominal one") {
  const Eigen::ArrayXd s = Eigen::ArrayXd::LinSpaced(21, 800.0, 1300.0);
  const auto pe = perturbed_envelope(nominal(), {PerturbationAxis::pitch, 0.0}, 1550.0, 5.0, s);
  const auto pump = pump_for_target(nominal(), 1550.0);
  const auto direct = efficiency_envelope(nominal(), {}, {pump.lambda_p_nm, 5.0}, 1550.0, s);
  CHECK((pe.envelope.efficiency == direct.efficiency).all());
  CHECK(pe.pump.lambda_p_nm == pump.lambda_p_nm);
  CHECK(pe.summary.span_nm == summary_bandwidth(direct).span_nm);
  // The nominal fixed pump converts broadly.
  CHECK((pe.envelope.efficiency >= 0.5).all());
}
