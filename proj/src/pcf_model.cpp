#include "bsfwm/pcf_model.hpp"

#include <boost/math/tools/roots.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "bsfwm/data_file.hpp"
#include "bsfwm/errors.hpp"
#include "bsfwm/units.hpp"

namespace bsfwm {
namespace {

constexpr long double kTwoPiCExt = 2.0L * std::numbers::pi_v<long double> * 299792458.0L;

EmpiricalFitTables::Fit read_fit(const DataFile& file, const std::string& prefix) {
  EmpiricalFitTables::Fit fit;
  for (int k = 0; k < 4; ++k) {
    const auto row = file.numbers(fmt::format("{}.coef{}", prefix, k), 4);
    std::copy(row.begin(), row.end(), fit.coef[k].begin());
  }
  for (int k = 1; k <= 3; ++k) {
    const auto row = file.numbers(fmt::format("{}.exp{}", prefix, k), 4);
    std::copy(row.begin(), row.end(), fit.exponent[k - 1].begin());
  }
  return fit;
}

Interval read_interval(const DataFile& file, const std::string& key) {
  const auto v = file.numbers(key, 2);
  const Interval out{v[0], v[1]};
  if (out.empty() || out.lo <= 0.0) {
    throw ConfigError(fmt::format("{}: '{}' must be an increasing positive pair", file.source(), key));
  }
  return out;
}

// Stencil step multipliers per derivative order, and the stencil half-width in steps.
constexpr std::array<double, 5> kStepScale{1.0, 1.0, 1.0, 4.0, 10.0};
constexpr double kHalfWidthSteps = 2.0;

}  // namespace

void FibreGeometry::validate() const {
  if (!(pitch_um > 0.0) || !std::isfinite(pitch_um)) {
    throw ConfigError(fmt::format("pitch {} um must be positive", pitch_um));
  }
  if (!(d_over_pitch > 0.0 && d_over_pitch < 1.0)) {
    throw ConfigError(fmt::format("d/pitch {} must lie in (0, 1)", d_over_pitch));
  }
}

std::array<long double, 4> EmpiricalFitTables::Fit::parameters(long double t) const {
  std::array<long double, 4> p{};
  for (std::size_t i = 0; i < 4; ++i) {
    long double sum = coef[0][i];
    for (std::size_t k = 1; k < 4; ++k) sum += coef[k][i] * std::pow(t, static_cast<long double>(exponent[k - 1][i]));
    p[i] = sum;
  }
  return p;
}

EmpiricalFitTables fits_from_data(const DataFile& file) {
  if (file.text("format") != "pcf_empirical_fits/1") {
    throw ConfigError(fmt::format("{}: unsupported format '{}'", file.source(), file.text("format")));
  }
  EmpiricalFitTables tables;
  tables.v = read_fit(file, "v");
  tables.w = read_fit(file, "w");
  tables.d_over_pitch = read_interval(file, "validity.d_over_pitch");
  tables.lambda_over_pitch = read_interval(file, "validity.lambda_over_pitch");
  return tables;
}

EmpiricalFitTables load_fits(const std::filesystem::path& path) {
  return fits_from_data(DataFile::load(path));
}

EmpiricalFitTables bundled_fits() { return load_fits(bundled_data_dir() / "pcf_empirical_fits.txt"); }

ModelData ModelData::bundled() { return from_dir(bundled_data_dir()); }

ModelData ModelData::from_dir(const std::filesystem::path& dir) {
  return {load_sellmeier(dir / "silica_sellmeier.txt"), load_fits(dir / "pcf_empirical_fits.txt")};
}

namespace {

// Bounds are compared with a relative slack so that window edges survive a
// wavelength -> frequency -> wavelength round trip.
bool within(const Interval& range, double x) {
  constexpr double kSlack = 1e-12;
  return x >= range.lo * (1.0 - kSlack) && x <= range.hi * (1.0 + kSlack);
}

}  // namespace

Validity check_validity(const FibreGeometry& geometry, double lambda_um, const ModelData& data) {
  const auto& fits = data.fits;
  if (!fits.d_over_pitch.contains(geometry.d_over_pitch)) {
    return {false, fmt::format("d/pitch = {} outside the fitted range [{}, {}]", geometry.d_over_pitch,
                               fits.d_over_pitch.lo, fits.d_over_pitch.hi)};
  }
  const double ratio = lambda_um / geometry.pitch_um;
  if (!within(fits.lambda_over_pitch, ratio)) {
    return {false, fmt::format("lambda/pitch = {} outside the fitted range [{}, {}]", ratio,
                               fits.lambda_over_pitch.lo, fits.lambda_over_pitch.hi)};
  }
  if (!within({data.material.window_lo_um(), data.material.window_hi_um()}, lambda_um)) {
    return {false, fmt::format("wavelength {} um outside the material window [{}, {}] um", lambda_um,
                               data.material.window_lo_um(), data.material.window_hi_um())};
  }
  return {};
}

DispersionModel::DispersionModel(FibreGeometry geometry, ModelData data, double derivative_step)
    : geometry_(geometry), data_(std::move(data)), step_(derivative_step) {
  geometry_.validate();
  if (!(step_ > 0.0)) throw ConfigError("derivative step must be positive");
  const auto& fits = data_.fits;
  if (fits.d_over_pitch.contains(geometry_.d_over_pitch)) {
    lambda_window_ = {std::max(fits.lambda_over_pitch.lo * geometry_.pitch_um, data_.material.window_lo_um()),
                      std::min(fits.lambda_over_pitch.hi * geometry_.pitch_um, data_.material.window_hi_um())};
  }
  if (!lambda_window_.empty() && 100.0 * step_ > omega_window().width()) {
    throw ConfigError(fmt::format("derivative step {} rad/s is not 100x smaller than the {} rad/s window",
                                  step_, omega_window().width()));
  }
  v_params_ = fits.v.parameters(geometry_.d_over_pitch);
  w_params_ = fits.w.parameters(geometry_.d_over_pitch);
}

DispersionModel DispersionModel::with_geometry(FibreGeometry geometry) const {
  return DispersionModel(geometry, data_, step_);
}

DispersionModel DispersionModel::with_derivative_step(double step) const {
  return DispersionModel(geometry_, data_, step);
}

Interval DispersionModel::omega_window() const {
  if (lambda_window_.empty()) return {};
  return {omega_from_um(lambda_window_.hi), omega_from_um(lambda_window_.lo)};
}

double DispersionModel::stencil_step(int order) const {
  if (order < 1 || order > 4) throw ConfigError(fmt::format("derivative order {} not in 1..4", order));
  return step_ * kStepScale[static_cast<std::size_t>(order)];
}

Interval DispersionModel::derivative_omega_window(int order) const {
  const auto w = omega_window();
  const double half = kHalfWidthSteps * stencil_step(order);
  Interval out{w.lo + half, w.hi - half};
  if (w.empty() || out.empty()) return {};
  return out;
}

Interval DispersionModel::derivative_lambda_window(int order) const {
  const auto w = derivative_omega_window(order);
  if (w.empty()) return {};
  return {um_from_omega(w.hi), um_from_omega(w.lo)};
}

long double DispersionModel::n_eff_extended(long double lambda_um, ModeIndices* out) const {
  const double lambda = static_cast<double>(lambda_um);
  if (auto valid = check(lambda); !valid) {
    throw DomainError(fmt::format("pitch {} um, d/pitch {}: {}", geometry_.pitch_um,
                                  geometry_.d_over_pitch, valid.reason));
  }
  const long double x = lambda_um / geometry_.pitch_um;
  const auto fitted = [x](const std::array<long double, 4>& p) {
    return p[0] + p[1] / (1.0L + p[2] * std::exp(p[3] * x));
  };
  const long double v = fitted(v_params_);
  const long double w = fitted(w_params_);
  const long double n_core = refractive_index_ld(lambda_um, data_.material);
  // k·a_eff with a_eff = Λ/√3.
  const long double ka = 2.0L * std::numbers::pi_v<long double> / lambda_um * geometry_.pitch_um /
                         std::numbers::sqrt3_v<long double>;
  const long double n_fsm2 = n_core * n_core - (v / ka) * (v / ka);
  if (!(v > 0.0L) || !(w > 0.0L) || !(n_fsm2 > 0.0L)) {
    throw ModelBreakdownError(fmt::format(
        "empirical fit breaks down at {} um (pitch {} um, d/pitch {}): V = {}, W = {}, n_FSM^2 = {}",
        lambda, geometry_.pitch_um, geometry_.d_over_pitch, static_cast<double>(v),
        static_cast<double>(w), static_cast<double>(n_fsm2)));
  }
  const long double n_eff2 = n_fsm2 + (w / ka) * (w / ka);
  if (n_eff2 > n_core * n_core) {
    throw ModelBreakdownError(fmt::format("empirical fit gives n_eff above the core index at {} um (W > V)",
                                          lambda));
  }
  const long double n_eff = std::sqrt(n_eff2);
  if (out != nullptr) {
    *out = {static_cast<double>(v), static_cast<double>(w), static_cast<double>(n_core),
            static_cast<double>(std::sqrt(n_fsm2)), static_cast<double>(n_eff)};
  }
  return n_eff;
}

ModeIndices DispersionModel::mode_indices(double lambda_um) const {
  ModeIndices out;
  n_eff_extended(lambda_um, &out);
  return out;
}

double DispersionModel::effective_index(double lambda_um) const {
  return static_cast<double>(n_eff_extended(lambda_um, nullptr));
}

long double DispersionModel::beta_extended(long double omega) const {
  const long double lambda_um = kTwoPiCExt / omega * 1e6L;
  return n_eff_extended(lambda_um, nullptr) * omega / 299792458.0L;
}

double DispersionModel::beta(double omega) const {
  if (!(omega > 0.0)) throw DomainError(fmt::format("angular frequency {} must be positive", omega));
  return static_cast<double>(beta_extended(omega));
}

double DispersionModel::beta_n(double omega, int order) const {
  const long double h = stencil_step(order);
  const auto window = derivative_omega_window(order);
  if (window.empty() || !window.contains(omega)) {
    const auto w = omega_window();
    const char* edge = omega < 0.5 * (w.lo + w.hi) ? "long-wavelength" : "short-wavelength";
    throw DomainError(fmt::format(
        "beta_{} stencil at {} um (pitch {} um, d/pitch {}) is clipped by the {} edge of the validity window",
        order, um_from_omega(omega), geometry_.pitch_um, geometry_.d_over_pitch, edge));
  }
  const long double w0 = omega;
  const auto f = [&](int k) { return beta_extended(w0 + k * h); };
  long double d = 0.0L;
  switch (order) {
    case 1:
      d = (-f(2) + 8.0L * f(1) - 8.0L * f(-1) + f(-2)) / (12.0L * h);
      break;
    case 2:
      d = (-f(2) + 16.0L * f(1) - 30.0L * f(0) + 16.0L * f(-1) - f(-2)) / (12.0L * h * h);
      break;
    case 3:
      d = (f(2) - 2.0L * f(1) + 2.0L * f(-1) - f(-2)) / (2.0L * h * h * h);
      break;
    default:
      d = (f(2) - 4.0L * f(1) + 6.0L * f(0) - 4.0L * f(-1) + f(-2)) / (h * h * h * h);
      break;
  }
  return static_cast<double>(d);
}

double DispersionModel::group_velocity(double omega) const { return 1.0 / beta_n(omega, 1); }

DispersionTable tabulate_dispersion(const DispersionModel& model, const Eigen::ArrayXd& lambda_nm) {
  const auto n = lambda_nm.size();
  DispersionTable t{lambda_nm, Eigen::ArrayXd(n), Eigen::ArrayXd(n), Eigen::ArrayXd(n), Eigen::ArrayXd(n),
                    Eigen::ArrayXd(n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    const double omega = omega_from_nm(lambda_nm[k]);
    t.n_eff[k] = model.effective_index(lambda_nm[k] * 1e-3);
    t.beta[k] = model.beta(omega);
    t.beta1[k] = model.beta_n(omega, 1);
    t.beta2[k] = model.beta_n(omega, 2);
    t.group_velocity[k] = 1.0 / t.beta1[k];
  }
  return t;
}

Interval usable_zdw_window(const DispersionModel& model, Interval window_um) {
  const auto w = model.derivative_lambda_window(2);
  Interval out{std::max(window_um.lo, w.lo), std::min(window_um.hi, w.hi)};
  if (w.empty() || out.empty()) return {};
  return out;
}

ZdwResult find_zdw(const DispersionModel& model, Interval window_um) {
  const auto usable = model.derivative_lambda_window(2);
  if (window_um.empty() || usable.empty() || window_um.lo < usable.lo || window_um.hi > usable.hi) {
    throw DomainError(fmt::format("ZDW search window [{}, {}] um is not inside the usable window [{}, {}] um",
                                  window_um.lo, window_um.hi, usable.lo, usable.hi));
  }
  const auto beta2 = [&](double lambda_um) { return model.beta_n(omega_from_um(lambda_um), 2); };

  constexpr double kScanStep = 1e-3;  // µm
  const auto n = static_cast<std::size_t>(std::ceil(window_um.width() / kScanStep)) + 1;
  std::vector<double> lambdas(n);
  std::vector<double> values(n);
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    lambdas[i] = i + 1 == n ? window_um.hi : window_um.lo + static_cast<double>(i) * kScanStep;
    values[i] = beta2(lambdas[i]);
    scale = std::max(scale, std::abs(values[i]));
  }

  ZdwResult result;
  std::size_t first = n;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (values[i] == 0.0 || std::signbit(values[i]) != std::signbit(values[i + 1])) {
      if (first == n) first = i;
      ++result.root_count;
    }
  }
  if (first == n) {
    throw NotFoundError(fmt::format("beta_2 has no zero in [{}, {}] um (pitch {} um, d/pitch {})",
                                    window_um.lo, window_um.hi, model.geometry().pitch_um,
                                    model.geometry().d_over_pitch));
  }
  if (values[first] == 0.0) {
    result.lambda_um = lambdas[first];
    return result;
  }

  const double tolerance = 1e-6 * scale;
  const auto done = [&](double a, double b) {
    return b - a < 1e-5 && std::abs(beta2(0.5 * (a + b))) < tolerance;
  };
  std::uintmax_t iterations = 200;
  const auto [a, b] =
      boost::math::tools::bisect(beta2, lambdas[first], lambdas[first + 1], done, iterations);
  result.lambda_um = 0.5 * (a + b);
  return result;
}

}  // namespace bsfwm
