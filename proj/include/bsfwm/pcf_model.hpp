#pragma once

#include <Eigen/Core>

#include <array>
#include <filesystem>
#include <string>

#include "bsfwm/material.hpp"

namespace bsfwm {

class DataFile;

/// Hexagonal-lattice PCF cross-section: hole pitch Λ (µm) and hole diameter over pitch.
struct FibreGeometry {
  double pitch_um = 0.0;
  double d_over_pitch = 0.0;

  /// Throws ConfigError unless pitch > 0 and 0 < d/Λ < 1.
  void validate() const;
  friend bool operator==(const FibreGeometry&, const FibreGeometry&) = default;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double x) const { return x >= lo && x <= hi; }
  bool empty() const { return !(lo < hi); }
  double width() const { return hi - lo; }
};

/// Coefficient tables of the empirical V and W fits. Each fitted parameter
/// P_i (i = 1..4) depends on t = d/Λ as
///   P_i = coef[0][i] + Σ_{k=1..3} coef[k][i] · t^exponent[k-1][i]
/// and V, W = P_1 + P_2 / (1 + P_3 exp(P_4 · λ/Λ)).
struct EmpiricalFitTables {
  struct Fit {
    std::array<std::array<double, 4>, 4> coef{};
    std::array<std::array<double, 4>, 3> exponent{};

    std::array<long double, 4> parameters(long double t) const;
  };

  Fit v;
  Fit w;
  Interval d_over_pitch;
  Interval lambda_over_pitch;
};

EmpiricalFitTables fits_from_data(const DataFile& file);
EmpiricalFitTables load_fits(const std::filesystem::path& path);
EmpiricalFitTables bundled_fits();

/// Material and fit data shared by every model built from the same files.
struct ModelData {
  SellmeierCoefficients material;
  EmpiricalFitTables fits;

  static ModelData bundled();
  static ModelData from_dir(const std::filesystem::path& dir);
};

struct Validity {
  bool ok = true;
  std::string reason;

  explicit operator bool() const { return ok; }
};

/// True iff d/Λ and λ/Λ lie in the fitted range and λ in the material window.
Validity check_validity(const FibreGeometry& geometry, double lambda_um, const ModelData& data);

/// Intermediate quantities of the effective-index reconstruction.
struct ModeIndices {
  double v = 0.0;
  double w = 0.0;
  double n_core = 0.0;
  double n_fsm = 0.0;
  double n_eff = 0.0;
};

/// Fundamental-mode dispersion of one fibre. Immutable; all members are const
/// and safe to call concurrently.
class DispersionModel {
 public:
  static constexpr double kDefaultDerivativeStep = 1e11;  // rad/s

  /// Throws ConfigError for an invalid geometry or a step that is not at
  /// least 100x smaller than the validity window in angular frequency.
  DispersionModel(FibreGeometry geometry, ModelData data,
                  double derivative_step = kDefaultDerivativeStep);

  DispersionModel with_geometry(FibreGeometry geometry) const;
  DispersionModel with_derivative_step(double step) const;

  const FibreGeometry& geometry() const { return geometry_; }
  const ModelData& data() const { return data_; }
  double derivative_step() const { return step_; }

  Validity check(double lambda_um) const { return check_validity(geometry_, lambda_um, data_); }

  /// Wavelengths (µm) where the model may be evaluated. Empty when d/Λ is out of range.
  Interval lambda_window() const { return lambda_window_; }
  Interval omega_window() const;

  /// Frequencies at which the `order` stencil stays inside the validity window.
  Interval derivative_omega_window(int order) const;
  Interval derivative_lambda_window(int order) const;

  ModeIndices mode_indices(double lambda_um) const;
  double effective_index(double lambda_um) const;

  /// Propagation constant n_eff(ω) ω / c in rad/m.
  double beta(double omega) const;

  /// ∂ⁿβ/∂ωⁿ for n in 1..4 by central differences: fourth order for n ≤ 2,
  /// second order for n = 3, 4 on a 4x / 10x widened step.
  double beta_n(double omega, int order) const;

  /// 1/β₁ in m/s.
  double group_velocity(double omega) const;

  double stencil_step(int order) const;

  long double beta_extended(long double omega) const;

 private:
  long double n_eff_extended(long double lambda_um, ModeIndices* out) const;

  FibreGeometry geometry_;
  ModelData data_;
  double step_;
  Interval lambda_window_;
  std::array<long double, 4> v_params_{};
  std::array<long double, 4> w_params_{};
};

/// Dispersion quantities sampled on a wavelength grid (nm).
struct DispersionTable {
  Eigen::ArrayXd lambda_nm;
  Eigen::ArrayXd n_eff;
  Eigen::ArrayXd beta;            // rad/m
  Eigen::ArrayXd beta1;           // s/m
  Eigen::ArrayXd beta2;           // s²/m
  Eigen::ArrayXd group_velocity;  // m/s
};

DispersionTable tabulate_dispersion(const DispersionModel& model, const Eigen::ArrayXd& lambda_nm);

struct ZdwResult {
  double lambda_um = 0.0;
  /// Sign changes of β₂ seen in the search window; >1 means the shortest was returned.
  int root_count = 0;
};

inline constexpr Interval kDefaultZdwWindow{0.4, 2.0};

/// Shortest-wavelength zero of β₂ in `window_um`, located on a 1 nm scan and
/// bisected below 0.01 nm. The window must lie inside the model's second-order
/// derivative window (DomainError otherwise); NotFoundError if β₂ keeps its sign.
ZdwResult find_zdw(const DispersionModel& model, Interval window_um);

/// `window_um` intersected with where β₂ can be evaluated.
Interval usable_zdw_window(const DispersionModel& model, Interval window_um = kDefaultZdwWindow);

}  // namespace bsfwm
