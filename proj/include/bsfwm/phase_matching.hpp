#pragma once

#include <Eigen/Core>

#include <optional>
#include <vector>

#include "bsfwm/contour.hpp"
#include "bsfwm/pcf_model.hpp"

namespace bsfwm {

/// Angular frequencies (rad/s) of a Bragg-scattering interaction: fixed pump p,
/// tunable pump q, source s and target t.
struct FourWaveSet {
  double omega_p = 0.0;
  double omega_q = 0.0;
  double omega_s = 0.0;
  double omega_t = 0.0;

  static FourWaveSet from_nm(double p_nm, double q_nm, double s_nm, double t_nm);
  void validate() const;
};

/// Spectrum of the fixed pump: centre wavelength and intensity FWHM, both in nm.
struct PumpSpec {
  double center_nm = 0.0;
  double fwhm_nm = 5.0;

  void validate() const;
  double center_omega() const;
  double fwhm_omega() const;
  /// Field-envelope width: |α_p|² has the configured FWHM.
  double sigma_omega() const;
};

struct ConversionSetup {
  double fibre_length_m = 1.0;
  std::optional<double> gamma;    // W⁻¹ m⁻¹
  std::optional<double> p_power;  // W
  std::optional<double> q_power;  // W

  /// Throws ConfigError unless L > 0, powers ≥ 0, and γ is given iff a power is.
  void validate() const;
  /// ½ γ (P_q − P_p), zero when powers are absent.
  double nonlinear_offset() const;
};

/// (ω_p + ω_t) − (ω_q + ω_s).
double energy_mismatch(const FourWaveSet& set);

/// Δβ = β_p + β_t − β_q − β_s in rad/m. DomainError names the offending wave.
double linear_phase_mismatch(const FourWaveSet& set, const DispersionModel& model);

/// Δκ = Δβ/2 + γ(P_q − P_p)/2.
double total_phase_mismatch(const FourWaveSet& set, const DispersionModel& model,
                            const ConversionSetup& setup);

/// |sinc(Δκ L / 2)|².
double phasematch_intensity(double delta_kappa, double length_m);

/// exp(−((ω_p − ω_p0)/σ_p)²).
double pump_envelope(double omega_p, const PumpSpec& pump);
/// Envelope at the energy-conserving pump frequency ω_q + ω_s − ω_t.
double pump_envelope(const FourWaveSet& set, const PumpSpec& pump);

/// |v_g(ω₀ + δΩ) − v_g(ω₀ − δΩ)| in m/s.
double gv_symmetry_delta(const DispersionModel& model, double omega0, double detuning);

struct SymmetryBandwidth {
  double zdw_um = 0.0;
  /// Total wavelength extent λ(ω₀ − δΩ) − λ(ω₀ + δΩ) of the symmetric window, µm.
  double span_um = 0.0;
  double max_detuning = 0.0;  // rad/s
  /// The symmetric window reached the validity boundary before the threshold.
  bool truncated = false;
};

/// Largest detuning about the first ZDW for which every detuning on a grid of
/// ≤ 1 nm wavelength spacing keeps gv_symmetry_delta below `threshold`.
SymmetryBandwidth symmetry_bandwidth(const DispersionModel& model, double threshold,
                                     Interval zdw_window_um = kDefaultZdwWindow);

/// Phase matching over a (λ_q, λ_s) grid with the fixed pump at `pump.center_nm`.
/// Fields are indexed (q, s).
struct PhaseMatchMap {
  Eigen::ArrayXd lambda_q_nm;
  Eigen::ArrayXd lambda_s_nm;
  double lambda_t_nm = 0.0;
  PumpSpec pump;
  ConversionSetup setup;

  Eigen::ArrayXXd delta_kappa;      // rad/m
  Eigen::ArrayXXd energy_mismatch;  // (ω_q + ω_s − ω_t) − ω_p, rad/s
  Eigen::ArrayXXd phi;
  Eigen::ArrayXXd alpha;

  std::vector<Polyline> zero_mismatch_locus;  // (λ_q, λ_s) in nm
  std::vector<Polyline> energy_locus;
};

PhaseMatchMap phasematch_map(const DispersionModel& model, const ConversionSetup& setup,
                             const PumpSpec& pump, double lambda_t_nm, const Eigen::ArrayXd& q_grid_nm,
                             const Eigen::ArrayXd& s_grid_nm);

/// Row-by-row comparison of the two loci of a map: for each λ_s, the distance
/// in λ_q between the energy-conservation locus and the nearest zero of Δκ.
struct LociAgreement {
  Eigen::ArrayXd lambda_s_nm;
  Eigen::ArrayXd energy_lambda_q_nm;  // NaN when off the λ_q grid
  Eigen::ArrayXd distance_nm;         // NaN when a row has no zero of Δκ
  double tolerance_nm = 0.0;
  /// Maximal λ_s runs over which the loci stay within the tolerance.
  std::vector<Interval> coincident_runs;
};

LociAgreement compare_loci(const PhaseMatchMap& map, double tolerance_nm);

/// Φ·α_p at one (λ_q, λ_s) with the fixed pump taking ω_q + ω_s − ω_t.
double conversion_bound(const DispersionModel& model, const ConversionSetup& setup, const PumpSpec& pump,
                        double lambda_t_nm, double lambda_s_nm, double lambda_q_nm);

struct EnvelopeResult {
  Eigen::ArrayXd lambda_s_nm;
  Eigen::ArrayXd efficiency;
  Eigen::ArrayXd best_lambda_q_nm;
  Eigen::ArrayXd phi;
  Eigen::ArrayXd alpha;
  /// The λ_q search window was cut by the validity boundary at this λ_s. Points
  /// whose search met a breakdown of the fit are also flagged and carry NaN.
  std::vector<bool> clipped;
  double lambda_t_nm = 0.0;
  PumpSpec pump;
  ConversionSetup setup;
};

/// Per source wavelength, the maximum over the tunable pump of Φ·α_p, searched
/// within ±5 pump FWHM of the energy-conserving λ_q.
EnvelopeResult efficiency_envelope(const DispersionModel& model, const ConversionSetup& setup,
                                   const PumpSpec& pump, double lambda_t_nm,
                                   const Eigen::ArrayXd& s_grid_nm, unsigned threads = 1);

struct BandSummary {
  double span_nm = 0.0;
  double lo_nm = 0.0;
  double hi_nm = 0.0;
};

/// Longest contiguous run of λ_s with efficiency ≥ level.
BandSummary summary_bandwidth(const EnvelopeResult& envelope, double level = 0.5);

}  // namespace bsfwm
