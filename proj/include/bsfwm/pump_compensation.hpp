#pragma once

#include <Eigen/Core>

#include <functional>
#include <string>
#include <vector>

#include "bsfwm/pcf_model.hpp"
#include "bsfwm/phase_matching.hpp"

namespace bsfwm {

enum class PerturbationAxis { pitch, ratio };

std::string to_string(PerturbationAxis axis);
PerturbationAxis perturbation_axis_from_string(const std::string& name);

/// Relative fabrication error on one geometry parameter.
struct Perturbation {
  PerturbationAxis axis = PerturbationAxis::pitch;
  double fraction = 0.0;

  /// Throws ConfigError unless |fraction| < 0.1.
  void validate() const;
  FibreGeometry apply(const FibreGeometry& nominal) const;
};

struct PumpSolution {
  double lambda_p_nm = 0.0;
  /// q–s degeneracy wavelength (ω_p + ω_t)/2 implied by energy conservation.
  double degeneracy_nm = 0.0;
  /// Nontrivial roots seen in the scan; the one whose degeneracy point lies
  /// closest to the preferred frequency is returned.
  int root_count = 0;
  /// The root's bracket touches the scanned window edge.
  bool at_edge = false;
  double residual = 0.0;  // f(ω_p) in rad/m
};

/// Roots of f(ω_p) = β(ω_p) + β(ω_t) − 2β((ω_p + ω_t)/2) over `omega_window`,
/// scanned at 1 nm in wavelength with the trivial root ω_p = ω_t deflated.
/// NotFoundError when no nontrivial root exists.
PumpSolution solve_pump(const std::function<long double(long double)>& beta, Interval omega_window,
                        double omega_t, double preferred_degeneracy_omega);

/// Fixed pump wavelength that places the q–s degeneracy on the phase-matched
/// point for target `lambda_t_nm`; among several roots the one whose degeneracy
/// point is nearest the first ZDW is chosen.
PumpSolution pump_for_target(const DispersionModel& model, double lambda_t_nm);

struct CompensationPoint {
  double fraction = 0.0;
  PerturbationAxis axis = PerturbationAxis::pitch;
  FibreGeometry geometry;
  bool ok = false;
  double lambda_p_nm = 0.0;
  double shift_nm = 0.0;
  std::string message;
};

/// λ_p and its shift from nominal for each perturbation fraction. Failing
/// points are reported with ok = false; the nominal fibre must solve.
std::vector<CompensationPoint> compensation_curve(const DispersionModel& nominal, PerturbationAxis axis,
                                                  const std::vector<double>& fractions, double lambda_t_nm,
                                                  unsigned threads = 1);

struct PerturbedEnvelope {
  Perturbation perturbation;
  FibreGeometry geometry;
  PumpSolution pump;
  EnvelopeResult envelope;
  BandSummary summary;  // span with efficiency ≥ 0.5
};

PerturbedEnvelope perturbed_envelope(const DispersionModel& nominal, const Perturbation& perturbation,
                                     double lambda_t_nm, double pump_fwhm_nm, const Eigen::ArrayXd& s_grid_nm,
                                     const ConversionSetup& setup = {}, unsigned threads = 1);

}  // namespace bsfwm
