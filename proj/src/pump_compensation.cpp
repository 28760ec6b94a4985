#include "bsfwm/pump_compensation.hpp"

#include <boost/math/tools/roots.hpp>
#include <fmt/format.h>

#include <cmath>
#include <limits>

#include "bsfwm/errors.hpp"
#include "bsfwm/parallel.hpp"
#include "bsfwm/units.hpp"

namespace bsfwm {

std::string to_string(PerturbationAxis axis) { return axis == PerturbationAxis::pitch ? "pitch" : "ratio"; }

PerturbationAxis perturbation_axis_from_string(const std::string& name) {
  if (name == "pitch") return PerturbationAxis::pitch;
  if (name == "ratio" || name == "d_over_pitch") return PerturbationAxis::ratio;
  throw ConfigError(fmt::format("unknown perturbation axis '{}' (expected pitch or ratio)", name));
}

void Perturbation::validate() const {
  if (!(std::abs(fraction) < 0.1)) {
    throw ConfigError(fmt::format("perturbation fraction {} must satisfy |f| < 0.1", fraction));
  }
}

FibreGeometry Perturbation::apply(const FibreGeometry& nominal) const {
  validate();
  FibreGeometry g = nominal;
  if (axis == PerturbationAxis::pitch) {
    g.pitch_um *= 1.0 + fraction;
  } else {
    g.d_over_pitch *= 1.0 + fraction;
  }
  return g;
}

PumpSolution solve_pump(const std::function<long double(long double)>& beta, Interval omega_window,
                        double omega_t, double preferred_degeneracy_omega) {
  if (omega_window.empty() || !omega_window.contains(omega_t)) {
    throw DomainError(fmt::format("target {} nm outside the pump search window", nm_from_omega(omega_t)));
  }
  const long double beta_t = beta(omega_t);
  const auto f = [&](double omega_p) -> double {
    return static_cast<double>(beta(omega_p) + beta_t - 2.0L * beta(0.5L * (omega_p + omega_t)));
  };

  const double lambda_t_nm = nm_from_omega(omega_t);
  const double exclusion = omega_width_from_nm(0.5, lambda_t_nm);
  const double lo_nm = std::ceil(nm_from_omega(omega_window.hi));
  const double hi_nm = std::floor(nm_from_omega(omega_window.lo));

  struct Sample {
    double omega;
    double value;
  };
  // Stretches where the fit breaks down are gaps in the scan, not failures.
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<Sample> samples;
  for (double l = lo_nm; l <= hi_nm; l += 1.0) {
    const double w = omega_from_nm(l);
    double value = nan;
    if (std::abs(w - omega_t) >= exclusion) {
      try {
        value = f(w);
      } catch (const DomainError&) {
      }
    }
    samples.push_back({w, value});
  }

  const double tolerance = 1e-10 * static_cast<double>(beta_t);
  PumpSolution best;
  double best_distance = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < samples.size(); ++k) {
    const auto& a = samples[k];
    const auto& b = samples[k + 1];
    if (std::isnan(a.value) || std::isnan(b.value)) continue;
    if (a.value != 0.0 && std::signbit(a.value) == std::signbit(b.value)) continue;
    if (b.value == 0.0 && k + 2 < samples.size()) continue;  // counted with the next bracket
    double root = a.value == 0.0 ? a.omega : b.omega;
    if (a.value != 0.0 && b.value != 0.0) {
      std::uintmax_t iterations = 200;
      const auto done = [&](double x, double y) {
        return std::abs(y - x) < 1e-12 * std::abs(x) || std::abs(f(0.5 * (x + y))) < tolerance;
      };
      const auto [x, y] = boost::math::tools::bisect(f, b.omega, a.omega, done, iterations);
      root = 0.5 * (x + y);
    }
    ++best.root_count;
    const double degeneracy = 0.5 * (root + omega_t);
    const double distance = std::abs(degeneracy - preferred_degeneracy_omega);
    if (distance < best_distance) {
      best_distance = distance;
      best.lambda_p_nm = nm_from_omega(root);
      best.degeneracy_nm = nm_from_omega(degeneracy);
      best.at_edge = k == 0 || k + 2 == samples.size();
      best.residual = f(root);
    }
  }
  if (best.root_count == 0) {
    throw NotFoundError(fmt::format("no nontrivial pump wavelength phase-matches target {} nm in [{}, {}] nm",
                                    lambda_t_nm, lo_nm, hi_nm));
  }
  return best;
}

PumpSolution pump_for_target(const DispersionModel& model, double lambda_t_nm) {
  const double omega_t = omega_from_nm(lambda_t_nm);
  if (auto valid = model.check(lambda_t_nm * 1e-3); !valid) {
    throw DomainError(fmt::format("target {} nm: {}", lambda_t_nm, valid.reason));
  }
  const auto zdw = find_zdw(model, usable_zdw_window(model));
  return solve_pump([&model](long double w) { return model.beta_extended(w); }, model.omega_window(), omega_t,
                    omega_from_um(zdw.lambda_um));
}

std::vector<CompensationPoint> compensation_curve(const DispersionModel& nominal, PerturbationAxis axis,
                                                  const std::vector<double>& fractions, double lambda_t_nm,
                                                  unsigned threads) {
  const double nominal_pump = pump_for_target(nominal, lambda_t_nm).lambda_p_nm;
  std::vector<CompensationPoint> points(fractions.size());
  parallel_for(fractions.size(), threads, [&](std::size_t k) {
    auto& p = points[k];
    p.fraction = fractions[k];
    p.axis = axis;
    try {
      const Perturbation perturbation{axis, fractions[k]};
      p.geometry = perturbation.apply(nominal.geometry());
      p.lambda_p_nm = pump_for_target(nominal.with_geometry(p.geometry), lambda_t_nm).lambda_p_nm;
      p.shift_nm = p.lambda_p_nm - nominal_pump;
      p.ok = true;
    } catch (const Error& e) {
      p.ok = false;
      p.message = e.what();
    }
  });
  return points;
}

PerturbedEnvelope perturbed_envelope(const DispersionModel& nominal, const Perturbation& perturbation,
                                     double lambda_t_nm, double pump_fwhm_nm, const Eigen::ArrayXd& s_grid_nm,
                                     const ConversionSetup& setup, unsigned threads) {
  PerturbedEnvelope out;
  out.perturbation = perturbation;
  out.geometry = perturbation.apply(nominal.geometry());
  const auto model = nominal.with_geometry(out.geometry);
  out.pump = pump_for_target(model, lambda_t_nm);
  const PumpSpec pump{out.pump.lambda_p_nm, pump_fwhm_nm};
  out.envelope = efficiency_envelope(model, setup, pump, lambda_t_nm, s_grid_nm, threads);
  out.summary = summary_bandwidth(out.envelope, 0.5);
  return out;
}

}  // namespace bsfwm
