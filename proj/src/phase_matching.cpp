#include "bsfwm/phase_matching.hpp"

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "bsfwm/errors.hpp"
#include "bsfwm/parallel.hpp"
#include "bsfwm/units.hpp"

namespace bsfwm {
namespace {

double beta_of(const DispersionModel& model, double omega, const char* leg) {
  try {
    return model.beta(omega);
  } catch (const DomainError& e) {
    throw DomainError(fmt::format("{} at {} nm: {}", leg, nm_from_omega(omega), e.what()));
  }
}

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

}  // namespace

FourWaveSet FourWaveSet::from_nm(double p_nm, double q_nm, double s_nm, double t_nm) {
  FourWaveSet set{omega_from_nm(p_nm), omega_from_nm(q_nm), omega_from_nm(s_nm), omega_from_nm(t_nm)};
  set.validate();
  return set;
}

void FourWaveSet::validate() const {
  if (!(omega_p > 0.0 && omega_q > 0.0 && omega_s > 0.0 && omega_t > 0.0)) {
    throw ConfigError("all four angular frequencies must be positive");
  }
}

void PumpSpec::validate() const {
  if (!(center_nm > 0.0)) throw ConfigError(fmt::format("pump centre {} nm must be positive", center_nm));
  if (!(fwhm_nm > 0.0)) throw ConfigError(fmt::format("pump FWHM {} nm must be positive", fwhm_nm));
}

double PumpSpec::center_omega() const { return omega_from_nm(center_nm); }

double PumpSpec::fwhm_omega() const { return omega_width_from_nm(fwhm_nm, center_nm); }

// exp(−2(Δ/σ)²) = ½ at Δ = FWHM/2.
double PumpSpec::sigma_omega() const { return fwhm_omega() / std::sqrt(2.0 * std::numbers::ln2); }

void ConversionSetup::validate() const {
  if (!(fibre_length_m > 0.0)) throw ConfigError(fmt::format("fibre length {} m must be positive", fibre_length_m));
  const bool powers = p_power.has_value() || q_power.has_value();
  if (powers && !gamma) throw ConfigError("pump powers given without a nonlinear coefficient gamma");
  if (gamma && !powers) throw ConfigError("gamma given without pump powers");
  if ((p_power && *p_power < 0.0) || (q_power && *q_power < 0.0)) {
    throw ConfigError("pump powers must be non-negative");
  }
}

double ConversionSetup::nonlinear_offset() const {
  if (!gamma) return 0.0;
  return 0.5 * *gamma * (q_power.value_or(0.0) - p_power.value_or(0.0));
}

double energy_mismatch(const FourWaveSet& set) {
  return (set.omega_p + set.omega_t) - (set.omega_q + set.omega_s);
}

double linear_phase_mismatch(const FourWaveSet& set, const DispersionModel& model) {
  set.validate();
  const double bp = beta_of(model, set.omega_p, "fixed pump p");
  const double bq = beta_of(model, set.omega_q, "tunable pump q");
  const double bs = beta_of(model, set.omega_s, "source s");
  const double bt = beta_of(model, set.omega_t, "target t");
  return (bp + bt) - (bq + bs);
}

double total_phase_mismatch(const FourWaveSet& set, const DispersionModel& model,
                            const ConversionSetup& setup) {
  setup.validate();
  return 0.5 * linear_phase_mismatch(set, model) + setup.nonlinear_offset();
}

double phasematch_intensity(double delta_kappa, double length_m) {
  const double s = sinc(0.5 * delta_kappa * length_m);
  return s * s;
}

double pump_envelope(double omega_p, const PumpSpec& pump) {
  const double x = (omega_p - pump.center_omega()) / pump.sigma_omega();
  return std::exp(-x * x);
}

double pump_envelope(const FourWaveSet& set, const PumpSpec& pump) {
  return pump_envelope(set.omega_q + set.omega_s - set.omega_t, pump);
}

double gv_symmetry_delta(const DispersionModel& model, double omega0, double detuning) {
  return std::abs(model.group_velocity(omega0 + detuning) - model.group_velocity(omega0 - detuning));
}

SymmetryBandwidth symmetry_bandwidth(const DispersionModel& model, double threshold, Interval zdw_window_um) {
  if (!(threshold >= 0.0)) throw ConfigError(fmt::format("threshold {} m/s must be non-negative", threshold));
  SymmetryBandwidth out;
  out.zdw_um = find_zdw(model, usable_zdw_window(model, zdw_window_um)).lambda_um;
  const double omega0 = omega_from_um(out.zdw_um);
  const auto window = model.derivative_omega_window(1);
  const double edge = std::min(omega0 - window.lo, window.hi - omega0) * (1.0 - 1e-12);
  if (!(edge > 0.0)) {
    out.truncated = true;
    return out;
  }
  // Spacing set by the long-wavelength end, where a fixed δω spans the most nm.
  const double lambda_long_m = um_from_omega(omega0 - edge) * 1e-6;
  const double step = kTwoPiC * 1e-9 / (lambda_long_m * lambda_long_m);
  const auto count = static_cast<long>(std::floor(edge / step));

  double passed = 0.0;
  bool failed = false;
  for (long k = 1; k <= count + 1; ++k) {
    const double detuning = k <= count ? static_cast<double>(k) * step : edge;
    if (!(gv_symmetry_delta(model, omega0, detuning) < threshold)) {
      failed = true;
      break;
    }
    passed = detuning;
  }
  out.truncated = !failed;
  out.max_detuning = passed;
  out.span_um = passed > 0.0 ? um_from_omega(omega0 - passed) - um_from_omega(omega0 + passed) : 0.0;
  return out;
}

PhaseMatchMap phasematch_map(const DispersionModel& model, const ConversionSetup& setup, const PumpSpec& pump,
                             double lambda_t_nm, const Eigen::ArrayXd& q_grid_nm,
                             const Eigen::ArrayXd& s_grid_nm) {
  setup.validate();
  pump.validate();
  if (q_grid_nm.size() == 0 || s_grid_nm.size() == 0) throw ConfigError("phase-matching grids must be non-empty");

  PhaseMatchMap map;
  map.lambda_q_nm = q_grid_nm;
  map.lambda_s_nm = s_grid_nm;
  map.lambda_t_nm = lambda_t_nm;
  map.pump = pump;
  map.setup = setup;

  const double omega_p = pump.center_omega();
  const double omega_t = omega_from_nm(lambda_t_nm);
  const double bp = beta_of(model, omega_p, "fixed pump p");
  const double bt = beta_of(model, omega_t, "target t");
  const Eigen::ArrayXd omega_q = q_grid_nm.unaryExpr([](double l) { return omega_from_nm(l); });
  const Eigen::ArrayXd omega_s = s_grid_nm.unaryExpr([](double l) { return omega_from_nm(l); });
  const Eigen::ArrayXd bq = omega_q.unaryExpr([&](double w) { return beta_of(model, w, "tunable pump q"); });
  const Eigen::ArrayXd bs = omega_s.unaryExpr([&](double w) { return beta_of(model, w, "source s"); });

  const auto nq = q_grid_nm.size();
  const auto ns = s_grid_nm.size();
  map.delta_kappa = 0.5 * (bp + bt) + setup.nonlinear_offset() - 0.5 * bq.replicate(1, ns) -
                    0.5 * bs.transpose().replicate(nq, 1);
  map.energy_mismatch = omega_q.replicate(1, ns) + omega_s.transpose().replicate(nq, 1) - omega_t - omega_p;
  const double length = setup.fibre_length_m;
  map.phi = map.delta_kappa.unaryExpr([length](double dk) { return phasematch_intensity(dk, length); });
  map.alpha = (map.energy_mismatch / pump.sigma_omega()).square().unaryExpr([](double x) { return std::exp(-x); });

  map.zero_mismatch_locus = contour_lines(q_grid_nm, s_grid_nm, map.delta_kappa, 0.0);
  map.energy_locus = contour_lines(q_grid_nm, s_grid_nm, map.energy_mismatch, 0.0);
  return map;
}

LociAgreement compare_loci(const PhaseMatchMap& map, double tolerance_nm) {
  const auto nq = map.lambda_q_nm.size();
  const auto ns = map.lambda_s_nm.size();
  LociAgreement out;
  out.lambda_s_nm = map.lambda_s_nm;
  out.tolerance_nm = tolerance_nm;
  out.energy_lambda_q_nm = Eigen::ArrayXd::Constant(ns, std::numeric_limits<double>::quiet_NaN());
  out.distance_nm = Eigen::ArrayXd::Constant(ns, std::numeric_limits<double>::quiet_NaN());

  const double q_lo = map.lambda_q_nm.minCoeff();
  const double q_hi = map.lambda_q_nm.maxCoeff();
  const double omega_p = map.pump.center_omega();
  const double omega_t = omega_from_nm(map.lambda_t_nm);

  std::optional<Interval> run;
  const auto close_run = [&] {
    if (run) out.coincident_runs.push_back(*run);
    run.reset();
  };
  for (Eigen::Index j = 0; j < ns; ++j) {
    const double omega_q = omega_p + omega_t - omega_from_nm(map.lambda_s_nm[j]);
    const double energy_q = omega_q > 0.0 ? nm_from_omega(omega_q) : -1.0;
    bool coincident = false;
    if (energy_q >= q_lo && energy_q <= q_hi) {
      out.energy_lambda_q_nm[j] = energy_q;
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i + 1 < nq; ++i) {
        const double a = map.delta_kappa(i, j);
        const double b = map.delta_kappa(i + 1, j);
        if (a == 0.0 || std::signbit(a) != std::signbit(b)) {
          const double t = a == b ? 0.0 : a / (a - b);
          const double zero_q = map.lambda_q_nm[i] + t * (map.lambda_q_nm[i + 1] - map.lambda_q_nm[i]);
          best = std::min(best, std::abs(zero_q - energy_q));
        }
      }
      if (std::isfinite(best)) {
        out.distance_nm[j] = best;
        coincident = best <= tolerance_nm;
      }
    }
    if (coincident) {
      if (run) {
        run->hi = map.lambda_s_nm[j];
      } else {
        run = Interval{map.lambda_s_nm[j], map.lambda_s_nm[j]};
      }
    } else {
      close_run();
    }
  }
  close_run();
  return out;
}

namespace {

// Φ·α_p along the energy-conserving line at fixed source and target.
struct EnvelopeObjective {
  const DispersionModel& model;
  double omega_s;
  double omega_t;
  double beta_s_t;  // β_t − β_s
  double nonlinear;
  double length;
  const PumpSpec& pump;

  double delta_kappa(double omega_q) const {
    const double omega_p = omega_q + omega_s - omega_t;
    return 0.5 * (model.beta(omega_p) - model.beta(omega_q) + beta_s_t) + nonlinear;
  }
  double value(double omega_q) const {
    return phasematch_intensity(delta_kappa(omega_q), length) * pump_envelope(omega_q + omega_s - omega_t, pump);
  }
};

struct PointResult {
  double efficiency = 0.0;
  double omega_q = 0.0;
  double phi = 0.0;
  double alpha = 0.0;
  bool clipped = false;
};

PointResult maximise_over_q(const DispersionModel& model, const ConversionSetup& setup, const PumpSpec& pump,
                            double omega_t, double beta_t, double lambda_s_nm) {
  const double omega_s = omega_from_nm(lambda_s_nm);
  const double beta_s = beta_of(model, omega_s, "source s");
  const EnvelopeObjective objective{model, omega_s, omega_t, beta_t - beta_s, setup.nonlinear_offset(),
                                    setup.fibre_length_m, pump};

  const double fwhm = pump.fwhm_omega();
  const double center = pump.center_omega() + omega_t - omega_s;
  const auto valid = model.omega_window();
  const Interval wanted{center - 5.0 * fwhm, center + 5.0 * fwhm};
  const Interval window{std::max({wanted.lo, valid.lo, valid.lo - omega_s + omega_t}),
                        std::min({wanted.hi, valid.hi, valid.hi - omega_s + omega_t})};
  PointResult result;
  result.clipped = window.lo > wanted.lo || window.hi < wanted.hi;
  if (window.empty()) {
    result.clipped = true;
    result.omega_q = center;
    return result;
  }

  const double coarse = fwhm / 10.0;
  // Grid anchored at the energy-conserving point so it is always sampled when in range.
  const auto first = static_cast<long>(std::ceil((window.lo - center) / coarse));
  const auto last = static_cast<long>(std::floor((window.hi - center) / coarse));
  std::vector<double> omegas;
  for (long k = first; k <= last; ++k) omegas.push_back(center + static_cast<double>(k) * coarse);
  if (omegas.empty()) omegas.push_back(0.5 * (window.lo + window.hi));

  std::vector<double> dk(omegas.size());
  const auto consider = [&](double omega_q) {
    const double v = objective.value(omega_q);
    if (v > result.efficiency) {
      result.efficiency = v;
      result.omega_q = omega_q;
    }
  };
  result.omega_q = omegas.front();
  for (std::size_t k = 0; k < omegas.size(); ++k) {
    dk[k] = objective.delta_kappa(omegas[k]);
    consider(omegas[k]);
  }

  std::vector<double> candidates{result.omega_q};
  const auto dk_fn = [&](double w) { return objective.delta_kappa(w); };
  for (std::size_t k = 0; k + 1 < omegas.size(); ++k) {
    if (dk[k] == 0.0) {
      candidates.push_back(omegas[k]);
    } else if (std::signbit(dk[k]) != std::signbit(dk[k + 1]) && dk[k + 1] != 0.0) {
      std::uintmax_t iterations = 100;
      const auto tol = [](double a, double b) { return b - a < 1e3; };
      const auto [a, b] = boost::math::tools::bisect(dk_fn, omegas[k], omegas[k + 1], tol, iterations);
      candidates.push_back(0.5 * (a + b));
    }
  }
  // Near-tangencies: |Δκ| dips toward zero without a sign change.
  for (std::size_t k = 1; k + 1 < omegas.size(); ++k) {
    if (std::abs(dk[k]) <= std::abs(dk[k - 1]) && std::abs(dk[k]) <= std::abs(dk[k + 1]) &&
        std::signbit(dk[k - 1]) == std::signbit(dk[k + 1])) {
      const auto [w, v] = boost::math::tools::brent_find_minima(
          [&](double x) { return std::abs(objective.delta_kappa(x)); }, omegas[k - 1], omegas[k + 1],
          std::numeric_limits<double>::digits / 2);
      (void)v;
      candidates.push_back(w);
    }
  }

  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  // Far from phase matching the optimum sits on one of many narrow sinc side
  // lobes; resample finely enough to resolve every lobe and keep the peaks.
  double max_slope = 0.0;
  for (std::size_t k = 0; k + 1 < omegas.size(); ++k) {
    max_slope = std::max(max_slope, std::abs(dk[k + 1] - dk[k]) / coarse);
  }
  const double lobe_step = max_slope > 0.0 ? kTwoPi / (setup.fibre_length_m * max_slope) / 8.0 : coarse;
  if (lobe_step < coarse && omegas.size() > 1) {
    const auto steps = static_cast<long>(std::ceil(window.width() / lobe_step));
    const double h = window.width() / static_cast<double>(steps);
    std::vector<double> fine(static_cast<std::size_t>(steps) + 1);
    for (long k = 0; k <= steps; ++k) fine[static_cast<std::size_t>(k)] = objective.value(window.lo + k * h);
    const double best = *std::max_element(fine.begin(), fine.end());
    for (std::size_t k = 0; k < fine.size(); ++k) {
      const bool peak = (k == 0 || fine[k] >= fine[k - 1]) && (k + 1 == fine.size() || fine[k] >= fine[k + 1]);
      if (!peak || fine[k] < 0.8 * best) continue;
      const double c = window.lo + static_cast<double>(k) * h;
      const auto [w, v] = boost::math::tools::brent_find_minima([&](double x) { return -objective.value(x); },
                                                                std::max(c - h, window.lo), std::min(c + h, window.hi),
                                                                std::numeric_limits<double>::digits / 2);
      (void)v;
      consider(c);
      consider(w);
    }
  }

  for (const double c : candidates) {
    consider(c);
    const double h = 1e-3 * coarse;
    const double slope = std::abs(objective.delta_kappa(std::min(c + h, window.hi)) -
                                  objective.delta_kappa(std::max(c - h, window.lo))) /
                         (std::min(c + h, window.hi) - std::max(c - h, window.lo));
    const double lobe = slope > 0.0 ? kTwoPi / (setup.fibre_length_m * slope) : coarse;
    const double half = std::min(coarse, lobe);
    const double lo = std::max(c - half, window.lo);
    const double hi = std::min(c + half, window.hi);
    if (!(hi > lo)) continue;
    const auto [w, v] = boost::math::tools::brent_find_minima([&](double x) { return -objective.value(x); }, lo,
                                                              hi, std::numeric_limits<double>::digits / 2);
    (void)v;
    consider(w);
  }
  result.phi = phasematch_intensity(objective.delta_kappa(result.omega_q), setup.fibre_length_m);
  result.alpha = pump_envelope(result.omega_q + omega_s - omega_t, pump);
  return result;
}

}  // namespace

double conversion_bound(const DispersionModel& model, const ConversionSetup& setup, const PumpSpec& pump,
                        double lambda_t_nm, double lambda_s_nm, double lambda_q_nm) {
  setup.validate();
  pump.validate();
  const double omega_q = omega_from_nm(lambda_q_nm);
  const double omega_s = omega_from_nm(lambda_s_nm);
  const double omega_t = omega_from_nm(lambda_t_nm);
  const FourWaveSet set{omega_q + omega_s - omega_t, omega_q, omega_s, omega_t};
  return phasematch_intensity(total_phase_mismatch(set, model, setup), setup.fibre_length_m) *
         pump_envelope(set, pump);
}

EnvelopeResult efficiency_envelope(const DispersionModel& model, const ConversionSetup& setup, const PumpSpec& pump,
                                   double lambda_t_nm, const Eigen::ArrayXd& s_grid_nm, unsigned threads) {
  setup.validate();
  pump.validate();
  if (s_grid_nm.size() == 0) throw ConfigError("source grid must be non-empty");
  const double omega_t = omega_from_nm(lambda_t_nm);
  const double beta_t = beta_of(model, omega_t, "target t");

  const auto n = s_grid_nm.size();
  EnvelopeResult out;
  out.lambda_s_nm = s_grid_nm;
  out.efficiency.resize(n);
  out.best_lambda_q_nm.resize(n);
  out.phi.resize(n);
  out.alpha.resize(n);
  out.clipped.assign(static_cast<std::size_t>(n), false);
  out.lambda_t_nm = lambda_t_nm;
  out.pump = pump;
  out.setup = setup;

  std::vector<PointResult> points(static_cast<std::size_t>(n));
  parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t j) {
    try {
      points[j] = maximise_over_q(model, setup, pump, omega_t, beta_t, s_grid_nm[static_cast<Eigen::Index>(j)]);
    } catch (const ModelBreakdownError&) {
      // The pump search ran into a region where the fit is unphysical.
      const double nan = std::numeric_limits<double>::quiet_NaN();
      points[j] = {nan, nan, nan, nan, true};
    }
  });
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& p = points[static_cast<std::size_t>(j)];
    out.efficiency[j] = p.efficiency;
    out.best_lambda_q_nm[j] = nm_from_omega(p.omega_q);
    out.clipped[static_cast<std::size_t>(j)] = p.clipped;
    out.phi[j] = p.phi;
    out.alpha[j] = p.alpha;
  }
  return out;
}

BandSummary summary_bandwidth(const EnvelopeResult& envelope, double level) {
  BandSummary best;
  const auto n = envelope.efficiency.size();
  Eigen::Index start = -1;
  for (Eigen::Index j = 0; j <= n; ++j) {
    const bool above = j < n && envelope.efficiency[j] >= level;
    if (above && start < 0) start = j;
    if (!above && start >= 0) {
      const double lo = envelope.lambda_s_nm[start];
      const double hi = envelope.lambda_s_nm[j - 1];
      if (hi - lo > best.span_nm || (best.span_nm == 0.0 && best.lo_nm == 0.0)) best = {hi - lo, lo, hi};
      start = -1;
    }
  }
  return best;
}

}  // namespace bsfwm
