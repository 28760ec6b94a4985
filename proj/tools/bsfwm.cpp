#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "bsfwm/design_sweep.hpp"
#include "bsfwm/errors.hpp"
#include "bsfwm/grid.hpp"
#include "bsfwm/io.hpp"
#include "bsfwm/pcf_model.hpp"
#include "bsfwm/phase_matching.hpp"
#include "bsfwm/pump_compensation.hpp"

namespace fs = std::filesystem;
using namespace bsfwm;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

// Comma-separated numbers, kept as text so they survive an INI round trip.
std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("{}: '{}' is not a number", what, item));
    }
  }
  if (out.empty()) throw ConfigError(fmt::format("{} is empty", what));
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t k = 0; k < v.size(); ++k) out += (k ? "," : "") + format_number(v[k]);
  return out;
}

// Registers options on a subcommand and remembers how to echo them back.
class Options {
 public:
  explicit Options(CLI::App* app) : app_(app) {}

  CLI::App* app() const { return app_; }

  CLI::Option* number(const std::string& name, double& v, const std::string& help) {
    record(name, [&v] { return std::optional(format_number(v)); });
    return app_->add_option("--" + name, v, help)->capture_default_str();
  }
  CLI::Option* optional_number(const std::string& name, std::optional<double>& v, const std::string& help) {
    record(name, [&v] { return v ? std::optional(format_number(*v)) : std::nullopt; });
    return app_->add_option("--" + name, v, help);
  }
  CLI::Option* text(const std::string& name, std::string& v, const std::string& help, bool omit_empty = false) {
    record(name, [&v, omit_empty] { return omit_empty && v.empty() ? std::nullopt : std::optional(v); });
    return app_->add_option("--" + name, v, help)->capture_default_str();
  }
  CLI::Option* list(const std::string& name, std::string& v, const std::string& help) {
    record(name, [&v, name] { return std::optional("\"" + join(parse_list(v, name)) + "\""); });
    return app_->add_option("--" + name, v, help)->capture_default_str();
  }
  CLI::Option* flag(const std::string& name, bool& v, const std::string& help) {
    record(name, [&v] { return std::optional(std::string(v ? "true" : "false")); });
    return app_->add_flag("--" + name, v, help);
  }

  KeyValues values() const {
    KeyValues out;
    for (const auto& [name, get] : fields_) {
      if (auto v = get()) out.emplace_back(name, *v);
    }
    return out;
  }

 private:
  void record(const std::string& name, std::function<std::optional<std::string>()> get) {
    fields_.emplace_back(name, std::move(get));
  }

  CLI::App* app_;
  std::vector<std::pair<std::string, std::function<std::optional<std::string>()>>> fields_;
};

struct Common {
  std::string format = "csv";
  std::string out;
  unsigned threads = 0;
  bool seedless = false;
  std::string data_dir;
  double derivative_step = DispersionModel::kDefaultDerivativeStep;

  void add(Options& o) {
    o.text("format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    o.app()->add_option("--out", out, "Output file")->required();
    o.app()->add_option("--threads", threads, "Worker threads (0 = all cores)")->capture_default_str();
    o.app()->add_flag("--seedless", seedless, "Reserved; rejected");
    o.text("data-dir", data_dir, "Directory with material and fit tables", true);
    o.number("derivative-step", derivative_step, "Finite-difference step, rad/s");
  }

  void check() const {
    if (seedless) throw ConfigError("--seedless is reserved: no computation here draws random numbers");
  }
  ModelData data() const { return data_dir.empty() ? ModelData::bundled() : ModelData::from_dir(data_dir); }
  unsigned workers() const { return threads ? threads : std::max(1u, std::thread::hardware_concurrency()); }
  bool json() const { return format == "json"; }
};

struct Design {
  double pitch = 1.78;
  double ratio = 0.437;
  std::string perturb_axis = "pitch";
  double perturb_fraction = 0.0;

  void add(Options& o, bool perturbable = true) {
    o.number("pitch", pitch, "Hole pitch, um");
    o.number("ratio", ratio, "Hole diameter over pitch");
    if (perturbable) {
      o.text("perturb-axis", perturb_axis, "Perturbed parameter")->check(CLI::IsMember({"pitch", "ratio"}));
      o.number("perturb-fraction", perturb_fraction, "Relative perturbation of that parameter");
    }
  }

  DispersionModel model(const Common& c) const {
    const Perturbation p{perturbation_axis_from_string(perturb_axis), perturb_fraction};
    p.validate();
    const DispersionModel m(p.apply({pitch, ratio}), c.data(), c.derivative_step);
    if (m.lambda_window().empty()) {
      const auto& fits = m.data().fits;
      throw DomainError(fmt::format("d/pitch {} lies outside the model range [{}, {}]", m.geometry().d_over_pitch,
                                    fits.d_over_pitch.lo, fits.d_over_pitch.hi));
    }
    return m;
  }
};

struct Conversion {
  double target = 1550.0;
  std::string pump = "auto";
  double fwhm = 5.0;
  double length = 1.0;
  std::optional<double> gamma, p_power, q_power;

  void add(Options& o) {
    o.number("target", target, "Target wavelength lambda_t, nm");
    o.text("pump", pump, "Fixed pump wavelength in nm, or auto");
    o.number("fwhm", fwhm, "Pump intensity FWHM, nm");
    o.number("length", length, "Fibre length, m");
    o.optional_number("gamma", gamma, "Nonlinear coefficient, 1/(W m)");
    o.optional_number("p-power", p_power, "Fixed pump power, W");
    o.optional_number("q-power", q_power, "Tunable pump power, W");
  }

  ConversionSetup setup() const {
    ConversionSetup s{length, gamma, p_power, q_power};
    s.validate();
    return s;
  }

  // Resolves the fixed pump before any grid work.
  PumpSpec resolve(const DispersionModel& model, KeyValues& resolved) const {
    if (!(target > 0.0)) throw ConfigError(fmt::format("target wavelength {} nm must be positive", target));
    PumpSpec spec{0.0, fwhm};
    if (pump == "auto") {
      const auto sol = pump_for_target(model, target);
      spec.center_nm = sol.lambda_p_nm;
      resolved.emplace_back("pump_source", "auto");
      resolved.emplace_back("degeneracy_nm", format_number(sol.degeneracy_nm));
      if (sol.root_count > 1) {
        fmt::print(std::cerr, "warning: {} pump solutions; using the one nearest the ZDW\n", sol.root_count);
      }
    } else {
      try {
        std::size_t used = 0;
        spec.center_nm = std::stod(pump, &used);
        if (used != pump.size()) throw std::invalid_argument(pump);
      } catch (const std::exception&) {
        throw ConfigError(fmt::format("pump '{}' must be a wavelength in nm or auto", pump));
      }
      resolved.emplace_back("pump_source", "fixed");
    }
    spec.validate();
    resolved.emplace_back("pump_nm", format_number(spec.center_nm));
    return spec;
  }
};

struct Axis {
  std::string name;
  AxisSpec spec;

  void add(Options& o, const std::string& unit) {
    o.number(name + "-min", spec.lo, fmt::format("{} axis start, {}", name, unit));
    o.number(name + "-max", spec.hi, fmt::format("{} axis end, {}", name, unit));
    o.number(name + "-step", spec.step, fmt::format("{} axis step, {}", name, unit));
  }
};

fs::path sidecar(const fs::path& out, const std::string& suffix) {
  fs::path p = out;
  p.replace_extension();
  return p.string() + suffix;
}

void emit(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError(fmt::format("cannot open {} for writing", path.string()));
  f << content;
  if (!f.flush()) throw ConfigError(fmt::format("failed writing {}", path.string()));
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

template <class Csv>
std::string render(const Common& c, const nlohmann::json& as_json, Csv&& csv) {
  if (c.json()) return dump(as_json);
  std::ostringstream os;
  csv(os);
  return os.str();
}

// Every output is produced in memory first so that failures leave no files.
struct Files {
  std::vector<std::pair<fs::path, std::string>> items;
  void write() const {
    for (const auto& [p, s] : items) emit(p, s);
  }
};

struct DispersionCmd {
  Common common;
  Design design;
  Axis lambda{"lambda", {500.0, 1800.0, 1.0}};

  void add(CLI::App* app, Options& o) {
    (void)app;
    design.add(o);
    lambda.add(o, "nm");
    common.add(o);
  }

  Files run(const KeyValues& config) const {
    common.check();
    const auto grid = lambda.spec.points();
    const auto model = design.model(common);
    for (const double l : {grid[0], grid[grid.size() - 1]}) {
      const auto v = check_validity(model.geometry(), l * 1e-3, model.data());
      if (!v.ok) throw DomainError(fmt::format("wavelength {} nm: {}", l, v.reason));
    }
    OutputHeader h{"dispersion", config, {}, {}};
    const auto table = tabulate_dispersion(model, grid);
    const auto window = usable_zdw_window(model);
    std::optional<ZdwResult> zdw;
    if (!window.empty()) {
      try {
        zdw = find_zdw(model, window);
      } catch (const NotFoundError&) {
      }
    }
    if (zdw) {
      h.resolved.emplace_back("zdw_um", format_number(zdw->lambda_um));
      fmt::print("ZDW: {:.4f} µm\n", zdw->lambda_um);
    } else {
      h.resolved.emplace_back("zdw_um", "none");
      fmt::print("ZDW: none in [{}, {}] µm\n", window.lo, window.hi);
    }
    Files f;
    f.items.emplace_back(common.out, render(common, dispersion_json(h, table),
                                            [&](std::ostream& os) { write_dispersion_csv(os, h, table); }));
    return f;
  }
};

struct SymmetryMapCmd {
  Common common;
  SweepGrid grid;
  Axis pitch{"pitch", {0.8, 3.0, 0.02}};
  Axis ratio{"ratio", {0.25, 0.7, 0.005}};
  std::string levels = "0.8,0.9,1.0,1.1,1.2";

  void add(CLI::App* app, Options& o) {
    (void)app;
    pitch.add(o, "um");
    ratio.add(o, "d/pitch");
    o.number("threshold", grid.threshold, "Group-velocity symmetry threshold, m/s");
    o.list("levels", levels, "ZDW contour levels, um, comma separated");
    common.add(o);
  }

  Files run(const KeyValues& config) const {
    common.check();
    const auto level_values = parse_list(levels, "levels");
    SweepGrid g = grid;
    g.pitch_um = pitch.spec;
    g.d_over_pitch = ratio.spec;
    g.validate();
    ModelConfig mc{common.data(), common.derivative_step, kDefaultZdwWindow};
    const auto result = run_sweep(g, mc, common.workers());
    OutputHeader h{"symmetry-map", config, {}, {}};
    const auto with_zdw = std::count_if(result.cells.begin(), result.cells.end(),
                                        [](const SweepCell& c) { return c.zdw_um.has_value(); });
    h.resolved.emplace_back("cells", std::to_string(result.cells.size()));
    h.resolved.emplace_back("cells_with_zdw", std::to_string(with_zdw));
    Files f;
    f.items.emplace_back(common.out, render(common, sweep_json(h, result),
                                            [&](std::ostream& os) { write_sweep_csv(os, h, result); }));
    if (with_zdw >= 4 && result.pitch_um.size() >= 2 && result.d_over_pitch.size() >= 2) {
      f.items.emplace_back(sidecar(common.out, ".contours.json"),
                           dump(contours_json(h, extract_zdw_contours(result, level_values))));
    } else {
      fmt::print(std::cerr, "warning: grid too small for ZDW contours; none written\n");
    }
    return f;
  }
};

void warn_clipped(const std::vector<bool>& clipped, const Eigen::ArrayXd& s) {
  std::size_t n = 0;
  for (bool c : clipped) n += c;
  if (n) {
    fmt::print(std::cerr, "warning: {} of {} source points had the pump search clipped by the model range ({}..{} nm)\n",
               n, clipped.size(), s[0], s[s.size() - 1]);
  }
}

struct PhasematchCmd {
  Common common;
  Design design;
  Conversion conv;
  Axis q{"q", {600.0, 1600.0, 2.0}};
  Axis s{"s", {600.0, 1600.0, 2.0}};

  void add(CLI::App* app, Options& o) {
    (void)app;
    design.add(o);
    conv.add(o);
    q.add(o, "nm");
    s.add(o, "nm");
    common.add(o);
  }

  Files run(const KeyValues& config) const {
    common.check();
    const auto qg = q.spec.points();
    const auto sg = s.spec.points();
    const auto setup = conv.setup();
    const auto model = design.model(common);
    OutputHeader h{"phasematch", config, {}, {}};
    const auto pump = conv.resolve(model, h.resolved);
    const auto map = phasematch_map(model, setup, pump, conv.target, qg, sg);
    const auto bad = (!map.delta_kappa.isFinite()).count();
    if (bad) fmt::print(std::cerr, "warning: {} grid points lie outside the model range and are left empty\n", bad);
    Files f;
    f.items.emplace_back(common.out, render(common, phasematch_json(h, map),
                                            [&](std::ostream& os) { write_phasematch_csv(os, h, map); }));
    f.items.emplace_back(sidecar(common.out, ".loci.json"), dump(loci_json(h, map)));
    return f;
  }
};

struct EnvelopeCmd {
  Common common;
  Design design;
  Conversion conv;
  Axis s{"s", {700.0, 1500.0, 2.0}};

  void add(CLI::App* app, Options& o) {
    (void)app;
    design.add(o);
    conv.add(o);
    s.add(o, "nm");
    common.add(o);
  }

  Files run(const KeyValues& config) const {
    common.check();
    const auto sg = s.spec.points();
    const auto setup = conv.setup();
    const auto model = design.model(common);
    OutputHeader h{"envelope", config, {}, {}};
    const auto pump = conv.resolve(model, h.resolved);
    const auto env = efficiency_envelope(model, setup, pump, conv.target, sg, common.workers());
    warn_clipped(env.clipped, sg);
    const auto band = summary_bandwidth(env);
    h.resolved.emplace_back("band50_span_nm", format_number(band.span_nm));
    h.resolved.emplace_back("band50_lo_nm", format_number(band.lo_nm));
    h.resolved.emplace_back("band50_hi_nm", format_number(band.hi_nm));
    Files f;
    f.items.emplace_back(common.out, render(common, envelope_json(h, env),
                                            [&](std::ostream& os) { write_envelope_csv(os, h, env); }));
    return f;
  }
};

struct CompensateCmd {
  Common common;
  Design design;
  double target = 1550.0;
  std::string axis = "pitch";
  std::string fractions = "-0.01,-0.005,0,0.005,0.01";
  bool envelopes = false;
  double fwhm = 5.0;
  double length = 1.0;
  Axis s{"s", {700.0, 1500.0, 2.0}};

  void add(CLI::App* app, Options& o) {
    (void)app;
    design.add(o, false);
    o.number("target", target, "Target wavelength lambda_t, nm");
    o.text("axis", axis, "Perturbed parameter")->check(CLI::IsMember({"pitch", "ratio"}));
    o.list("fractions", fractions, "Relative perturbations, comma separated");
    o.flag("envelopes", envelopes, "Also compute the conversion envelope at each perturbation");
    o.number("fwhm", fwhm, "Pump intensity FWHM, nm (with --envelopes)");
    o.number("length", length, "Fibre length, m (with --envelopes)");
    s.add(o, "nm");
    common.add(o);
  }

  Files run(const KeyValues& config) const {
    common.check();
    const auto fr = parse_list(fractions, "fractions");
    const auto ax = perturbation_axis_from_string(axis);
    for (double x : fr) Perturbation{ax, x}.validate();
    const ConversionSetup setup{length, std::nullopt, std::nullopt, std::nullopt};
    setup.validate();
    Eigen::ArrayXd sg;
    if (envelopes) sg = s.spec.points();
    const auto model = design.model(common);
    OutputHeader h{"compensate", config, {}, {}};
    const auto curve = compensation_curve(model, ax, fr, target, common.workers());
    const auto nominal = pump_for_target(model, target);
    h.resolved.emplace_back("pump_nm", format_number(nominal.lambda_p_nm));
    for (const auto& p : curve) {
      if (!p.ok) fmt::print(std::cerr, "warning: fraction {}: {}\n", p.fraction, p.message);
    }
    std::vector<PerturbedEnvelope> envs;
    std::vector<BandSummary> bands;
    if (envelopes) {
      for (const auto& p : curve) {
        if (p.ok) {
          envs.push_back(perturbed_envelope(model, {ax, p.fraction}, target, fwhm, sg, setup, common.workers()));
          bands.push_back(envs.back().summary);
        } else {
          const double nan = std::nan("");
          bands.push_back({nan, nan, nan});
        }
      }
    }
    Files f;
    f.items.emplace_back(common.out, render(common, compensation_json(h, curve, envs), [&](std::ostream& os) {
                           write_compensation_csv(os, h, curve, bands);
                         }));
    return f;
  }
};

template <class Cmd>
void attach(CLI::App& app, const std::string& name, const std::string& help, Cmd& cmd,
            std::vector<std::pair<CLI::App*, std::function<Files()>>>& runners) {
  auto* sub = app.add_subcommand(name, help);
  auto opts = std::make_shared<Options>(sub);
  cmd.add(sub, *opts);
  runners.emplace_back(sub, [&cmd, opts] { return cmd.run(opts->values()); });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bragg-scattering four-wave mixing design tool for photonic crystal fibres", "bsfwm"};
  app.set_version_flag("--version", tool_version());
  app.set_config("--config", "", "INI file; a [subcommand] section holds its options; flags override it");
  app.fallthrough();
  app.require_subcommand(1);

  DispersionCmd dispersion;
  SymmetryMapCmd symmetry_map;
  PhasematchCmd phasematch;
  EnvelopeCmd envelope;
  CompensateCmd compensate;
  std::vector<std::pair<CLI::App*, std::function<Files()>>> runners;
  attach(app, "dispersion", "Effective index and dispersion of one design", dispersion, runners);
  attach(app, "symmetry-map", "ZDW and symmetry bandwidth over a design grid", symmetry_map, runners);
  attach(app, "phasematch", "Phase mismatch and pump overlap over a (lambda_q, lambda_s) grid", phasematch, runners);
  attach(app, "envelope", "Best conversion per source wavelength", envelope, runners);
  attach(app, "compensate", "Fixed pump shift that compensates fabrication errors", compensate, runners);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    for (const auto& [sub, run] : runners) {
      if (sub->parsed()) {
        run().write();
        return 0;
      }
    }
  } catch (const NotFoundError& e) {
    fmt::print(std::cerr, "error: no solution: {}\n", e.what());
    return kExitSolver;
  } catch (const Error& e) {
    fmt::print(std::cerr, "error: {}\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    fmt::print(std::cerr, "error: {}\n", e.what());
    return 1;
  }
  return kExitConfig;
}
