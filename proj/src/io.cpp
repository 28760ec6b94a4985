#include "bsfwm/io.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <cmath>

namespace bsfwm {

namespace {

using nlohmann::json;

constexpr const char* kDispersionUnits =
    "lambda_nm=nm n_eff=1 beta=rad/m beta1=s/m beta2=s^2/m vg=m/s";
constexpr const char* kSweepUnits = "pitch_um=um d_over_pitch=1 zdw_um=um bandwidth_um=um threshold=m/s";
constexpr const char* kMapUnits = "lambda_q_nm=nm lambda_s_nm=nm delta_kappa=rad/m phi=1 alpha_p=1 product=1";
constexpr const char* kEnvelopeUnits = "lambda_q_nm=nm lambda_s_nm=nm phi=1 alpha_p=1 product=1";
constexpr const char* kCompensationUnits =
    "fraction=1 pitch_um=um d_over_pitch=1 lambda_p_nm=nm delta_lambda_p_nm=nm band_nm=nm";

void write_header(std::ostream& out, const OutputHeader& h, const char* units) {
  fmt::print(out, "# schema = {}\n", h.schema());
  fmt::print(out, "# tool_version = {}\n", tool_version());
  fmt::print(out, "# units = {}\n", units);
  fmt::print(out, "#@ [{}]\n", h.kind);
  for (const auto& [k, v] : h.config) fmt::print(out, "#@ {} = {}\n", k, v);
  for (const auto& [k, v] : h.resolved) fmt::print(out, "# resolved.{} = {}\n", k, v);
  for (const auto& [k, v] : h.notes) fmt::print(out, "# note.{} = {}\n", k, v);
}

std::string cell(double v) { return std::isfinite(v) ? format_number(v) : std::string(); }

std::string cell(const std::optional<double>& v) { return v ? cell(*v) : std::string(); }

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json header_json(const OutputHeader& h, const char* units) {
  json config = json::object();
  for (const auto& [k, v] : h.config) config[k] = v;
  json resolved = json::object();
  for (const auto& [k, v] : h.resolved) resolved[k] = v;
  json notes = json::object();
  for (const auto& [k, v] : h.notes) notes[k] = v;
  return {{"schema", h.schema()},         {"tool_version", tool_version()}, {"subcommand", h.kind},
          {"units", units},               {"config", config},             {"config_ini", h.config_ini()},   {"resolved", resolved},
          {"notes", notes}};
}

json array(const Eigen::ArrayXd& a) {
  json out = json::array();
  for (Eigen::Index k = 0; k < a.size(); ++k) out.push_back(number_or_null(a[k]));
  return out;
}

json matrix(const Eigen::ArrayXXd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(number_or_null(m(i, j)));
    out.push_back(std::move(row));
  }
  return out;
}

json polylines(const std::vector<Polyline>& lines) {
  json out = json::array();
  for (const auto& line : lines) {
    json pts = json::array();
    for (const auto& p : line) pts.push_back({p.x, p.y});
    out.push_back(std::move(pts));
  }
  return out;
}

json pump_json(const PumpSpec& pump) { return {{"center_nm", pump.center_nm}, {"fwhm_nm", pump.fwhm_nm}}; }

}  // namespace

const char* tool_version() { return BSFWM_VERSION; }

std::string OutputHeader::schema() const { return fmt::format("bsfwm.{}/{}", kind, kSchemaVersion); }

std::string OutputHeader::config_ini() const {
  std::string out = fmt::format("[{}]\n", kind);
  for (const auto& [k, v] : config) out += fmt::format("{} = {}\n", k, v);
  return out;
}

std::string format_number(double v) { return fmt::format("{}", v); }

void write_dispersion_csv(std::ostream& out, const OutputHeader& header, const DispersionTable& t) {
  write_header(out, header, kDispersionUnits);
  out << "lambda_nm,n_eff,beta,beta1,beta2,vg\n";
  for (Eigen::Index k = 0; k < t.lambda_nm.size(); ++k) {
    fmt::print(out, "{},{},{},{},{},{}\n", cell(t.lambda_nm[k]), cell(t.n_eff[k]), cell(t.beta[k]),
               cell(t.beta1[k]), cell(t.beta2[k]), cell(t.group_velocity[k]));
  }
}

json dispersion_json(const OutputHeader& header, const DispersionTable& t) {
  json j = header_json(header, kDispersionUnits);
  j["data"] = {{"lambda_nm", array(t.lambda_nm)}, {"n_eff", array(t.n_eff)}, {"beta", array(t.beta)},
               {"beta1", array(t.beta1)},         {"beta2", array(t.beta2)}, {"vg", array(t.group_velocity)}};
  return j;
}

void write_sweep_csv(std::ostream& out, const OutputHeader& header, const SweepResult& r) {
  write_header(out, header, kSweepUnits);
  out << "pitch_um,d_over_pitch,zdw_um,bandwidth_um,status\n";
  for (const auto& c : r.cells) {
    fmt::print(out, "{},{},{},{},{}\n", cell(c.pitch_um), cell(c.d_over_pitch), cell(c.zdw_um),
               cell(c.bandwidth_um), to_string(c.status));
  }
}

json sweep_json(const OutputHeader& header, const SweepResult& r) {
  json j = header_json(header, kSweepUnits);
  json cells = json::array();
  for (const auto& c : r.cells) {
    json e = {{"pitch_um", c.pitch_um},
              {"d_over_pitch", c.d_over_pitch},
              {"zdw_um", c.zdw_um ? json(*c.zdw_um) : json(nullptr)},
              {"bandwidth_um", c.bandwidth_um ? json(*c.bandwidth_um) : json(nullptr)},
              {"status", to_string(c.status)}};
    if (!c.note.empty()) e["note"] = c.note;
    cells.push_back(std::move(e));
  }
  j["data"] = {{"pitch_um", array(r.pitch_um)},
               {"d_over_pitch", array(r.d_over_pitch)},
               {"threshold_m_per_s", r.threshold},
               {"cells", cells}};
  return j;
}

json contours_json(const OutputHeader& header, const std::vector<ContourLevel>& levels) {
  json j = header_json(header, "pitch_um=um d_over_pitch=1 zdw_um=um");
  json out = json::array();
  for (const auto& l : levels) out.push_back({{"zdw_um", l.level}, {"lines", polylines(l.lines)}});
  j["data"] = {{"axes", {"pitch_um", "d_over_pitch"}}, {"levels", out}};
  return j;
}

void write_phasematch_csv(std::ostream& out, const OutputHeader& header, const PhaseMatchMap& m) {
  write_header(out, header, kMapUnits);
  out << "lambda_q_nm,lambda_s_nm,delta_kappa,phi,alpha_p,product\n";
  for (Eigen::Index i = 0; i < m.lambda_q_nm.size(); ++i) {
    for (Eigen::Index j = 0; j < m.lambda_s_nm.size(); ++j) {
      fmt::print(out, "{},{},{},{},{},{}\n", cell(m.lambda_q_nm[i]), cell(m.lambda_s_nm[j]),
                 cell(m.delta_kappa(i, j)), cell(m.phi(i, j)), cell(m.alpha(i, j)),
                 cell(m.phi(i, j) * m.alpha(i, j)));
    }
  }
}

json phasematch_json(const OutputHeader& header, const PhaseMatchMap& m) {
  json j = header_json(header, kMapUnits);
  j["data"] = {{"lambda_q_nm", array(m.lambda_q_nm)},
               {"lambda_s_nm", array(m.lambda_s_nm)},
               {"lambda_t_nm", m.lambda_t_nm},
               {"pump", pump_json(m.pump)},
               {"delta_kappa", matrix(m.delta_kappa)},
               {"phi", matrix(m.phi)},
               {"alpha_p", matrix(m.alpha)},
               {"product", matrix(m.phi * m.alpha)}};
  return j;
}

json loci_json(const OutputHeader& header, const PhaseMatchMap& m) {
  json j = header_json(header, "lambda_q_nm=nm lambda_s_nm=nm");
  j["data"] = {{"axes", {"lambda_q_nm", "lambda_s_nm"}},
               {"zero_mismatch", polylines(m.zero_mismatch_locus)},
               {"energy_conservation", polylines(m.energy_locus)}};
  return j;
}

void write_envelope_csv(std::ostream& out, const OutputHeader& header, const EnvelopeResult& e) {
  write_header(out, header, kEnvelopeUnits);
  out << "lambda_q_nm,lambda_s_nm,phi,alpha_p,product,clipped\n";
  for (Eigen::Index k = 0; k < e.lambda_s_nm.size(); ++k) {
    fmt::print(out, "{},{},{},{},{},{}\n", cell(e.best_lambda_q_nm[k]), cell(e.lambda_s_nm[k]), cell(e.phi[k]),
               cell(e.alpha[k]), cell(e.efficiency[k]), e.clipped[static_cast<std::size_t>(k)] ? 1 : 0);
  }
}

json envelope_json(const OutputHeader& header, const EnvelopeResult& e) {
  json j = header_json(header, kEnvelopeUnits);
  json clipped = json::array();
  for (bool c : e.clipped) clipped.push_back(c);
  j["data"] = {{"lambda_s_nm", array(e.lambda_s_nm)},
               {"lambda_q_nm", array(e.best_lambda_q_nm)},
               {"phi", array(e.phi)},
               {"alpha_p", array(e.alpha)},
               {"product", array(e.efficiency)},
               {"clipped", clipped},
               {"lambda_t_nm", e.lambda_t_nm},
               {"pump", pump_json(e.pump)}};
  return j;
}

void write_compensation_csv(std::ostream& out, const OutputHeader& header, const std::vector<CompensationPoint>& curve,
                            const std::vector<BandSummary>& summaries) {
  write_header(out, header, kCompensationUnits);
  out << "fraction,axis,pitch_um,d_over_pitch,lambda_p_nm,delta_lambda_p_nm,status";
  if (!summaries.empty()) out << ",band_span_nm,band_lo_nm,band_hi_nm";
  out << "\n";
  for (std::size_t k = 0; k < curve.size(); ++k) {
    const auto& p = curve[k];
    const double nan = std::nan("");
    fmt::print(out, "{},{},{},{},{},{},{}", cell(p.fraction), to_string(p.axis), cell(p.geometry.pitch_um),
               cell(p.geometry.d_over_pitch), cell(p.ok ? p.lambda_p_nm : nan), cell(p.ok ? p.shift_nm : nan),
               p.ok ? "ok" : "no-solution");
    if (!summaries.empty()) {
      const auto& b = summaries[k];
      fmt::print(out, ",{},{},{}", cell(b.span_nm), cell(b.lo_nm), cell(b.hi_nm));
    }
    out << "\n";
  }
}

json compensation_json(const OutputHeader& header, const std::vector<CompensationPoint>& curve,
                       const std::vector<PerturbedEnvelope>& envelopes) {
  json j = header_json(header, kCompensationUnits);
  json points = json::array();
  for (const auto& p : curve) {
    json e = {{"fraction", p.fraction},
              {"axis", to_string(p.axis)},
              {"pitch_um", p.geometry.pitch_um},
              {"d_over_pitch", p.geometry.d_over_pitch},
              {"lambda_p_nm", p.ok ? json(p.lambda_p_nm) : json(nullptr)},
              {"delta_lambda_p_nm", p.ok ? json(p.shift_nm) : json(nullptr)},
              {"status", p.ok ? "ok" : "no-solution"}};
    if (!p.message.empty()) e["message"] = p.message;
    points.push_back(std::move(e));
  }
  j["data"] = {{"points", points}};
  if (!envelopes.empty()) {
    json env = json::array();
    for (const auto& pe : envelopes) {
      env.push_back({{"fraction", pe.perturbation.fraction},
                     {"lambda_p_nm", pe.pump.lambda_p_nm},
                     {"band", {{"span_nm", pe.summary.span_nm}, {"lo_nm", pe.summary.lo_nm}, {"hi_nm", pe.summary.hi_nm}}},
                     {"lambda_s_nm", array(pe.envelope.lambda_s_nm)},
                     {"product", array(pe.envelope.efficiency)}});
    }
    j["data"]["envelopes"] = env;
  }
  return j;
}

}  // namespace bsfwm
