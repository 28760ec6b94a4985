#pragma once

#include <json.hpp>

#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "bsfwm/design_sweep.hpp"
#include "bsfwm/pcf_model.hpp"
#include "bsfwm/phase_matching.hpp"
#include "bsfwm/pump_compensation.hpp"

namespace bsfwm {

inline constexpr int kSchemaVersion = 1;

const char* tool_version();

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Provenance block carried by every output file.
struct OutputHeader {
  std::string kind;  // subcommand name, e.g. "envelope"
  KeyValues config;  // every input option, in a replayable form
  KeyValues resolved;
  KeyValues notes;

  std::string schema() const;
  /// `[kind]` followed by `key = value` lines; feeding this back through
  /// `--config` reproduces the run.
  std::string config_ini() const;
};

/// Shortest round-trip text of a double.
std::string format_number(double v);

void write_dispersion_csv(std::ostream& out, const OutputHeader& header, const DispersionTable& table);
nlohmann::json dispersion_json(const OutputHeader& header, const DispersionTable& table);

void write_sweep_csv(std::ostream& out, const OutputHeader& header, const SweepResult& result);
nlohmann::json sweep_json(const OutputHeader& header, const SweepResult& result);
nlohmann::json contours_json(const OutputHeader& header, const std::vector<ContourLevel>& levels);

void write_phasematch_csv(std::ostream& out, const OutputHeader& header, const PhaseMatchMap& map);
nlohmann::json phasematch_json(const OutputHeader& header, const PhaseMatchMap& map);
nlohmann::json loci_json(const OutputHeader& header, const PhaseMatchMap& map);

void write_envelope_csv(std::ostream& out, const OutputHeader& header, const EnvelopeResult& envelope);
nlohmann::json envelope_json(const OutputHeader& header, const EnvelopeResult& envelope);

void write_compensation_csv(std::ostream& out, const OutputHeader& header,
                            const std::vector<CompensationPoint>& curve,
                            const std::vector<BandSummary>& summaries = {});
nlohmann::json compensation_json(const OutputHeader& header, const std::vector<CompensationPoint>& curve,
                                 const std::vector<PerturbedEnvelope>& envelopes = {});

}  // namespace bsfwm
