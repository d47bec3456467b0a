#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fwm/oracle.hpp"
#include "fwm/witness.hpp"

namespace fwm {

struct GtGrid {
  double start = 0.0;
  double stop = 0.1;
  int count = 400;

  std::vector<double> values() const;
  bool operator==(const GtGrid&) const = default;
};

/// One criterion over several mode sets and (m, n) orders.
struct WitnessGroup {
  Criterion criterion = Criterion::HZ1;
  std::vector<std::string> modes;
  std::vector<std::pair<int, int>> orders{{1, 1}};

  bool operator==(const WitnessGroup&) const = default;
};

struct OracleSettings {
  bool enabled = false;
  std::optional<Occupations> cutoffs;
  Integrator integrator = Integrator::Spectral;
  double tolerance = 1e-11;
  /// Coupling ladder for `compare`; empty means {g, g/2, g/4}.
  std::vector<double> ladder;

  bool operator==(const OracleSettings&) const = default;
};

struct RunConfig {
  std::string name;
  ModelParams params;
  double alpha_abs = 0.0;
  std::vector<double> phis{0.0};
  cplx beta{0.0, 0.0};
  cplx gamma{0.0, 0.0};
  GtGrid grid;
  std::vector<WitnessGroup> witnesses;
  Formulation formulation = Formulation::Corrected;
  OracleSettings oracle;
  std::string out_path;
  std::string format = "csv";

  /// Throws ConfigError naming the offending field.
  void validate() const;
  std::vector<WitnessId> witness_ids() const;
  CoherentInput input(double phi) const;

  bool operator==(const RunConfig&) const = default;
};

nlohmann::json to_json(const RunConfig& config);
/// Accepts either full frequencies or the {delta, g} shorthand under
/// "params"; the shorthand expands to (delta/2, 0, 0).
RunConfig config_from_json(const nlohmann::json& j);

/// Sets a dotted path such as "input.alpha_abs" in a config document.  The
/// value is parsed as JSON when possible and kept as a string otherwise.
void apply_override(nlohmann::json& doc, const std::string& dotted_path, const std::string& value);

/// Named figure configurations, in order fig2..fig5.
std::vector<RunConfig> presets();
RunConfig preset(const std::string& name);

struct SweepRow {
  double gt = 0.0;
  double phi = 0.0;
  WitnessId id;
  double value = 0.0;
  bool entangled = false;
  /// "perturbative", "oracle", or "oracle-failed" (value is NaN)
  std::string source;
};

struct SummaryEntry {
  WitnessId id;
  double phi = 0.0;
  std::string source;
  /// First crossing from >= 0 to < 0, linearly interpolated in gt.
  std::optional<double> onset;
  bool negative_at_start = false;
  std::size_t negative_points = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<SummaryEntry> summary;
  std::size_t witnesses_evaluated = 0;
  std::vector<std::string> failures;
};

/// Rows ordered by (witness, phi, gt), perturbative before oracle.
SweepResult run_sweep(const RunConfig& config, unsigned workers = 1);

struct CompareResult {
  std::vector<ComparisonReport> reports;  ///< per (phi, witness)
  bool all_passed = false;
};

/// Throws ConfigError("compare requires oracle") when the oracle is off.
CompareResult run_compare(const RunConfig& config, unsigned workers = 1);

void write_csv(std::ostream& os, const std::vector<SweepRow>& rows);
nlohmann::json sweep_to_json(const SweepResult& result);
std::string summary_text(const SweepResult& result);

nlohmann::json compare_to_json(const CompareResult& result);
void write_compare_csv(std::ostream& os, const CompareResult& result);
std::string compare_summary_text(const CompareResult& result);

/// %.17g
std::string format_double(double v);

}  // namespace fwm
