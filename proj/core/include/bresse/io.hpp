#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "bresse/discretize.hpp"
#include "bresse/evolve.hpp"
#include "bresse/fit.hpp"
#include "bresse/spectral.hpp"

namespace bresse {

struct LambdaGridConfig {
  double min = 1.0;
  std::optional<double> max;  ///< nullopt means "auto" (frequency cap)
  int count = 60;
  std::string spacing = "log";

  friend bool operator==(const LambdaGridConfig&, const LambdaGridConfig&) = default;
};

/// kind is "modal", "random_smooth" or "custom".
struct InitialConfig {
  std::string kind = "random_smooth";
  int index = 1;
  std::optional<std::uint64_t> seed;  ///< random_smooth; defaults to the run seed
  double cutoff = 0.1;
  std::vector<double> state;

  friend bool operator==(const InitialConfig&, const InitialConfig&) = default;
};

struct RunConfig {
  BeamParameters params;
  DampingProfile profile;
  BoundaryCondition bc = BoundaryCondition::DDD;
  int n = 100;
  std::optional<double> dt;  ///< nullopt means "auto"
  double T = 10.0;
  std::uint64_t seed = 0;
  LambdaGridConfig lambda_grid;
  std::string outputs = "out";
  InitialConfig initial;
  int sample_stride = 1;
  std::string config_id;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Parses and validates a JSON configuration. Unknown keys, malformed
/// values, invalid parameters and inadmissible DNN geometries all raise
/// InvalidInput. The returned config_id is recomputed from the content.
RunConfig parse_config(std::string_view json_text);
RunConfig load_config(const std::filesystem::path& path);

/// Canonical JSON (sorted keys) including outputs and config_id.
std::string serialize_config(const RunConfig& config);

/// 16 hex digits: FNV-1a 64 of the canonical JSON without outputs and
/// config_id.
std::string compute_config_id(const RunConfig& config);

InitialData initial_data(const RunConfig& config);
double resolve_time_step(const RunConfig& config, const DiscreteSystem& sys);
SpectrumOptions spectrum_options(const RunConfig& config, int threads);

/// Shortest decimal string that parses back to the same double.
std::string format_double(double x);

void write_energy_csv(std::ostream& out, const EnergyTimeSeries& series);
void write_eigenvalues_csv(std::ostream& out, const std::vector<Complex>& eigs);
void write_resolvent_csv(std::ostream& out, const std::vector<AxisSample>& samples);

/// Matrix Market coordinate format; symmetric matrices store the lower
/// triangle only.
void write_matrix_market(std::ostream& out, const Eigen::MatrixXd& m, bool symmetric);

struct SimulateOutcome {
  SimulationResult result;
  DecayClassification classification;
  Regime regime = Regime::General;
};

struct SpectrumOutcome {
  SpectralReport report;
  Regime regime = Regime::General;
};

/// Runs the simulation and writes energy.csv and report.json (plus A.mtx
/// and M.mtx when dump_operators is set) into config.outputs.
SimulateOutcome run_simulate(const RunConfig& config, bool dump_operators = false);

/// Writes spectrum.json, eigenvalues.csv, resolvent.csv and summary.json.
SpectrumOutcome run_spectrum(const RunConfig& config, int threads, bool dump_operators = false);

struct SweepConfig {
  std::string base_json;                                 ///< RunConfig JSON object
  std::map<std::string, std::vector<double>> grid;       ///< dotted key -> values
  std::string outputs = "sweep";
  int max_points = 256;
  bool simulate = true;
  bool spectrum = true;
};

SweepConfig parse_sweep(std::string_view json_text);
SweepConfig load_sweep(const std::filesystem::path& path);

struct SweepRow {
  std::string config_id;
  std::map<std::string, double> values;
  std::string regime;
  std::optional<double> abscissa;
  std::optional<double> alpha_fit;
  std::string decay;
  std::string status = "ok";
};

/// Expands the grid, runs every point (rows in parallel on up to `threads`
/// workers, each in outputs/<config_id>), and writes outputs/atlas.csv with
/// rows sorted by config_id. Row failures are recorded in the status column.
std::vector<SweepRow> run_sweep(const SweepConfig& sweep, int threads);

/// Writes gnuplot scripts for whatever inputs the directory holds. Throws
/// InvalidInput naming every missing input when nothing can be plotted.
std::vector<std::string> emit_plots(const std::filesystem::path& dir);

}  // namespace bresse
