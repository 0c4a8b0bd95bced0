#pragma once

// Experiment driver behind the gmc_tool executable: JSON experiment configs,
// the run / compare / tour subcommands, and their output files.

#include "gmc/baselines.hpp"
#include "gmc/io.hpp"
#include "gmc/sampler.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gmc::cli {

enum ExitCode : int { kSuccess = 0, kValidation = 2, kRuntime = 3 };

/// Config or input problem; the message is anchored to `file:line:` where possible.
class InputError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

struct HistogramSpec {
  int coordinate = 0;
  int bins = 50;
  std::optional<std::pair<double, double>> range;
};

struct ExperimentConfig {
  std::string experiment;
  ManifoldSpec manifold = ManifoldSpec::sphere(2);
  json manifold_json;

  std::string target_kind;
  FisherBinghamParams<double> fisher_bingham;
  MatrixFisherParams<double> matrix_fisher;
  DirichletParams<double> dirichlet;
  BarbellParams<double> barbell;
  json target_json;

  std::string sampler_kind;
  GmcConfig gmc;
  std::size_t thin = 1;
  std::optional<Eigen::VectorXd> initial;
  TemperingLadder ladder;
  double nu = 0.01;
  std::size_t n_proposals = 0;
  json sampler_json;

  std::size_t n_draws = 0;
  std::size_t n_burnin = 0;
  std::size_t reference_draws = 0;
  std::uint64_t seed = 0;
  std::string output_dir;
  std::optional<HistogramSpec> histogram;

  /// Normalized form with every default filled in; written as config-echo.json.
  json echo() const;
};

/// Parses and validates a config document. `source` names the file in messages.
ExperimentConfig parse_config(const std::string& text, const std::string& source,
                              std::optional<std::uint64_t> seed_override = std::nullopt);

ExperimentConfig load_config(const std::string& path, std::optional<std::uint64_t> seed_override = std::nullopt);

/// Column names of samples.csv for a manifold.
std::vector<std::string> coordinate_names(const ManifoldSpec& m);

struct RunResult {
  Eigen::MatrixXd samples;
  std::vector<std::string> names;
  double accept_rate = 1.0;
  /// Exact draws from the same target, when an exact sampler exists.
  std::optional<Eigen::MatrixXd> reference;
  /// Sampler-specific counters for diagnostics.json.
  json stats;
  double elapsed_seconds = 0.0;
};

RunResult execute(const ExperimentConfig& cfg);

/// Writes samples.csv, diagnostics.json, config-echo.json (and histogram.csv,
/// simplex.csv when applicable) into dir. Nothing is left behind on failure.
void write_run(const ExperimentConfig& cfg, const RunResult& result, const std::string& dir);

json compare_runs(const std::string& dir_a, const std::string& dir_b);

struct Frames {
  ManifoldSpec manifold = ManifoldSpec::sphere(2);
  std::vector<std::string> header;
  std::vector<Eigen::VectorXd> frames;
};

/// Reads frames from a CSV whose header is q_r{i}_c{j} (Stiefel) or x{i} (sphere).
Frames read_frames(const std::string& path);

/// Geodesic segments between consecutive frames, n_interp frames per segment,
/// shared endpoints emitted once.
std::vector<Eigen::VectorXd> tour_path(const Frames& frames, int n_interp);

/// Entry point for gmc_tool; returns the process exit code.
int main(int argc, char** argv);

}  // namespace gmc::cli
