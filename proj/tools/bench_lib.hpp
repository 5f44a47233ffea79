#pragma once

// Benchmark harness: runs every strategy on generated scenarios and writes
// convergence data, a JSON summary and SVG plots.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "supportgraph/cells.hpp"
#include "supportgraph/krylov.hpp"
#include "supportgraph/precond.hpp"
#include "supportgraph/spectral.hpp"

namespace bench {

using namespace supportgraph;

struct BenchmarkConfig {
  ScenarioSpec scenario;
  std::vector<Strategy> strategies;
  std::size_t repetitions = 1;
  double tol = 1e-8;
  std::size_t max_iter = 0;  // 0: 10 n
  std::filesystem::path out_dir = "bench_out";
  bool reference = true;
  bool verify_bounds = false;
  /// Keep the base-seed cell positions for every repetition and redraw only
  /// the forces. The default redraws both.
  bool fixed_positions = false;
  /// Hex-lattice noise levels to sweep; empty runs scenario.sigma only.
  std::vector<double> sigma_sweep;

  void validate() const;
};

struct RunRecord {
  std::string scenario;
  std::string strategy;
  std::uint64_t seed = 0;
  std::size_t repetition = 0;
  std::size_t vertices = 0;
  std::size_t edges = 0;
  std::size_t components = 0;
  /// Augmented MST only: requested subtree count t, subtrees actually
  /// formed and extra edges added.
  std::size_t subtree_target = 0;
  std::size_t subtrees = 0;
  std::size_t extra_edges = 0;
  ConvergenceRecord record;
  bool failed = false;  // exception while building or solving
  std::string error;
  std::optional<SpectralReport> spectral;

  bool converged() const { return !failed && record.status == SolveStatus::Converged; }
};

struct MeanCurve {
  std::string scenario;
  std::string strategy;
  std::vector<double> rel_residual;
  std::vector<double> rel_error;  // empty when no run had a reference
};

struct BenchmarkResult {
  std::vector<ScenarioSpec> scenarios;
  std::vector<RunRecord> runs;
};

/// Seed of repetition r.
std::uint64_t repetition_seed(std::uint64_t base, std::size_t r);

/// Runs the sweep without touching the filesystem.
BenchmarkResult run_benchmark(const BenchmarkConfig& config);

/// Per (scenario, strategy) averages over repetitions. Shorter histories are
/// padded with their final value.
std::vector<MeanCurve> mean_curves(const std::vector<RunRecord>& runs);

void emit_csv(std::ostream& out, const std::vector<RunRecord>& runs);
void emit_mean_csv(std::ostream& out, const std::vector<MeanCurve>& curves);
std::string summary_json(const BenchmarkConfig& config, const BenchmarkResult& result);

struct PlotSeries {
  std::string label;
  std::vector<double> values;  // y at x = 0, 1, ...
};

/// Log-scale y, linear x, one polyline per series plus a legend.
std::string emit_plot(const std::vector<PlotSeries>& series, const std::string& title,
                      const std::string& y_label);

/// Writes convergence.csv, mean_curves.csv, summary.json and one SVG per
/// scenario. Throws std::ios_base::failure on I/O errors.
void write_artifacts(const BenchmarkConfig& config, const BenchmarkResult& result);

struct VerifySummary {
  std::size_t checks = 0;
  std::size_t failures = 0;
};

/// Spectral property suite on `trials` random-sphere scenarios of n cells:
/// lambda_min >= 1 for subgraph preconditioners, the MST and augmented
/// lambda_max bounds, and the congestion-dilation lemma on random paths.
/// One line per check goes to `log`.
VerifySummary run_verify(std::size_t n, std::size_t trials, std::uint64_t seed, std::ostream& log);

/// 0 when at least one run converged, 1 otherwise.
int exit_status(const BenchmarkResult& result);

}  // namespace bench
