#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "bench_lib.hpp"
#include "supportgraph/errors.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kSolverFailure = 1;
constexpr int kConfigError = 2;
constexpr int kIoError = 3;

constexpr const char* kDefaultStrategies = "identity,jacobi,block-jacobi,mst,row-mst";
constexpr const char* kDefaultSigmaSweep = "0,0.02,0.05,0.1";

supportgraph::ScenarioSpec load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot read " + path);
  std::stringstream text;
  text << in.rdbuf();
  return supportgraph::parse_scenario_json(text.str());
}

std::vector<double> parse_sigma_list(const std::string& list) {
  std::vector<double> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw supportgraph::InputError("bad sigma value '" + item + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Support-graph preconditioner benchmarks for cell friction systems"};
  app.require_subcommand(1);

  std::string config_path, out_path, strategies = kDefaultStrategies, sigma_list;
  std::uint64_t seed = 0;
  bool seed_given = false;
  double tol = 1e-8;
  std::size_t max_iter = 0, repetitions = 1;
  bool verify = false, fixed_positions = false, no_reference = false;

  auto* run = app.add_subcommand("run", "Run every strategy on a scenario and write artifacts");
  run->add_option("--config", config_path, "Scenario JSON file")->required();
  run->add_option("--out", out_path, "Output directory")->default_val("bench_out");
  run->add_option("--strategies", strategies, "Comma-separated strategy tokens")
      ->default_val(kDefaultStrategies);
  auto* seed_opt = run->add_option("--seed", seed, "Base seed (overrides the config)");
  run->add_option("--tol", tol, "Relative residual tolerance")->default_val(1e-8);
  run->add_option("--max-iter", max_iter, "Iteration cap (0: 10 n)")->default_val(0);
  run->add_option("--repetitions", repetitions, "Experiments averaged per strategy")->default_val(1);
  run->add_flag("--verify-bounds", verify, "Add spectral reports (desk scale only)");
  run->add_flag("--fixed-positions", fixed_positions,
                "Reuse the base-seed cell positions and redraw only the forces");
  auto* sweep_opt = run->add_option(
      "--sigma-sweep", sigma_list,
      "Comma-separated hex-lattice noise levels (hex default 0,0.02,0.05,0.1; 'none' keeps the config sigma)");
  run->add_flag("--no-reference", no_reference, "Skip the direct reference solve");

  std::string gen_config, gen_out;
  std::uint64_t gen_seed = 0;
  auto* gen = app.add_subcommand("gen", "Write the collision graph of a scenario");
  gen->add_option("--config", gen_config, "Scenario JSON file")->required();
  gen->add_option("--out", gen_out, "Graph text file")->required();
  auto* gen_seed_opt = gen->add_option("--seed", gen_seed, "Seed (overrides the config)");

  std::size_t verify_n = 30, verify_trials = 10;
  std::uint64_t verify_seed = 1;
  auto* ver = app.add_subcommand("verify", "Run the spectral property suite");
  ver->add_option("--n", verify_n, "Cells per scenario")->default_val(30);
  ver->add_option("--trials", verify_trials, "Number of scenarios")->default_val(10);
  ver->add_option("--seed", verify_seed, "First seed")->default_val(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }
  seed_given = seed_opt->count() > 0;

  try {
    if (*run) {
      bench::BenchmarkConfig config;
      config.scenario = load_scenario(config_path);
      if (seed_given) config.scenario.seed = seed;
      config.strategies = supportgraph::parse_strategy_list(strategies);
      config.repetitions = repetitions;
      config.tol = tol;
      config.max_iter = max_iter;
      config.out_dir = out_path;
      config.reference = !no_reference;
      config.verify_bounds = verify;
      config.fixed_positions = fixed_positions;
      if (sweep_opt->count() == 0 && config.scenario.type == supportgraph::ScenarioType::HexLattice)
        sigma_list = kDefaultSigmaSweep;
      if (!sigma_list.empty() && sigma_list != "none") config.sigma_sweep = parse_sigma_list(sigma_list);
      config.validate();

      const auto result = bench::run_benchmark(config);
      bench::write_artifacts(config, result);
      for (const auto& r : result.runs) {
        std::cout << r.scenario << ' ' << r.strategy << " seed=" << r.seed;
        if (r.failed) std::cout << " error: " << r.error << '\n';
        else
          std::cout << ' ' << supportgraph::to_string(r.record.status)
                    << " iterations=" << r.record.iterations << '\n';
      }
      std::cout << "artifacts written to " << config.out_dir.string() << '\n';
      return bench::exit_status(result) == 0 ? kOk : kSolverFailure;
    }
    if (*gen) {
      auto spec = load_scenario(gen_config);
      if (gen_seed_opt->count()) spec.seed = gen_seed;
      const auto cells = supportgraph::generate_scenario(spec, spec.seed);
      const auto g = supportgraph::build_collision_graph(cells, spec.friction);
      std::ofstream out(gen_out);
      if (!out) throw std::ios_base::failure("cannot write " + gen_out);
      supportgraph::write_graph_text(out, g);
      out.close();
      if (!out) throw std::ios_base::failure("failed writing " + gen_out);
      std::cout << spec.label() << ": " << g.vertex_count() << " vertices, " << g.edge_count()
                << " edges\n";
      return kOk;
    }
    const auto summary = bench::run_verify(verify_n, verify_trials, verify_seed, std::cout);
    std::cout << summary.checks - summary.failures << " of " << summary.checks << " checks passed\n";
    return summary.failures == 0 ? kOk : kSolverFailure;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIoError;
  } catch (const supportgraph::InputError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const supportgraph::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSolverFailure;
  }
}
