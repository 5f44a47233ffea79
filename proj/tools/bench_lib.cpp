#include "bench_lib.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "supportgraph/errors.hpp"
#include "supportgraph/factor.hpp"
#include "supportgraph/random.hpp"

namespace bench {

namespace {

using nlohmann::ordered_json;

std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::vector<ScenarioSpec> expand_scenarios(const BenchmarkConfig& config) {
  if (config.sigma_sweep.empty()) return {config.scenario};
  std::vector<ScenarioSpec> out;
  for (double sigma : config.sigma_sweep) {
    ScenarioSpec s = config.scenario;
    s.sigma = sigma;
    out.push_back(s);
  }
  return out;
}

std::optional<BlockVector> reference_solution(const MatrixWeightedGraph& g, const BlockVector& b) {
  if (g.vertex_count() * g.dim() > kDenseCapacity) return std::nullopt;
  std::vector<std::size_t> order(g.vertex_count());
  std::iota(order.begin(), order.end(), 0);
  return ldlt_general(g.laplacian(), order).solve(b);
}

ordered_json spectral_json(const SpectralReport& r) {
  return {{"lambda_min", r.lambda_min},
          {"lambda_max", r.lambda_max},
          {"kappa_precond", r.kappa_precond},
          {"kappa_edges", r.kappa_edges},
          {"kappa", r.kappa},
          {"max_degree", r.max_degree},
          {"subtrees", r.subtrees},
          {"bound_mst", r.bound_mst},
          {"bound_aug", r.bound_aug},
          {"bound_applicable", r.bound_applicable},
          {"bound_holds", r.bound_holds},
          {"lambda_min_guaranteed", r.lambda_min_guaranteed}};
}

std::string file_stem(std::size_t index, const ScenarioSpec& s) {
  std::string label = s.label();
  for (char& c : label)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '.' && c != '-') c = '_';
  while (!label.empty() && label.back() == '_') label.pop_back();
  return "convergence_" + std::to_string(index) + "_" + label;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot open " + path.string() + " for writing");
  out << content;
  out.close();
  if (!out) throw std::ios_base::failure("failed writing " + path.string());
}

}  // namespace

void BenchmarkConfig::validate() const {
  if (repetitions < 1) throw InputError("repetitions must be at least 1");
  if (strategies.empty()) throw InputError("strategy list is empty");
  if (!(tol > 0.0)) throw InputError("tolerance must be positive");
  scenario.friction.validate();
  for (double s : sigma_sweep)
    if (!(s >= 0.0)) throw InputError("sigma values must be non-negative");
  if (!sigma_sweep.empty() && scenario.type != ScenarioType::HexLattice)
    throw InputError("a sigma sweep needs a hex-lattice scenario");
}

std::uint64_t repetition_seed(std::uint64_t base, std::size_t r) { return base + r; }

BenchmarkResult run_benchmark(const BenchmarkConfig& config) {
  config.validate();
  BenchmarkResult result;
  result.scenarios = expand_scenarios(config);

  for (const ScenarioSpec& spec : result.scenarios) {
    const std::string label = spec.label();
    bool warmed_up = false;
    for (std::size_t rep = 0; rep < config.repetitions; ++rep) {
      const std::uint64_t seed = repetition_seed(spec.seed, rep);
      const auto failed_all = [&](const std::string& why) {
        for (const Strategy& s : config.strategies) {
          RunRecord run;
          run.scenario = label;
          run.strategy = s.token();
          run.seed = seed;
          run.repetition = rep;
          run.failed = true;
          run.error = why;
          result.runs.push_back(std::move(run));
        }
      };

      CellConfiguration cells;
      MatrixWeightedGraph g;
      BlockVector b;
      std::optional<BlockVector> ref;
      try {
        cells = generate_scenario(spec, config.fixed_positions ? spec.seed : seed);
        g = build_collision_graph(cells, spec.friction);
        b = assemble_rhs(cells, spec.force_model, seed);
        if (config.reference) ref = reference_solution(g, b);
      } catch (const Error& e) {
        failed_all(e.what());
        continue;
      }

      for (const Strategy& strategy : config.strategies) {
        RunRecord run;
        run.scenario = label;
        run.strategy = strategy.token();
        run.seed = seed;
        run.repetition = rep;
        run.vertices = g.vertex_count();
        run.edges = g.edge_count();
        run.components = g.component_count();
        try {
          const Preconditioner p = Preconditioner::build(strategy, g);
          if (strategy.kind == StrategyKind::AugmentedMst)
            run.subtree_target = std::min(
                strategy.subtrees.value_or(default_subtree_count(g.vertex_count())), g.vertex_count());
          run.subtrees = p.subtrees_used();
          run.extra_edges = p.extra_edges();
          PcgOptions opt;
          opt.tol = config.tol;
          opt.max_iter = config.max_iter;
          opt.reference = ref ? &*ref : nullptr;
          if (!warmed_up) pcg(graph_operator(g), b, p, opt);
          PcgResult res = pcg(graph_operator(g), b, p, opt);
          run.record = std::move(res.record);
          run.record.seed = seed;
          run.record.scenario = label;
          if (config.verify_bounds && g.vertex_count() * g.dim() <= kSpectralCapacity)
            run.spectral = verify_bounds(g, strategy);
        } catch (const Error& e) {
          run.failed = true;
          run.error = e.what();
        }
        result.runs.push_back(std::move(run));
      }
      warmed_up = true;
    }
  }
  return result;
}

std::vector<MeanCurve> mean_curves(const std::vector<RunRecord>& runs) {
  // Keyed by first appearance so the output order follows the run order.
  std::vector<std::pair<std::string, std::string>> keys;
  std::map<std::pair<std::string, std::string>, std::vector<const RunRecord*>> groups;
  for (const RunRecord& r : runs) {
    if (r.failed) continue;
    const auto key = std::make_pair(r.scenario, r.strategy);
    if (!groups.contains(key)) keys.push_back(key);
    groups[key].push_back(&r);
  }

  const auto average = [](const std::vector<const std::vector<double>*>& hs) {
    std::size_t len = 0;
    for (const auto* h : hs) len = std::max(len, h->size());
    std::vector<double> mean(len, 0.0);
    for (const auto* h : hs)
      for (std::size_t k = 0; k < len; ++k) mean[k] += k < h->size() ? (*h)[k] : h->back();
    for (double& v : mean) v /= static_cast<double>(hs.size());
    return mean;
  };

  std::vector<MeanCurve> out;
  for (const auto& key : keys) {
    const auto& group = groups[key];
    MeanCurve c{key.first, key.second, {}, {}};
    std::vector<const std::vector<double>*> res, err;
    for (const RunRecord* r : group) {
      res.push_back(&r->record.residual_history);
      if (!r->record.error_history.empty()) err.push_back(&r->record.error_history);
    }
    c.rel_residual = average(res);
    if (err.size() == group.size()) c.rel_error = average(err);
    out.push_back(std::move(c));
  }
  return out;
}

void emit_csv(std::ostream& out, const std::vector<RunRecord>& runs) {
  out << "scenario,strategy,seed,iteration,rel_residual,rel_error\n";
  for (const RunRecord& r : runs) {
    if (r.failed) continue;
    const auto& res = r.record.residual_history;
    const auto& err = r.record.error_history;
    for (std::size_t k = 0; k < res.size(); ++k) {
      out << '"' << r.scenario << "\"," << r.strategy << ',' << r.seed << ',' << k << ','
          << fmt(res[k]) << ',';
      if (k < err.size()) out << fmt(err[k]);
      out << '\n';
    }
  }
}

void emit_mean_csv(std::ostream& out, const std::vector<MeanCurve>& curves) {
  out << "scenario,strategy,iteration,mean_rel_residual,mean_rel_error\n";
  for (const MeanCurve& c : curves)
    for (std::size_t k = 0; k < c.rel_residual.size(); ++k) {
      out << '"' << c.scenario << "\"," << c.strategy << ',' << k << ',' << fmt(c.rel_residual[k])
          << ',';
      if (k < c.rel_error.size()) out << fmt(c.rel_error[k]);
      out << '\n';
    }
}

std::string summary_json(const BenchmarkConfig& config, const BenchmarkResult& result) {
  ordered_json doc;
  ordered_json cfg;
  cfg["scenario"] = ordered_json::parse(scenario_to_json(config.scenario));
  cfg["strategies"] = ordered_json::array();
  for (const Strategy& s : config.strategies) cfg["strategies"].push_back(s.token());
  cfg["repetitions"] = config.repetitions;
  cfg["tol"] = config.tol;
  cfg["max_iter"] = config.max_iter;
  cfg["reference"] = config.reference;
  cfg["verify_bounds"] = config.verify_bounds;
  cfg["fixed_positions"] = config.fixed_positions;
  cfg["sigma_sweep"] = config.sigma_sweep;
  doc["config"] = cfg;

  doc["scenarios"] = ordered_json::array();
  for (const ScenarioSpec& s : result.scenarios) {
    ordered_json j = ordered_json::parse(scenario_to_json(s));
    j["label"] = s.label();
    doc["scenarios"].push_back(j);
  }

  doc["runs"] = ordered_json::array();
  for (const RunRecord& r : result.runs) {
    ordered_json j;
    j["scenario"] = r.scenario;
    j["strategy"] = r.strategy;
    j["seed"] = r.seed;
    j["repetition"] = r.repetition;
    j["vertices"] = r.vertices;
    j["edges"] = r.edges;
    j["edge_vertex_ratio"] = r.vertices ? static_cast<double>(r.edges) / r.vertices : 0.0;
    j["components"] = r.components;
    if (r.subtree_target > 0) {
      // The subtree size cap could be read as ceil(n / t) or ceil(m / t); both are listed.
      const auto cap = [&](std::size_t count) {
        return (count + r.subtree_target - 1) / r.subtree_target;
      };
      j["subtree_target"] = r.subtree_target;
      j["subtrees"] = r.subtrees;
      j["extra_edges"] = r.extra_edges;
      j["subtree_cap_vertices"] = cap(r.vertices);
      j["subtree_cap_edges"] = cap(r.edges);
    }
    if (r.failed) {
      j["status"] = "error";
      j["error"] = r.error;
    } else {
      j["status"] = to_string(r.record.status);
      j["iterations"] = r.record.iterations;
      j["final_rel_residual"] = r.record.residual_history.back();
      j["final_true_residual"] = r.record.final_true_residual;
      if (!r.record.error_history.empty()) j["final_rel_error"] = r.record.error_history.back();
      j["wall_time"] = r.record.wall_time;
      if (r.spectral) j["spectral"] = spectral_json(*r.spectral);
    }
    doc["runs"].push_back(j);
  }

  doc["summary"] = ordered_json::array();
  std::vector<std::pair<std::string, std::string>> order;
  std::map<std::pair<std::string, std::string>, std::vector<const RunRecord*>> groups;
  for (const RunRecord& r : result.runs) {
    const auto key = std::make_pair(r.scenario, r.strategy);
    if (!groups.contains(key)) order.push_back(key);
    groups[key].push_back(&r);
  }
  for (const auto& key : order) {
    std::size_t converged = 0, total_iter = 0, ok = 0;
    for (const RunRecord* r : groups[key]) {
      if (r->converged()) ++converged;
      if (!r->failed) {
        ++ok;
        total_iter += r->record.iterations;
      }
    }
    ordered_json j;
    j["scenario"] = key.first;
    j["strategy"] = key.second;
    j["runs"] = groups[key].size();
    j["converged"] = converged;
    j["mean_iterations"] = ok ? static_cast<double>(total_iter) / ok : 0.0;
    doc["summary"].push_back(j);
  }
  return doc.dump(2) + "\n";
}

std::string emit_plot(const std::vector<PlotSeries>& series, const std::string& title,
                      const std::string& y_label) {
  constexpr double kWidth = 800, kHeight = 500;
  constexpr double kLeft = 80, kRight = 180, kTop = 40, kBottom = 60;
  constexpr double kPad = 0.05;
  static const char* const kColours[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                         "#9467bd", "#8c564b", "#e377c2", "#17becf"};

  double xmax = 0.0, ymin = std::numeric_limits<double>::infinity(), ymax = -ymin;
  for (const PlotSeries& s : series)
    for (std::size_t k = 0; k < s.values.size(); ++k) {
      if (!(s.values[k] > 0.0) || !std::isfinite(s.values[k])) continue;
      xmax = std::max(xmax, static_cast<double>(k));
      ymin = std::min(ymin, std::log10(s.values[k]));
      ymax = std::max(ymax, std::log10(s.values[k]));
    }
  if (!std::isfinite(ymin)) ymin = ymax = 0.0;
  double x_span = xmax, y_span = ymax - ymin;
  if (x_span == 0.0) x_span = 1.0;
  if (y_span == 0.0) y_span = 1.0;
  const double x_lo = -kPad * x_span, x_hi = xmax + kPad * x_span;
  const double y_lo = ymin - kPad * y_span, y_hi = ymax + kPad * y_span;

  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  const auto px = [&](double x) { return kLeft + (x - x_lo) / (x_hi - x_lo) * pw; };
  const auto py = [&](double ly) { return kTop + (y_hi - ly) / (y_hi - y_lo) * ph; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
      << xml_escape(title) << "</text>\n";
  svg << "<rect class=\"plot-area\" x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw
      << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"black\" data-x-range=\"" << fmt(x_lo)
      << ' ' << fmt(x_hi) << "\" data-log-y-range=\"" << fmt(y_lo) << ' ' << fmt(y_hi)
      << "\"/>\n";

  // Decade ticks on y, about eight ticks on x.
  for (int e = static_cast<int>(std::ceil(y_lo)); e <= static_cast<int>(std::floor(y_hi)); ++e) {
    const double y = py(e);
    svg << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << fixed(y) << "\" x2=\"" << kLeft
        << "\" y2=\"" << fixed(y) << "\" stroke=\"black\"/>";
    svg << "<text x=\"" << kLeft - 8 << "\" y=\"" << fixed(y + 4)
        << "\" text-anchor=\"end\" font-size=\"12\">1e" << e << "</text>\n";
  }
  const double step = std::max(1.0, std::pow(10.0, std::floor(std::log10(std::max(1.0, xmax / 2)))));
  for (double x = 0.0; x <= xmax; x += step) {
    svg << "<line x1=\"" << fixed(px(x)) << "\" y1=\"" << kTop + ph << "\" x2=\"" << fixed(px(x))
        << "\" y2=\"" << kTop + ph + 5 << "\" stroke=\"black\"/>";
    svg << "<text x=\"" << fixed(px(x)) << "\" y=\"" << kTop + ph + 20
        << "\" text-anchor=\"middle\" font-size=\"12\">" << x << "</text>\n";
  }
  svg << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 15
      << "\" text-anchor=\"middle\" font-size=\"14\">iteration</text>\n";
  svg << "<text x=\"20\" y=\"" << kTop + ph / 2 << "\" text-anchor=\"middle\" font-size=\"14\" "
      << "transform=\"rotate(-90 20 " << kTop + ph / 2 << ")\">" << xml_escape(y_label)
      << "</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* colour = kColours[i % std::size(kColours)];
    svg << "<polyline class=\"series\" data-label=\"" << xml_escape(series[i].label)
        << "\" fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (std::size_t k = 0; k < series[i].values.size(); ++k) {
      const double v = series[i].values[k];
      if (!(v > 0.0) || !std::isfinite(v)) continue;
      if (!first) svg << ' ';
      first = false;
      svg << fixed(px(static_cast<double>(k)), 3) << ',' << fixed(py(std::log10(v)), 3);
    }
    svg << "\"/>\n";
    const double ly = kTop + 10 + 20.0 * static_cast<double>(i);
    const double lx = kLeft + pw + 15;
    svg << "<g class=\"legend-entry\"><line x1=\"" << lx << "\" y1=\"" << ly << "\" x2=\""
        << lx + 25 << "\" y2=\"" << ly << "\" stroke=\"" << colour
        << "\" stroke-width=\"2\"/><text x=\"" << lx + 32 << "\" y=\"" << ly + 4
        << "\" font-size=\"12\">" << xml_escape(series[i].label) << "</text></g>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void write_artifacts(const BenchmarkConfig& config, const BenchmarkResult& result) {
  std::error_code ec;
  std::filesystem::create_directories(config.out_dir, ec);
  if (ec) throw std::ios_base::failure("cannot create " + config.out_dir.string());

  std::ostringstream csv;
  emit_csv(csv, result.runs);
  write_file(config.out_dir / "convergence.csv", csv.str());

  const auto curves = mean_curves(result.runs);
  std::ostringstream mean;
  emit_mean_csv(mean, curves);
  write_file(config.out_dir / "mean_curves.csv", mean.str());

  write_file(config.out_dir / "summary.json", summary_json(config, result));

  for (std::size_t i = 0; i < result.scenarios.size(); ++i) {
    const std::string label = result.scenarios[i].label();
    std::vector<PlotSeries> series;
    bool errors = true;
    for (const MeanCurve& c : curves)
      if (c.scenario == label && c.rel_error.empty()) errors = false;
    for (const MeanCurve& c : curves)
      if (c.scenario == label) series.push_back({c.strategy, errors ? c.rel_error : c.rel_residual});
    const std::string svg =
        emit_plot(series, label, errors ? "mean relative error" : "mean relative residual");
    write_file(config.out_dir / (file_stem(i, result.scenarios[i]) + ".svg"), svg);
  }
}

VerifySummary run_verify(std::size_t n, std::size_t trials, std::uint64_t seed, std::ostream& log) {
  if (n < 2) throw InputError("verify: n must be at least 2");
  if (trials < 1) throw InputError("verify: trials must be at least 1");
  if (n * kDefaultBlockDim > kSpectralCapacity)
    throw InputError("verify: n too large for dense generalized eigenvalues (max " +
                     std::to_string(kSpectralCapacity / kDefaultBlockDim) + ")");
  VerifySummary out;
  const auto check = [&](bool ok, const std::string& what) {
    ++out.checks;
    if (!ok) ++out.failures;
    log << (ok ? "ok   " : "FAIL ") << what << '\n';
  };

  for (std::size_t trial = 0; trial < trials; ++trial) {
    const std::uint64_t s = seed + trial;
    ScenarioSpec spec;
    spec.n = n;
    const auto cells = generate_scenario(spec, s);
    const auto g = build_collision_graph(cells, spec.friction);
    const std::string tag = "seed " + std::to_string(s) + ": ";

    const SpectralReport mst = verify_bounds(g, Strategy::parse("mst"));
    check(mst.lambda_min >= 1.0 - 1e-8, tag + "mst lambda_min " + fmt(mst.lambda_min) + " >= 1");
    check(mst.bound_holds, tag + "mst lambda_max " + fmt(mst.lambda_max) + " <= " + fmt(mst.bound_mst));
    for (std::size_t t : {2, 3}) {
      if (t > n) continue;
      const SpectralReport aug = verify_bounds(g, Strategy::parse("aug-mst"), t);
      check(aug.lambda_min >= 1.0 - 1e-8,
            tag + "aug-mst:" + std::to_string(t) + " lambda_min " + fmt(aug.lambda_min) + " >= 1");
      check(aug.bound_holds, tag + "aug-mst:" + std::to_string(t) + " lambda_max " +
                                 fmt(aug.lambda_max) + " <= " + fmt(aug.bound_aug));
    }

    SplitMix64 rng(s);
    const std::size_t k = 1 + rng.next() % 6;
    std::vector<SymBlock> path;
    const auto random_weight = [&] {
      const Edge& e = g.edge_count() ? g.edge(rng.next() % g.edge_count()) : Edge{0, 1, SymBlock::identity(3)};
      return e.weight * rng.uniform(0.5, 2.0);
    };
    for (std::size_t i = 0; i < k; ++i) path.push_back(random_weight());
    check(congestion_dilation_check(random_weight(), path),
          tag + "congestion-dilation on a path of length " + std::to_string(k));
  }
  return out;
}

int exit_status(const BenchmarkResult& result) {
  for (const RunRecord& r : result.runs)
    if (r.converged()) return 0;
  return 1;
}

}  // namespace bench
