#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>

#include "bench_lib.hpp"
#include "supportgraph/errors.hpp"

using namespace supportgraph;

namespace {

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (char c : line) {
      if (c == '"') quoted = !quoted;
      else if (c == ',' && !quoted) {
        cells.push_back(cell);
        cell.clear();
      } else cell += c;
    }
    cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

bench::BenchmarkConfig small_config(const std::string& strategies, std::size_t reps) {
  bench::BenchmarkConfig c;
  c.scenario.type = ScenarioType::HexLattice;
  c.scenario.shells = 2;
  c.scenario.sigma = 0.05;
  c.strategies = parse_strategy_list(strategies);
  c.repetitions = reps;
  return c;
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = text.find(needle); p != std::string::npos; p = text.find(needle, p + 1)) ++n;
  return n;
}

struct Point {
  double x, y;
};

std::vector<std::vector<Point>> polylines(const std::string& svg) {
  std::vector<std::vector<Point>> out;
  const std::regex poly(R"re(<polyline[^>]*points="([^"]*)")re");
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), poly); it != std::sregex_iterator(); ++it) {
    std::vector<Point> pts;
    std::istringstream in((*it)[1].str());
    std::string pair;
    while (in >> pair) {
      const auto comma = pair.find(',');
      pts.push_back({std::stod(pair.substr(0, comma)), std::stod(pair.substr(comma + 1))});
    }
    out.push_back(pts);
  }
  return out;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("zero forces give a single row") {
    auto c = small_config("mst", 1);
    c.scenario.force_model = ForceModel::Zero;
    const auto result = bench::run_benchmark(c);
    std::ostringstream csv;
    bench::emit_csv(csv, result.runs);
    const auto rows = parse_csv(csv.str());
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == std::vector<std::string>{"scenario", "strategy", "seed", "iteration", "rel_residual", "rel_error"});
    CHECK(rows[1][3] == "0");
    CHECK(rows[1][4] == "0");
    CHECK(bench::exit_status(result) == 0);
  }

  TEST_CASE("one row per iteration and run") {
    const auto result = bench::run_benchmark(small_config("identity,mst,row-mst", 3));
    REQUIRE(result.runs.size() == 9);
    std::size_t expected = 0;
    for (const auto& r : result.runs) expected += r.record.iterations + 1;
    std::ostringstream csv;
    bench::emit_csv(csv, result.runs);
    CHECK(parse_csv(csv.str()).size() == expected + 1);
  }

  TEST_CASE("mean curves recomputed from the raw rows") {
    const auto result = bench::run_benchmark(small_config("identity,block-jacobi", 4));
    std::ostringstream raw, mean;
    bench::emit_csv(raw, result.runs);
    bench::emit_mean_csv(mean, bench::mean_curves(result.runs));

    // (strategy, seed) -> error history, from the raw file.
    std::map<std::string, std::map<std::string, std::vector<double>>> hist;
    const auto rows = parse_csv(raw.str());
    for (std::size_t i = 1; i < rows.size(); ++i) hist[rows[i][1]][rows[i][2]].push_back(std::stod(rows[i][5]));

    const auto mrows = parse_csv(mean.str());
    REQUIRE(mrows.size() > 1);
    std::size_t checked = 0;
    for (std::size_t i = 1; i < mrows.size(); ++i) {
      const auto& runs = hist[mrows[i][1]];
      const std::size_t k = std::stoul(mrows[i][2]);
      double sum = 0.0;
      for (const auto& [seed, h] : runs) sum += k < h.size() ? h[k] : h.back();
      CHECK(std::stod(mrows[i][4]) == doctest::Approx(sum / runs.size()).epsilon(1e-12));
      ++checked;
    }
    // Length follows the longest run of each strategy.
    std::size_t longest = 0;
    for (const auto& [strategy, runs] : hist)
      for (const auto& [seed, h] : runs) longest = std::max(longest, h.size());
    CHECK(checked >= longest);
  }

  TEST_CASE("identical configuration gives byte-identical CSV") {
    const auto a = bench::run_benchmark(small_config("jacobi,mst", 2));
    const auto b = bench::run_benchmark(small_config("jacobi,mst", 2));
    std::ostringstream ca, cb;
    bench::emit_csv(ca, a.runs);
    bench::emit_csv(cb, b.runs);
    CHECK(ca.str() == cb.str());
  }

  TEST_CASE("tree-shaped scenario converges in one iteration") {
    // Find a small random-sphere scenario whose collision graph is a forest.
    bench::BenchmarkConfig c;
    c.scenario.n = 12;
    c.strategies = parse_strategy_list("mst");
    bool found = false;
    for (std::uint64_t seed = 1; seed < 200 && !found; ++seed) {
      c.scenario.seed = seed;
      const auto g = build_collision_graph(generate_scenario(c.scenario, seed), c.scenario.friction);
      found = g.edge_count() > 0 && g.edge_count() + g.component_count() == g.vertex_count();
    }
    REQUIRE(found);
    const auto result = bench::run_benchmark(c);
    REQUIRE(result.runs.size() == 1);
    CHECK(result.runs[0].record.iterations == 1);
  }

  TEST_CASE("plot with one strategy") {
    const std::string svg = bench::emit_plot({{"mst", {1.0, 1e-3}}}, "t", "y");
    CHECK(count(svg, "<polyline") == 1);
    CHECK(polylines(svg)[0].size() == 2);
  }

  TEST_CASE("plot with five strategies") {
    std::vector<bench::PlotSeries> series;
    for (const char* tok : {"identity", "jacobi", "block-jacobi", "mst", "row-mst"})
      series.push_back({tok, {1.0, 0.1, 0.01}});
    const std::string svg = bench::emit_plot(series, "t", "y");
    CHECK(count(svg, "<polyline") == 5);
    CHECK(count(svg, "class=\"legend-entry\"") == 5);
    for (const char* tok : {"identity", "jacobi", "block-jacobi", "mst", "row-mst"})
      CHECK(svg.find(std::string(">") + tok + "</text>") != std::string::npos);
  }

  TEST_CASE("plotted data fill the axes up to the padding") {
    const std::string svg = bench::emit_plot({{"a", {1.0, 0.5, 1e-4, 2e-6}}, {"b", {1.0, 1e-2, 1e-5}}}, "t", "y");
    const std::regex rect(R"re(class="plot-area" x="([-0-9.e]+)" y="([-0-9.e]+)" width="([-0-9.e]+)" height="([-0-9.e]+)")re");
    std::smatch m;
    REQUIRE(std::regex_search(svg, m, rect));
    const double x0 = std::stod(m[1]), y0 = std::stod(m[2]), w = std::stod(m[3]), h = std::stod(m[4]);
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& line : polylines(svg))
      for (const Point& p : line) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
      }
    // Extremes sit inside the plot area, no more than 5% of its size from the edges.
    CHECK(xmin >= x0);
    CHECK(xmin - x0 <= 0.05 * w);
    CHECK(xmax <= x0 + w);
    CHECK(x0 + w - xmax <= 0.05 * w);
    CHECK(ymin >= y0);
    CHECK(ymin - y0 <= 0.05 * h);
    CHECK(ymax <= y0 + h);
    CHECK(y0 + h - ymax <= 0.05 * h);
    // Log scale: equal ratios give equal vertical steps.
    const auto a = polylines(svg)[0];
    CHECK((a[3].y - a[2].y) == doctest::Approx((a[2].y - a[1].y) * std::log10(50.0) / std::log10(5000.0)).epsilon(1e-3));
  }

  TEST_CASE("artifacts on disk") {
    auto c = small_config("identity,mst", 2);
    c.out_dir = std::filesystem::temp_directory_path() / "supportgraph_cli_test";
    std::filesystem::remove_all(c.out_dir);
    c.verify_bounds = true;
    const auto result = bench::run_benchmark(c);
    bench::write_artifacts(c, result);
    for (const char* f : {"convergence.csv", "mean_curves.csv", "summary.json"})
      CHECK(std::filesystem::exists(c.out_dir / f));
    std::size_t svgs = 0;
    for (const auto& e : std::filesystem::directory_iterator(c.out_dir)) svgs += e.path().extension() == ".svg";
    CHECK(svgs == 1);
    std::ifstream in(c.out_dir / "summary.json");
    std::stringstream text;
    text << in.rdbuf();
    CHECK(text.str().find("\"spectral\"") != std::string::npos);
    CHECK(text.str().find("\"edge_vertex_ratio\"") != std::string::npos);
    std::filesystem::remove_all(c.out_dir);
  }

  TEST_CASE("configuration errors") {
    auto c = small_config("mst", 1);
    c.repetitions = 0;
    CHECK_THROWS_AS(c.validate(), InputError);
    c = small_config("mst", 1);
    c.strategies.clear();
    CHECK_THROWS_AS(c.validate(), InputError);
    c = small_config("mst", 1);
    c.scenario.type = ScenarioType::RandomSphere;
    c.sigma_sweep = {0.0, 0.1};
    CHECK_THROWS_AS(c.validate(), InputError);
  }

  TEST_CASE("sigma sweep runs one scenario per noise level") {
    auto c = small_config("mst", 1);
    c.sigma_sweep = {0.0, 0.02, 0.05, 0.1};
    const auto result = bench::run_benchmark(c);
    CHECK(result.scenarios.size() == 4);
    CHECK(result.runs.size() == 4);
    CHECK(result.runs[3].scenario.find("sigma=0.1") != std::string::npos);
  }
}
