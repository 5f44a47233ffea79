#pragma once

// Benchmark cell configurations and friction-matrix assembly. Lengths are in
// units of 10 um, so the default cell radius is 0.5.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "supportgraph/block_vector.hpp"
#include "supportgraph/graph.hpp"

namespace supportgraph {

using Vec3 = std::array<double, 3>;

inline constexpr double kDefaultCellRadius = 0.5;
/// Default minimum center distance (random) and lattice spacing (hex), as a
/// fraction of the contact distance 2 r.
inline constexpr double kDefaultSpacingFraction = 0.9;
/// Default cell volume fraction used to size the random-sphere domain.
inline constexpr double kDefaultPackingFraction = 0.45;

struct CellConfiguration {
  std::vector<Vec3> positions;
  std::vector<double> radii;
  std::uint64_t seed = 0;
  std::string descriptor;

  std::size_t size() const noexcept { return positions.size(); }
  /// Throws InputError on non-finite coordinates or non-positive radii.
  void validate() const;
};

struct FrictionParams {
  double gamma_parallel = 2e6;
  double gamma_perp = 8e6;
  double gamma_med = 3e5;

  void validate() const;
  double gamma_max() const;
  double gamma_min() const;
};

/// Rejection sampling of centers uniformly in a ball, keeping pairwise
/// distances >= min_dist. Throws PackingInfeasible when `max_attempts`
/// (default 2000 n) samples run out.
CellConfiguration generate_random_sphere(std::size_t n, double domain_radius, double cell_radius,
                                         double min_dist, std::uint64_t seed,
                                         std::size_t max_attempts = 0);

/// Domain radius at which n cells of the given radius fill `packing_fraction`
/// of the ball.
double domain_radius_for(std::size_t n, double cell_radius, double packing_fraction);

/// Cuboctahedral cluster of an FCC (hexagonal close packed) lattice with
/// nearest-neighbour distance `spacing`: shells k gives
/// (10k^3 + 15k^2 + 11k + 3) / 3 cells (k = 4 -> 309). Each coordinate gets
/// N(0, sigma^2) noise.
CellConfiguration generate_hex_lattice(std::size_t shells, double sigma, std::uint64_t seed,
                                       double cell_radius = kDefaultCellRadius,
                                       double spacing = 2.0 * kDefaultSpacingFraction *
                                                        kDefaultCellRadius);

std::size_t hex_cluster_size(std::size_t shells);

/// Hertz contact area pi R_eff delta with R_eff = Ri Rj / (Ri + Rj) and
/// overlap delta = Ri + Rj - dist; zero without overlap.
double hertz_contact_area(double ri, double rj, double dist);

struct Contact {
  std::size_t i = 0;  // i < j
  std::size_t j = 0;
  double distance = 0.0;
  double area = 0.0;
  Vec3 normal{};  // (r_j - r_i) / |r_j - r_i|
};

/// Candidate pairs (i < j, sorted) from a uniform spatial hash with cell size
/// max(Ri + Rj).
std::vector<std::pair<std::size_t, std::size_t>> broad_phase_pairs(const CellConfiguration& c);

/// Overlapping pairs, sorted. Throws DegenerateContact for coincident centers.
std::vector<Contact> find_contacts(const CellConfiguration& c);

/// A_ij (gamma_par u u^T + gamma_perp (I - u u^T))
SymBlock cell_cell_friction(const Contact& contact, const FrictionParams& params);

/// Collision graph: one vertex per cell with self-loop gamma_med I, one edge
/// per overlapping pair weighted by the cell-cell friction matrix.
MatrixWeightedGraph build_collision_graph(const CellConfiguration& c, const FrictionParams& params);

enum class ForceModel { Random, Zero, Hertz };

ForceModel parse_force_model(std::string_view s);
const char* to_string(ForceModel m);

/// Right-hand side F. Random: i.i.d. unit normals from SplitMix64(seed).
/// Hertz: for each contact, -A_ij u_ij on i and +A_ij u_ij on j.
BlockVector assemble_rhs(const CellConfiguration& c, ForceModel model, std::uint64_t seed);

enum class ScenarioType { RandomSphere, HexLattice };

/// Scenario description as read from a JSON spec file.
struct ScenarioSpec {
  ScenarioType type = ScenarioType::RandomSphere;
  std::size_t n = 100;
  std::size_t shells = 4;
  double cell_radius = kDefaultCellRadius;
  std::optional<double> domain_radius;
  std::optional<double> min_dist;
  std::optional<double> spacing;
  double packing_fraction = kDefaultPackingFraction;
  double sigma = 0.0;
  FrictionParams friction;
  std::uint64_t seed = 1;
  ForceModel force_model = ForceModel::Random;

  double resolved_domain_radius() const;
  double resolved_min_dist() const;
  double resolved_spacing() const;
  /// Short human-readable label, e.g. "random-sphere(n=1000)".
  std::string label() const;
};

/// Throws InputError with a description of the offending field.
ScenarioSpec parse_scenario_json(std::string_view text);
std::string scenario_to_json(const ScenarioSpec& spec);

CellConfiguration generate_scenario(const ScenarioSpec& spec, std::uint64_t seed);

}  // namespace supportgraph
