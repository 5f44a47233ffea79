#include "supportgraph/cells.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <unordered_map>

#include "supportgraph/errors.hpp"
#include "supportgraph/random.hpp"

namespace supportgraph {

namespace {

constexpr double kCoincident = 1e-12;

double distance(const Vec3& a, const Vec3& b) {
  const double dx = b[0] - a[0], dy = b[1] - a[1], dz = b[2] - a[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

bool positive(double x) { return std::isfinite(x) && x > 0.0; }

/// Uniform hash grid over 3D points with a fixed cell size.
class HashGrid {
 public:
  explicit HashGrid(double cell) : cell_(cell) {}

  struct Key {
    long long x, y, z;
    friend bool operator==(const Key&, const Key&) = default;
  };

  Key key(const Vec3& p) const {
    return {static_cast<long long>(std::floor(p[0] / cell_)),
            static_cast<long long>(std::floor(p[1] / cell_)),
            static_cast<long long>(std::floor(p[2] / cell_))};
  }

  void insert(const Vec3& p, std::size_t id) { cells_[key(p)].push_back(id); }

  template <typename F>
  void for_each_near(const Vec3& p, F&& f) const {
    const Key k = key(p);
    for (long long dx = -1; dx <= 1; ++dx)
      for (long long dy = -1; dy <= 1; ++dy)
        for (long long dz = -1; dz <= 1; ++dz) {
          const auto it = cells_.find({k.x + dx, k.y + dy, k.z + dz});
          if (it == cells_.end()) continue;
          for (std::size_t id : it->second) f(id);
        }
  }

 private:
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept {
      std::uint64_t h = static_cast<std::uint64_t>(k.x) * 0x9e3779b97f4a7c15ULL;
      h ^= static_cast<std::uint64_t>(k.y) * 0xc2b2ae3d27d4eb4fULL + (h << 6) + (h >> 2);
      h ^= static_cast<std::uint64_t>(k.z) * 0x165667b19e3779f9ULL + (h << 6) + (h >> 2);
      return static_cast<std::size_t>(h);
    }
  };

  double cell_;
  std::unordered_map<Key, std::vector<std::size_t>, KeyHash> cells_;
};

}  // namespace

void CellConfiguration::validate() const {
  if (radii.size() != positions.size())
    throw InputError("cell configuration: radii and positions differ in length");
  for (std::size_t i = 0; i < positions.size(); ++i) {
    for (double x : positions[i])
      if (!std::isfinite(x)) throw InputError("cell " + std::to_string(i) + ": non-finite position");
    if (!positive(radii[i])) throw InputError("cell " + std::to_string(i) + ": radius must be positive");
  }
}

void FrictionParams::validate() const {
  if (!positive(gamma_parallel) || !positive(gamma_perp) || !positive(gamma_med))
    throw InputError("friction coefficients must be positive");
}

double FrictionParams::gamma_max() const { return std::max({gamma_parallel, gamma_perp, gamma_med}); }
double FrictionParams::gamma_min() const { return std::min({gamma_parallel, gamma_perp, gamma_med}); }

double domain_radius_for(std::size_t n, double cell_radius, double packing_fraction) {
  if (!positive(cell_radius) || !positive(packing_fraction) || packing_fraction > 1.0)
    throw InputError("domain radius: need cell_radius > 0 and packing fraction in (0, 1]");
  return cell_radius * std::cbrt(static_cast<double>(std::max<std::size_t>(n, 1)) / packing_fraction);
}

CellConfiguration generate_random_sphere(std::size_t n, double domain_radius, double cell_radius,
                                         double min_dist, std::uint64_t seed,
                                         std::size_t max_attempts) {
  if (!positive(min_dist)) throw InputError("random sphere: min_dist must be positive");
  if (!positive(domain_radius)) throw InputError("random sphere: domain_radius must be positive");
  if (!positive(cell_radius)) throw InputError("random sphere: cell_radius must be positive");
  if (max_attempts == 0) max_attempts = 2000 * std::max<std::size_t>(n, 1);

  CellConfiguration c;
  c.seed = seed;
  c.positions.reserve(n);
  SplitMix64 rng(seed);
  HashGrid grid(min_dist);
  std::size_t attempts = 0;
  while (c.positions.size() < n) {
    if (attempts++ >= max_attempts) throw PackingInfeasible(c.positions.size(), n);
    Vec3 p;
    double r2 = 0.0;
    do {
      for (double& x : p) x = rng.uniform(-domain_radius, domain_radius);
      r2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
    } while (r2 > domain_radius * domain_radius);
    bool ok = true;
    grid.for_each_near(p, [&](std::size_t id) {
      if (ok && distance(p, c.positions[id]) < min_dist) ok = false;
    });
    if (!ok) continue;
    grid.insert(p, c.positions.size());
    c.positions.push_back(p);
  }
  c.radii.assign(n, cell_radius);
  c.descriptor = "random-sphere(n=" + std::to_string(n) + ")";
  return c;
}

std::size_t hex_cluster_size(std::size_t shells) {
  const std::size_t k = shells;
  return (10 * k * k * k + 15 * k * k + 11 * k + 3) / 3;
}

CellConfiguration generate_hex_lattice(std::size_t shells, double sigma, std::uint64_t seed,
                                       double cell_radius, double spacing) {
  if (shells < 1) throw InputError("hex lattice: shells must be >= 1");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw InputError("hex lattice: sigma must be >= 0");
  if (!positive(cell_radius) || !positive(spacing))
    throw InputError("hex lattice: cell_radius and spacing must be positive");

  // FCC sites are integer points with an even coordinate sum; nearest
  // neighbours sit at (+-1, +-1, 0) and permutations, distance sqrt 2.
  const long long k = static_cast<long long>(shells);
  const double scale = spacing / std::numbers::sqrt2;
  CellConfiguration c;
  c.seed = seed;
  SplitMix64 rng(seed);
  for (long long a = -2 * k; a <= 2 * k; ++a)
    for (long long b = -2 * k; b <= 2 * k; ++b)
      for (long long z = -2 * k; z <= 2 * k; ++z) {
        if ((a + b + z) % 2 != 0) continue;
        const long long aa = std::llabs(a), bb = std::llabs(b), zz = std::llabs(z);
        if (std::max({aa, bb, zz}) > k || aa + bb + zz > 2 * k) continue;
        c.positions.push_back({a * scale, b * scale, z * scale});
      }
  if (sigma > 0.0)
    for (Vec3& p : c.positions)
      for (double& x : p) x += sigma * rng.normal();
  c.radii.assign(c.positions.size(), cell_radius);
  c.descriptor = "hex-lattice(shells=" + std::to_string(shells) + ",sigma=" + std::to_string(sigma) + ")";
  return c;
}

double hertz_contact_area(double ri, double rj, double dist) {
  const double delta = ri + rj - dist;
  if (!(delta > 0.0)) return 0.0;
  return std::numbers::pi * (ri * rj / (ri + rj)) * delta;
}

std::vector<std::pair<std::size_t, std::size_t>> broad_phase_pairs(const CellConfiguration& c) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  if (c.size() < 2) return out;
  const double rmax = *std::max_element(c.radii.begin(), c.radii.end());
  HashGrid grid(2.0 * rmax);
  for (std::size_t i = 0; i < c.size(); ++i) grid.insert(c.positions[i], i);
  for (std::size_t i = 0; i < c.size(); ++i)
    grid.for_each_near(c.positions[i], [&](std::size_t j) {
      if (i < j) out.emplace_back(i, j);
    });
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Contact> find_contacts(const CellConfiguration& c) {
  c.validate();
  std::vector<Contact> out;
  for (const auto& [i, j] : broad_phase_pairs(c)) {
    const double dist = distance(c.positions[i], c.positions[j]);
    if (dist < kCoincident) throw DegenerateContact(i, j);
    const double area = hertz_contact_area(c.radii[i], c.radii[j], dist);
    if (area <= 0.0) continue;
    Contact ct{i, j, dist, area, {}};
    for (int k = 0; k < 3; ++k) ct.normal[k] = (c.positions[j][k] - c.positions[i][k]) / dist;
    out.push_back(ct);
  }
  return out;
}

SymBlock cell_cell_friction(const Contact& contact, const FrictionParams& params) {
  const SymBlock uu = SymBlock::outer(contact.normal);
  const SymBlock w = params.gamma_parallel * uu + params.gamma_perp * (SymBlock::identity(3) - uu);
  return contact.area * w;
}

MatrixWeightedGraph build_collision_graph(const CellConfiguration& c, const FrictionParams& params) {
  params.validate();
  std::vector<SymBlock> loops(c.size(), SymBlock::identity(3, params.gamma_med));
  std::vector<Edge> edges;
  for (const Contact& ct : find_contacts(c))
    edges.push_back({ct.i, ct.j, cell_cell_friction(ct, params)});
  return MatrixWeightedGraph(3, std::move(loops), std::move(edges));
}

ForceModel parse_force_model(std::string_view s) {
  if (s == "random") return ForceModel::Random;
  if (s == "zero") return ForceModel::Zero;
  if (s == "hertz") return ForceModel::Hertz;
  throw InputError("unknown force model '" + std::string(s) + "'");
}

const char* to_string(ForceModel m) {
  switch (m) {
    case ForceModel::Random: return "random";
    case ForceModel::Zero: return "zero";
    case ForceModel::Hertz: return "hertz";
  }
  return "?";
}

BlockVector assemble_rhs(const CellConfiguration& c, ForceModel model, std::uint64_t seed) {
  BlockVector f(c.size(), 3);
  switch (model) {
    case ForceModel::Zero:
      break;
    case ForceModel::Random: {
      SplitMix64 rng(seed);
      for (std::size_t k = 0; k < f.size(); ++k) f[k] = rng.normal();
      break;
    }
    case ForceModel::Hertz:
      for (const Contact& ct : find_contacts(c))
        for (std::size_t k = 0; k < 3; ++k) {
          f.block(ct.i)[k] -= ct.area * ct.normal[k];
          f.block(ct.j)[k] += ct.area * ct.normal[k];
        }
      break;
  }
  return f;
}

double ScenarioSpec::resolved_domain_radius() const {
  return domain_radius.value_or(domain_radius_for(n, cell_radius, packing_fraction));
}

double ScenarioSpec::resolved_min_dist() const {
  return min_dist.value_or(2.0 * kDefaultSpacingFraction * cell_radius);
}

double ScenarioSpec::resolved_spacing() const {
  return spacing.value_or(2.0 * kDefaultSpacingFraction * cell_radius);
}

std::string ScenarioSpec::label() const {
  if (type == ScenarioType::RandomSphere) return "random-sphere(n=" + std::to_string(n) + ")";
  char buf[64];
  std::snprintf(buf, sizeof buf, "hex-lattice(shells=%zu,sigma=%g)", shells, sigma);
  return buf;
}

CellConfiguration generate_scenario(const ScenarioSpec& spec, std::uint64_t seed) {
  CellConfiguration c =
      spec.type == ScenarioType::RandomSphere
          ? generate_random_sphere(spec.n, spec.resolved_domain_radius(), spec.cell_radius,
                                   spec.resolved_min_dist(), seed)
          : generate_hex_lattice(spec.shells, spec.sigma, seed, spec.cell_radius,
                                 spec.resolved_spacing());
  c.descriptor = spec.label();
  return c;
}

}  // namespace supportgraph
