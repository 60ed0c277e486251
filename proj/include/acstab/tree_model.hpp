#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "rng.hpp"

namespace acstab {

inline constexpr double kPi = 3.14159265358979323846;

// Rooted K-ary tree truncated at a finite depth.  Vertices are stored in
// breadth-first order: generation n occupies indices
// [offset(n), offset(n+1)) with offset(n) = (K^n - 1)/(K - 1).
struct TreeTopology {
  int branching = 2;  // K, children per vertex
  int depth = 0;      // generations below the root

  void validate() const {
    if (branching < 2) throw config_error("tree: branching must be >= 2");
    if (depth < 0) throw config_error("tree: depth must be >= 0");
    // Materialized trees are capped; deep studies go through the radial or
    // pool representations instead.
    if (depth > 0 && std::pow(double(branching), depth) > double(1u << 22))
      throw config_error("tree: too many vertices to materialize");
  }

  std::size_t generation_size(int n) const {
    std::size_t s = 1;
    for (int i = 0; i < n; ++i) s *= std::size_t(branching);
    return s;
  }

  std::size_t generation_offset(int n) const {
    // (K^n - 1) / (K - 1)
    std::size_t s = 0, p = 1;
    for (int i = 0; i < n; ++i) {
      s += p;
      p *= std::size_t(branching);
    }
    return s;
  }

  std::size_t vertex_count() const { return generation_offset(depth + 1); }

  int generation_of(std::size_t v) const {
    int g = 0;
    while (generation_offset(g + 1) <= v) ++g;
    return g;
  }

  std::size_t parent_index(std::size_t v) const {
    int g = generation_of(v);
    std::size_t rank = v - generation_offset(g);
    return generation_offset(g - 1) + rank / std::size_t(branching);
  }

  std::size_t first_child_index(std::size_t v) const {
    int g = generation_of(v);
    std::size_t rank = v - generation_offset(g);
    return generation_offset(g + 1) + rank * std::size_t(branching);
  }
};

// Path address of a vertex: the sequence of child slots (each in [0, K))
// taken from the root.  The root is the empty path.
struct VertexId {
  std::vector<int> path;
  int generation() const { return int(path.size()); }
};

inline void check_vertex(const TreeTopology& t, const VertexId& v) {
  if (v.generation() > t.depth)
    throw config_error("vertex: generation exceeds tree depth");
  for (int c : v.path)
    if (c < 0 || c >= t.branching)
      throw config_error("vertex: child slot out of range");
}

inline std::size_t index_of(const TreeTopology& t, const VertexId& v) {
  check_vertex(t, v);
  std::size_t rank = 0;
  for (int c : v.path) rank = rank * std::size_t(t.branching) + std::size_t(c);
  return t.generation_offset(v.generation()) + rank;
}

inline VertexId vertex_of(const TreeTopology& t, std::size_t index) {
  if (index >= t.vertex_count()) throw config_error("vertex: index out of range");
  int g = t.generation_of(index);
  std::size_t rank = index - t.generation_offset(g);
  VertexId v;
  v.path.resize(std::size_t(g));
  for (int i = g - 1; i >= 0; --i) {
    v.path[std::size_t(i)] = int(rank % std::size_t(t.branching));
    rank /= std::size_t(t.branching);
  }
  return v;
}

// Children of v, in child-slot order.  Empty at the truncation depth.
inline std::vector<VertexId> forward_neighbors(const TreeTopology& t, const VertexId& v) {
  check_vertex(t, v);
  if (v.generation() == t.depth) return {};
  std::vector<VertexId> out;
  out.reserve(std::size_t(t.branching));
  for (int c = 0; c < t.branching; ++c) {
    VertexId w = v;
    w.path.push_back(c);
    out.push_back(std::move(w));
  }
  return out;
}

inline std::optional<VertexId> backward_neighbor(const VertexId& v) {
  if (v.path.empty()) return std::nullopt;
  VertexId w = v;
  w.path.pop_back();
  return w;
}

enum class DisorderFamily { uniform, two_point, truncated_gaussian };
enum class DisorderCorrelation { iid, radial };

// Single-site disorder law (mean zero, bounded support) plus the coupling
// strength lambda and the correlation structure across the tree.
struct DisorderSpec {
  DisorderFamily family = DisorderFamily::uniform;
  DisorderCorrelation correlation = DisorderCorrelation::iid;
  double strength = 0.0;  // lambda >= 0
  double kappa = 1.0;     // weak-correlation constant, 1 for iid
  double sigma = 1.0;     // truncated_gaussian scale
  double cutoff = 3.0;    // truncated_gaussian support bound

  void validate() const {
    if (strength < 0) throw config_error("disorder: strength must be >= 0");
    if (!(kappa > 0.0) || kappa > 1.0)
      throw config_error("disorder: kappa must lie in (0, 1]");
    if (correlation == DisorderCorrelation::iid && kappa != 1.0)
      throw config_error("disorder: kappa is fixed to 1 for iid disorder");
    if (family == DisorderFamily::truncated_gaussian) {
      if (!(sigma > 0)) throw config_error("disorder: sigma must be > 0");
      if (!(cutoff > 0)) throw config_error("disorder: cutoff must be > 0");
    }
  }

  // One draw of the unit-coupling variable omega (lambda is applied by callers).
  double draw(std::mt19937_64& g) const {
    switch (family) {
      case DisorderFamily::uniform:
        return 2.0 * uniform01(g) - 1.0;
      case DisorderFamily::two_point:
        return (g() & 1u) ? 1.0 : -1.0;
      case DisorderFamily::truncated_gaussian:
        for (;;) {
          double u1 = uniform01(g), u2 = uniform01(g);
          // Box-Muller; 1-u1 keeps the log argument in (0,1].
          double x = sigma * std::sqrt(-2.0 * std::log(1.0 - u1)) *
                     std::cos(2.0 * kPi * u2);
          if (std::abs(x) <= cutoff) return x;
        }
    }
    throw config_error("disorder: unknown family");
  }

  double support_bound() const {
    switch (family) {
      case DisorderFamily::uniform: return 1.0;
      case DisorderFamily::two_point: return 1.0;
      case DisorderFamily::truncated_gaussian: return cutoff;
    }
    throw config_error("disorder: unknown family");
  }

  // Exact standard deviation of one draw.
  double stddev() const {
    switch (family) {
      case DisorderFamily::uniform: return 1.0 / std::sqrt(3.0);
      case DisorderFamily::two_point: return 1.0;
      case DisorderFamily::truncated_gaussian: {
        double a = cutoff / sigma;
        double phi = std::exp(-0.5 * a * a) / std::sqrt(2.0 * kPi);
        double mass = std::erf(a / std::sqrt(2.0));  // = 2 Phi(a) - 1
        return sigma * std::sqrt(1.0 - 2.0 * a * phi / mass);
      }
    }
    throw config_error("disorder: unknown family");
  }
};

enum class PotentialKind { zero, radial_periodic, quasi_periodic };

// Deterministic background potential; all kinds depend on the generation only.
struct PotentialSpec {
  PotentialKind kind = PotentialKind::zero;
  std::vector<double> values;  // radial_periodic: one value per residue, size = period
  double amplitude = 0.0;      // quasi_periodic u0
  double frequency = 0.0;      // quasi_periodic alpha
  double phase = 0.0;          // quasi_periodic theta0

  void validate() const {
    if (kind == PotentialKind::radial_periodic && values.empty())
      throw config_error("potential: radial_periodic needs a nonempty period");
  }

  int period() const {
    return kind == PotentialKind::radial_periodic ? int(values.size()) : 1;
  }

  double at_generation(long long n) const {
    switch (kind) {
      case PotentialKind::zero:
        return 0.0;
      case PotentialKind::radial_periodic:
        return values[std::size_t(n % (long long)values.size())];
      case PotentialKind::quasi_periodic:
        return amplitude *
               std::cos(std::fmod(phase + 2.0 * kPi * frequency * double(n),
                                  2.0 * kPi));
    }
    throw config_error("potential: unknown kind");
  }
};

// A sampled finite tree: topology plus one disorder realization and the
// per-generation background potential.  omega is stored per vertex in
// breadth-first order even when the correlation is radial, in which case all
// vertices of a generation share one value.
struct TreeInstance {
  TreeTopology topology;
  DisorderSpec disorder;
  PotentialSpec potential;
  std::uint64_t seed = 0;
  std::vector<double> omega;
  std::vector<double> potential_gen;  // indexed by generation

  double onsite(std::size_t v, int gen) const {
    return disorder.strength * omega[v] + potential_gen[std::size_t(gen)];
  }
};

inline TreeInstance build_instance(const TreeTopology& topo, const DisorderSpec& dis,
                                   const PotentialSpec& pot, std::uint64_t seed) {
  topo.validate();
  dis.validate();
  pot.validate();
  TreeInstance inst;
  inst.topology = topo;
  inst.disorder = dis;
  inst.potential = pot;
  inst.seed = seed;
  std::size_t n = topo.vertex_count();
  inst.omega.resize(n);
  std::mt19937_64 g(derive_seed(seed, 0));
  if (dis.correlation == DisorderCorrelation::iid) {
    for (std::size_t v = 0; v < n; ++v) inst.omega[v] = dis.draw(g);
  } else {
    for (int gen = 0; gen <= topo.depth; ++gen) {
      double xi = dis.draw(g);
      std::size_t lo = topo.generation_offset(gen), hi = topo.generation_offset(gen + 1);
      for (std::size_t v = lo; v < hi; ++v) inst.omega[v] = xi;
    }
  }
  inst.potential_gen.resize(std::size_t(topo.depth) + 1);
  for (int gen = 0; gen <= topo.depth; ++gen)
    inst.potential_gen[std::size_t(gen)] = pot.at_generation(gen);
  return inst;
}

}  // namespace acstab
