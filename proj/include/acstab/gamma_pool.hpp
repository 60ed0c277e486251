#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "green_recursion.hpp"

namespace acstab {

// Monte Carlo population representing the distribution of the root ratio on
// the infinite tree.  One elementary update draws K members with replacement,
// draws a fresh on-site disorder value, forms the new ratio and overwrites a
// uniformly chosen slot.
struct GammaPool {
  std::vector<Complex> samples;
  std::uint64_t sweeps_done = 0;
};

// One pool per residue class of the generation modulo the potential period.
// Class c is refreshed by drawing from class (c+1) mod tau, matching the
// direction of the recursion (a vertex looks at its children one generation
// down).  For aperiodic potentials tau = 1.
struct PoolFamily {
  std::vector<GammaPool> classes;
  std::mt19937_64 rng;
  std::uint64_t seed = 0;

  int period() const { return int(classes.size()); }
};

inline constexpr std::size_t kMinPoolSize = 1000;

inline PoolFamily make_pool_family(std::size_t size, int period, Complex init,
                                   std::uint64_t seed) {
  if (size < kMinPoolSize) throw config_error("pool: size must be >= 1000");
  if (period < 1) throw config_error("pool: period must be >= 1");
  if (!(init.imag() > 0.0)) throw config_error("pool: init must have Im > 0");
  PoolFamily f;
  f.classes.resize(std::size_t(period));
  for (auto& p : f.classes) p.samples.assign(size, init);
  f.seed = seed;
  f.rng.seed(derive_seed(seed, 1));
  return f;
}

// Runs `sweeps` sweeps of N elementary updates each (N = pool size).  Updates
// cycle through the residue classes round robin.  Only iid disorder and
// generation-periodic (or zero) potentials keep the population recursion
// exact, so anything else is rejected.
inline void pool_iterate(PoolFamily& family, int branching, const DisorderSpec& dis,
                         const PotentialSpec& pot, const SpectralPoint& zp, int sweeps) {
  dis.validate();
  pot.validate();
  zp.validate();
  if (branching < 2) throw config_error("pool: branching must be >= 2");
  if (!(zp.eta > 0.0)) throw config_error("pool: eta must be > 0");
  if (dis.correlation != DisorderCorrelation::iid)
    throw config_error("pool: only iid disorder; radial laws need the chain ensemble");
  if (pot.kind == PotentialKind::quasi_periodic)
    throw config_error("pool: quasi-periodic potentials are not distributionally recursive");
  const int tau = pot.period();
  if (family.period() != tau) throw config_error("pool: family period does not match potential");
  const std::size_t n = family.classes[0].samples.size();
  for (const auto& p : family.classes)
    if (p.samples.size() != n || n < kMinPoolSize)
      throw config_error("pool: class sizes invalid");

  const Complex z = zp.z();
  const int K = branching;
  std::mt19937_64& g = family.rng;
  for (int s = 0; s < sweeps; ++s) {
    for (std::size_t t = 0; t < n; ++t) {
      int c = int(t % std::size_t(tau));
      const auto& src = family.classes[std::size_t((c + 1) % tau)].samples;
      Complex sum{0.0, 0.0};
      for (int j = 0; j < K; ++j) sum += src[uniform_index(g, n)];
      double w = dis.strength * dis.draw(g) + pot.at_generation(c);
      Complex val = gamma_step(w, z, sum);
      herglotz_guard(val, zp.eta, "pool_iterate");
      family.classes[std::size_t(c)].samples[uniform_index(g, n)] = val;
    }
    for (auto& p : family.classes) ++p.sweeps_done;
  }
}

// Root-class samples; the observable face of the family.
inline const std::vector<Complex>& root_samples(const PoolFamily& f) {
  return f.classes[0].samples;
}

// Ensemble of independent radial chains: each member runs the scalar radial
// recursion with fresh per-generation disorder.  This is the estimator for
// radially correlated laws, where the pool update does not apply.
inline std::vector<Complex> radial_ensemble(const DisorderSpec& dis, const PotentialSpec& pot,
                                            int branching, const SpectralPoint& zp, int depth,
                                            std::size_t chains, std::uint64_t seed) {
  dis.validate();
  pot.validate();
  zp.validate();
  if (branching < 2) throw config_error("radial ensemble: branching must be >= 2");
  if (depth < 1) throw config_error("radial ensemble: depth must be >= 1");
  if (chains < 1) throw config_error("radial ensemble: chains must be >= 1");
  std::vector<double> u(static_cast<std::size_t>(depth), 0.0);
  std::vector<double> xi(static_cast<std::size_t>(depth), 0.0);
  for (int nn = 0; nn < depth; ++nn) u[std::size_t(nn)] = pot.at_generation(nn);
  std::vector<Complex> out;
  out.reserve(chains);
  for (std::size_t c = 0; c < chains; ++c) {
    std::mt19937_64 g(derive_seed(seed, c));
    for (auto& x : xi) x = dis.draw(g);
    out.push_back(radial_recursion(u, xi, dis.strength, branching, zp));
  }
  return out;
}

}  // namespace acstab
