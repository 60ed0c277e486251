#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "gamma_pool.hpp"

namespace acstab {

// 2x2 complex matrix, row major.
using Mat2c = std::array<Complex, 4>;

// Transfer matrix of -psi'' = k^2 psi across an interval of length L, mapping
// Cauchy data at the far end to the near end:
//   (psi(0), psi'(0))^T = M (psi(L), psi'(L))^T,
//   M = [[cos kL, -sin(kL)/k], [k sin kL, cos kL]],  det M = 1,
// with the k -> 0 limit [[1, -L], [0, 1]].
inline Mat2c interval_transfer(double length, Complex k) {
  if (!(length > 0.0)) throw config_error("interval transfer: length must be > 0");
  if (k == Complex(0.0, 0.0)) return {Complex(1.0), Complex(-length), Complex(0.0), Complex(1.0)};
  Complex kl = k * length;
  Complex c = std::cos(kl), s = std::sin(kl);
  return {c, -s / k, k * s, c};
}

inline Complex det2(const Mat2c& m) { return m[0] * m[3] - m[1] * m[2]; }

// Transports the derivative-to-value ratio R = psi'/psi from the far end of
// an interval to the near end.
inline Complex ratio_transport(const Mat2c& m, Complex r_far) {
  Complex den = m[0] + m[1] * r_far;
  if (den == Complex(0.0, 0.0)) throw numeric_error("ratio transport: singular point");
  return (m[2] + m[3] * r_far) / den;
}

// Metric tree: every graph edge carries a length; edge e_v is the one between
// vertex v >= 1 and its parent, stored at index v - 1.
struct QGraphInstance {
  TreeTopology topology;
  double base_length = 1.0;
  double alpha_root = 0.0;  // Robin parameter of the root boundary transform
  std::uint64_t seed = 0;
  std::vector<double> edge_lengths;

  double edge_length(std::size_t v) const { return edge_lengths[v - 1]; }
};

// Edge lengths L_e = L * exp(lambda * omega_e) with iid bounded omega.
inline QGraphInstance build_qgraph(const TreeTopology& topo, double base_length,
                                   const DisorderSpec& dis, double alpha_root,
                                   std::uint64_t seed) {
  topo.validate();
  dis.validate();
  if (!(base_length > 0.0)) throw config_error("qgraph: base length must be > 0");
  if (topo.depth < 1) throw config_error("qgraph: depth must be >= 1");
  if (dis.correlation != DisorderCorrelation::iid)
    throw config_error("qgraph: edge lengths must be iid");
  QGraphInstance inst;
  inst.topology = topo;
  inst.base_length = base_length;
  inst.alpha_root = alpha_root;
  inst.seed = seed;
  std::size_t n = topo.vertex_count();
  inst.edge_lengths.resize(n - 1);
  std::mt19937_64 g(derive_seed(seed, 3));
  for (auto& l : inst.edge_lengths) l = base_length * std::exp(dis.strength * dis.draw(g));
  return inst;
}

// Bottom-up Kirchhoff sweep.  R_v is the ratio psi'/psi at the parent end of
// edge e_v; at each internal vertex the far-end ratio of the parent edge is
// the sum of child ratios, and leaves carry the boundary ratio leaf_init
// (0 = Neumann).  Returns the root Weyl function m = sum of R over root edges.
// Energy enters through complex momentum k with Im k^2 >= 0.
inline Complex qg_recursion(const QGraphInstance& inst, Complex k, Complex leaf_init) {
  const TreeTopology& t = inst.topology;
  const int K = t.branching;
  double eta = (k * k).imag();
  if (eta < 0.0) throw config_error("qg recursion: Im k^2 must be >= 0");
  std::vector<Complex> r(t.vertex_count());
  for (int gen = t.depth; gen >= 1; --gen) {
    std::size_t lo = t.generation_offset(gen), hi = t.generation_offset(gen + 1);
    for (std::size_t v = lo; v < hi; ++v) {
      Complex far;
      if (gen == t.depth) {
        far = leaf_init;
      } else {
        std::size_t c0 = t.first_child_index(v);
        far = Complex(0.0, 0.0);
        for (int c = 0; c < K; ++c) far += r[c0 + std::size_t(c)];
      }
      r[v] = ratio_transport(interval_transfer(inst.edge_length(v), k), far);
      if (eta > 0.0 && !(r[v].imag() > 0.0))
        throw numeric_error("qg recursion: herglotz violated");
    }
  }
  Complex m{0.0, 0.0};
  std::size_t c0 = t.first_child_index(0);
  for (int c = 0; c < K; ++c) m += r[c0 + std::size_t(c)];
  return m;
}

// Robin rotation of the root Weyl function.
inline Complex root_weyl_transform(Complex m, double alpha) {
  double c = std::cos(alpha), s = std::sin(alpha);
  Complex den = Complex(c, 0.0) - Complex(s, 0.0) * m;
  if (den == Complex(0.0, 0.0)) throw numeric_error("root transform: singular point");
  return (m * c + s) / den;
}

// Self-consistent ratio of the regular (equal length) infinite tree: the
// fixed point of R = transport(M(L,k), K R), found by iteration from the
// upper half plane.  Converges for Im k^2 > 0.
inline Complex qg_regular_fixed_point(int branching, double length, Complex k,
                                      int max_iter = 2000, double tol = 1e-14) {
  if (branching < 2) throw config_error("qg fixed point: branching must be >= 2");
  Mat2c m = interval_transfer(length, k);
  Complex r{0.0, 1.0};
  for (int i = 0; i < max_iter; ++i) {
    Complex next = ratio_transport(m, double(branching) * r);
    if (std::abs(next - r) < tol * (1.0 + std::abs(next))) return next;
    r = next;
  }
  return r;
}

// Spectral bands of the regular K-ary metric tree with common edge length L:
// energies E = k^2 with |cos kL| <= 2 sqrt(K)/(K+1), i.e.
// kL in [n pi + theta, (n+1) pi - theta] with theta = arctan((K-1)/(2 sqrt K)).
struct QGraphBand {
  int index = 0;
  double k_lo = 0.0, k_hi = 0.0;
  double e_lo = 0.0, e_hi = 0.0;
};

inline double band_theta(int branching) {
  if (branching < 2) throw config_error("band theta: branching must be >= 2");
  return std::atan((double(branching) - 1.0) / (2.0 * std::sqrt(double(branching))));
}

inline std::vector<QGraphBand> regular_bands(int branching, double length, int count) {
  if (!(length > 0.0)) throw config_error("regular bands: length must be > 0");
  if (count < 1) throw config_error("regular bands: count must be >= 1");
  double theta = band_theta(branching);
  std::vector<QGraphBand> out;
  for (int n = 0; n < count; ++n) {
    QGraphBand b;
    b.index = n;
    b.k_lo = (double(n) * kPi + theta) / length;
    b.k_hi = (double(n + 1) * kPi - theta) / length;
    b.e_lo = b.k_lo * b.k_lo;
    b.e_hi = b.k_hi * b.k_hi;
    out.push_back(b);
  }
  return out;
}

// The fixed-point equation (sin kL * K/k) W^2 + cos kL (K-1) W + k sin kL = 0
// leaves the real axis exactly when cos^2 kL (K-1)^2 < 4 K sin^2 kL.  Band
// edges are therefore the roots of
//   disc(k) = cos^2 kL (K+1)^2 - 4K.
inline double qg_edge_discriminant(int branching, double length, double k) {
  double c = std::cos(k * length);
  double kk = double(branching);
  return c * c * (kk + 1.0) * (kk + 1.0) - 4.0 * kk;
}

// All roots of the discriminant in (0, k_max], located by sign-change
// bisection on a fine grid.
inline std::vector<double> qg_band_edges_from_fixed_point(int branching, double length,
                                                          double k_max) {
  if (!(k_max > 0.0)) throw config_error("band edges: k_max must be > 0");
  std::vector<double> edges;
  int steps = int(std::ceil(k_max * length / (kPi / 400.0)));
  double prev_k = 1e-12, prev_d = qg_edge_discriminant(branching, length, prev_k);
  for (int i = 1; i <= steps; ++i) {
    double k = k_max * double(i) / double(steps);
    double d = qg_edge_discriminant(branching, length, k);
    if ((prev_d < 0.0) != (d < 0.0)) {
      double a = prev_k, b = k;
      for (int it = 0; it < 100; ++it) {
        double mid = 0.5 * (a + b);
        if ((qg_edge_discriminant(branching, length, a) < 0.0) ==
            (qg_edge_discriminant(branching, length, mid) < 0.0))
          a = mid;
        else
          b = mid;
      }
      edges.push_back(0.5 * (a + b));
    }
    prev_k = k;
    prev_d = d;
  }
  return edges;
}

// Population update for random edge lengths: like the lattice pool but the
// elementary move transports the sum of K draws through a freshly drawn
// interval.
struct QGraphEnsemble {
  int branching = 2;
  double base_length = 1.0;
  DisorderSpec disorder;  // iid; strength is the length modulation lambda

  void validate() const {
    disorder.validate();
    if (branching < 2) throw config_error("qg ensemble: branching must be >= 2");
    if (!(base_length > 0.0)) throw config_error("qg ensemble: base length must be > 0");
    if (disorder.correlation != DisorderCorrelation::iid)
      throw config_error("qg ensemble: edge lengths must be iid");
  }
};

inline void qg_pool_iterate(PoolFamily& family, const QGraphEnsemble& ens, Complex k,
                            int sweeps) {
  ens.validate();
  if (family.period() != 1) throw config_error("qg pool: period must be 1");
  double eta = (k * k).imag();
  if (!(eta > 0.0)) throw config_error("qg pool: Im k^2 must be > 0");
  auto& samples = family.classes[0].samples;
  const std::size_t n = samples.size();
  if (n < kMinPoolSize) throw config_error("qg pool: pool too small");
  std::mt19937_64& g = family.rng;
  const int K = ens.branching;
  for (int s = 0; s < sweeps; ++s) {
    for (std::size_t t = 0; t < n; ++t) {
      Complex sum{0.0, 0.0};
      for (int j = 0; j < K; ++j) sum += samples[uniform_index(g, n)];
      double len = ens.base_length * std::exp(ens.disorder.strength * ens.disorder.draw(g));
      Complex val = ratio_transport(interval_transfer(len, k), sum);
      if (!(val.imag() > 0.0)) throw numeric_error("qg pool: herglotz violated");
      samples[uniform_index(g, n)] = val;
    }
    ++family.classes[0].sweeps_done;
  }
}

}  // namespace acstab
