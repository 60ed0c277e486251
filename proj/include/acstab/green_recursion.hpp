#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "tree_model.hpp"

namespace acstab {

using Complex = std::complex<double>;

// A spectral parameter z = energy + i*eta in the closed upper half plane.
struct SpectralPoint {
  double energy = 0.0;
  double eta = 0.0;

  Complex z() const { return {energy, eta}; }

  void validate() const {
    if (!(eta >= 0.0)) throw config_error("spectral point: eta must be >= 0");
    if (!std::isfinite(energy)) throw config_error("spectral point: energy not finite");
  }
};

// Herglotz root of a*G^2 + z*G + 1 = 0 with a > 0.  For Im z > 0 exactly one
// root lies in the upper half plane.  On the real axis the boundary value of
// that branch is returned: complex with Im > 0 for |E| < 2*sqrt(a), and the
// smaller-modulus real root for |E| > 2*sqrt(a).
inline Complex herglotz_quadratic_root(double a, Complex z) {
  double E = z.real(), eta = z.imag();
  double band = 2.0 * std::sqrt(a);
  if (eta == 0.0) {
    if (std::abs(E) <= band) {
      double im = std::sqrt(band * band - E * E) / (2.0 * a);
      return {-E / (2.0 * a), im};
    }
    double s = E > 0 ? 1.0 : -1.0;
    double big = (-E - s * std::sqrt(E * E - band * band)) / (2.0 * a);
    return {1.0 / (a * big), 0.0};  // product of roots is 1/a
  }
  Complex disc = std::sqrt(z * z - Complex(band * band, 0.0));
  // Add the discriminant to z with matching sign to avoid cancellation,
  // then recover the other root through the product 1/a.
  Complex t = (std::real(std::conj(z) * disc) >= 0.0) ? z + disc : z - disc;
  Complex r1 = -t / (2.0 * a);
  Complex r2 = 1.0 / (a * r1);
  if (r1.imag() > 0.0 && r2.imag() <= 0.0) return r1;
  if (r2.imag() > 0.0 && r1.imag() <= 0.0) return r2;
  throw numeric_error("herglotz quadratic: branch selection failed");
}

// Fixed point of the disorder-free recursion G = 1/(-z - K*G) on the K-ary
// tree, i.e. the Herglotz root of K*G^2 + z*G + 1 = 0.
inline Complex free_fixed_point(int branching, const SpectralPoint& zp) {
  if (branching < 2) throw config_error("free fixed point: branching must be >= 2");
  zp.validate();
  return herglotz_quadratic_root(double(branching), zp.z());
}

// Free half-line value: Herglotz root of m^2 + z'*m + 1 = 0.
inline Complex halfline_free_value(Complex zprime) {
  if (zprime.imag() < 0.0) throw config_error("halfline: Im z' must be >= 0");
  return herglotz_quadratic_root(1.0, zprime);
}

// One step of the ratio recursion: G = 1/(w - z - S) where w is the on-site
// value and S the sum over forward neighbors.
inline Complex gamma_step(double onsite, Complex z, Complex child_sum) {
  Complex den = Complex(onsite, 0.0) - z - child_sum;
  if (den == Complex(0.0, 0.0)) throw numeric_error("gamma step: singular point");
  return 1.0 / den;
}

inline void herglotz_guard(Complex g, double eta, const char* where) {
  if (eta > 0.0 && !(g.imag() > 0.0))
    throw numeric_error(std::string("herglotz violated in ") + where);
}

// Bottom-up ratio sweep over a materialized tree.  Leaves start from
// leaf_init (Im >= 0); every vertex of generation < depth gets
// G_x = 1/(onsite_x - z - sum over children).  Returns one value per vertex
// in breadth-first order.  Requires eta > 0 so the map is a strict
// contraction into the upper half plane.
inline std::vector<Complex> recurse_finite(const TreeInstance& inst, const SpectralPoint& zp,
                                           Complex leaf_init) {
  zp.validate();
  if (!(zp.eta > 0.0)) throw config_error("recurse_finite: eta must be > 0");
  if (leaf_init.imag() < 0.0) throw config_error("recurse_finite: leaf_init must have Im >= 0");
  const TreeTopology& t = inst.topology;
  const int K = t.branching;
  Complex z = zp.z();
  std::vector<Complex> out(t.vertex_count());
  std::size_t leaf_lo = t.generation_offset(t.depth);
  for (std::size_t v = leaf_lo; v < out.size(); ++v) {
    out[v] = gamma_step(inst.onsite(v, t.depth), z, leaf_init * double(K));
    herglotz_guard(out[v], zp.eta, "recurse_finite");
  }
  for (int gen = t.depth - 1; gen >= 0; --gen) {
    std::size_t lo = t.generation_offset(gen), hi = t.generation_offset(gen + 1);
    for (std::size_t v = lo; v < hi; ++v) {
      std::size_t c0 = t.first_child_index(v);
      Complex sum{0.0, 0.0};
      for (int c = 0; c < K; ++c) sum += out[c0 + std::size_t(c)];
      out[v] = gamma_step(inst.onsite(v, gen), z, sum);
      herglotz_guard(out[v], zp.eta, "recurse_finite");
    }
  }
  return out;
}

// Ratio at the root of a radial tree, where all vertices of generation n
// share the on-site value U[n] + lambda*xi[n].  The K children of any vertex
// then carry identical subtrees, so the vector recursion collapses to the
// scalar map G_n = 1/(U_n + lambda*xi_n - z - K*G_{n+1}) started from the
// disorder-free fixed point at the truncation depth.
inline Complex radial_recursion(std::span<const double> u_seq, std::span<const double> xi_seq,
                                double lambda, int branching, const SpectralPoint& zp) {
  if (u_seq.size() != xi_seq.size())
    throw config_error("radial recursion: sequence lengths differ");
  if (u_seq.empty()) throw config_error("radial recursion: empty sequences");
  zp.validate();
  Complex z = zp.z();
  Complex g = free_fixed_point(branching, zp);
  for (std::size_t i = u_seq.size(); i-- > 0;) {
    g = gamma_step(u_seq[i] + lambda * xi_seq[i], z, double(branching) * g);
    herglotz_guard(g, zp.eta, "radial_recursion");
  }
  return g;
}

// Half-line continued fraction m_n = 1/(V_n - z' - m_{n+1}), truncated with
// the free half-line value.  Returns m_0.
inline Complex halfline_m(std::span<const double> v_seq, Complex zprime) {
  if (v_seq.empty()) throw config_error("halfline: empty sequence");
  Complex m = halfline_free_value(zprime);
  for (std::size_t i = v_seq.size(); i-- > 0;) {
    m = gamma_step(v_seq[i], zprime, m);
    herglotz_guard(m, zprime.imag(), "halfline_m");
  }
  return m;
}

// Root ratio for the quasi-periodic radial potential
// U_n = u0*cos(theta + 2*pi*alpha*n), iterated from the free fixed point at
// the given depth.  The phase enters through the shift theta -> theta +
// 2*pi*alpha per generation.
inline Complex qp_cocycle_iterate(double u0, double alpha, double theta, int branching,
                                  const SpectralPoint& zp, int depth) {
  if (depth < 0) throw config_error("qp cocycle: depth must be >= 0");
  zp.validate();
  Complex z = zp.z();
  Complex g = free_fixed_point(branching, zp);
  for (int n = depth - 1; n >= 0; --n) {
    double u = u0 * std::cos(std::fmod(theta + 2.0 * kPi * alpha * double(n), 2.0 * kPi));
    g = gamma_step(u, z, double(branching) * g);
    herglotz_guard(g, zp.eta, "qp_cocycle_iterate");
  }
  return g;
}

// Geometric ladder eta_0 > eta_1 > ... used to approach the real axis.  The
// descent stops when successive observable values agree within tol or the
// floor is reached, whichever comes first.
struct EtaLadder {
  double start = 1.0;
  double factor = 2.0;
  double floor = 1e-3;
  double tol = 1e-4;

  void validate() const {
    if (!(start > 0) || !(floor > 0) || start < floor)
      throw config_error("eta ladder: need start >= floor > 0");
    if (!(factor > 1.0)) throw config_error("eta ladder: factor must be > 1");
    if (!(tol > 0)) throw config_error("eta ladder: tol must be > 0");
  }

  std::vector<double> rungs() const {
    validate();
    std::vector<double> out;
    for (double eta = start; eta > floor * (1.0 + 1e-12); eta /= factor)
      out.push_back(eta);
    out.push_back(floor);
    return out;
  }
};

// Lyapunov exponent of the half-line operator with potential
// V_n = (U_n + lambda*xi_n)/sqrt(K) at real energy E' = E/sqrt(K), from the
// norm growth of the transfer matrix cocycle
//   T_n = [[E' - V_n, -1], [1, 0]].
// Returns the per-step rate and a block standard error.
struct LyapunovRun {
  double gamma = 0.0;
  double std_error = 0.0;
  std::size_t steps = 0;
};

template <class PotentialFn>
LyapunovRun transfer_lyapunov(PotentialFn&& v_at, double eprime, std::size_t steps,
                              int blocks = 100) {
  if (steps < 1000) throw config_error("transfer lyapunov: too few steps");
  double w0 = 1.0, w1 = 0.0;  // (psi_{n+1}, psi_n) after n steps
  std::vector<double> block_sum(std::size_t(blocks), 0.0);
  std::size_t per_block = steps / std::size_t(blocks);
  steps = per_block * std::size_t(blocks);
  for (std::size_t b = 0; b < std::size_t(blocks); ++b) {
    double acc = 0.0;
    for (std::size_t k = 0; k < per_block; ++k) {
      double v = v_at(b * per_block + k);
      double t0 = (eprime - v) * w0 - w1;
      double t1 = w0;
      double norm = std::sqrt(t0 * t0 + t1 * t1);
      if (norm == 0.0) throw numeric_error("transfer lyapunov: vector collapsed");
      acc += std::log(norm);
      w0 = t0 / norm;
      w1 = t1 / norm;
    }
    block_sum[b] = acc / double(per_block);
  }
  double mean = 0.0;
  for (double s : block_sum) mean += s;
  mean /= double(blocks);
  double var = 0.0;
  for (double s : block_sum) var += (s - mean) * (s - mean);
  var /= double(blocks - 1);
  LyapunovRun out;
  out.gamma = mean;
  out.std_error = std::sqrt(var / double(blocks));
  out.steps = steps;
  return out;
}

// Convenience wrapper for radial disorder: V_n = (U_n + lambda*xi_n)/sqrt(K)
// with fresh iid xi per generation.
inline LyapunovRun halfline_lyapunov(const DisorderSpec& dis, const PotentialSpec& pot,
                                     int branching, double energy, std::size_t steps,
                                     std::uint64_t seed) {
  dis.validate();
  pot.validate();
  if (branching < 2) throw config_error("halfline lyapunov: branching must be >= 2");
  double rk = std::sqrt(double(branching));
  std::mt19937_64 g(derive_seed(seed, 0));
  // Pre-drawing per step keeps the stream independent of block layout.
  auto v_at = [&](std::size_t n) {
    return (pot.at_generation((long long)n) + dis.strength * dis.draw(g)) / rk;
  };
  return transfer_lyapunov(v_at, energy / rk, steps);
}

}  // namespace acstab
