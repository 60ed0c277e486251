#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "gamma_pool.hpp"

namespace acstab {

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

inline Estimate mean_and_error(std::span<const double> xs) {
  if (xs.empty()) throw config_error("mean: empty sample");
  double m = 0.0;
  for (double x : xs) m += x;
  m /= double(xs.size());
  double v = 0.0;
  for (double x : xs) v += (x - m) * (x - m);
  v = xs.size() > 1 ? v / double(xs.size() - 1) : 0.0;
  return {m, std::sqrt(v / double(xs.size()))};
}

// Relative alpha-quantile width delta(X, alpha) = (xi_hi - xi_lo) / xi_hi,
// where xi_lo is the largest value with at most an alpha fraction of the
// sample strictly below it and xi_hi the smallest with at most an alpha
// fraction strictly above.  With m = floor(alpha*N) on the sorted sample
// these are the order statistics x_(m+1) and x_(N-m).
struct QuantileWidth {
  double alpha = 0.0;
  double xi_lo = 0.0;
  double xi_hi = 0.0;
  double delta = 0.0;
};

inline QuantileWidth alpha_width(std::vector<double> samples, double alpha) {
  if (samples.empty()) throw std::domain_error("alpha_width: empty sample");
  if (!(alpha > 0.0) || !(alpha < 0.5))
    throw std::domain_error("alpha_width: alpha must lie in (0, 1/2)");
  std::sort(samples.begin(), samples.end());
  std::size_t n = samples.size();
  std::size_t m = std::size_t(std::floor(alpha * double(n)));
  QuantileWidth q;
  q.alpha = alpha;
  q.xi_lo = samples[m];
  q.xi_hi = samples[n - 1 - m];
  if (!(q.xi_hi > 0.0)) throw std::domain_error("alpha_width: upper quantile must be > 0");
  q.delta = (q.xi_hi - q.xi_lo) / q.xi_hi;
  return q;
}

// Lyapunov functional gamma = E[-log(sqrt(K) |G|)] over a sample of ratios.
inline Estimate lyapunov(std::span<const Complex> samples, int branching) {
  if (samples.empty()) throw config_error("lyapunov: empty sample");
  double half_log_k = 0.5 * std::log(double(branching));
  std::vector<double> xs;
  xs.reserve(samples.size());
  for (Complex g : samples) {
    double a = std::abs(g);
    if (!(a > 0.0)) throw numeric_error("lyapunov: zero ratio in sample");
    xs.push_back(-(std::log(a) + half_log_k));
  }
  return mean_and_error(xs);
}

// Mean density of states estimate E[Im G]/pi at the pool's spectral point.
inline Estimate ac_density(std::span<const Complex> samples) {
  if (samples.empty()) throw config_error("ac_density: empty sample");
  std::vector<double> xs;
  xs.reserve(samples.size());
  for (Complex g : samples) xs.push_back(g.imag() / kPi);
  return mean_and_error(xs);
}

struct CheckReport {
  std::string check;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;      // rhs - lhs, or the margin being tested
  double std_error = 0.0;  // statistical error of the slack
  bool pass = false;
};

// Exchangeable K-tuples of positive reals, row major.
struct TupleSet {
  int k = 0;
  std::vector<double> values;

  std::size_t rows() const { return k > 0 ? values.size() / std::size_t(k) : 0; }

  void validate() const {
    if (k < 1 || values.empty() || values.size() % std::size_t(k) != 0)
      throw config_error("tuples: shape invalid");
    for (double v : values)
      if (!(v > 0.0)) throw std::domain_error("tuples: entries must be > 0");
  }
};

// Draws `rows` K-tuples with replacement from a positive observable of the
// pool samples.
template <class Fn>
TupleSet draw_tuples(std::span<const Complex> samples, int k, std::size_t rows,
                     std::uint64_t seed, Fn&& observable) {
  if (samples.empty()) throw config_error("draw_tuples: empty pool");
  TupleSet t;
  t.k = k;
  t.values.reserve(rows * std::size_t(k));
  std::mt19937_64 g(derive_seed(seed, 2));
  for (std::size_t r = 0; r < rows; ++r)
    for (int j = 0; j < k; ++j)
      t.values.push_back(observable(samples[uniform_index(g, samples.size())]));
  return t;
}

// Improvement over Jensen for exchangeable weakly correlated tuples:
//   E[log((1/K) sum_j X_j)]  >=  E[log X_1] + (alpha^2 kappa / 4) delta(X_1, alpha)^2.
// slack is the estimated margin lhs - rhs; its standard error covers the
// mean-difference part (the width term is treated as fixed).
inline CheckReport jensen_improvement_check(const TupleSet& tuples, double alpha, double kappa) {
  tuples.validate();
  if (!(kappa > 0.0) || kappa > 1.0) throw std::domain_error("jensen: kappa must lie in (0,1]");
  const int k = tuples.k;
  const std::size_t n = tuples.rows();
  std::vector<double> diff(n);  // log of tuple mean minus mean of logs
  std::vector<double> entries;
  entries.reserve(n * std::size_t(k));
  for (std::size_t r = 0; r < n; ++r) {
    double s = 0.0, ls = 0.0;
    for (int j = 0; j < k; ++j) {
      double x = tuples.values[r * std::size_t(k) + std::size_t(j)];
      s += x;
      ls += std::log(x);
      entries.push_back(x);
    }
    diff[r] = std::log(s / double(k)) - ls / double(k);
  }
  Estimate d = mean_and_error(diff);
  QuantileWidth w = alpha_width(entries, alpha);
  double improvement = 0.25 * alpha * alpha * kappa * w.delta * w.delta;
  CheckReport rep;
  rep.check = "jensen";
  rep.lhs = d.value;
  rep.rhs = improvement;
  rep.slack = d.value - improvement;
  rep.std_error = d.std_error;
  rep.pass = rep.slack >= -3.0 * rep.std_error;
  return rep;
}

// delta(Im G, alpha)^2 <= (8 / (kappa alpha^2)) gamma.
inline CheckReport fluctuation_bound_im(std::span<const Complex> samples, int branching,
                                        double alpha, double kappa) {
  std::vector<double> im;
  im.reserve(samples.size());
  for (Complex g : samples) im.push_back(g.imag());
  QuantileWidth w = alpha_width(std::move(im), alpha);
  Estimate gam = lyapunov(samples, branching);
  double coeff = 8.0 / (kappa * alpha * alpha);
  CheckReport rep;
  rep.check = "flu1";
  rep.lhs = w.delta * w.delta;
  rep.rhs = coeff * gam.value;
  rep.slack = rep.rhs - rep.lhs;
  rep.std_error = coeff * gam.std_error;
  rep.pass = rep.slack >= -3.0 * rep.std_error;
  return rep;
}

// delta(|G|^2, alpha)^2 <= (32 (K+1)^2 / (kappa alpha^2)) gamma.
inline CheckReport fluctuation_bound_mod(std::span<const Complex> samples, int branching,
                                         double alpha, double kappa) {
  std::vector<double> mod;
  mod.reserve(samples.size());
  for (Complex g : samples) mod.push_back(std::norm(g));
  QuantileWidth w = alpha_width(std::move(mod), alpha);
  Estimate gam = lyapunov(samples, branching);
  double kk = double(branching + 1);
  double coeff = 32.0 * kk * kk / (kappa * alpha * alpha);
  CheckReport rep;
  rep.check = "flu2";
  rep.lhs = w.delta * w.delta;
  rep.rhs = coeff * gam.value;
  rep.slack = rep.rhs - rep.lhs;
  rep.std_error = coeff * gam.std_error;
  rep.pass = rep.slack >= -3.0 * rep.std_error;
  return rep;
}

// Two-sided log-current inequality.  With D = E[log((1/K) sum_j Im G_j)] -
// E[log Im G], checks 0 <= D and D <= 2*gamma.
inline std::pair<CheckReport, CheckReport> log_current_check(std::span<const Complex> samples,
                                                             int branching, std::size_t rows,
                                                             std::uint64_t seed) {
  TupleSet tuples = draw_tuples(samples, branching, rows, seed,
                                [](Complex g) { return g.imag(); });
  tuples.validate();
  std::vector<double> tuple_log(tuples.rows());
  for (std::size_t r = 0; r < tuples.rows(); ++r) {
    double s = 0.0;
    for (int j = 0; j < branching; ++j)
      s += tuples.values[r * std::size_t(branching) + std::size_t(j)];
    tuple_log[r] = std::log(s / double(branching));
  }
  std::vector<double> base_log;
  base_log.reserve(samples.size());
  for (Complex g : samples) {
    if (!(g.imag() > 0.0)) throw numeric_error("log current: nonpositive Im");
    base_log.push_back(std::log(g.imag()));
  }
  Estimate a = mean_and_error(tuple_log);
  Estimate b = mean_and_error(base_log);
  Estimate gam = lyapunov(samples, branching);
  double d = a.value - b.value;
  double d_err = std::sqrt(a.std_error * a.std_error + b.std_error * b.std_error);

  CheckReport lower;
  lower.check = "log-current-lower";
  lower.lhs = 0.0;
  lower.rhs = d;
  lower.slack = d;
  lower.std_error = d_err;
  lower.pass = lower.slack >= -3.0 * lower.std_error;

  CheckReport upper;
  upper.check = "log-current-upper";
  upper.lhs = d;
  upper.rhs = 2.0 * gam.value;
  upper.slack = upper.rhs - upper.lhs;
  upper.std_error = std::sqrt(d_err * d_err + 4.0 * gam.std_error * gam.std_error);
  upper.pass = upper.slack >= -3.0 * upper.std_error;
  return {lower, upper};
}

// Edge currents J_{x->y} = |psi_x|^2 Im G_y and their per-vertex balance.
// For every non-root x the inflow minus total outflow equals eta |psi_x|^2
// when psi is the root resolvent column and G the matching ratio sweep.
struct DeficitReport {
  std::vector<double> deficit;   // indexed by vertex, root entry unused (0)
  std::vector<double> eta_psi2;  // eta * |psi_x|^2
  double max_identity_error = 0.0;
  double min_deficit = 0.0;
  double max_deficit = 0.0;
};

inline DeficitReport current_deficit(const TreeInstance& inst, const std::vector<Complex>& psi,
                                     const std::vector<Complex>& gammas, const SpectralPoint& zp) {
  const TreeTopology& t = inst.topology;
  const std::size_t n = t.vertex_count();
  if (psi.size() != n || gammas.size() != n)
    throw config_error("current_deficit: size mismatch");
  DeficitReport rep;
  rep.deficit.assign(n, 0.0);
  rep.eta_psi2.assign(n, 0.0);
  rep.min_deficit = std::numeric_limits<double>::infinity();
  rep.max_deficit = -rep.min_deficit;
  for (std::size_t v = 1; v < n; ++v) {
    int gen = t.generation_of(v);
    double inflow = std::norm(psi[t.parent_index(v)]) * gammas[v].imag();
    double outflow = 0.0;
    if (gen < t.depth) {
      std::size_t c0 = t.first_child_index(v);
      for (int c = 0; c < t.branching; ++c)
        outflow += std::norm(psi[v]) * gammas[c0 + std::size_t(c)].imag();
    }
    double d = inflow - outflow;
    double ref = zp.eta * std::norm(psi[v]);
    rep.deficit[v] = d;
    rep.eta_psi2[v] = ref;
    rep.max_identity_error = std::max(rep.max_identity_error, std::abs(d - ref));
    rep.min_deficit = std::min(rep.min_deficit, d);
    rep.max_deficit = std::max(rep.max_deficit, d);
  }
  return rep;
}

// Density-of-states profile along an energy grid at fixed eta.
struct DensityCurve {
  std::vector<double> energies;
  double eta = 0.0;
  std::vector<double> mean_im;  // E[Im G] per grid point
  std::vector<double> se_im;

  double density(std::size_t i) const { return mean_im[i] / kPi; }
  std::size_t size() const { return energies.size(); }
};

// L1 distance between two curves on the same grid, restricted to [lo, hi],
// by the trapezoid rule applied to |rho_a - rho_b|.
inline double l1_density_distance(const DensityCurve& a, const DensityCurve& b, double lo,
                                  double hi) {
  if (a.energies != b.energies) throw config_error("l1 distance: grids differ");
  if (a.size() < 2) throw config_error("l1 distance: need at least two points");
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < a.size(); ++i) {
    double e0 = a.energies[i], e1 = a.energies[i + 1];
    if (e1 <= lo || e0 >= hi) continue;
    double c0 = std::max(e0, lo), c1 = std::min(e1, hi);
    double f0 = std::abs(a.density(i) - b.density(i));
    double f1 = std::abs(a.density(i + 1) - b.density(i + 1));
    // linear interpolation of the clipped segment endpoints
    double t0 = (c0 - e0) / (e1 - e0), t1 = (c1 - e0) / (e1 - e0);
    double g0 = f0 + (f1 - f0) * t0, g1 = f0 + (f1 - f0) * t1;
    acc += 0.5 * (g0 + g1) * (c1 - c0);
  }
  return acc;
}

// Lebesgue measure of the grid cells on which the density exceeds the
// threshold at both endpoints.
inline double ac_measure(const DensityCurve& curve, double threshold) {
  if (curve.size() < 2) throw config_error("ac_measure: need at least two points");
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < curve.size(); ++i)
    if (curve.density(i) > threshold && curve.density(i + 1) > threshold)
      acc += curve.energies[i + 1] - curve.energies[i];
  return acc;
}

// Default detection threshold: one percent of the disorder-free density peak
// at the band center, 1/(pi sqrt(K)).
inline double default_density_threshold(int branching) {
  return 0.01 / (kPi * std::sqrt(double(branching)));
}

}  // namespace acstab
