#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <vector>

#include "green_recursion.hpp"

namespace acstab {

// Applies H = adjacency + diagonal(lambda*omega + U) to a vector indexed in
// breadth-first order.
inline std::vector<Complex> apply_hamiltonian(const TreeInstance& inst,
                                              const std::vector<Complex>& psi) {
  const TreeTopology& t = inst.topology;
  std::size_t n = t.vertex_count();
  if (psi.size() != n) throw config_error("apply_hamiltonian: size mismatch");
  std::vector<Complex> out(n);
  for (int gen = 0; gen <= t.depth; ++gen) {
    std::size_t lo = t.generation_offset(gen), hi = t.generation_offset(gen + 1);
    for (std::size_t v = lo; v < hi; ++v) {
      Complex acc = inst.onsite(v, gen) * psi[v];
      if (gen > 0) acc += psi[t.parent_index(v)];
      if (gen < t.depth) {
        std::size_t c0 = t.first_child_index(v);
        for (int c = 0; c < t.branching; ++c) acc += psi[c0 + std::size_t(c)];
      }
      out[v] = acc;
    }
  }
  return out;
}

inline constexpr std::size_t kMaxResolventVertices = 200000;

struct PsiColumn {
  std::vector<Complex> psi;  // (H - z)^{-1} delta_root, breadth-first
  double residual = 0.0;     // ||(H-z)psi - delta|| / ||psi||
};

// Root column of the resolvent via a sparse direct solve.  The tree graph has
// a perfect elimination order, so the factorization stays sparse.
inline PsiColumn resolvent_column(const TreeInstance& inst, const SpectralPoint& zp) {
  zp.validate();
  if (!(zp.eta > 0.0)) throw config_error("resolvent: eta must be > 0");
  const TreeTopology& t = inst.topology;
  const std::size_t n = t.vertex_count();
  if (n > kMaxResolventVertices) throw config_error("resolvent: tree too large for direct solve");

  using Sp = Eigen::SparseMatrix<Complex>;
  std::vector<Eigen::Triplet<Complex>> trips;
  trips.reserve(3 * n);
  Complex z = zp.z();
  for (int gen = 0; gen <= t.depth; ++gen) {
    std::size_t lo = t.generation_offset(gen), hi = t.generation_offset(gen + 1);
    for (std::size_t v = lo; v < hi; ++v) {
      trips.emplace_back(int(v), int(v), Complex(inst.onsite(v, gen), 0.0) - z);
      if (gen > 0) {
        std::size_t p = t.parent_index(v);
        trips.emplace_back(int(v), int(p), Complex(1.0, 0.0));
        trips.emplace_back(int(p), int(v), Complex(1.0, 0.0));
      }
    }
  }
  Sp A(static_cast<int>(n), static_cast<int>(n));
  A.setFromTriplets(trips.begin(), trips.end());
  A.makeCompressed();

  Eigen::SparseLU<Sp> solver;
  solver.analyzePattern(A);
  solver.factorize(A);
  if (solver.info() != Eigen::Success) throw numeric_error("resolvent: factorization failed");
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(int(n));
  rhs(0) = Complex(1.0, 0.0);
  Eigen::VectorXcd x = solver.solve(rhs);
  if (solver.info() != Eigen::Success) throw numeric_error("resolvent: solve failed");

  PsiColumn col;
  col.psi.assign(x.data(), x.data() + n);
  std::vector<Complex> hx = apply_hamiltonian(inst, col.psi);
  double err2 = 0.0, norm2 = 0.0;
  for (std::size_t v = 0; v < n; ++v) {
    Complex r = hx[v] - z * col.psi[v] - (v == 0 ? Complex(1.0, 0.0) : Complex(0.0, 0.0));
    err2 += std::norm(r);
    norm2 += std::norm(col.psi[v]);
  }
  col.residual = std::sqrt(err2 / norm2);
  if (!(col.residual <= 1e-10))
    throw numeric_error("resolvent: residual " + std::to_string(col.residual) + " too large");
  return col;
}

}  // namespace acstab
