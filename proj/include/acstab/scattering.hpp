#pragma once

#include <cmath>
#include <complex>

#include "green_recursion.hpp"

namespace acstab {

// Semi-infinite wire probe.  Wire sites n = 1, 2, ... carry the discrete
// Laplacian with on-site offset C, so a plane wave e^{-ikn} has energy
// z(k) = 4 sin^2(k/2) + C.  Site 1 couples to the tree root with strength t.
struct WireSpec {
  double coupling = 1.0;           // t > 0
  double momentum = 0.5 * kPi;     // k in (0, pi)

  void validate() const {
    if (!(coupling > 0.0)) throw config_error("wire: coupling must be > 0");
    if (!(momentum > 0.0) || !(momentum < kPi))
      throw config_error("wire: momentum must lie in (0, pi)");
  }

  // On-site offset that brings the wire band through the target energy.
  double offset_for(double energy) const {
    double s = std::sin(0.5 * momentum);
    return energy - 4.0 * s * s;
  }
};

// Stationary scattering solution for the incoming wave e^{-ikn}:
//   psi_n = e^{-ikn} + r e^{+ikn}  on the wire,
//   psi_root = t Gamma psi_1       on the tree side,
// where Gamma is the root Green value of the isolated tree at the matching
// spectral point.  Eliminating the tree gives, with a = t^2 Gamma,
//   r = -(1 - a e^{-ik}) / (1 - a e^{+ik}),
// which maps Im Gamma >= 0 exactly onto |r| <= 1.
struct ReflectionResult {
  Complex r;
  Complex psi_wire1;
  Complex psi_root;
  double absorbed = 0.0;  // sin k * (1 - |r|^2), the flux lost to the tree
};

inline ReflectionResult reflection(Complex gamma_root, const WireSpec& wire) {
  wire.validate();
  if (gamma_root.imag() < 0.0) throw config_error("reflection: Im Gamma must be >= 0");
  double k = wire.momentum;
  Complex eik = std::polar(1.0, k);
  Complex a = wire.coupling * wire.coupling * gamma_root;
  Complex den = Complex(1.0, 0.0) - a * eik;
  if (std::abs(den) < 1e-300) throw numeric_error("reflection: singular junction");
  ReflectionResult out;
  out.r = -(Complex(1.0, 0.0) - a / eik) / den;
  out.psi_wire1 = Complex(0.0, -2.0 * std::sin(k)) / den;
  out.psi_root = wire.coupling * gamma_root * out.psi_wire1;
  out.absorbed = std::sin(k) * (1.0 - std::norm(out.r));
  return out;
}

// Flux entering the tree at the root.  Since Im(1/Gamma) = -(Im S + eta) for
// the root step, this equals |psi_root|^2 (sum_y Im Gamma_y + eta), i.e. the
// current pushed into the root edges plus the broadening loss at the root.
// For the exact solution it matches `absorbed`.
inline double tree_influx(const ReflectionResult& sol, Complex gamma_root) {
  return std::norm(sol.psi_root) * gamma_root.imag() / std::norm(gamma_root);
}

}  // namespace acstab
