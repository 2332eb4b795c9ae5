// First Jaynes-Cummings couplet {|0,e>, |1,g>} in the dressed basis, on and
// off resonance, plus a few closed-form estimates of the packet motion.
//
// Energies are in units of hbar g0 with the carrier offsets hbar omega_0 and
// hbar delta/2 dropped; they never enter the dynamics.
#pragma once

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <utility>

#include "osge/model.hpp"

namespace osge::dressed {

/// g(x)/g0 for the given mode convention.
inline double mode_function(double x_over_lambda, ModePhase phase = ModePhase::Sine) {
  const double kx = 2.0 * std::numbers::pi * x_over_lambda;
  return phase == ModePhase::Sine ? std::sin(kx) : std::cos(kx);
}

/// Mixing angle theta in [0, pi/2] of the couplet for coupling g/g0 and
/// detuning delta/g0, from tan(theta) = X + sqrt(X^2 + 1) with X = delta / 2g.
///
/// tan(pi/4 + atan(X)/2) equals that closed form for every real X, which also
/// covers the node limits X -> +-inf. Exactly at a node the limit taken is the
/// one approached from g > 0: pi/2 for delta > 0, 0 for delta < 0.
inline double mixing_angle_for_coupling(double g, double delta) {
  if (delta == 0.0) return std::numbers::pi / 4.0;
  double x;
  if (g == 0.0) {
    x = delta > 0.0 ? INFINITY : -INFINITY;
  } else {
    x = delta / (2.0 * g);
  }
  return std::numbers::pi / 4.0 + 0.5 * std::atan(x);
}

inline double mixing_angle(double x_over_lambda, double delta,
                           ModePhase phase = ModePhase::Sine) {
  return mixing_angle_for_coupling(mode_function(x_over_lambda, phase), delta);
}

struct Energies {
  double plus = 0.0;
  double minus = 0.0;
};

/// E_1^{+-} = +-sqrt(g^2 + (delta/2)^2); reduces to +-g on resonance.
inline Energies dressed_energies(double x_over_lambda, double delta,
                                 ModePhase phase = ModePhase::Sine) {
  const double g = mode_function(x_over_lambda, phase);
  const double e = std::hypot(g, 0.5 * delta);
  return {e, -e};
}

struct DressedPoint {
  double x_over_lambda = 0.0;
  double theta = 0.0;
  double e_plus = 0.0;
  double e_minus = 0.0;
};

inline DressedPoint dressed_point(double x_over_lambda, double delta,
                                  ModePhase phase = ModePhase::Sine) {
  const auto en = dressed_energies(x_over_lambda, delta, phase);
  return {x_over_lambda, mixing_angle(x_over_lambda, delta, phase), en.plus, en.minus};
}

struct DressedAmplitudes {
  cplx plus;
  cplx minus;
};

/// Projects c1|0,e> + c2|1,g> onto |d+> = cos t|0,e> + i sin t|1,g> and
/// |d-> = sin t|0,e> - i cos t|1,g>.
inline DressedAmplitudes decompose_bare_theta(cplx c1, cplx c2, double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const cplx i{0.0, 1.0};
  return {c1 * c - i * c2 * s, c1 * s + i * c2 * c};
}

inline DressedAmplitudes decompose_bare(cplx c1, cplx c2, double x_over_lambda, double delta,
                                        ModePhase phase = ModePhase::Sine) {
  return decompose_bare_theta(c1, c2, mixing_angle(x_over_lambda, delta, phase));
}

/// Overlap of a narrow Gaussian packet (width dx) centered on a node with
/// |g(x)|, linearized: 2 sqrt(2 pi) dx / lambda.
inline double effective_coupling(double dx_over_lambda) {
  return 2.0 * std::sqrt(2.0 * std::numbers::pi) * dx_over_lambda;
}

/// int_0^{pi/2} ds / sqrt(sin s), by tanh-sinh quadrature (endpoint singularity).
inline double pulsation_integral() {
  boost::math::quadrature::tanh_sinh<double> integrator;
  return integrator.integrate([](double s) { return 1.0 / std::sqrt(std::sin(s)); }, 0.0,
                              std::numbers::pi / 2.0, 1e-12);
}

/// Period of the node-launched packet pulsation, tau0 = (2/sqrt(mu)) * I.
inline double pulsation_period(double mu) {
  if (!(mu > 0.0)) throw ValidationError("pulsation_period: mu must be > 0");
  return 2.0 / std::sqrt(mu) * pulsation_integral();
}

/// Peak excursion from the linear momentum-growth estimate p ~ 0.9 hbar k tau
/// up to tau = 100 and back: x/lambda = 2.9e3 mu.
inline double excursion_estimate(double mu) {
  if (mu < 0.0) throw ValidationError("excursion_estimate: mu must be >= 0");
  return 2.9e3 * mu;
}

}  // namespace osge::dressed
