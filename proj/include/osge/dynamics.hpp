// Coherent non-Hermitian evolution between quantum jumps.
//
// For the cos(kx) mode (sin(kx) swaps the symmetric neighbour sum for
// (i/2)[C(q-1) - C(q+1)] with the opposite sign on the ground row):
//
//   dCe(n,q)/dtau = -s sqrt(n)/2 [Cg(n,q-1) + Cg(n,q+1)]
//                   - (gamma/2 + kappa (n-1) + i mu q^2 + i sd delta) Ce(n,q)
//                   + eps [sqrt(n-1) Ce(n-1,q) - sqrt(n) Ce(n+1,q)]
//   dCg(n,q)/dtau = +s sqrt(n)/2 [Ce(n,q-1) + Ce(n,q+1)]
//                   - (kappa n + i mu q^2) Cg(n,q)
//                   + eps [sqrt(n) Cg(n-1,q) - sqrt(n+1) Cg(n+1,q)]
//
// s is the coupling scale (a transit envelope, 1 by default). The drive is
// H = i eps (a^dagger - a), whose empty-cavity steady state is alpha = eps/kappa.
// Neighbours that fall off the grid or above n_max read as zero.
#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "osge/model.hpp"

namespace osge {

/// Which terms of the generator are active. The Jaynes-Cummings coupling is
/// always on.
struct DerivativeTerms {
  bool atomic_damping = true;
  bool cavity_damping = true;
  bool kinetic = true;
  bool detuning = true;
  bool drive = true;

  static constexpr DerivativeTerms all() { return {}; }
  /// Hermitian part only: the closed (lossless) system.
  static constexpr DerivativeTerms closed() { return {false, false, true, true, true}; }
};

/// Coupling scale that never changes.
struct ConstantCoupling {
  double value = 1.0;
  double operator()(double /*tau*/) const noexcept { return value; }
};

/// Precomputed right-hand side for one (grid, n_max, params, terms) set.
class Generator {
 public:
  Generator(const MomentumGrid& grid, int n_max, const SystemParams& params,
            DerivativeTerms terms = {})
      : grid_(grid), n_max_(n_max), params_(params), terms_(terms), phase_(grid.points()) {
    validate(params);
    const double mu = terms.kinetic ? params.mu : 0.0;
    const double det = terms.detuning ? params.detuning_sign * params.delta : 0.0;
    for (std::size_t i = 0; i < phase_.size(); ++i) {
      const double q = grid.q(i);
      phase_[i] = mu * q * q;
    }
    excited_detuning_ = det;
    gamma_half_ = terms.atomic_damping ? 0.5 * params.gamma : 0.0;
    kappa_ = terms.cavity_damping ? params.kappa : 0.0;
    drive_ = terms.drive ? params.drive : 0.0;
    sqrt_n_.resize(static_cast<std::size_t>(n_max) + 2);
    for (std::size_t n = 0; n < sqrt_n_.size(); ++n) sqrt_n_[n] = std::sqrt(static_cast<double>(n));
  }

  const SystemParams& params() const noexcept { return params_; }
  const DerivativeTerms& terms() const noexcept { return terms_; }
  const MomentumGrid& grid() const noexcept { return grid_; }
  int n_max() const noexcept { return n_max_; }

  /// out = d(in)/dtau with the Jaynes-Cummings coupling scaled by `scale`.
  void apply(const PacketState& in, double scale, PacketState& out) const {
    const std::size_t np = grid_.points();
    const std::size_t shift = static_cast<std::size_t>(grid_.subdivisions());
    const bool cosine = params_.mode_phase == ModePhase::Cosine;

    for (int n = 1; n <= n_max_; ++n) {
      const cplx* ce = in.e(n).data();
      const cplx* cg = in.g(n).data();
      const cplx* below = n > 1 ? in.e(n - 1).data() : nullptr;
      const cplx* above = n < n_max_ ? in.e(n + 1).data() : nullptr;
      cplx* de = out.e(n).data();
      const double damp = -(gamma_half_ + kappa_ * (n - 1));
      const double half = 0.5 * scale * sqrt_n_[static_cast<std::size_t>(n)];
      diagonal(ce, de, damp, excited_detuning_, np);
      if (cosine) {
        neighbour_sum(cg, de, -half, shift, np);
      } else {
        neighbour_difference(cg, de, +half, shift, np);
      }
      if (drive_ != 0.0) {
        if (below) axpy_real(drive_ * sqrt_n_[static_cast<std::size_t>(n - 1)], below, de, np);
        if (above) axpy_real(-drive_ * sqrt_n_[static_cast<std::size_t>(n)], above, de, np);
      }
    }

    for (int n = 0; n <= n_max_; ++n) {
      const cplx* cg = in.g(n).data();
      cplx* dg = out.g(n).data();
      const double damp = -kappa_ * n;
      diagonal(cg, dg, damp, 0.0, np);
      if (n >= 1) {
        const cplx* ce = in.e(n).data();
        const double half = 0.5 * scale * sqrt_n_[static_cast<std::size_t>(n)];
        if (cosine) {
          neighbour_sum(ce, dg, +half, shift, np);
        } else {
          neighbour_difference(ce, dg, -half, shift, np);
        }
      }
      if (drive_ != 0.0) {
        if (n >= 1) axpy_real(drive_ * sqrt_n_[static_cast<std::size_t>(n)], in.g(n - 1).data(), dg, np);
        if (n < n_max_)
          axpy_real(-drive_ * sqrt_n_[static_cast<std::size_t>(n + 1)], in.g(n + 1).data(), dg, np);
      }
    }
  }

  PacketState apply(const PacketState& in, double scale = 1.0) const {
    PacketState out(in.grid(), in.n_max());
    out.tau = in.tau;
    apply(in, scale, out);
    return out;
  }

  /// Sum over collapse channels of Gamma_i <C_i^dagger C_i>, unnormalized, grid measure.
  double decay_rate(const PacketState& s) const {
    return 2.0 * gamma_half_ * s.excited_norm_squared() + 2.0 * kappa_ * s.photon_expectation();
  }

 private:
  // out[i] = (damp - i (phase[i] + offset)) * in[i]
  void diagonal(const cplx* in, cplx* out, double damp, double offset, std::size_t np) const {
    const double* ph = phase_.data();
    for (std::size_t i = 0; i < np; ++i) {
      const double re = in[i].real();
      const double im = in[i].imag();
      const double w = ph[i] + offset;
      out[i] = cplx{damp * re + w * im, damp * im - w * re};
    }
  }

  // out[i] += a (in[i-S] + in[i+S])
  static void neighbour_sum(const cplx* in, cplx* out, double a, std::size_t s, std::size_t np) {
    if (np <= s) return;
    for (std::size_t i = 0; i < s; ++i) out[i] += a * in[i + s];
    for (std::size_t i = s; i + s < np; ++i) out[i] += a * (in[i - s] + in[i + s]);
    for (std::size_t i = std::max(s, np - s); i < np; ++i) out[i] += a * in[i - s];
  }

  // out[i] += i a (in[i-S] - in[i+S])
  static void neighbour_difference(const cplx* in, cplx* out, double a, std::size_t s,
                                   std::size_t np) {
    if (np <= s) return;
    auto add = [&](std::size_t i, cplx d) { out[i] += cplx{-a * d.imag(), a * d.real()}; };
    for (std::size_t i = 0; i < s; ++i) add(i, -in[i + s]);
    for (std::size_t i = s; i + s < np; ++i) add(i, in[i - s] - in[i + s]);
    for (std::size_t i = std::max(s, np - s); i < np; ++i) add(i, in[i - s]);
  }

  static void axpy_real(double a, const cplx* x, cplx* y, std::size_t np) {
    for (std::size_t i = 0; i < np; ++i) y[i] += a * x[i];
  }

  MomentumGrid grid_;
  int n_max_;
  SystemParams params_;
  DerivativeTerms terms_;
  std::vector<double> phase_;
  std::vector<double> sqrt_n_;
  double excited_detuning_ = 0.0;
  double gamma_half_ = 0.0;
  double kappa_ = 0.0;
  double drive_ = 0.0;
};

inline PacketState derivative(const PacketState& state, const SystemParams& params,
                              DerivativeTerms terms = {}, double coupling_scale = 1.0) {
  return Generator(state.grid(), state.n_max(), params, terms).apply(state, coupling_scale);
}

namespace detail {

// y += a x over both coefficient families.
inline void axpy(double a, const PacketState& x, PacketState& y) {
  auto xe = x.excited_data();
  auto ye = y.excited_data();
  for (std::size_t i = 0; i < xe.size(); ++i) ye[i] += a * xe[i];
  auto xg = x.ground_data();
  auto yg = y.ground_data();
  for (std::size_t i = 0; i < xg.size(); ++i) yg[i] += a * xg[i];
}

// z = y + a x
inline void waxpy(double a, const PacketState& x, const PacketState& y, PacketState& z) {
  auto xe = x.excited_data();
  auto ye = y.excited_data();
  auto ze = z.excited_data();
  for (std::size_t i = 0; i < xe.size(); ++i) ze[i] = ye[i] + a * xe[i];
  auto xg = x.ground_data();
  auto yg = y.ground_data();
  auto zg = z.ground_data();
  for (std::size_t i = 0; i < xg.size(); ++i) zg[i] = yg[i] + a * xg[i];
}

}  // namespace detail

/// Forward Euler, C <- C + dtau * dC/dtau.
class EulerStepper {
 public:
  explicit EulerStepper(Generator gen) : gen_(std::move(gen)) {}

  const Generator& generator() const noexcept { return gen_; }

  template <class Profile = ConstantCoupling>
  void step(PacketState& s, double dtau, const Profile& profile = {}) {
    ensure(s);
    gen_.apply(s, profile(s.tau), k_);
    detail::axpy(dtau, k_, s);
    s.tau += dtau;
  }

 private:
  void ensure(const PacketState& s) {
    if (!k_.same_shape(s)) k_ = PacketState(s.grid(), s.n_max());
  }
  Generator gen_;
  PacketState k_;
};

/// Classical fourth-order Runge-Kutta on the same generator.
class Rk4Stepper {
 public:
  explicit Rk4Stepper(Generator gen) : gen_(std::move(gen)) {}

  const Generator& generator() const noexcept { return gen_; }

  template <class Profile = ConstantCoupling>
  void step(PacketState& s, double dtau, const Profile& profile = {}) {
    ensure(s);
    const double t = s.tau;
    const double s_mid = profile(t + 0.5 * dtau);

    gen_.apply(s, profile(t), k_);
    detail::waxpy(dtau / 6.0, k_, s, acc_);
    detail::waxpy(0.5 * dtau, k_, s, tmp_);

    gen_.apply(tmp_, s_mid, k_);
    detail::axpy(dtau / 3.0, k_, acc_);
    detail::waxpy(0.5 * dtau, k_, s, tmp_);

    gen_.apply(tmp_, s_mid, k_);
    detail::axpy(dtau / 3.0, k_, acc_);
    detail::waxpy(dtau, k_, s, tmp_);

    gen_.apply(tmp_, profile(t + dtau), k_);
    detail::axpy(dtau / 6.0, k_, acc_);

    std::swap(s, acc_);
    s.tau = t + dtau;
  }

 private:
  void ensure(const PacketState& s) {
    if (!k_.same_shape(s)) {
      k_ = PacketState(s.grid(), s.n_max());
      tmp_ = k_;
      acc_ = k_;
    }
  }
  Generator gen_;
  PacketState k_, tmp_, acc_;
};

inline PacketState step_euler(PacketState state, double dtau, const SystemParams& params,
                              DerivativeTerms terms = {}) {
  if (!(dtau > 0.0)) throw ValidationError("step_euler: dtau must be > 0");
  EulerStepper st(Generator(state.grid(), state.n_max(), params, terms));
  st.step(state, dtau);
  return state;
}

inline PacketState step_rk4(PacketState state, double dtau, const SystemParams& params,
                            DerivativeTerms terms = {}) {
  if (!(dtau > 0.0)) throw ValidationError("step_rk4: dtau must be > 0");
  Rk4Stepper st(Generator(state.grid(), state.n_max(), params, terms));
  st.step(state, dtau);
  return state;
}

// ---------------------------------------------------------------------------
// Early-time closed form for a node-centered packet
// ---------------------------------------------------------------------------

inline constexpr double kEarlyTimeLimit = 5.0;

struct CoefficientPair {
  cplx excited;  // Ce(n, q); zero for n = 0
  cplx ground;   // Cg(n, q)
};

/// Leading-order solution for a packet launched on the node xi0 = 1/4 of the
/// cos(kx) mode with mu = 0, no drive, no detuning and no cavity loss:
///
///   Ce ~ -i C0 (tau sqrt(n)/2) [e^{b(2q-1)} - e^{-b(2q+1)}] e^{-gamma tau/2}
///   Cg ~ C0 {1 + 3/8 (tau sqrt(n)/2)^2 [e^{4b(q-1)} - 2 + e^{-4b(q+1)}]}
///
/// with C0 = F(n) e^{-b q^2} e^{-i pi q/2}, b = 1/(4 dq^2).
inline CoefficientPair early_time_oracle(int n, double q, double tau, const SystemParams& params,
                                         const FieldSpec& field) {
  if (tau < 0.0 || tau > kEarlyTimeLimit)
    throw ValidationError("early_time_oracle: tau outside [0, 5]");
  if (params.mu != 0.0 || params.drive != 0.0 || params.delta != 0.0 || params.kappa != 0.0)
    throw ValidationError(
        "early_time_oracle: requires mu = 0, no drive, no detuning, no cavity loss");
  if (params.mode_phase != ModePhase::Cosine || params.xi0 != 0.25)
    throw ValidationError("early_time_oracle: requires a packet on the cos(kx) node xi0 = 1/4");
  if (n < 0 || n > field.n_max()) throw ValidationError("early_time_oracle: n outside field");

  const double b = params.beta();
  const double dq = params.delta_q;
  const cplx fn = field.amplitudes[static_cast<std::size_t>(n)];
  const cplx c0 = fn / std::pow(2.0 * std::numbers::pi * dq * dq, 0.25) *
                  std::polar(std::exp(-b * q * q), -0.5 * std::numbers::pi * q);
  const double a = 0.5 * tau * std::sqrt(static_cast<double>(n));
  const cplx i{0.0, 1.0};

  CoefficientPair out;
  out.excited = n == 0 ? cplx{}
                       : -i * c0 * a * (std::exp(b * (2.0 * q - 1.0)) - std::exp(-b * (2.0 * q + 1.0))) *
                             std::exp(-0.5 * params.gamma * tau);
  out.ground = c0 * (1.0 + 0.375 * a * a *
                               (std::exp(4.0 * b * (q - 1.0)) - 2.0 + std::exp(-4.0 * b * (q + 1.0))));
  return out;
}

/// The closed form above sampled on every grid point.
inline PacketState early_time_state(const MomentumGrid& grid, double tau, const SystemParams& params,
                                    const FieldSpec& field) {
  PacketState s(grid, field.n_max());
  s.tau = tau;
  for (int n = 0; n <= field.n_max(); ++n) {
    for (std::size_t i = 0; i < grid.points(); ++i) {
      const auto c = early_time_oracle(n, grid.q(i), tau, params, field);
      if (n >= 1) s.e(n)[i] = c.excited;
      s.g(n)[i] = c.ground;
    }
  }
  return s;
}

}  // namespace osge
