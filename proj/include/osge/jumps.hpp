// Quantum jumps: atomic emission (sigma_- with an x-projected recoil eta) and
// cavity emission (a). Both maps leave the state unnormalized.
#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "osge/model.hpp"

namespace osge {

/// First-order jump statistics break down when one step can hold this much
/// total jump probability.
inline constexpr double kMaxStepJumpProbability = 0.1;

struct ChannelProbabilities {
  double p_atom = 0.0;
  double p_cav = 0.0;

  double total() const noexcept { return p_atom + p_cav; }
  bool first_order_valid() const noexcept { return total() < kMaxStepJumpProbability; }
};

/// p_atom = gamma dtau <sigma+ sigma->/N, p_cav = 2 kappa dtau <a^dagger a>/N,
/// where |n-1,e> carries n-1 photons and |n,g> carries n.
inline ChannelProbabilities collapse_probabilities(const PacketState& s, const SystemParams& params,
                                                   double dtau) {
  const double norm = s.norm_squared();
  if (!(norm > 0.0)) throw RuntimeViolation("collapse_probabilities: zero state");
  ChannelProbabilities p;
  p.p_atom = params.gamma * dtau * s.excited_norm_squared() / norm;
  p.p_cav = 2.0 * params.kappa * dtau * s.photon_expectation() / norm;
  return p;
}

/// Number of grid cells for a recoil eta, rounded to the nearest cell.
inline long recoil_cells(const MomentumGrid& grid, double eta) {
  return std::lround(eta * grid.subdivisions());
}

/// Cg(n, q) <- Ce(n+1, q + eta), Ce <- 0. eta is rounded to the grid.
inline PacketState atomic_jump(const PacketState& s, double eta) {
  if (!(eta >= -1.0 && eta <= 1.0))
    throw ValidationError("atomic_jump: eta must lie in [-1, 1]");
  if (!(s.excited_norm_squared() > 0.0))
    throw RuntimeViolation("atomic_jump: state has no excited amplitude");

  PacketState out(s.grid(), s.n_max());
  out.tau = s.tau;
  const long k = recoil_cells(s.grid(), eta);
  const long np = static_cast<long>(s.points());
  for (int n = 0; n + 1 <= s.n_max(); ++n) {
    auto src = s.e(n + 1);
    auto dst = out.g(n);
    for (long i = 0; i < np; ++i) {
      const long j = i + k;
      if (j >= 0 && j < np) dst[static_cast<std::size_t>(i)] = src[static_cast<std::size_t>(j)];
    }
  }
  return out;
}

/// Ce(n, q) <- sqrt(n) Ce(n+1, q), Cg(n, q) <- sqrt(n+1) Cg(n+1, q).
inline PacketState cavity_jump(const PacketState& s) {
  if (!(s.photon_expectation() > 0.0))
    throw RuntimeViolation("cavity_jump: state holds no photons");
  PacketState out(s.grid(), s.n_max());
  out.tau = s.tau;
  const int nm = s.n_max();
  for (int n = 1; n + 1 <= nm; ++n) {
    const double w = std::sqrt(static_cast<double>(n));
    auto src = s.e(n + 1);
    auto dst = out.e(n);
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = w * src[i];
  }
  for (int n = 0; n + 1 <= nm; ++n) {
    const double w = std::sqrt(static_cast<double>(n + 1));
    auto src = s.g(n + 1);
    auto dst = out.g(n);
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = w * src[i];
  }
  return out;
}

/// Partition of one uniform draw r in [0, 1): [0, p_atom) atomic,
/// [p_atom, p_atom + p_cav) cavity, otherwise no jump.
inline std::optional<JumpChannel> select_event(const ChannelProbabilities& p, double r) {
  if (r < p.p_atom) return JumpChannel::Atomic;
  if (r < p.p_atom + p.p_cav) return JumpChannel::Cavity;
  return std::nullopt;
}

}  // namespace osge
