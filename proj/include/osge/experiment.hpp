// Monte Carlo transit experiment: atoms cross a driven Gaussian-waist cavity
// mode one at a time; the far-field pattern is the ensemble-averaged final
// momentum distribution.
#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <numbers>
#include <optional>
#include <thread>
#include <vector>

#include "osge/dynamics.hpp"
#include "osge/model.hpp"
#include "osge/observables.hpp"
#include "osge/trajectory.hpp"

namespace osge {

/// Classical transverse flight through exp(-(z/w)^2). Times are in 1/g0,
/// offsets in waists.
struct TransitConfig {
  double w_over_vz_in_g0 = 24.4;  // g0 w / v_z
  double entry_offset = 10.0;
  double exit_offset = 10.0;
  double screen_distance = 40.0;

  double waist_time() const noexcept { return w_over_vz_in_g0; }
  double center_time() const noexcept { return entry_offset * w_over_vz_in_g0; }
  double end_time() const noexcept { return (entry_offset + exit_offset) * w_over_vz_in_g0; }
};

inline void validate(const TransitConfig& t) {
  if (!(t.w_over_vz_in_g0 > 0.0)) throw ValidationError("transit.w_over_vz_in_g0 must be > 0");
  if (!(t.entry_offset >= 3.0) || !(t.exit_offset >= 3.0))
    throw ValidationError("transit entry/exit offsets must be >= 3 waists");
  if (!(t.screen_distance > 0.0)) throw ValidationError("transit.screen_distance must be > 0");
}

inline double coupling_envelope(double tau, const TransitConfig& t) {
  const double z = (tau - t.center_time()) / t.waist_time();
  return std::exp(-z * z);
}

struct TransitEnvelope {
  TransitConfig transit;
  double operator()(double tau) const { return coupling_envelope(tau, transit); }
};

// Barium-138 on its 553 nm line in a 37 um waist cavity at v_z = 400 m/s.
namespace barium {
inline constexpr double kWavelength = 553e-9;       // m
inline constexpr double kG0 = 2.0 * std::numbers::pi * 42e6;  // rad/s
inline constexpr double kWaist = 37e-6;             // m
inline constexpr double kVelocity = 400.0;          // m/s
inline constexpr double kMass = 138.0 * 1.66053906660e-27;  // kg
inline constexpr double kHbar = 1.054571817e-34;

inline double waist_time() { return kG0 * kWaist / kVelocity; }
inline double mu() {
  const double k = 2.0 * std::numbers::pi / kWavelength;
  return kHbar * k * k / (2.0 * kMass * kG0);
}
}  // namespace barium

/// Empty driven cavity at steady state: coherent with alpha = eps/kappa
/// (vacuum when undriven).
inline FieldSpec initial_field_steady_state(const SystemParams& params, int n_max) {
  if (params.drive == 0.0) return field_fock(0, n_max);
  if (!(params.kappa > 0.0))
    throw ValidationError("initial_field_steady_state: a driven cavity needs kappa > 0");
  return field_coherent(params.drive / params.kappa, n_max);
}

/// Screen coordinate per unit of q: ballistic flight of hbar k q / M over the
/// axis-to-screen distance, x/lambda = mu q (g0 L / v_z) / pi.
inline double far_field_scale(double mu, const TransitConfig& t) {
  return mu * t.screen_distance * t.waist_time() / std::numbers::pi;
}

enum class EnsembleMode { Stochastic, NoJump, Closed };

struct EnsembleConfig {
  int n_atoms = 200;
  int subdivisions = 2;
  int q_max = 96;
  int n_max = 12;
  double dtau = 0.02;
  EnsembleMode mode = EnsembleMode::Stochastic;
  TransitConfig transit{};
  bool use_envelope = true;
  /// Fixed packet center; when empty each atom draws xi0 uniformly in [0, 1).
  std::optional<double> fixed_xi0;
  /// Field each atom meets; defaults to the driven steady state.
  std::optional<FieldSpec> initial_field;
  /// Stretches where the envelope is below this are inert (free flight of a
  /// ground-state atom beside a stationary coherent field) and are applied
  /// as an exact kinetic phase instead of being integrated.
  double envelope_floor = 1e-12;
  /// Integration end; defaults to the exit plane.
  std::optional<double> tau_end;
  std::uint64_t master_seed = 1;
  unsigned threads = 1;
  double boundary_tolerance = kDefaultBoundaryTolerance;
};

struct AtomOutcome {
  double xi0 = 0.0;
  std::size_t atomic_jumps = 0;
  std::size_t cavity_jumps = 0;
  std::vector<double> momentum;  // final P(q)
};

struct EnsembleResult {
  Distribution1D momentum;   // averaged P(q)
  Distribution1D far_field;  // same shape on the screen axis
  std::vector<AtomOutcome> atoms;
  double mean_atomic_jumps = 0.0;
  double mean_cavity_jumps = 0.0;
  double far_field_width = 0.0;  // std of the averaged far-field distribution
  double tau_start = 0.0;
  double tau_end = 0.0;
};

namespace detail {

inline double integration_start(const EnsembleConfig& cfg) {
  if (!cfg.use_envelope) return 0.0;
  const auto& t = cfg.transit;
  const double span = std::sqrt(-std::log(cfg.envelope_floor)) * t.waist_time();
  return std::max(0.0, t.center_time() - span);
}

inline AtomOutcome run_atom(const EnsembleConfig& cfg, const SystemParams& base, std::size_t index,
                            double tau_start, double tau_end) {
  const std::uint64_t seed = derive_seed(cfg.master_seed, index);
  Rng rng(seed);
  SystemParams params = base;
  params.xi0 = cfg.fixed_xi0 ? *cfg.fixed_xi0 : rng.uniform();

  const auto grid = make_grid(cfg.subdivisions, cfg.q_max);
  const FieldSpec field =
      cfg.initial_field ? *cfg.initial_field : initial_field_steady_state(params, cfg.n_max);
  PacketState state = init_packet(grid, field, params, cfg.boundary_tolerance);

  // free flight up to the start of integration
  if (tau_start > 0.0) {
    std::vector<cplx> phase(grid.points());
    for (std::size_t i = 0; i < phase.size(); ++i) {
      const double q = grid.q(i);
      phase[i] = std::polar(1.0, -params.mu * q * q * tau_start);
    }
    for (int n = 0; n <= state.n_max(); ++n) {
      auto row = state.g(n);
      for (std::size_t i = 0; i < row.size(); ++i) row[i] *= phase[i];
    }
    state.tau = tau_start;
  }

  TrajectoryMode mode;
  switch (cfg.mode) {
    case EnsembleMode::Stochastic: mode = StochasticMode{splitmix64(seed)}; break;
    case EnsembleMode::NoJump: mode = NoJumpMode{}; break;
    case EnsembleMode::Closed: mode = ClosedMode{}; break;
  }

  TrajectoryOptions opt;
  opt.tau_end = tau_end;
  opt.dtau = cfg.dtau;
  opt.position_snapshots = false;
  opt.boundary_tolerance = cfg.boundary_tolerance;

  TrajectoryRecord rec = cfg.use_envelope
                             ? run_trajectory(state, params, mode, opt, TransitEnvelope{cfg.transit})
                             : run_trajectory(state, params, mode, opt);
  AtomOutcome out;
  out.xi0 = params.xi0;
  out.atomic_jumps = rec.count(JumpChannel::Atomic);
  out.cavity_jumps = rec.count(JumpChannel::Cavity);
  out.momentum = momentum_distribution(rec.final_state).density;
  return out;
}

}  // namespace detail

/// Runs cfg.n_atoms independent transits. Atom i uses the stream derived from
/// (master_seed, i); results are combined in index order, so the outcome does
/// not depend on cfg.threads.
inline EnsembleResult run_ensemble(const EnsembleConfig& cfg, const SystemParams& params) {
  validate(params);
  validate(cfg.transit);
  if (cfg.n_atoms < 1) throw ValidationError("ensemble: n_atoms must be >= 1");
  if (!(cfg.dtau > 0.0)) throw ValidationError("ensemble: dtau must be > 0");
  if (cfg.mode == EnsembleMode::NoJump && params.gamma == 0.0 && params.kappa == 0.0)
    throw ValidationError("ensemble: nojump mode needs gamma > 0 or kappa > 0");

  const double tau_start = detail::integration_start(cfg);
  const double tau_end = cfg.tau_end ? *cfg.tau_end : cfg.transit.end_time();
  if (!(tau_end > tau_start)) throw ValidationError("ensemble: empty integration window");

  const auto n = static_cast<std::size_t>(cfg.n_atoms);
  std::vector<AtomOutcome> outcomes(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        outcomes[i] = detail::run_atom(cfg, params, i, tau_start, tau_end);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(n)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  const auto grid = make_grid(cfg.subdivisions, cfg.q_max);
  EnsembleResult res;
  res.tau_start = tau_start;
  res.tau_end = tau_end;
  res.momentum.axis = "q";
  res.momentum.support = grid.axis();
  res.momentum.measure = grid.spacing();
  res.momentum.density.assign(grid.points(), 0.0);
  for (const auto& o : outcomes) {
    for (std::size_t i = 0; i < o.momentum.size(); ++i) res.momentum.density[i] += o.momentum[i];
    res.mean_atomic_jumps += static_cast<double>(o.atomic_jumps);
    res.mean_cavity_jumps += static_cast<double>(o.cavity_jumps);
  }
  const double inv = 1.0 / static_cast<double>(n);
  for (auto& v : res.momentum.density) v *= inv;
  res.mean_atomic_jumps *= inv;
  res.mean_cavity_jumps *= inv;

  const double scale = far_field_scale(params.mu, cfg.transit);
  res.far_field.axis = "xi_screen";
  res.far_field.support.resize(grid.points());
  for (std::size_t i = 0; i < grid.points(); ++i) res.far_field.support[i] = scale * grid.q(i);
  res.far_field.measure = scale * grid.spacing();
  res.far_field.density.resize(grid.points());
  for (std::size_t i = 0; i < grid.points(); ++i)
    res.far_field.density[i] = res.momentum.density[i] / scale;
  res.far_field_width = moments(res.far_field).std;
  res.atoms = std::move(outcomes);
  return res;
}

}  // namespace osge
