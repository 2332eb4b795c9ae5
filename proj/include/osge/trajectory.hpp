// One quantum trajectory: piece-wise coherent evolution interrupted by jumps.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "osge/dynamics.hpp"
#include "osge/jumps.hpp"
#include "osge/model.hpp"
#include "osge/observables.hpp"

namespace osge {

// ---------------------------------------------------------------------------
// Random streams
// ---------------------------------------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed of trajectory `index` in an ensemble with `master_seed`.
inline std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) {
  return splitmix64(splitmix64(master_seed) ^ (index * 0xD1B54A32D192ED03ULL + 1));
}

/// Uniform doubles from a 64-bit Mersenne twister, converted by hand so the
/// stream does not depend on the standard library's distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 engine_;
};

// ---------------------------------------------------------------------------
// Modes and records
// ---------------------------------------------------------------------------

struct StochasticMode {
  std::uint64_t seed = 0;
};

/// Jumps forced at the listed times; no random jumps.
struct ScheduledMode {
  std::vector<double> jump_times;
  JumpChannel channel = JumpChannel::Atomic;
  double eta = 0.0;
};

/// Continuous non-Hermitian decay, renormalized every step, never jumping.
struct NoJumpMode {};

/// Lossless evolution: damping terms are switched off whatever gamma/kappa are.
struct ClosedMode {};

using TrajectoryMode = std::variant<StochasticMode, ScheduledMode, NoJumpMode, ClosedMode>;

inline std::string mode_name(const TrajectoryMode& m) {
  switch (m.index()) {
    case 0: return "stochastic";
    case 1: return "scheduled";
    case 2: return "nojump";
    default: return "closed";
  }
}

enum class Integrator { Rk4, Euler };

struct Snapshot {
  double tau = 0.0;
  double norm = 0.0;  // unnormalized N at this time (since the last jump)
  double excited = 0.0;
  Distribution1D momentum;
  Distribution1D excited_momentum;  // P_e(q)
  Distribution1D position;
  Moments momentum_moments;
  Moments position_moments;
  std::optional<PacketState> state;
};

struct TrajectoryRecord {
  std::vector<JumpEvent> jumps;
  std::vector<Snapshot> snapshots;
  PacketState final_state;  // renormalized

  std::size_t count(JumpChannel c) const {
    return static_cast<std::size_t>(
        std::count_if(jumps.begin(), jumps.end(), [c](const JumpEvent& j) { return j.channel == c; }));
  }
  const Snapshot* at(double tau, double tol = 1e-9) const {
    for (const auto& s : snapshots)
      if (std::abs(s.tau - tau) <= tol) return &s;
    return nullptr;
  }
};

struct TrajectoryOptions {
  double tau_end = 0.0;
  double dtau = 1e-3;
  Integrator integrator = Integrator::Rk4;
  std::vector<double> snapshot_times;
  PositionWindow window{};
  bool keep_states = false;
  bool position_snapshots = true;
  double boundary_tolerance = kDefaultBoundaryTolerance;
  double cutoff_tolerance = 1e-6;
  int check_every = 64;
  /// Called after every step (and any jump in it) with the current state.
  std::function<void(const PacketState&)> observer;
};

namespace detail {

inline constexpr double kTimeEps = 1e-9;

inline void check_domain(const PacketState& s, const TrajectoryOptions& opt, bool driven) {
  const double b = s.boundary_mass_fraction();
  if (b > opt.boundary_tolerance)
    throw RuntimeViolation("boundary mass " + std::to_string(b) + " exceeds tolerance " +
                           std::to_string(opt.boundary_tolerance) + " at tau=" + std::to_string(s.tau) +
                           " (increase q_max)");
  // without a drive the photon couplets never mix, so the top row cannot grow
  const double c = driven ? s.cutoff_mass_fraction() : 0.0;
  if (c > opt.cutoff_tolerance)
    throw RuntimeViolation("photon cutoff row holds " + std::to_string(c) + " at tau=" +
                           std::to_string(s.tau) + " (increase n_max)");
}

inline Snapshot take_snapshot(const PacketState& s, const TrajectoryOptions& opt) {
  Snapshot snap;
  snap.tau = s.tau;
  snap.norm = s.norm_squared();
  snap.momentum = momentum_distribution(s);
  snap.momentum_moments = moments(snap.momentum);
  auto pe = excited_population(s);
  snap.excited = pe.total;
  snap.excited_momentum = std::move(pe.by_momentum);
  if (opt.position_snapshots) {
    snap.position = position_distribution(s, opt.window);
    snap.position_moments = moments(snap.position);
  }
  if (opt.keep_states) {
    PacketState copy = s;
    copy.normalize();
    snap.state = std::move(copy);
  }
  return snap;
}

template <class Stepper, class Profile>
TrajectoryRecord run(PacketState state, const SystemParams& params, const TrajectoryMode& mode,
                     const TrajectoryOptions& opt, const Profile& profile, Stepper& stepper) {
  TrajectoryRecord rec;
  std::vector<double> snaps = opt.snapshot_times;
  std::sort(snaps.begin(), snaps.end());
  snaps.erase(std::unique(snaps.begin(), snaps.end()), snaps.end());

  const auto* scheduled = std::get_if<ScheduledMode>(&mode);
  const auto* stochastic = std::get_if<StochasticMode>(&mode);
  const bool renormalize_each_step = std::holds_alternative<NoJumpMode>(mode);
  const bool driven = params.drive != 0.0;
  std::optional<Rng> rng;
  if (stochastic) rng.emplace(stochastic->seed);

  std::size_t next_snap = 0;
  std::size_t next_jump = 0;
  while (next_snap < snaps.size() && snaps[next_snap] < state.tau - kTimeEps) ++next_snap;

  auto record_jump = [&](JumpChannel ch, double eta) {
    if (ch == JumpChannel::Atomic) {
      state = atomic_jump(state, eta);
    } else {
      state = cavity_jump(state);
    }
    state.normalize();
    rec.jumps.push_back({state.tau, ch, ch == JumpChannel::Atomic ? eta : 0.0});
  };

  auto flush_snapshots = [&] {
    while (next_snap < snaps.size() && std::abs(snaps[next_snap] - state.tau) <= kTimeEps) {
      check_domain(state, opt, driven);
      rec.snapshots.push_back(take_snapshot(state, opt));
      ++next_snap;
    }
  };

  flush_snapshots();
  long steps = 0;
  while (state.tau < opt.tau_end - kTimeEps) {
    // land exactly on event times instead of a rounding error short of them
    double stop = state.tau + opt.dtau;
    auto clamp_to = [&](double t) {
      if (t <= stop + kTimeEps) stop = t;
    };
    clamp_to(opt.tau_end);
    if (next_snap < snaps.size()) clamp_to(snaps[next_snap]);
    if (scheduled && next_jump < scheduled->jump_times.size()) clamp_to(scheduled->jump_times[next_jump]);
    const double h = stop - state.tau;
    const double target = stop;

    stepper.step(state, h, profile);
    state.tau = target;

    if (stochastic) {
      const auto p = collapse_probabilities(state, params, h);
      if (!p.first_order_valid())
        throw RuntimeViolation("per-step jump probability " + std::to_string(p.total()) +
                               " >= 0.1 at tau=" + std::to_string(state.tau) + " (reduce dtau)");
      const double r = rng->uniform();
      if (auto ch = select_event(p, r)) {
        const double eta = *ch == JumpChannel::Atomic ? rng->uniform(-1.0, 1.0) : 0.0;
        record_jump(*ch, eta);
      }
    } else if (scheduled) {
      while (next_jump < scheduled->jump_times.size() &&
             std::abs(scheduled->jump_times[next_jump] - state.tau) <= kTimeEps) {
        record_jump(scheduled->channel, scheduled->eta);
        ++next_jump;
      }
    } else if (renormalize_each_step) {
      state.normalize();
    }

    const double n2 = state.norm_squared();
    if (!(n2 > 0.0) || !std::isfinite(n2))
      throw RuntimeViolation("state norm collapsed at tau=" + std::to_string(state.tau));
    if (n2 < 1e-200) state.normalize();

    if (opt.observer) opt.observer(state);
    if (++steps % opt.check_every == 0) check_domain(state, opt, driven);
    flush_snapshots();
  }

  check_domain(state, opt, driven);
  state.normalize();
  rec.final_state = std::move(state);
  return rec;
}

}  // namespace detail

inline void validate(const TrajectoryMode& mode, const SystemParams& params) {
  if (const auto* s = std::get_if<ScheduledMode>(&mode)) {
    for (std::size_t i = 1; i < s->jump_times.size(); ++i)
      if (!(s->jump_times[i] > s->jump_times[i - 1]))
        throw ValidationError("scheduled jump times must be strictly increasing");
    if (s->channel == JumpChannel::Atomic && !(s->eta >= -1.0 && s->eta <= 1.0))
      throw ValidationError("scheduled eta must lie in [-1, 1]");
  }
  if (std::holds_alternative<NoJumpMode>(mode) && params.gamma == 0.0 && params.kappa == 0.0)
    throw ValidationError("nojump mode needs gamma > 0 or kappa > 0");
}

/// Evolves `initial` to opt.tau_end. The coupling g0 is scaled by
/// profile(tau) at every stage of the integrator.
template <class Profile = ConstantCoupling>
TrajectoryRecord run_trajectory(const PacketState& initial, const SystemParams& params,
                                const TrajectoryMode& mode, const TrajectoryOptions& opt,
                                const Profile& profile = {}) {
  validate(params);
  validate(mode, params);
  if (!(opt.dtau > 0.0)) throw ValidationError("dtau must be > 0");
  if (opt.tau_end < initial.tau) throw ValidationError("tau_end precedes the initial time");
  for (double t : opt.snapshot_times)
    if (t > opt.tau_end + detail::kTimeEps) throw ValidationError("snapshot time beyond tau_end");
  if (const auto* s = std::get_if<ScheduledMode>(&mode))
    for (double t : s->jump_times)
      if (t > opt.tau_end + detail::kTimeEps || t < initial.tau)
        throw ValidationError("scheduled jump time outside the run");

  const DerivativeTerms terms =
      std::holds_alternative<ClosedMode>(mode) ? DerivativeTerms::closed() : DerivativeTerms::all();
  Generator gen(initial.grid(), initial.n_max(), params, terms);
  if (opt.integrator == Integrator::Euler) {
    EulerStepper st(std::move(gen));
    return detail::run(initial, params, mode, opt, profile, st);
  }
  Rk4Stepper st(std::move(gen));
  return detail::run(initial, params, mode, opt, profile, st);
}

/// Evenly spaced times first, first + step, ... up to last (inclusive).
inline std::vector<double> time_grid(double first, double last, double step) {
  std::vector<double> t;
  const auto n = static_cast<long>(std::floor((last - first) / step + 1e-9));
  for (long i = 0; i <= n; ++i) t.push_back(first + step * static_cast<double>(i));
  return t;
}

}  // namespace osge
