// Run configuration: JSON mapping, validation diagnostics, and conversion to
// the library's run types.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "osge/experiment.hpp"
#include "osge/model.hpp"
#include "osge/observables.hpp"
#include "osge/trajectory.hpp"

namespace osge::cli {

using json = nlohmann::ordered_json;

enum class RunKind { Trajectory, Ensemble };

struct FieldConfig {
  std::string kind = "fock";  // fock | coherent | steady_state
  int photons = 1;
  double alpha_re = 1.0;
  double alpha_im = 0.0;
  int n_max = 1;
};

/// Snapshot times: the range from..to by step (skipped when step is 0) plus
/// any explicit times.
struct SnapshotConfig {
  double from = 0.0;
  double to = 0.0;
  double step = 0.0;
  std::vector<double> times;

  std::vector<double> resolve() const {
    std::vector<double> t = step > 0.0 ? time_grid(from, to, step) : std::vector<double>{};
    t.insert(t.end(), times.begin(), times.end());
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    return t;
  }
};

struct TrajectoryConfig {
  std::string mode = "closed";  // closed | stochastic | scheduled | nojump
  std::vector<double> jump_times;
  std::string jump_channel = "atomic";
  double jump_eta = 0.0;
  std::string integrator = "rk4";
  double tau_end = 450.0;
  double dtau = 0.005;
  SnapshotConfig snapshots{0.0, 450.0, 2.0, {}};
  PositionWindow window{-0.5, 1.0, 0.0};
  bool position = true;
};

struct EnsembleSettings {
  int n_atoms = 200;
  std::string mode = "stochastic";  // stochastic | nojump | closed
  TransitConfig transit{};
  bool use_envelope = true;
  std::optional<double> fixed_xi0;
  double envelope_floor = 1e-12;
  std::optional<double> tau_end;
};

/// Everything a run needs. The defaults are the fig2 node packet.
struct RunConfig {
  std::string name = "fig2";
  RunKind kind = RunKind::Trajectory;
  SystemParams params{.mu = 1.7e-4};
  int subdivisions = 8;
  int q_max = 128;
  FieldConfig field{};
  TrajectoryConfig trajectory{};
  EnsembleSettings ensemble{};
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::string out = "out";
  double boundary_tolerance = kDefaultBoundaryTolerance;
  double cutoff_tolerance = 1e-6;
};

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

namespace detail {

inline const char* kind_name(RunKind k) { return k == RunKind::Ensemble ? "ensemble" : "trajectory"; }

inline const char* phase_name(ModePhase p) { return p == ModePhase::Sine ? "sin" : "cos"; }

inline json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

/// Reads one JSON object, tracking the dotted path for error messages and
/// rejecting keys nobody asked for.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ValidationError(where() + "expected an object");
  }

  template <class T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    const std::string field = path_.empty() ? key : path_ + "." + key;
    try {
      if constexpr (std::is_same_v<T, double>) {
        if (!it->is_number()) throw ValidationError("expected a number");
        out = it->template get<double>();
      } else if constexpr (std::is_same_v<T, std::optional<double>>) {
        if (it->is_null()) {
          out.reset();
        } else {
          if (!it->is_number()) throw ValidationError("expected a number or null");
          out = it->template get<double>();
        }
      } else if constexpr (std::is_same_v<T, int>) {
        if (!it->is_number_integer()) throw ValidationError("expected an integer");
        out = it->template get<int>();
      } else if constexpr (std::is_same_v<T, unsigned>) {
        if (!it->is_number_unsigned()) throw ValidationError("expected a non-negative integer");
        out = it->template get<unsigned>();
      } else if constexpr (std::is_same_v<T, std::uint64_t>) {
        if (!it->is_number_unsigned()) throw ValidationError("expected a non-negative integer");
        out = it->template get<std::uint64_t>();
      } else if constexpr (std::is_same_v<T, bool>) {
        if (!it->is_boolean()) throw ValidationError("expected true or false");
        out = it->template get<bool>();
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!it->is_string()) throw ValidationError("expected a string");
        out = it->template get<std::string>();
      } else if constexpr (std::is_same_v<T, std::vector<double>>) {
        if (!it->is_array()) throw ValidationError("expected an array of numbers");
        out.clear();
        for (const auto& v : *it) {
          if (!v.is_number()) throw ValidationError("expected an array of numbers");
          out.push_back(v.template get<double>());
        }
      } else {
        static_assert(sizeof(T) == 0, "unsupported field type");
      }
    } catch (const ValidationError& e) {
      throw ValidationError(field + ": " + e.what());
    } catch (const nlohmann::json::exception&) {
      throw ValidationError(field + ": value out of range");
    }
  }

  /// Sub-object, or nullptr when absent.
  const json* child(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string child_path(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ValidationError(where() + "unknown key '" + it.key() + "'");
  }

 private:
  std::string where() const { return path_.empty() ? "config: " : path_ + ": "; }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

}  // namespace detail

inline json to_json(const RunConfig& c) {
  const auto& p = c.params;
  const auto& t = c.trajectory;
  const auto& e = c.ensemble;
  json j;
  j["name"] = c.name;
  j["kind"] = detail::kind_name(c.kind);
  j["params"] = {{"mu", p.mu},
                 {"gamma", p.gamma},
                 {"kappa", p.kappa},
                 {"delta", p.delta},
                 {"detuning_sign", p.detuning_sign},
                 {"drive", p.drive},
                 {"xi0", p.xi0},
                 {"delta_q", p.delta_q},
                 {"mode_phase", detail::phase_name(p.mode_phase)}};
  j["grid"] = {{"subdivisions", c.subdivisions}, {"q_max", c.q_max}};
  j["field"] = {{"kind", c.field.kind},
                {"photons", c.field.photons},
                {"alpha_re", c.field.alpha_re},
                {"alpha_im", c.field.alpha_im},
                {"n_max", c.field.n_max}};
  j["trajectory"] = {
      {"mode", t.mode},
      {"jump_times", t.jump_times},
      {"jump_channel", t.jump_channel},
      {"jump_eta", t.jump_eta},
      {"integrator", t.integrator},
      {"tau_end", t.tau_end},
      {"dtau", t.dtau},
      {"snapshots",
       {{"from", t.snapshots.from}, {"to", t.snapshots.to}, {"step", t.snapshots.step}, {"times", t.snapshots.times}}},
      {"window", {{"lo", t.window.lo}, {"hi", t.window.hi}, {"resolution", t.window.resolution}}},
      {"position", t.position}};
  j["ensemble"] = {{"n_atoms", e.n_atoms},
                   {"mode", e.mode},
                   {"transit",
                    {{"w_over_vz_in_g0", e.transit.w_over_vz_in_g0},
                     {"entry_offset", e.transit.entry_offset},
                     {"exit_offset", e.transit.exit_offset},
                     {"screen_distance", e.transit.screen_distance}}},
                   {"use_envelope", e.use_envelope},
                   {"fixed_xi0", detail::opt_json(e.fixed_xi0)},
                   {"envelope_floor", e.envelope_floor},
                   {"tau_end", detail::opt_json(e.tau_end)}};
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["out"] = c.out;
  j["tolerances"] = {{"boundary", c.boundary_tolerance}, {"cutoff", c.cutoff_tolerance}};
  return j;
}

/// Missing keys keep their defaults; unknown keys and wrong types are
/// ValidationErrors naming the offending field.
inline RunConfig from_json(const json& j) {
  RunConfig c;
  detail::ObjectReader r(j, "");
  r.read("name", c.name);
  std::string kind = detail::kind_name(c.kind);
  r.read("kind", kind);
  if (kind == "trajectory") {
    c.kind = RunKind::Trajectory;
  } else if (kind == "ensemble") {
    c.kind = RunKind::Ensemble;
  } else {
    throw ValidationError("kind: expected 'trajectory' or 'ensemble', got '" + kind + "'");
  }

  if (const json* s = r.child("params")) {
    detail::ObjectReader pr(*s, "params");
    auto& p = c.params;
    pr.read("mu", p.mu);
    pr.read("gamma", p.gamma);
    pr.read("kappa", p.kappa);
    pr.read("delta", p.delta);
    pr.read("detuning_sign", p.detuning_sign);
    pr.read("drive", p.drive);
    pr.read("xi0", p.xi0);
    pr.read("delta_q", p.delta_q);
    std::string phase = detail::phase_name(p.mode_phase);
    pr.read("mode_phase", phase);
    if (phase == "cos") {
      p.mode_phase = ModePhase::Cosine;
    } else if (phase == "sin") {
      p.mode_phase = ModePhase::Sine;
    } else {
      throw ValidationError("params.mode_phase: expected 'cos' or 'sin', got '" + phase + "'");
    }
    pr.finish();
  }
  if (const json* s = r.child("grid")) {
    detail::ObjectReader gr(*s, "grid");
    gr.read("subdivisions", c.subdivisions);
    gr.read("q_max", c.q_max);
    gr.finish();
  }
  if (const json* s = r.child("field")) {
    detail::ObjectReader fr(*s, "field");
    fr.read("kind", c.field.kind);
    fr.read("photons", c.field.photons);
    fr.read("alpha_re", c.field.alpha_re);
    fr.read("alpha_im", c.field.alpha_im);
    fr.read("n_max", c.field.n_max);
    fr.finish();
  }
  if (const json* s = r.child("trajectory")) {
    detail::ObjectReader tr(*s, "trajectory");
    auto& t = c.trajectory;
    tr.read("mode", t.mode);
    tr.read("jump_times", t.jump_times);
    tr.read("jump_channel", t.jump_channel);
    tr.read("jump_eta", t.jump_eta);
    tr.read("integrator", t.integrator);
    tr.read("tau_end", t.tau_end);
    tr.read("dtau", t.dtau);
    if (const json* sn = tr.child("snapshots")) {
      detail::ObjectReader sr(*sn, "trajectory.snapshots");
      sr.read("from", t.snapshots.from);
      sr.read("to", t.snapshots.to);
      sr.read("step", t.snapshots.step);
      sr.read("times", t.snapshots.times);
      sr.finish();
    }
    if (const json* w = tr.child("window")) {
      detail::ObjectReader wr(*w, "trajectory.window");
      wr.read("lo", t.window.lo);
      wr.read("hi", t.window.hi);
      wr.read("resolution", t.window.resolution);
      wr.finish();
    }
    tr.read("position", t.position);
    tr.finish();
  }
  if (const json* s = r.child("ensemble")) {
    detail::ObjectReader er(*s, "ensemble");
    auto& e = c.ensemble;
    er.read("n_atoms", e.n_atoms);
    er.read("mode", e.mode);
    if (const json* tj = er.child("transit")) {
      detail::ObjectReader tr(*tj, "ensemble.transit");
      tr.read("w_over_vz_in_g0", e.transit.w_over_vz_in_g0);
      tr.read("entry_offset", e.transit.entry_offset);
      tr.read("exit_offset", e.transit.exit_offset);
      tr.read("screen_distance", e.transit.screen_distance);
      tr.finish();
    }
    er.read("use_envelope", e.use_envelope);
    er.read("fixed_xi0", e.fixed_xi0);
    er.read("envelope_floor", e.envelope_floor);
    er.read("tau_end", e.tau_end);
    er.finish();
  }
  r.read("seed", c.seed);
  r.read("threads", c.threads);
  r.read("out", c.out);
  if (const json* s = r.child("tolerances")) {
    detail::ObjectReader tr(*s, "tolerances");
    tr.read("boundary", c.boundary_tolerance);
    tr.read("cutoff", c.cutoff_tolerance);
    tr.finish();
  }
  r.finish();
  return c;
}

// ---------------------------------------------------------------------------
// Conversion
// ---------------------------------------------------------------------------

inline MomentumGrid build_grid(const RunConfig& c) { return make_grid(c.subdivisions, c.q_max); }

inline FieldSpec build_field(const RunConfig& c) {
  const auto& f = c.field;
  if (f.kind == "fock") return field_fock(f.photons, f.n_max);
  if (f.kind == "coherent") return field_coherent(cplx{f.alpha_re, f.alpha_im}, f.n_max);
  if (f.kind == "steady_state") return initial_field_steady_state(c.params, f.n_max);
  throw ValidationError("field.kind: expected 'fock', 'coherent' or 'steady_state', got '" + f.kind + "'");
}

inline JumpChannel build_channel(const std::string& name) {
  if (name == "atomic") return JumpChannel::Atomic;
  if (name == "cavity") return JumpChannel::Cavity;
  throw ValidationError("trajectory.jump_channel: expected 'atomic' or 'cavity', got '" + name + "'");
}

inline TrajectoryMode build_mode(const RunConfig& c) {
  const auto& t = c.trajectory;
  if (t.mode == "closed") return ClosedMode{};
  if (t.mode == "nojump") return NoJumpMode{};
  if (t.mode == "stochastic") return StochasticMode{derive_seed(c.seed, 0)};
  if (t.mode == "scheduled") return ScheduledMode{t.jump_times, build_channel(t.jump_channel), t.jump_eta};
  throw ValidationError("trajectory.mode: expected 'closed', 'stochastic', 'scheduled' or 'nojump', got '" +
                        t.mode + "'");
}

inline Integrator build_integrator(const std::string& name) {
  if (name == "rk4") return Integrator::Rk4;
  if (name == "euler") return Integrator::Euler;
  throw ValidationError("trajectory.integrator: expected 'rk4' or 'euler', got '" + name + "'");
}

inline TrajectoryOptions build_options(const RunConfig& c) {
  const auto& t = c.trajectory;
  TrajectoryOptions o;
  o.tau_end = t.tau_end;
  o.dtau = t.dtau;
  o.integrator = build_integrator(t.integrator);
  o.snapshot_times = t.snapshots.resolve();
  o.window = t.window;
  o.position_snapshots = t.position;
  o.boundary_tolerance = c.boundary_tolerance;
  o.cutoff_tolerance = c.cutoff_tolerance;
  return o;
}

inline EnsembleMode build_ensemble_mode(const std::string& name) {
  if (name == "stochastic") return EnsembleMode::Stochastic;
  if (name == "nojump") return EnsembleMode::NoJump;
  if (name == "closed") return EnsembleMode::Closed;
  throw ValidationError("ensemble.mode: expected 'stochastic', 'nojump' or 'closed', got '" + name + "'");
}

inline EnsembleConfig build_ensemble(const RunConfig& c) {
  const auto& e = c.ensemble;
  EnsembleConfig cfg;
  cfg.n_atoms = e.n_atoms;
  cfg.subdivisions = c.subdivisions;
  cfg.q_max = c.q_max;
  cfg.n_max = c.field.n_max;
  cfg.dtau = c.trajectory.dtau;
  cfg.mode = build_ensemble_mode(e.mode);
  cfg.transit = e.transit;
  cfg.use_envelope = e.use_envelope;
  cfg.fixed_xi0 = e.fixed_xi0;
  if (c.field.kind != "steady_state") cfg.initial_field = build_field(c);
  cfg.envelope_floor = e.envelope_floor;
  cfg.tau_end = e.tau_end;
  cfg.master_seed = c.seed;
  cfg.threads = c.threads;
  cfg.boundary_tolerance = c.boundary_tolerance;
  return cfg;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct Diagnostic {
  enum class Level { Error, Warning };
  Level level = Level::Error;
  std::string field;
  std::string message;
};

inline std::string to_string(const Diagnostic& d) {
  return std::string(d.level == Diagnostic::Level::Error ? "error" : "warning") + ": " + d.field + ": " +
         d.message;
}

inline bool has_errors(const std::vector<Diagnostic>& ds) {
  return std::any_of(ds.begin(), ds.end(), [](const Diagnostic& d) { return d.level == Diagnostic::Level::Error; });
}

/// Upper estimate of the per-step jump probability (gamma P_e + 2 kappa <n>) dtau
/// with P_e <= 1 and <n> bounded by the initial and steady-state photon numbers.
inline double jump_probability_bound(const RunConfig& c, double mean_photons) {
  const auto& p = c.params;
  double n = mean_photons;
  if (p.kappa > 0.0) n = std::max(n, (p.drive / p.kappa) * (p.drive / p.kappa));
  return (p.gamma + 2.0 * p.kappa * n) * c.trajectory.dtau;
}

/// Checks every precondition of the run the config describes. Errors block
/// the run; warnings flag settings that may fail at runtime.
inline std::vector<Diagnostic> check(const RunConfig& c) {
  std::vector<Diagnostic> out;
  auto error = [&](std::string field, std::string msg) {
    out.push_back({Diagnostic::Level::Error, std::move(field), std::move(msg)});
  };
  auto warn = [&](std::string field, std::string msg) {
    out.push_back({Diagnostic::Level::Warning, std::move(field), std::move(msg)});
  };
  // library messages that already start with the field path keep it
  auto attempt = [&](const std::string& field, auto&& fn) -> bool {
    try {
      fn();
      return true;
    } catch (const ValidationError& e) {
      std::string msg = e.what();
      std::string f = field;
      if (msg.rfind(field + ".", 0) == 0) {
        const auto space = msg.find(' ');
        f = msg.substr(0, space);
        msg = msg.substr(space + 1);
      }
      error(f, msg);
      return false;
    }
  };

  const bool params_ok = attempt("params", [&] { validate(c.params); });
  std::optional<MomentumGrid> grid;
  attempt("grid", [&] { grid = build_grid(c); });
  std::optional<FieldSpec> field;
  if (params_ok) attempt("field", [&] { field = build_field(c); });
  if (params_ok && grid && field) {
    try {
      (void)init_packet(*grid, *field, c.params, c.boundary_tolerance);
    } catch (const ValidationError& e) {
      error("grid.q_max", e.what());
    }
  }
  if (!(c.boundary_tolerance > 0.0 && c.boundary_tolerance < 1.0)) error("tolerances.boundary", "must lie in (0, 1)");
  if (!(c.cutoff_tolerance > 0.0 && c.cutoff_tolerance < 1.0)) error("tolerances.cutoff", "must lie in (0, 1)");
  if (c.threads < 1) error("threads", "must be >= 1");

  const auto& t = c.trajectory;
  if (!(t.dtau > 0.0) || !std::isfinite(t.dtau)) error("trajectory.dtau", "must be > 0");
  attempt("trajectory.integrator", [&] { (void)build_integrator(t.integrator); });

  if (c.kind == RunKind::Trajectory) {
    bool mode_ok = attempt("trajectory.mode", [&] { (void)build_mode(c); });
    if (!(t.tau_end > 0.0) || !std::isfinite(t.tau_end)) error("trajectory.tau_end", "must be > 0");
    if (mode_ok && params_ok) {
      attempt("trajectory", [&] { validate(build_mode(c), c.params); });
    }
    if (t.mode == "scheduled") {
      for (double x : t.jump_times)
        if (!(x > 0.0 && x <= t.tau_end)) {
          error("trajectory.jump_times", "every time must lie in (0, tau_end]");
          break;
        }
      if (t.jump_times.empty()) warn("trajectory.jump_times", "scheduled mode without jump times never jumps");
    }
    if (t.snapshots.step < 0.0) error("trajectory.snapshots.step", "must be >= 0");
    if (t.snapshots.step > 0.0 && !(t.snapshots.to >= t.snapshots.from))
      error("trajectory.snapshots", "'to' precedes 'from'");
    for (double x : t.snapshots.resolve())
      if (x < 0.0 || x > t.tau_end + 1e-9) {
        error("trajectory.snapshots", "snapshot times must lie in [0, tau_end]");
        break;
      }
    if (!(t.window.hi > t.window.lo)) error("trajectory.window", "'hi' must exceed 'lo'");
    if (t.window.resolution < 0.0) error("trajectory.window.resolution", "must be >= 0");
    if (t.mode == "stochastic" && field && t.dtau > 0.0) {
      const double p = jump_probability_bound(c, field->mean_photons());
      if (p >= kMaxStepJumpProbability)
        warn("trajectory.dtau", "per-step jump probability bound " + std::to_string(p) + " >= " +
                                    std::to_string(kMaxStepJumpProbability) + " (reduce dtau)");
    }
  } else {
    const auto& e = c.ensemble;
    if (e.n_atoms < 1) error("ensemble.n_atoms", "must be >= 1");
    const bool mode_ok = attempt("ensemble.mode", [&] { (void)build_ensemble_mode(e.mode); });
    attempt("ensemble.transit", [&] { validate(e.transit); });
    if (e.fixed_xi0 && !std::isfinite(*e.fixed_xi0)) error("ensemble.fixed_xi0", "must be finite");
    if (!(e.envelope_floor > 0.0 && e.envelope_floor < 1.0)) error("ensemble.envelope_floor", "must lie in (0, 1)");
    if (e.tau_end && !(*e.tau_end > 0.0)) error("ensemble.tau_end", "must be > 0");
    if (mode_ok && e.mode == "nojump" && c.params.gamma == 0.0 && c.params.kappa == 0.0)
      error("ensemble.mode", "nojump mode needs gamma > 0 or kappa > 0");
    if (mode_ok && e.mode == "stochastic" && field && t.dtau > 0.0) {
      const double p = jump_probability_bound(c, field->mean_photons());
      if (p >= kMaxStepJumpProbability)
        warn("trajectory.dtau", "per-step jump probability bound " + std::to_string(p) + " >= " +
                                    std::to_string(kMaxStepJumpProbability) + " (reduce dtau)");
    }
  }
  return out;
}

}  // namespace osge::cli
