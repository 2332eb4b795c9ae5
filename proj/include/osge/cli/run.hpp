// simulate(): one configured run, written to an output directory.
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "osge/cli/config.hpp"
#include "osge/cli/io.hpp"
#include "osge/cli/plot.hpp"
#include "osge/experiment.hpp"
#include "osge/trajectory.hpp"

namespace osge::cli {

struct SimulateResult {
  std::vector<std::string> files;
  json summary;
  std::optional<TrajectoryRecord> trajectory;
  std::optional<EnsembleResult> ensemble;
};

/// Throws ValidationError listing every error diagnostic.
inline void require_valid(const RunConfig& c) {
  const auto ds = check(c);
  if (!has_errors(ds)) return;
  std::string msg = "invalid configuration";
  for (const auto& d : ds)
    if (d.level == Diagnostic::Level::Error) msg += "\n  " + d.field + ": " + d.message;
  throw ValidationError(msg);
}

namespace detail {

inline json moments_json(const Moments& m) {
  json peaks = json::array();
  for (const auto& p : m.local_maxima) peaks.push_back(p.position);
  return {{"mean", m.mean}, {"std", m.std}, {"peaks", peaks}};
}

inline SimulateResult simulate_trajectory(const RunConfig& c, const fs::path& dir) {
  const auto grid = build_grid(c);
  const PacketState init = init_packet(grid, build_field(c), c.params, c.boundary_tolerance);
  const TrajectoryOptions opt = build_options(c);
  TrajectoryRecord rec = run_trajectory(init, c.params, build_mode(c), opt);

  SimulateResult res;
  auto add = [&](const std::string& f) { res.files.push_back(f); };

  write_distribution(dir / "initial_momentum.tsv", momentum_distribution(init),
                     run_header(c, "initial momentum distribution P(q)", {"q", "density"}));
  add("initial_momentum.tsv");
  write_distribution(dir / "final_momentum.tsv", momentum_distribution(rec.final_state),
                     run_header(c, "final momentum distribution P(q) at tau=" + fmt(rec.final_state.tau),
                                {"q", "density"}));
  add("final_momentum.tsv");
  write_surface(dir / "momentum_surface.tsv", rec.snapshots, [](const Snapshot& s) -> auto& { return s.momentum; },
                run_header(c, "momentum distribution P(q, tau)", {"tau", "q", "density"}));
  add("momentum_surface.tsv");
  write_surface(dir / "excited_surface.tsv", rec.snapshots,
                [](const Snapshot& s) -> auto& { return s.excited_momentum; },
                run_header(c, "excited-state momentum distribution P_e(q, tau)", {"tau", "q", "density"}));
  add("excited_surface.tsv");
  if (c.trajectory.position) {
    auto h = [&](std::string title, std::vector<std::string> cols) {
      auto hd = run_header(c, std::move(title), std::move(cols));
      hd.lines.push_back("window: [" + fmt(opt.window.lo) + ", " + fmt(opt.window.hi) + "]");
      return hd;
    };
    write_distribution(dir / "initial_position.tsv", position_distribution(init, opt.window),
                       h("initial position distribution P(xi)", {"xi", "density"}));
    add("initial_position.tsv");
    write_distribution(dir / "final_position.tsv", position_distribution(rec.final_state, opt.window),
                       h("final position distribution P(xi) at tau=" + fmt(rec.final_state.tau), {"xi", "density"}));
    add("final_position.tsv");
    write_surface(dir / "position_surface.tsv", rec.snapshots, [](const Snapshot& s) -> auto& { return s.position; },
                  h("position distribution P(xi, tau)", {"tau", "xi", "density"}));
    add("position_surface.tsv");
  }
  {
    TsvWriter w(dir / "observables.tsv",
                run_header(c, "snapshot observables (N is the unnormalized norm since the last jump)",
                           {"tau", "norm", "excited", "q_mean", "q_std", "q_peaks", "xi_mean", "xi_std", "xi_peaks"}));
    for (const auto& s : rec.snapshots)
      w.row(s.tau, s.norm, s.excited, s.momentum_moments.mean, s.momentum_moments.std,
            s.momentum_moments.local_maxima.size(), s.position_moments.mean, s.position_moments.std,
            s.position_moments.local_maxima.size());
    w.close();
    add("observables.tsv");
  }
  write_jumps(dir / "jumps.tsv", rec.jumps, run_header(c, "jump log", {"tau", "channel", "eta"}));
  add("jumps.tsv");

  res.summary = {{"tau_end", rec.final_state.tau},
                 {"atomic_jumps", rec.count(JumpChannel::Atomic)},
                 {"cavity_jumps", rec.count(JumpChannel::Cavity)},
                 {"final_momentum", moments_json(moments(momentum_distribution(rec.final_state)))}};
  res.trajectory = std::move(rec);
  return res;
}

inline SimulateResult simulate_ensemble(const RunConfig& c, const fs::path& dir) {
  const EnsembleConfig cfg = build_ensemble(c);
  EnsembleResult r = run_ensemble(cfg, c.params);

  SimulateResult res;
  auto header = [&](std::string title, std::vector<std::string> cols) {
    auto h = run_header(c, std::move(title), std::move(cols));
    h.lines.push_back("atoms: " + std::to_string(c.ensemble.n_atoms) + ", integrated tau " + fmt(r.tau_start) +
                      " to " + fmt(r.tau_end));
    h.lines.push_back("screen distance: " + fmt(c.ensemble.transit.screen_distance) + " waists");
    return h;
  };
  write_distribution(dir / "far_field.tsv", r.far_field,
                     header("averaged far-field distribution (screen position / lambda)", {"xi_screen", "density"}));
  res.files.push_back("far_field.tsv");
  write_distribution(dir / "momentum.tsv", r.momentum, header("averaged momentum distribution P(q)", {"q", "density"}));
  res.files.push_back("momentum.tsv");
  {
    TsvWriter w(dir / "atoms.tsv", header("per-atom outcomes", {"index", "xi0", "atomic_jumps", "cavity_jumps"}));
    for (std::size_t i = 0; i < r.atoms.size(); ++i)
      w.row(i, r.atoms[i].xi0, r.atoms[i].atomic_jumps, r.atoms[i].cavity_jumps);
    w.close();
    res.files.push_back("atoms.tsv");
  }
  res.summary = {{"far_field", moments_json(moments(r.far_field))},
                 {"far_field_width", r.far_field_width},
                 {"mean_atomic_jumps", r.mean_atomic_jumps},
                 {"mean_cavity_jumps", r.mean_cavity_jumps},
                 {"tau_start", r.tau_start},
                 {"tau_end", r.tau_end}};
  res.ensemble = std::move(r);
  return res;
}

}  // namespace detail

/// Runs `c` and writes its data files, manifest.json and plot.py into `dir`.
inline SimulateResult simulate(const RunConfig& c, const fs::path& dir, const std::string& command = "simulate") {
  require_valid(c);
  fs::create_directories(dir);
  SimulateResult res =
      c.kind == RunKind::Ensemble ? detail::simulate_ensemble(c, dir) : detail::simulate_trajectory(c, dir);
  write_text(dir / "plot.py", plot_script(c.name, default_panels(c)));
  res.files.push_back("plot.py");
  res.files.push_back("manifest.json");
  write_json(dir / "manifest.json", make_manifest(c, command, res.files, res.summary));
  return res;
}

}  // namespace osge::cli
