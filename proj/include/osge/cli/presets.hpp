// Named run sets, one per figure.
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "osge/cli/config.hpp"
#include "osge/cli/io.hpp"
#include "osge/cli/plot.hpp"
#include "osge/cli/run.hpp"
#include "osge/experiment.hpp"

namespace osge::cli {

struct PresetRun {
  std::string label;  // subdirectory of the preset's output directory
  RunConfig config;
};

struct Preset {
  std::string name;
  std::string description;
  std::vector<PresetRun> runs;
  std::vector<PlotPanel> panels;
};

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"fig2", "fig5",  "fig6",  "fig7", "fig8",
                                              "fig9", "fig10", "fig11", "fig12"};
  return names;
}

namespace presets {

/// Node packet of a finite-mass atom in a one-photon Fock field, lossless.
inline RunConfig node_packet(std::string name) {
  RunConfig c;
  c.name = std::move(name);
  return c;
}

/// Infinitely heavy atom at a node with the field in |alpha = 1>.
inline RunConfig heavy_atom(std::string name, double tau_end) {
  RunConfig c;
  c.name = std::move(name);
  c.params.mu = 0.0;
  c.subdivisions = 4;
  c.q_max = 128;
  c.field = {"coherent", 0, 1.0, 0.0, 12};
  c.trajectory.tau_end = tau_end;
  c.trajectory.snapshots = {0.0, tau_end, 0.25, {}};
  c.trajectory.window = {-0.25, 0.75, 0.0};
  return c;
}

/// Barium atoms crossing a driven cavity holding one photon on average.
inline RunConfig transit(std::string name, double gamma, std::string mode) {
  RunConfig c;
  c.name = std::move(name);
  c.kind = RunKind::Ensemble;
  c.params.mu = barium::mu();
  c.params.gamma = gamma;
  c.params.kappa = 0.25;
  c.params.drive = 0.25;
  c.subdivisions = 2;
  c.q_max = 128;
  c.field = {"steady_state", 0, 0.0, 0.0, 12};
  c.trajectory.dtau = 0.05;
  c.ensemble.n_atoms = 200;
  c.ensemble.mode = std::move(mode);
  c.ensemble.transit.w_over_vz_in_g0 = barium::waist_time();
  c.ensemble.transit.screen_distance = 40.0;
  return c;
}

inline RunConfig transit_case(char which) {
  switch (which) {
    case 'a': return transit("nonradiative", 0.0, "stochastic");
    case 'b': return transit("radiative", 0.5, "stochastic");
    default: return transit("radiative, atomic jumps suppressed", 0.5, "nojump");
  }
}

}  // namespace presets

/// Throws ValidationError for unknown names.
inline Preset make_preset(std::string_view name) {
  using K = PlotPanel::Kind;
  Preset p;
  p.name = std::string(name);

  if (name == "fig2") {
    p.description = "node packet, mu = 1.7e-4, one-photon Fock field, closed system";
    p.runs.push_back({"node", presets::node_packet("fig2")});
    p.panels = default_panels(p.runs[0].config, "node/");
  } else if (name == "fig5") {
    p.description = "node packet with detuning delta = 0.1 (and 0.01 for comparison)";
    for (double d : {0.1, 0.01}) {
      RunConfig c = presets::node_packet("fig5 delta=" + fmt(d));
      c.params.delta = d;
      p.runs.push_back({"delta" + fmt(d), c});
    }
    p.panels.push_back({K::Surface, "P(xi, tau), delta = 0.1", "tau", "xi", {{"delta0.1/position_surface.tsv", "", 0, 1}}});
    p.panels.push_back(
        {K::Surface, "P(xi, tau), delta = 0.01", "tau", "xi", {{"delta0.01/position_surface.tsv", "", 0, 1}}});
  } else if (name == "fig6") {
    p.description = "packet right after one atomic jump at tau = 1..5, 10, 20 (independent runs)";
    PlotPanel mom{K::Lines, "P(q) right after the jump", "q", "P(q)", {}};
    PlotPanel pos{K::Lines, "P(xi) right after the jump", "xi", "P(xi)", {}};
    for (double t : {1.0, 2.0, 3.0, 4.0, 5.0, 10.0, 20.0}) {
      RunConfig c = presets::heavy_atom("fig6 jump at tau=" + fmt(t), t);
      c.params.gamma = 0.1;
      c.trajectory.mode = "scheduled";
      c.trajectory.jump_times = {t};
      c.trajectory.snapshots = {0.0, 0.0, 0.0, {0.0, t}};
      const std::string label = "tau" + fmt(t);
      p.runs.push_back({label, c});
      if (t == 1.0) {
        mom.series.push_back({label + "/initial_momentum.tsv", "initial", 0, 1});
        pos.series.push_back({label + "/initial_position.tsv", "initial", 0, 1});
      }
      mom.series.push_back({label + "/final_momentum.tsv", "tau = " + fmt(t), 0, 1});
      pos.series.push_back({label + "/final_position.tsv", "tau = " + fmt(t), 0, 1});
    }
    p.panels = {mom, pos};
  } else if (name == "fig7") {
    p.description = "infinitely heavy atom, lossless, coherent field alpha = 1";
    p.runs.push_back({"heavy", presets::heavy_atom("fig7", 20.0)});
    p.panels = default_panels(p.runs[0].config, "heavy/");
  } else if (name == "fig8") {
    p.description = "infinitely heavy atom, gamma = 0.1, one atomic jump at tau = 3";
    RunConfig c = presets::heavy_atom("fig8", 20.0);
    c.params.gamma = 0.1;
    c.trajectory.mode = "scheduled";
    c.trajectory.jump_times = {3.0};
    p.runs.push_back({"jump", c});
    p.panels = default_panels(c, "jump/");
    p.panels.resize(2);
  } else if (name == "fig9") {
    p.description = "excited-state population before any atomic jump, gamma = 0.1, 0.5, 2";
    PlotPanel trace{K::Lines, "P_e(tau)", "tau", "P_e", {}};
    for (double g : {0.1, 0.5, 2.0}) {
      RunConfig c = presets::heavy_atom("fig9 gamma=" + fmt(g), 20.0);
      c.params.gamma = g;
      c.trajectory.mode = "nojump";
      c.trajectory.snapshots = {0.0, 20.0, 0.1, {}};
      c.trajectory.position = false;
      const std::string label = "gamma" + fmt(g);
      p.runs.push_back({label, c});
      trace.series.push_back({label + "/observables.tsv", "gamma = " + fmt(g), 0, 2});
    }
    p.panels.push_back({K::Surface, "P_e(q, tau), gamma = 0.5", "tau", "q", {{"gamma0.5/excited_surface.tsv", "", 0, 1}}});
    p.panels.push_back(trace);
  } else if (name == "fig10") {
    p.description = "successive atomic jumps at tau = 5, 10, 15; gamma = 0.5, kappa = 0";
    RunConfig c = presets::heavy_atom("fig10", 20.0);
    c.params.gamma = 0.5;
    c.trajectory.mode = "scheduled";
    c.trajectory.jump_times = {5.0, 10.0, 15.0};
    p.runs.push_back({"jumps", c});
    p.panels = default_panels(c, "jumps/");
    p.panels.resize(2);
  } else if (name == "fig11") {
    p.description = "far field averaged over 200 barium atoms: (a) gamma = 0, (b) gamma = 0.5";
    p.runs.push_back({"a", presets::transit_case('a')});
    p.runs.push_back({"b", presets::transit_case('b')});
    p.panels.push_back({K::Lines,
                        "far field",
                        "xi_screen",
                        "density",
                        {{"a/far_field.tsv", "nonradiative", 0, 1}, {"b/far_field.tsv", "radiative", 0, 1}}});
  } else if (name == "fig12") {
    p.description = "radiative atoms with and without atomic jumps";
    p.runs.push_back({"b", presets::transit_case('b')});
    p.runs.push_back({"c", presets::transit_case('c')});
    p.panels.push_back({K::Lines,
                        "far field",
                        "xi_screen",
                        "density",
                        {{"b/far_field.tsv", "with jumps", 0, 1}, {"c/far_field.tsv", "jumps suppressed", 0, 1}}});
  } else {
    std::string known;
    for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
    throw ValidationError("unknown preset '" + std::string(name) + "' (known: " + known + ")");
  }
  return p;
}

struct PresetOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
};

inline Preset apply(Preset p, const PresetOverrides& o) {
  for (auto& r : p.runs) {
    if (o.seed) r.config.seed = *o.seed;
    if (o.threads) r.config.threads = *o.threads;
  }
  return p;
}

/// Runs every member of the preset into dir/<label>/ and writes dir/plot.py
/// plus an index manifest.
inline std::vector<SimulateResult> run_preset(const Preset& p, const fs::path& dir) {
  for (const auto& r : p.runs) require_valid(r.config);
  fs::create_directories(dir);
  std::vector<SimulateResult> out;
  json runs = json::array();
  for (const auto& r : p.runs) {
    auto c = r.config;
    c.out = (dir / r.label).string();
    out.push_back(simulate(c, dir / r.label, "preset " + p.name));
    runs.push_back({{"label", r.label}, {"manifest", r.label + "/manifest.json"}, {"summary", out.back().summary}});
  }
  write_text(dir / "plot.py", plot_script(p.name + ": " + p.description, p.panels));
  write_json(dir / "manifest.json", {{"tool", "osge"},
                                     {"version", kVersion},
                                     {"revision", kRevision},
                                     {"preset", p.name},
                                     {"description", p.description},
                                     {"runs", runs}});
  return out;
}

}  // namespace osge::cli
