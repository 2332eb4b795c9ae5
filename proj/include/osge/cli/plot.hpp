// matplotlib scripts that redraw a run's panels from its TSV files.
#pragma once

#include <string>
#include <vector>

#include "osge/cli/config.hpp"

namespace osge::cli {

struct PlotSeries {
  std::string file;  // relative to the script's directory
  std::string label;
  int x = 0;
  int y = 1;
};

struct PlotPanel {
  enum class Kind { Surface, Lines };
  Kind kind = Kind::Lines;
  std::string title;
  std::string xlabel;
  std::string ylabel;
  std::vector<PlotSeries> series;
};

namespace detail {

inline std::string py_str(const std::string& s) {
  std::string out = "'";
  for (char ch : s) {
    if (ch == '\\' || ch == '\'') out += '\\';
    out += ch;
  }
  return out + "'";
}

}  // namespace detail

inline std::string plot_script(const std::string& title, const std::vector<PlotPanel>& panels) {
  std::string s =
      "#!/usr/bin/env python3\n"
      "# Redraws the panels of " + title + ". Usage: python3 plot.py [output.png]\n"
      "import sys\n"
      "from pathlib import Path\n"
      "\n"
      "import matplotlib\n"
      "matplotlib.use('Agg')\n"
      "import matplotlib.pyplot as plt\n"
      "import numpy as np\n"
      "\n"
      "HERE = Path(__file__).resolve().parent\n"
      "\n"
      "\n"
      "def load(name):\n"
      "    return np.atleast_2d(np.loadtxt(HERE / name, comments='#'))\n"
      "\n"
      "\n"
      "def surface(ax, name):\n"
      "    d = load(name)\n"
      "    taus = np.unique(d[:, 0])\n"
      "    support = d[d[:, 0] == taus[0], 1]\n"
      "    z = d[:, 2].reshape(len(taus), len(support))\n"
      "    mesh = ax.pcolormesh(taus, support, z.T, shading='auto', cmap='viridis')\n"
      "    ax.figure.colorbar(mesh, ax=ax)\n"
      "\n"
      "\n"
      "def lines(ax, series):\n"
      "    for name, label, x, y in series:\n"
      "        d = load(name)\n"
      "        ax.plot(d[:, x], d[:, y], label=label)\n"
      "    if any(label for _, label, _, _ in series):\n"
      "        ax.legend()\n"
      "\n"
      "\n"
      "PANELS = [\n";
  for (const auto& p : panels) {
    s += "    (" + std::string(p.kind == PlotPanel::Kind::Surface ? "'surface'" : "'lines'") + ", " +
         detail::py_str(p.title) + ", " + detail::py_str(p.xlabel) + ", " + detail::py_str(p.ylabel) + ", [";
    for (const auto& r : p.series)
      s += "(" + detail::py_str(r.file) + ", " + detail::py_str(r.label) + ", " + std::to_string(r.x) + ", " +
           std::to_string(r.y) + "), ";
    s += "]),\n";
  }
  s +=
      "]\n"
      "\n"
      "\n"
      "def main():\n"
      "    out = Path(sys.argv[1]) if len(sys.argv) > 1 else HERE / 'plot.png'\n"
      "    fig, axes = plt.subplots(1, len(PANELS), figsize=(6 * len(PANELS), 4.5), squeeze=False)\n"
      "    for ax, (kind, title, xlabel, ylabel, series) in zip(axes[0], PANELS):\n"
      "        if kind == 'surface':\n"
      "            surface(ax, series[0][0])\n"
      "        else:\n"
      "            lines(ax, series)\n"
      "        ax.set_title(title)\n"
      "        ax.set_xlabel(xlabel)\n"
      "        ax.set_ylabel(ylabel)\n"
      "    fig.suptitle(" + detail::py_str(title) + ")\n"
      "    fig.tight_layout()\n"
      "    fig.savefig(out, dpi=120)\n"
      "\n"
      "\n"
      "if __name__ == '__main__':\n"
      "    main()\n";
  return s;
}

/// Panels for one run; `prefix` is prepended to every file name.
inline std::vector<PlotPanel> default_panels(const RunConfig& c, const std::string& prefix = "") {
  using K = PlotPanel::Kind;
  std::vector<PlotPanel> out;
  if (c.kind == RunKind::Ensemble) {
    out.push_back({K::Lines, "far field", "xi_screen", "density", {{prefix + "far_field.tsv", "", 0, 1}}});
    out.push_back({K::Lines, "P(q)", "q", "density", {{prefix + "momentum.tsv", "", 0, 1}}});
    return out;
  }
  out.push_back({K::Surface, "P(q, tau)", "tau", "q", {{prefix + "momentum_surface.tsv", "", 0, 1}}});
  if (c.trajectory.position)
    out.push_back({K::Surface, "P(xi, tau)", "tau", "xi", {{prefix + "position_surface.tsv", "", 0, 1}}});
  if (c.params.gamma > 0.0) {
    out.push_back({K::Surface, "P_e(q, tau)", "tau", "q", {{prefix + "excited_surface.tsv", "", 0, 1}}});
    out.push_back({K::Lines, "P_e(tau)", "tau", "P_e", {{prefix + "observables.tsv", "", 0, 2}}});
  }
  return out;
}

}  // namespace osge::cli
