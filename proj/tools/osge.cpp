// osge: command-line front end.
#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "osge/cli/config.hpp"
#include "osge/cli/io.hpp"
#include "osge/cli/presets.hpp"
#include "osge/cli/run.hpp"

namespace {

using namespace osge;
using namespace osge::cli;

constexpr int kOk = 0;
constexpr int kValidation = 1;
constexpr int kRuntime = 2;

struct Common {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<unsigned> threads;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "master seed (overrides the config)");
  cmd->add_option("--out", c.out, "output directory (overrides the config)");
  cmd->add_option("--threads", c.threads, "worker threads for ensembles; never changes results")
      ->check(CLI::PositiveNumber);
}

RunConfig load(const std::string& path, const Common& common) {
  RunConfig c = config_from_document(read_json_file(path));
  if (common.seed) c.seed = *common.seed;
  if (common.out) c.out = *common.out;
  if (common.threads) c.threads = *common.threads;
  return c;
}

/// Prints diagnostics; returns false when any is an error.
bool report(const std::vector<Diagnostic>& ds, bool strict) {
  bool ok = true;
  for (const auto& d : ds) {
    std::cerr << to_string(d) << '\n';
    if (d.level == Diagnostic::Level::Error || strict) ok = false;
  }
  return ok;
}

int run_config(RunConfig c, const std::string& command) {
  if (!report(check(c), false)) return kValidation;
  const auto res = simulate(c, c.out, command);
  std::cout << "wrote " << res.files.size() << " files to " << c.out << '\n' << res.summary.dump() << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wave packet dynamics of an atom in a damped, driven cavity"};
  app.set_version_flag("--version", std::string(kVersion) + " (" + kRevision + ")");
  app.require_subcommand(1);

  Common common;
  std::string config_path;
  std::string preset_name;
  bool strict = false;

  auto* sim = app.add_subcommand("simulate", "run a trajectory or ensemble from a config or manifest");
  sim->add_option("config", config_path, "JSON config or run manifest")->required()->check(CLI::ExistingFile);
  add_common(sim, common);

  auto* ens = app.add_subcommand("ensemble", "run a config as a Monte Carlo transit ensemble");
  ens->add_option("config", config_path, "JSON config or run manifest")->required()->check(CLI::ExistingFile);
  add_common(ens, common);

  auto* pre = app.add_subcommand("preset", "run a figure preset");
  pre->add_option("name", preset_name, "fig2, fig5, fig6, fig7, fig8, fig9, fig10, fig11 or fig12")->required();
  add_common(pre, common);

  auto* val = app.add_subcommand("validate", "check a config (the fig2 default when none is given)");
  val->add_option("config", config_path, "JSON config or run manifest")->check(CLI::ExistingFile);
  val->add_flag("--strict", strict, "treat warnings as failures");
  add_common(val, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (*sim) return run_config(load(config_path, common), "simulate");
    if (*ens) {
      RunConfig c = load(config_path, common);
      c.kind = RunKind::Ensemble;
      return run_config(std::move(c), "ensemble");
    }
    if (*pre) {
      const Preset p = apply(make_preset(preset_name), {common.seed, common.threads});
      const fs::path dir = common.out ? fs::path(*common.out) : fs::path("out") / p.name;
      for (const auto& r : p.runs)
        if (!report(check(r.config), false)) return kValidation;
      const auto results = run_preset(p, dir);
      std::cout << "preset " << p.name << ": " << results.size() << " runs written to " << dir.string() << '\n';
      return kOk;
    }
    if (*val) {
      RunConfig c = config_path.empty() ? RunConfig{} : load(config_path, common);
      const bool ok = report(check(c), strict);
      std::cout << (ok ? "ok" : "invalid") << '\n';
      return ok ? kOk : kValidation;
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const RuntimeViolation& e) {
    std::cerr << "runtime violation: " << e.what() << '\n';
    return kRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kOk;
}
