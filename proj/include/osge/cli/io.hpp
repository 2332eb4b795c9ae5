// TSV writers and the run manifest.
#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "osge/cli/config.hpp"
#include "osge/jumps.hpp"
#include "osge/observables.hpp"
#include "osge/trajectory.hpp"

#ifndef OSGE_VERSION
#define OSGE_VERSION "0.0.0"
#endif
#ifndef OSGE_GIT_REVISION
#define OSGE_GIT_REVISION "unknown"
#endif

namespace osge::cli {

namespace fs = std::filesystem;

inline constexpr const char* kVersion = OSGE_VERSION;
inline constexpr const char* kRevision = OSGE_GIT_REVISION;

/// Shortest text that reads back to the same double.
inline std::string fmt(double v) {
  char buf[32];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

/// Header lines shared by every file of a run.
struct TsvHeader {
  std::string title;
  std::vector<std::string> lines;
  std::vector<std::string> columns;
};

inline TsvHeader run_header(const RunConfig& c, std::string title, std::vector<std::string> columns) {
  TsvHeader h;
  h.title = std::move(title);
  h.columns = std::move(columns);
  h.lines.push_back("osge " + std::string(kVersion) + " (" + kRevision + ")");
  h.lines.push_back("run: " + c.name + " (" + detail::kind_name(c.kind) + ")");
  h.lines.push_back("seed: " + std::to_string(c.seed));
  h.lines.push_back("grid: S=" + std::to_string(c.subdivisions) + " cells per recoil, q_max=" +
                    std::to_string(c.q_max));
  h.lines.push_back("units: q = p/(hbar k), xi = x/lambda, tau = g0 t");
  return h;
}

class TsvWriter {
 public:
  TsvWriter(const fs::path& path, const TsvHeader& h) : out_(path) {
    if (!out_) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out_ << "# " << h.title << '\n';
    for (const auto& l : h.lines) out_ << "# " << l << '\n';
    out_ << '#';
    for (std::size_t i = 0; i < h.columns.size(); ++i) out_ << (i ? "\t" : " ") << h.columns[i];
    out_ << '\n';
  }

  template <class... Ts>
  void row(const Ts&... values) {
    bool first = true;
    ((out_ << (first ? "" : "\t") << cell(values), first = false), ...);
    out_ << '\n';
  }

  void close() {
    out_.close();
    if (!out_) throw std::runtime_error("write failed");
  }

 private:
  static std::string cell(double v) { return fmt(v); }
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  template <class I>
    requires std::is_integral_v<I>
  static std::string cell(I v) { return std::to_string(v); }

  std::ofstream out_;
};

inline void write_distribution(const fs::path& path, const Distribution1D& d, TsvHeader h) {
  h.lines.push_back("cell measure: " + fmt(d.measure));
  TsvWriter w(path, h);
  for (std::size_t i = 0; i < d.size(); ++i) w.row(d.support[i], d.density[i]);
  w.close();
}

/// Long-form time-resolved surface: tau, support, density.
template <class Get>
void write_surface(const fs::path& path, const std::vector<Snapshot>& snaps, Get get, TsvHeader h) {
  TsvWriter w(path, h);
  for (const auto& s : snaps) {
    const Distribution1D& d = get(s);
    for (std::size_t i = 0; i < d.size(); ++i) w.row(s.tau, d.support[i], d.density[i]);
  }
  w.close();
}

inline void write_jumps(const fs::path& path, const std::vector<JumpEvent>& jumps, TsvHeader h) {
  TsvWriter w(path, h);
  for (const auto& j : jumps) w.row(j.tau, std::string(to_string(j.channel)), j.eta);
  w.close();
}

inline void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

/// Manifest: everything needed to reproduce the run. Re-fed to `simulate`
/// its "config" block is used.
inline json make_manifest(const RunConfig& c, const std::string& command, const std::vector<std::string>& files,
                          json summary) {
  json m;
  m["tool"] = "osge";
  m["version"] = kVersion;
  m["revision"] = kRevision;
  m["command"] = command;
  m["seed"] = c.seed;
  m["config"] = to_json(c);
  m["outputs"] = files;
  m["summary"] = std::move(summary);
  return m;
}

/// Accepts a bare config or a manifest.
inline RunConfig config_from_document(const json& doc) {
  if (doc.is_object() && doc.contains("tool") && doc.contains("config")) return from_json(doc.at("config"));
  return from_json(doc);
}

inline json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config file " + path.string());
  try {
    return json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

}  // namespace osge::cli
