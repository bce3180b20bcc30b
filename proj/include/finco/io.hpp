#pragma once

// Result files: '#'-prefixed header (tool version, the full resolved config,
// run metadata, column names) followed by whitespace-delimited rows written
// with 17 significant digits.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "finco/config.hpp"
#include "finco/diagnostics.hpp"
#include "finco/finco.hpp"

namespace finco {

inline constexpr const char* kVersion = "0.1.0";

using Metadata = std::vector<std::pair<std::string, std::string>>;

inline std::string num(double v) { return toml::format_number(v); }

inline void write_header(std::ostream& out, const RunConfig& c, const Metadata& meta, const std::string& columns) {
  out << "# finco " << kVersion << "\n";
  out << "# --- config\n";
  std::istringstream cfg(to_toml(c));
  for (std::string line; std::getline(cfg, line);) out << "# " << line << "\n";
  out << "# --- end config\n";
  for (const auto& [k, v] : meta) out << "# " << k << ": " << v << "\n";
  out << "# columns: " << columns << "\n";
}

/// Config embedded in a result file header.
inline RunConfig config_from_header(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::string line, text;
  bool inside = false, done = false;
  while (std::getline(in, line) && !line.empty() && line[0] == '#') {
    if (line == "# --- config") { inside = true; continue; }
    if (line == "# --- end config") { done = true; break; }
    if (inside) text += line.substr(line.size() > 1 ? 2 : 1) + "\n";
  }
  if (!done) throw std::runtime_error("'" + path + "' has no config block");
  return from_table(toml::parse(text));
}

/// Header metadata as key -> value.
inline std::map<std::string, std::string> read_metadata(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::map<std::string, std::string> out;
  bool inside = false;
  for (std::string line; std::getline(in, line) && !line.empty() && line[0] == '#';) {
    if (line == "# --- config") { inside = true; continue; }
    if (line == "# --- end config") { inside = false; continue; }
    if (inside) continue;
    const auto colon = line.find(": ");
    if (colon != std::string::npos) out[line.substr(2, colon - 2)] = line.substr(colon + 2);
  }
  return out;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

inline void write_wavefunction(const std::filesystem::path& path, const WavefunctionGrid& wf, const RunConfig& c,
                               Metadata meta) {
  auto out = open_output(path);
  meta.insert(meta.begin(), {"norm", num(wf.compute_norm())});
  meta.insert(meta.begin(), {"t_final", num(wf.t_final)});
  write_header(out, c, meta, "x re_psi im_psi density");
  for (std::size_t i = 0; i < wf.x.size(); ++i)
    out << num(wf.x[i]) << ' ' << num(wf.psi[i].real()) << ' ' << num(wf.psi[i].imag()) << ' '
        << num(std::norm(wf.psi[i])) << '\n';
}

inline WavefunctionGrid read_wavefunction(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  WavefunctionGrid wf;
  for (std::string line; std::getline(in, line);) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.rfind("# t_final: ", 0) == 0) wf.t_final = std::stod(line.substr(11));
      continue;
    }
    std::istringstream row(line);
    double x = 0, re = 0, im = 0, rho = 0;
    if (!(row >> x >> re >> im >> rho)) throw std::runtime_error("malformed row in '" + path + "': " + line);
    wf.x.push_back(x);
    wf.psi.emplace_back(re, im);
  }
  wf.norm = wf.compute_norm();
  return wf;
}

/// Rows of (Re q0, Im q0, cell width, cell height, value...). Phase-carrying
/// fields are written as magnitude and phase.
inline void write_field_map(const std::filesystem::path& path, const FieldMap& m, const RunConfig& c, Metadata meta) {
  auto out = open_output(path);
  const bool complex_valued = m.kind == FieldKind::WeightMagPhase;
  meta.insert(meta.begin(), {"field", to_string(m.kind)});
  write_header(out, c, meta, complex_valued ? "re_q0 im_q0 cell_w cell_h magnitude phase" : "re_q0 im_q0 cell_w cell_h value");
  const auto& pts = m.grid.points();
  for (std::size_t k = 0; k < pts.size(); ++k) {
    out << num(pts[k].q.real()) << ' ' << num(pts[k].q.imag()) << ' ' << num(m.grid.cell_width(pts[k].level)) << ' '
        << num(m.grid.cell_height(pts[k].level)) << ' ';
    if (complex_valued) out << num(std::abs(m.values[k])) << ' ' << num(std::arg(m.values[k])) << '\n';
    else out << num(m.values[k].real()) << '\n';
  }
}

/// Plain table with a header; every cell is already formatted.
inline void write_table(const std::filesystem::path& path, const RunConfig& c, const Metadata& meta,
                        const std::vector<std::string>& columns, const std::vector<std::vector<std::string>>& rows) {
  auto out = open_output(path);
  std::string cols;
  for (const auto& s : columns) cols += (cols.empty() ? "" : " ") + s;
  write_header(out, c, meta, cols);
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? " " : "") << r[i];
    out << '\n';
  }
}

}  // namespace finco
