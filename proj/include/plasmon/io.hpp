// SPDX-License-Identifier: Apache-2.0
#ifndef PLASMON_IO_HPP
#define PLASMON_IO_HPP

// CSV and JSON export. CSV numbers carry 17 significant digits; JSON uses
// the shortest representation that reads back to the same double. Either
// way a round trip is exact.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>
#include <unistd.h>

#include "config.hpp"
#include "design.hpp"
#include "errors.hpp"
#include "oracle.hpp"
#include "scattering.hpp"
#include "spectrum.hpp"

namespace plasmon
{

using nlohmann::json;

inline std::string fmt17(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline json cjson(cplx v)
{
  return {{"re", v.real()}, {"im", v.imag()}};
}

inline json cjson(const CVec3 &v)
{
  return json::array({cjson(v[0]), cjson(v[1]), cjson(v[2])});
}

inline json medium_json(const MediumConfig &c)
{
  return {{"radius", c.R},          {"eps_m", cjson(c.eps_m)}, {"mu_m", cjson(c.mu_m)},
          {"eps_c", cjson(c.eps_c)}, {"mu_c", cjson(c.mu_c)},   {"omega", c.omega}};
}

// ---- spectrum

inline std::string spectrum_csv_header()
{
  std::string h = "n";
  for (int i = 1; i <= 4; ++i) h += ",re_tau" + std::to_string(i) + ",im_tau" + std::to_string(i);
  for (int i = 1; i <= 4; ++i) h += ",re_alpha" + std::to_string(i) + ",im_alpha" + std::to_string(i);
  return h + ",flag_admissible,flag_defective";
}

inline void write_spectrum_csv(std::ostream &os, const std::vector<SpectrumRecord> &recs)
{
  os << spectrum_csv_header() << '\n';
  for (const auto &r : recs) {
    os << r.n;
    for (const auto &t : r.tau) os << ',' << fmt17(t.real()) << ',' << fmt17(t.imag());
    for (const auto &a : r.alpha) os << ',' << fmt17(a.real()) << ',' << fmt17(a.imag());
    os << ',' << int(r.admissible) << ',' << int(r.defective()) << '\n';
  }
}

inline json spectrum_json(const MediumConfig &cfg, const std::vector<SpectrumRecord> &recs)
{
  json rows = json::array();
  for (const auto &r : recs) {
    json t = json::array(), a = json::array(), ta = json::array(), v = json::array(), cp = json::array(),
         cc = json::array();
    for (int i = 0; i < 4; ++i) {
      t.push_back(cjson(r.tau[i]));
      a.push_back(cjson(r.alpha[i]));
      ta.push_back(cjson(r.tau_asym[i]));
      v.push_back(json::array({cjson(r.vec[i][0]), cjson(r.vec[i][1])}));
      cp.push_back(cjson(r.tau_closed_printed[i]));
      cc.push_back(cjson(r.tau_closed_corrected[i]));
    }
    rows.push_back({{"n", r.n},
                    {"tau", t},
                    {"alpha", a},
                    {"eigenvectors", v},
                    {"tau_asymptotic", ta},
                    {"tau2_asymptotic_printed", cjson(r.tau2_asym_printed)},
                    {"beta1", cjson(r.beta1)},
                    {"beta2", cjson(r.beta2)},
                    {"beta1_printed", cjson(r.beta1_printed)},
                    {"beta2_printed", cjson(r.beta2_printed)},
                    {"tau_closed_printed", cp},
                    {"tau_closed_corrected", cc},
                    {"closed_discrepancy_printed", r.closed_discrepancy_printed},
                    {"closed_discrepancy_corrected", r.closed_discrepancy_corrected},
                    {"eigen_residual", r.eigen_residual},
                    {"admissible", r.admissible},
                    {"defective", r.defective()}});
  }
  return {{"medium", medium_json(cfg)}, {"records", rows}};
}

// Reads back what write_spectrum_csv produced: one row of numbers per degree.
inline std::vector<std::vector<double>> read_spectrum_csv(std::istream &is)
{
  std::string line;
  if (!std::getline(is, line) || line != spectrum_csv_header()) throw Error("not a spectrum table");
  std::vector<std::vector<double>> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
    if (row.size() != 19) throw Error("spectrum row has " + std::to_string(row.size()) + " cells");
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---- field grid

inline void write_grid_csv(std::ostream &os, const FieldGrid &g, bool with_H = true)
{
  os << "x,y,z,region,re_Ex,im_Ex,re_Ey,im_Ey,re_Ez,im_Ez";
  if (with_H) os << ",re_Hx,im_Hx,re_Hy,im_Hy,re_Hz,im_Hz";
  os << '\n';
  for (std::size_t i = 0; i < g.points.size(); ++i) {
    const auto &p = g.points[i];
    os << fmt17(p[0]) << ',' << fmt17(p[1]) << ',' << fmt17(p[2]) << ',' << region_name(g.region[i]);
    for (int c = 0; c < 3; ++c) os << ',' << fmt17(g.E[i][c].real()) << ',' << fmt17(g.E[i][c].imag());
    if (with_H)
      for (int c = 0; c < 3; ++c) os << ',' << fmt17(g.H[i][c].real()) << ',' << fmt17(g.H[i][c].imag());
    os << '\n';
  }
}

inline json grid_json(const FieldGrid &g)
{
  json pts = json::array();
  for (std::size_t i = 0; i < g.points.size(); ++i)
    pts.push_back({{"x", g.points[i][0]},
                   {"y", g.points[i][1]},
                   {"z", g.points[i][2]},
                   {"region", region_name(g.region[i])},
                   {"E", cjson(g.E[i])},
                   {"H", cjson(g.H[i])}});
  json ex = json::array();
  for (const auto &p : g.excluded) ex.push_back({p[0], p[1], p[2]});
  json meta = {{"medium", medium_json(g.cfg)},
               {"n_max", g.n_max},
               {"quadrature_order", g.quadrature_order},
               {"excluded_band", {{"half_width", delta_min(g.cfg)}, {"count", g.excluded.size()}, {"points", ex}}},
               {"scattered_ratio", g.scattered_ratio()}};
  return {{"metadata", meta}, {"points", pts}};
}

// ---- scans

inline void write_scan_csv(std::ostream &os, const ScanResult &r)
{
  for (auto a : r.axes) os << sweep_name(a) << ',';
  os << "channel,n_star,objective";
  if (!r.points.empty())
    for (const auto &v : r.points.front().verdicts) os << ',' << regime_name(v.kind);
  os << '\n';
  for (const auto &p : r.points) {
    for (double x : p.params) os << fmt17(x) << ',';
    os << p.channel << ',' << p.n_star << ',' << fmt17(p.objective);
    for (const auto &v : p.verdicts) os << ',' << int(v.satisfied);
    os << '\n';
  }
}

inline json scan_json(const ScanResult &r)
{
  json axes = json::array();
  for (auto a : r.axes) axes.push_back(sweep_name(a));
  json pts = json::array();
  for (const auto &p : r.points) {
    json vs = json::array();
    for (const auto &v : p.verdicts) {
      json ms = json::object();
      for (const auto &m : v.margins) ms[m.name] = m.value;
      vs.push_back({{"kind", regime_name(v.kind)}, {"satisfied", v.satisfied}, {"margins", ms}});
    }
    pts.push_back({{"params", p.params},
                   {"channel", p.channel},
                   {"n_star", p.n_star},
                   {"objective", p.objective},
                   {"verdicts", vs}});
  }
  json sk = json::array();
  for (const auto &s : r.skipped) sk.push_back({{"params", s.params}, {"reason", s.reason}});
  return {{"axes", axes}, {"points", pts}, {"skipped", sk}};
}

// ---- verification

inline json verify_json(const VerifyReport &r)
{
  json es = json::array();
  for (const auto &e : r.entries) {
    json j = {{"identity", e.identity},    {"n", e.n},
              {"k", cjson(e.k)},           {"R", e.R},
              {"oracle", cjson(e.oracle)}, {"closed_form", cjson(e.closed_form)},
              {"abs_error", e.abs_error},  {"rel_error", e.rel_error},
              {"pass", e.pass}};
    if (!e.error.empty()) j["error"] = e.error;
    es.push_back(std::move(j));
  }
  return {{"pass", r.pass()}, {"tolerance", r.tolerance}, {"entries", es}};
}

// ---- output

// Writes to a sibling temp file, then renames over `path`; "-" is stdout.
inline void write_atomic(const std::string &path, const std::string &content)
{
  if (path == "-") {
    std::cout << content;
    std::cout.flush();
    return;
  }
  namespace fs = std::filesystem;
  const fs::path target(path);
  // devices and pipes are written in place; renaming would replace them
  std::error_code st_ec;
  const auto st = fs::status(target, st_ec);
  if (fs::exists(st) && !fs::is_regular_file(st)) {
    std::ofstream out(target, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << content;
    out.flush();
    if (!out) throw Error("write failed: " + path);
    return;
  }
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Error("write failed: " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error("cannot rename onto " + path);
  }
}

inline std::string dump_json(const json &j)
{
  return j.dump(2) + "\n";
}

}  // namespace plasmon

#endif  // PLASMON_IO_HPP
