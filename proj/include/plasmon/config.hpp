// SPDX-License-Identifier: Apache-2.0
#ifndef PLASMON_CONFIG_HPP
#define PLASMON_CONFIG_HPP

// Run configuration: one JSON document, every key optional, unknown keys
// rejected. Errors name the line of the offending key.
//
//   {
//     "medium": {
//       "radius": 1, "eps_m": 1, "mu_m": 1, "omega": 5,
//       "eps_c": {"re": -1.04018, "im": 4e-5},   // or a plain number
//       "mu_c": 1,
//       "drude": {"omega_p_sq": 51.0045, "tau": 1e-4, "filling": 0, "omega0": 2, "eps0": 1, "mu0": 1}
//     },
//     "incident": {"kind": "plane_wave", "amplitude": [4, -4, 0], "direction": [1, 1, 0]},
//                 {"kind": "vortex", "amplitude": 100},
//                 {"kind": "multipole", "channel": 3, "n": 1, "m": 0, "amplitude": 1},
//     "numerics": {"n_max": 60, "quad_order": 0, "delta_min": 0.02, "theta_big": 10, "theta_small": 0.01},
//     "output": {"format": "csv", "path": "-"}
//   }
//
// "drude" replaces eps_c and mu_c and may not appear with them. Complex
// values are a number or {"re", "im"}. delta_min is relative to the radius.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iterator>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "design.hpp"
#include "errors.hpp"
#include "scattering.hpp"
#include "spectrum.hpp"

namespace plasmon
{

struct NumericsConfig
{
  int n_max = 60;
  int quad_order = 0;  // 0: closed-form layer fields
  double delta_min = delta_min_fraction;
  double theta_big = 10.0;
  double theta_small = 1e-2;
};

enum class OutputFormat
{
  csv,
  json
};

struct OutputConfig
{
  OutputFormat format = OutputFormat::csv;
  std::string path = "-";  // "-" is stdout
};

struct RunConfig
{
  MediumConfig medium;
  std::optional<DrudeParams> drude;  // set when the inclusion came from a Drude model
  IncidentField incident = PlaneWave{};
  NumericsConfig numerics;
  OutputConfig output;

  RegimeThresholds thresholds() const
  {
    RegimeThresholds t;
    t.theta_big = numerics.theta_big;
    t.theta_small = numerics.theta_small;
    return t;
  }
};

namespace detail
{
using json = nlohmann::json;

// Counts newlines as the parser consumes input, so the SAX key callback
// can report the line it is on.
struct LineCountingIterator
{
  using iterator_category = std::forward_iterator_tag;
  using value_type = char;
  using difference_type = std::ptrdiff_t;
  using pointer = const char *;
  using reference = const char &;

  const char *p = nullptr;
  const char **high = nullptr;

  reference operator*() const
  {
    if (p >= *high) *high = p + 1;
    return *p;
  }
  LineCountingIterator &operator++()
  {
    ++p;
    return *this;
  }
  LineCountingIterator operator++(int)
  {
    auto t = *this;
    ++p;
    return t;
  }
  bool operator==(const LineCountingIterator &o) const { return p == o.p; }
};

// Records the line of every object key by path ("medium/eps_c/re").
struct KeyLines : nlohmann::json_sax<json>
{
  const char *begin = nullptr;
  const char *high = nullptr;
  std::vector<std::string> stack;  // one entry per open container
  std::string pending;
  std::map<std::string, int> lines;

  int line_now() const { return 1 + static_cast<int>(std::count(begin, high, '\n')); }
  std::string path_of(const std::string &k) const
  {
    std::string p;
    for (const auto &s : stack)
      if (!s.empty()) p += s + "/";
    return p + k;
  }
  void value_done() { pending.clear(); }

  bool null() override { return value_done(), true; }
  bool boolean(bool) override { return value_done(), true; }
  bool number_integer(number_integer_t) override { return value_done(), true; }
  bool number_unsigned(number_unsigned_t) override { return value_done(), true; }
  bool number_float(number_float_t, const string_t &) override { return value_done(), true; }
  bool string(string_t &) override { return value_done(), true; }
  bool binary(binary_t &) override { return value_done(), true; }
  bool start_object(std::size_t) override
  {
    stack.push_back(pending);
    pending.clear();
    return true;
  }
  bool end_object() override
  {
    stack.pop_back();
    return true;
  }
  bool start_array(std::size_t) override
  {
    stack.push_back(pending);
    pending.clear();
    return true;
  }
  bool end_array() override
  {
    stack.pop_back();
    return true;
  }
  bool key(string_t &k) override
  {
    pending = k;
    lines.emplace(path_of(k), line_now());
    return true;
  }
  bool parse_error(std::size_t, const std::string &, const nlohmann::detail::exception &) override { return false; }
};

class ConfigReader
{
public:
  ConfigReader(json doc, std::map<std::string, int> lines, std::string source)
      : doc_(std::move(doc)), lines_(std::move(lines)), source_(std::move(source))
  {
  }

  [[noreturn]] void fail(const std::string &path, const std::string &msg) const
  {
    auto it = lines_.find(path);
    std::string where = source_;
    if (it != lines_.end()) where += ":" + std::to_string(it->second);
    throw ConfigError(where + ": " + (path.empty() ? "" : path + ": ") + msg);
  }

  // Rejects keys of the object at `path` outside `allowed`.
  void only(const json &obj, const std::string &path, std::initializer_list<const char *> allowed) const
  {
    if (!obj.is_object()) fail(path, "expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      bool ok = false;
      for (const char *a : allowed) ok = ok || it.key() == a;
      if (!ok) fail(join(path, it.key()), "unknown key");
    }
  }

  static std::string join(const std::string &a, const std::string &b) { return a.empty() ? b : a + "/" + b; }

  double number(const json &v, const std::string &path) const
  {
    if (!v.is_number()) fail(path, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(path, "expected a finite number");
    return d;
  }

  int integer(const json &v, const std::string &path) const
  {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    return v.get<int>();
  }

  cplx complex(const json &v, const std::string &path) const
  {
    if (v.is_number()) return number(v, path);
    if (!v.is_object()) fail(path, "expected a number or {\"re\", \"im\"}");
    only(v, path, {"re", "im"});
    const double re = v.contains("re") ? number(v["re"], join(path, "re")) : 0.0;
    const double im = v.contains("im") ? number(v["im"], join(path, "im")) : 0.0;
    return {re, im};
  }

  const json &doc() const { return doc_; }

private:
  json doc_;
  std::map<std::string, int> lines_;
  std::string source_;
};

inline DrudeParams read_drude(const ConfigReader &r, const json &d, const std::string &p)
{
  r.only(d, p, {"omega_p_sq", "tau", "filling", "omega0", "eps0", "mu0"});
  DrudeParams dp;
  auto get = [&](const char *k, double &dst) {
    if (d.contains(k)) dst = r.number(d[k], ConfigReader::join(p, k));
  };
  if (!d.contains("omega_p_sq")) r.fail(p, "omega_p_sq is required");
  get("omega_p_sq", dp.omega_p_sq);
  get("tau", dp.tau_damp);
  get("filling", dp.filling);
  get("omega0", dp.omega0);
  get("eps0", dp.eps0);
  get("mu0", dp.mu0);
  return dp;
}

inline IncidentField read_incident(const ConfigReader &r, const json &v)
{
  const std::string p = "incident";
  if (!v.is_object()) r.fail(p, "expected an object");
  const std::string kind = v.contains("kind") && v["kind"].is_string() ? v["kind"].get<std::string>() : "";
  auto vec3 = [&](const json &a, const std::string &q, bool complex_entries) {
    if (!a.is_array() || a.size() != 3) r.fail(q, "expected an array of three values");
    CVec3 out;
    for (int i = 0; i < 3; ++i)
      out[i] = complex_entries ? r.complex(a[i], q) : cplx(r.number(a[i], q));
    return out;
  };
  if (kind == "plane_wave") {
    r.only(v, p, {"kind", "amplitude", "direction"});
    PlaneWave w;
    if (v.contains("amplitude")) w.amplitude = vec3(v["amplitude"], "incident/amplitude", true);
    if (v.contains("direction")) {
      const Vec3 d = vec3(v["direction"], "incident/direction", false).real();
      if (!(d.norm() > 0.0)) r.fail("incident/direction", "must be nonzero");
      w.direction = d.normalized();
    }
    if (std::abs(w.direction.cast<cplx>().dot(w.amplitude)) > 1e-12 * std::max(1.0, cnorm(w.amplitude)))
      r.fail("incident/amplitude", "must be orthogonal to the direction");
    return w;
  }
  if (kind == "vortex") {
    r.only(v, p, {"kind", "amplitude"});
    VortexField f;
    if (v.contains("amplitude")) f.amplitude = r.number(v["amplitude"], "incident/amplitude");
    return f;
  }
  if (kind == "multipole") {
    r.only(v, p, {"kind", "channel", "n", "m", "amplitude"});
    SpectralMultipole m;
    if (v.contains("channel")) m.channel = r.integer(v["channel"], "incident/channel");
    if (v.contains("n")) m.index.n = r.integer(v["n"], "incident/n");
    if (v.contains("m")) m.index.m = r.integer(v["m"], "incident/m");
    if (v.contains("amplitude")) m.amplitude = r.complex(v["amplitude"], "incident/amplitude");
    if (m.channel < 1 || m.channel > 4) r.fail("incident/channel", "must be 1..4");
    if (m.index.n < 1 || std::abs(m.index.m) > m.index.n) r.fail("incident/n", "need n >= 1 and |m| <= n");
    return m;
  }
  r.fail(v.contains("kind") ? "incident/kind" : p, "kind must be plane_wave, vortex or multipole");
}

inline void check_numerics(const NumericsConfig &n)
{
  if (n.n_max < 1) throw ConfigError("numerics/n_max: must be >= 1");
  if (n.n_max > order_cap_default - 2) throw ConfigError("numerics/n_max: above the special-function order cap");
  if (n.quad_order < 0) throw ConfigError("numerics/quad_order: must be >= 0");
  if (n.delta_min < delta_min_fraction * (1.0 - 1e-12))
    throw ConfigError("numerics/delta_min: below the library minimum " + std::to_string(delta_min_fraction));
  if (!(n.theta_big > 0.0) || !(n.theta_small > 0.0)) throw ConfigError("numerics: thresholds must be positive");
}
}  // namespace detail

inline RunConfig parse_config(const std::string &text, const std::string &source = "<config>")
{
  using detail::json;
  detail::KeyLines kl;
  kl.begin = text.data();
  kl.high = text.data();
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error &e) {
    // byte offset to line
    const std::size_t at = std::min<std::size_t>(e.byte, text.size());
    const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + at, '\n'));
    throw ConfigError(source + ":" + std::to_string(line) + ": malformed JSON: " + e.what());
  }
  {
    detail::LineCountingIterator b{text.data(), &kl.high}, e{text.data() + text.size(), &kl.high};
    json::sax_parse(b, e, &kl);
  }
  const detail::ConfigReader r(doc, kl.lines, source);
  RunConfig c;
  if (!doc.is_object()) r.fail("", "top level must be an object");
  r.only(doc, "", {"medium", "incident", "numerics", "output"});

  if (doc.contains("medium")) {
    const auto &m = doc["medium"];
    r.only(m, "medium", {"radius", "eps_m", "mu_m", "eps_c", "mu_c", "drude", "omega"});
    if (m.contains("radius")) c.medium.R = r.number(m["radius"], "medium/radius");
    if (m.contains("omega")) c.medium.omega = r.number(m["omega"], "medium/omega");
    if (m.contains("eps_m")) c.medium.eps_m = r.complex(m["eps_m"], "medium/eps_m");
    if (m.contains("mu_m")) c.medium.mu_m = r.complex(m["mu_m"], "medium/mu_m");
    if (m.contains("eps_c")) c.medium.eps_c = r.complex(m["eps_c"], "medium/eps_c");
    if (m.contains("mu_c")) c.medium.mu_c = r.complex(m["mu_c"], "medium/mu_c");
    if (!(c.medium.R > 0.0)) r.fail("medium/radius", "must be positive");
    if (!(c.medium.omega > 0.0)) r.fail("medium/omega", "must be positive");
    if (m.contains("drude")) {
      if (m.contains("eps_c") || m.contains("mu_c")) r.fail("medium/drude", "drude replaces eps_c and mu_c");
      c.drude = detail::read_drude(r, m["drude"], "medium/drude");
      try {
        const auto v = drude_forward(*c.drude, c.medium.omega);
        c.medium.eps_c = v.eps_c;
        c.medium.mu_c = v.mu_c;
      } catch (const Error &e) {
        r.fail("medium/drude", e.what());
      }
    }
  }
  if (doc.contains("incident")) c.incident = detail::read_incident(r, doc["incident"]);
  if (doc.contains("numerics")) {
    const auto &n = doc["numerics"];
    r.only(n, "numerics", {"n_max", "quad_order", "delta_min", "theta_big", "theta_small"});
    if (n.contains("n_max")) c.numerics.n_max = r.integer(n["n_max"], "numerics/n_max");
    if (n.contains("quad_order")) c.numerics.quad_order = r.integer(n["quad_order"], "numerics/quad_order");
    if (n.contains("delta_min")) c.numerics.delta_min = r.number(n["delta_min"], "numerics/delta_min");
    if (n.contains("theta_big")) c.numerics.theta_big = r.number(n["theta_big"], "numerics/theta_big");
    if (n.contains("theta_small")) c.numerics.theta_small = r.number(n["theta_small"], "numerics/theta_small");
    try {
      detail::check_numerics(c.numerics);
    } catch (const ConfigError &e) {
      r.fail("numerics", e.what());
    }
  }
  if (doc.contains("output")) {
    const auto &o = doc["output"];
    r.only(o, "output", {"format", "path"});
    if (o.contains("format")) {
      const auto &f = o["format"];
      if (f == "csv")
        c.output.format = OutputFormat::csv;
      else if (f == "json")
        c.output.format = OutputFormat::json;
      else
        r.fail("output/format", "must be csv or json");
    }
    if (o.contains("path")) {
      if (!o["path"].is_string()) r.fail("output/path", "expected a string");
      c.output.path = o["path"].get<std::string>();
    }
  }
  return c;
}

inline RunConfig load_config(const std::string &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

// Environment overrides sit between the file and the command line.
struct EnvOverrides
{
  std::optional<std::string> config, out, format;
  std::optional<int> threads, n_max;
  std::optional<std::uint64_t> seed;
};

inline constexpr const char *env_prefix = "PLASMON_";

template <class Getenv>
EnvOverrides read_env(Getenv &&get)
{
  EnvOverrides e;
  auto str = [&](const char *name) -> std::optional<std::string> {
    const char *v = get((std::string(env_prefix) + name).c_str());
    if (!v || !*v) return std::nullopt;
    return std::string(v);
  };
  auto num = [&](const char *name) -> std::optional<long long> {
    const auto s = str(name);
    if (!s) return std::nullopt;
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(*s, &used);
    } catch (const std::exception &) {
      used = 0;
    }
    if (used != s->size()) throw ConfigError(std::string(env_prefix) + name + ": not an integer: " + *s);
    return v;
  };
  e.config = str("CONFIG");
  e.out = str("OUT");
  e.format = str("FORMAT");
  if (auto v = num("THREADS")) e.threads = static_cast<int>(*v);
  if (auto v = num("N_MAX")) e.n_max = static_cast<int>(*v);
  if (auto v = num("SEED")) e.seed = static_cast<std::uint64_t>(*v);
  return e;
}

inline EnvOverrides read_env()
{
  return read_env([](const char *n) { return std::getenv(n); });
}

inline OutputFormat parse_format(const std::string &s)
{
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  throw ConfigError("format must be csv or json, got " + s);
}

// File values, then environment, then whatever the caller applies from flags.
inline void apply_env(RunConfig &c, const EnvOverrides &e)
{
  if (e.out) c.output.path = *e.out;
  if (e.format) c.output.format = parse_format(*e.format);
  if (e.n_max) {
    c.numerics.n_max = *e.n_max;
    detail::check_numerics(c.numerics);
  }
}

// Planar grid from "z=0:x[-3,3,121]:y[-3,3,121]": one fixed coordinate and
// two swept ones (lo, hi, count), the first listed varying slowest.
inline std::vector<Vec3> parse_grid_spec(const std::string &spec)
{
  auto bad = [&](const std::string &why) -> ConfigError { return ConfigError("grid '" + spec + "': " + why); };
  auto axis_of = [&](char c) {
    if (c < 'x' || c > 'z') throw bad(std::string("unknown axis ") + c);
    return c - 'x';
  };
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() != 3) throw bad("expected fixed:range:range");

  auto num = [&](const std::string &t) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(t, &used);
    } catch (const std::exception &) {
      used = 0;
    }
    if (used == 0 || used != t.size() || !std::isfinite(v)) throw bad("not a number: " + t);
    return v;
  };
  const auto &f = parts[0];
  if (f.size() < 3 || f[1] != '=') throw bad("fixed part must look like z=0");
  const int fixed = axis_of(f[0]);
  const double level = num(f.substr(2));

  struct Range
  {
    int axis;
    double lo, hi;
    int count;
  };
  auto range = [&](const std::string &t) {
    if (t.size() < 4 || t[1] != '[' || t.back() != ']') throw bad("range must look like x[-3,3,121]");
    Range r{axis_of(t[0]), 0, 0, 0};
    std::stringstream in(t.substr(2, t.size() - 3));
    std::vector<std::string> v;
    for (std::string c; std::getline(in, c, ',');) v.push_back(c);
    if (v.size() != 3) throw bad("range needs lo,hi,count");
    r.lo = num(v[0]);
    r.hi = num(v[1]);
    const double c = num(v[2]);
    if (c < 1 || c != std::floor(c) || c > 1e5) throw bad("count must be a positive integer");
    r.count = static_cast<int>(c);
    return r;
  };
  const Range a = range(parts[1]), b = range(parts[2]);
  if (a.axis == fixed || b.axis == fixed || a.axis == b.axis) throw bad("axes must be distinct");
  auto at = [](const Range &r, int i) { return r.count > 1 ? r.lo + (r.hi - r.lo) * i / (r.count - 1) : r.lo; };
  std::vector<Vec3> pts;
  pts.reserve(static_cast<std::size_t>(a.count) * b.count);
  for (int i = 0; i < a.count; ++i)
    for (int j = 0; j < b.count; ++j) {
      Vec3 p;
      p[fixed] = level;
      p[a.axis] = at(a, i);
      p[b.axis] = at(b, j);
      pts.push_back(p);
    }
  return pts;
}

}  // namespace plasmon

#endif  // PLASMON_CONFIG_HPP
