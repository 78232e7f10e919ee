// Command-line front end. Exit codes: 0 ok, 1 config error, 2 inadmissible
// physics, 3 verification failure.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "plasmon/config.hpp"
#include "plasmon/design.hpp"
#include "plasmon/io.hpp"
#include "plasmon/oracle.hpp"
#include "plasmon/scattering.hpp"
#include "plasmon/spectrum.hpp"

using namespace plasmon;

namespace
{
enum Exit
{
  ok = 0,
  config_error = 1,
  inadmissible = 2,
  verification_failed = 3
};

struct Globals
{
  std::string config, out, format;
  int threads = 0;
  std::uint64_t seed = 1;
  bool seed_set = false;
};

std::string fmt_c(cplx v)
{
  return fmt17(v.real()) + (v.imag() < 0 ? " - " : " + ") + fmt17(std::abs(v.imag())) + "i";
}

RunConfig resolve(const Globals &g, const EnvOverrides &env, Globals &eff)
{
  eff = g;
  if (eff.config.empty() && env.config) eff.config = *env.config;
  RunConfig c = eff.config.empty() ? RunConfig{} : load_config(eff.config);
  apply_env(c, env);
  if (!g.out.empty()) c.output.path = g.out;
  if (!g.format.empty()) c.output.format = parse_format(g.format);
  if (eff.threads == 0 && env.threads) eff.threads = *env.threads;
  if (!g.seed_set && env.seed) eff.seed = *env.seed;
  if (eff.threads < 0) throw ConfigError("--threads must be >= 0");
  return c;
}

void require_admissible(const MediumConfig &m, int n_max)
{
  const auto a = check_admissible(m, n_max);
  if (!a.ok()) throw AdmissibilityViolation(a.reason());
}

void emit(const RunConfig &c, const std::string &csv, const json &j)
{
  write_atomic(c.output.path, c.output.format == OutputFormat::csv ? csv : dump_json(j));
}

// ---- subcommands

int cmd_spectrum(const RunConfig &c, int n_max_flag)
{
  const int n_max = n_max_flag > 0 ? n_max_flag : c.numerics.n_max;
  require_admissible(c.medium, n_max);
  const auto recs = spectrum_table(c.medium, n_max);
  std::ostringstream csv;
  write_spectrum_csv(csv, recs);
  emit(c, csv.str(), spectrum_json(c.medium, recs));
  // the smallest |tau_1| is what resonance hunting looks at
  const auto best = std::min_element(recs.begin(), recs.end(),
                                     [](const auto &a, const auto &b) { return std::abs(a.tau[0]) < std::abs(b.tau[0]); });
  std::cerr << "min |tau_1| = " << fmt17(std::abs(best->tau[0])) << " at n = " << best->n << "\n";
  return ok;
}

int cmd_scatter(const RunConfig &c, const std::string &grid_spec, bool with_H, int threads)
{
  const auto pts = parse_grid_spec(grid_spec);
  require_admissible(c.medium, c.numerics.n_max);
  const auto s = solve_scattering(c.incident, c.medium, c.numerics.n_max);
  if (s.source.truncation_warning) std::cerr << "warning: incident field not resolved by n_max\n";
  // a configured band wider than the library minimum drops extra points
  std::vector<Vec3> kept, extra;
  for (const auto &p : pts)
    (std::abs(p.norm() - c.medium.R) < c.numerics.delta_min * c.medium.R * (1.0 - 1e-12) ? extra : kept).push_back(p);
  auto g = full_solution_grid(s, kept, threads, c.numerics.quad_order);
  g.excluded.insert(g.excluded.end(), extra.begin(), extra.end());

  std::ostringstream csv;
  write_grid_csv(csv, g, with_H);
  emit(c, csv.str(), grid_json(g));

  double es = 0.0, ei = 0.0, as = 0.0, ai = 0.0;
  for (std::size_t i = 0; i < g.points.size(); ++i) {
    if (g.region[i] != Region::exterior) continue;
    const double sc = cnorm(g.E[i] - g.E_inc[i]), in = cnorm(g.E_inc[i]);
    es = std::max(es, sc);
    ei = std::max(ei, in);
    // the annulus where cloaking is judged
    const double r = g.points[i].norm() / c.medium.R;
    if (r >= 1.1 && r <= 3.0) {
      as = std::max(as, sc);
      ai = std::max(ai, in);
    }
  }
  std::cerr << "excluded band points: " << g.excluded.size() << "\n"
            << "max |E_scattered| (exterior): " << fmt17(es) << "\n"
            << "max |E_incident| (exterior): " << fmt17(ei) << "\n"
            << "scattered/incident ratio: " << fmt17(g.scattered_ratio()) << "\n"
            << "scattered/incident ratio, 1.1R <= r <= 3R: " << fmt17(ai > 0.0 ? as / ai : 0.0) << "\n"
            << "min |tau| excited: " << fmt17(s.density.min_tau) << ", modes excited: " << s.density.excited << "\n";
  return ok;
}

SweepAxis parse_sweep(const std::string &t)
{
  std::vector<std::string> v;
  std::stringstream ss(t);
  for (std::string p; std::getline(ss, p, ':');) v.push_back(p);
  if (v.size() != 4) throw ConfigError("sweep '" + t + "' must be param:lo:hi:step");
  SweepParam p;
  if (v[0] == "eps_c_re")
    p = SweepParam::eps_c_re;
  else if (v[0] == "eps_c_im")
    p = SweepParam::eps_c_im;
  else if (v[0] == "mu_c_re")
    p = SweepParam::mu_c_re;
  else if (v[0] == "omega")
    p = SweepParam::omega;
  else
    throw ConfigError("unknown sweep parameter " + v[0]);
  try {
    const double lo = std::stod(v[1]), hi = std::stod(v[2]), step = std::stod(v[3]);
    if (!(hi >= lo)) throw ConfigError("sweep '" + t + "': need hi >= lo");
    return SweepAxis::stepped(p, lo, hi, step);
  } catch (const std::invalid_argument &) {
    throw ConfigError("sweep '" + t + "': bad number");
  } catch (const Error &e) {
    throw ConfigError(e.what());
  }
}

int cmd_scan(const RunConfig &c, const std::string &mode, const std::vector<std::string> &sweeps,
             const std::vector<int> &channels, int n_lo, int n_hi, int threads)
{
  ScanSpec spec;
  for (const auto &s : sweeps) spec.axes.push_back(parse_sweep(s));
  if (!channels.empty()) spec.channels = channels;
  for (int ch : spec.channels)
    if (ch < 1 || ch > 4) throw ConfigError("channels must be 1..4");
  spec.n_lo = n_lo;
  spec.n_hi = n_hi > 0 ? n_hi : c.numerics.n_max;
  if (spec.n_lo < 1 || spec.n_hi < spec.n_lo) throw ConfigError("need 1 <= n-lo <= n-hi");
  const auto r = mode == "cloaking" ? scan_cloaking(c.medium, spec, threads, c.thresholds())
                                    : scan_resonance(c.medium, spec, threads, c.thresholds());
  std::ostringstream csv;
  write_scan_csv(csv, r);
  emit(c, csv.str(), scan_json(r));
  std::cerr << r.points.size() << " points ranked, " << r.skipped.size() << " skipped\n";
  if (!r.points.empty()) {
    const auto &b = r.points.front();
    std::cerr << "best:";
    for (std::size_t i = 0; i < b.params.size(); ++i) std::cerr << " " << sweep_name(r.axes[i]) << "=" << fmt17(b.params[i]);
    std::cerr << " channel " << b.channel << " n* = " << b.n_star << " |tau| = " << fmt17(b.objective) << "\n";
  }
  return ok;
}

struct DrudeFlags
{
  bool forward = false, inverse = false;
  std::optional<double> omega_p_sq, tau, filling, omega0, omega, eps_re, eps_im, mu_re, mu_im;
};

int cmd_drude(const RunConfig &c, const DrudeFlags &f)
{
  if (f.forward == f.inverse) throw ConfigError("drude needs exactly one of --forward, --inverse");
  const double omega = f.omega.value_or(c.medium.omega);
  DrudeParams p = c.drude.value_or(DrudeParams{});
  if (f.tau) p.tau_damp = *f.tau;
  if (f.omega0) p.omega0 = *f.omega0;
  if (f.forward) {
    if (f.omega_p_sq) p.omega_p_sq = *f.omega_p_sq;
    if (f.filling) p.filling = *f.filling;
    if (!c.drude && !f.omega_p_sq) throw ConfigError("drude --forward needs --omega-p-sq or a config drude block");
    const auto v = drude_forward(p, omega);
    std::ostringstream csv;
    csv << "re_eps_c,im_eps_c,re_mu_c,im_mu_c\n"
        << fmt17(v.eps_c.real()) << ',' << fmt17(v.eps_c.imag()) << ',' << fmt17(v.mu_c.real()) << ','
        << fmt17(v.mu_c.imag()) << '\n';
    emit(c, csv.str(), {{"omega", omega}, {"eps_c", cjson(v.eps_c)}, {"mu_c", cjson(v.mu_c)}});
    std::cerr << "eps_c = " << fmt_c(v.eps_c) << "\nmu_c = " << fmt_c(v.mu_c) << "\n";
    return ok;
  }
  const cplx eps(f.eps_re.value_or(c.medium.eps_c.real()), f.eps_im.value_or(c.medium.eps_c.imag()));
  const cplx mu(f.mu_re.value_or(c.medium.mu_c.real()), f.mu_im.value_or(c.medium.mu_c.imag()));
  const auto inv = drude_inverse(eps, mu, omega, p.tau_damp, p.omega0, p.eps0, p.mu0);
  const auto &q = inv.params;
  std::ostringstream csv;
  csv << "omega_p_sq,tau,filling,omega0,eps0,mu0,omega_p_sq_leak,filling_leak\n"
      << fmt17(q.omega_p_sq) << ',' << fmt17(q.tau_damp) << ',' << fmt17(q.filling) << ',' << fmt17(q.omega0) << ','
      << fmt17(q.eps0) << ',' << fmt17(q.mu0) << ',' << fmt17(inv.omega_p_sq_leak) << ',' << fmt17(inv.filling_leak)
      << '\n';
  emit(c, csv.str(),
       {{"drude",
         {{"omega_p_sq", q.omega_p_sq},
          {"tau", q.tau_damp},
          {"filling", q.filling},
          {"omega0", q.omega0},
          {"eps0", q.eps0},
          {"mu0", q.mu0}}},
        {"omega_p_sq_leak", inv.omega_p_sq_leak},
        {"filling_leak", inv.filling_leak},
        {"residual_eps", inv.residual_eps},
        {"residual_mu", inv.residual_mu}});
  std::cerr << "omega_p^2 = " << fmt17(q.omega_p_sq) << ", filling = " << fmt17(q.filling) << "\n";
  return ok;
}

int cmd_verify(const RunConfig &c, const std::string &level, std::uint64_t seed, double fault, int threads)
{
  if (level != "quick" && level != "full") throw ConfigError("--level must be quick or full");
  detail::fault_scale() = fault;
  const auto t0 = std::chrono::steady_clock::now();
  DualSpec ds;
  ds.seed = seed;
  auto rep = dual_lambda_suite(ds);
  VerifySpec vs;
  vs.seed = seed;
  if (level == "quick") {
    vs.cases = 5;
    vs.n_max = 3;
    vs.tangential = false;
  }
  const auto orc = verify_identities(vs, threads);
  rep.entries.insert(rep.entries.end(), orc.entries.begin(), orc.entries.end());

  json j = verify_json(rep);
  j["oracle_tolerance"] = vs.tolerance;
  j["dual_tolerance"] = ds.tolerance;
  if (level == "full") {
    // transmission residuals of end-to-end solves on the configured medium
    json tr = json::array();
    auto add = [&](const std::string &name, const IncidentField &f, const MediumConfig &m, int n_max) {
      json e = {{"case", name}};
      try {
        const auto r = transmission_residual(f, m, n_max);
        e["res_E"] = r.res_E;
        e["res_H"] = r.res_H;
        e["pass"] = std::max(r.res_E, r.res_H) < 1e-3;
      } catch (const Error &ex) {
        e["error"] = ex.what();
        e["pass"] = false;
      }
      if (!e["pass"].get<bool>()) j["pass"] = false;
      tr.push_back(e);
    };
    add("configured", c.incident, c.medium, c.numerics.n_max);
    // a plane wave needs more degrees than a low-order source
    add("plane_wave", PlaneWave{}, c.medium, std::max(c.numerics.n_max, 40));
    j["transmission"] = tr;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_atomic(c.output.path, dump_json(j));
  std::size_t failed = 0;
  for (const auto &e : rep.entries) failed += !e.pass;
  std::cerr << rep.entries.size() << " identities checked, " << failed << " failed, worst relative error "
            << fmt17(rep.worst()) << " (" << secs << " s)\n";
  detail::fault_scale() = 0.0;
  return j["pass"].get<bool>() ? ok : verification_failed;
}
}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Spectral analysis of electromagnetic scattering by a spherical inclusion"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "JSON run configuration");
  app.add_option("--out", g.out, "output path, - for stdout");
  app.add_option("--format", g.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--threads", g.threads, "worker threads, 0 for all cores");
  auto *seed_opt = app.add_option("--seed", g.seed, "seed for verify's random test points");

  auto *spectrum = app.add_subcommand("spectrum", "tau and alpha for every degree");
  int n_max_flag = 0;
  spectrum->add_option("--n-max", n_max_flag, "highest degree");

  auto *scatter = app.add_subcommand("scatter", "total field on a planar grid");
  std::string grid = "z=0:x[-3,3,121]:y[-3,3,121]";
  bool no_H = false;
  scatter->add_option("--grid", grid, "fixed:range:range, e.g. z=0:x[-3,3,121]:y[-3,3,121]");
  scatter->add_flag("--no-h", no_H, "omit the magnetic field columns");

  auto *scan = app.add_subcommand("scan", "rank parameter sweeps by |tau|");
  std::string mode = "resonance";
  std::vector<std::string> sweeps;
  std::vector<int> channels;
  int n_lo = 1, n_hi = 0;
  scan->add_option("--mode", mode)->check(CLI::IsMember({"resonance", "cloaking"}));
  scan->add_option("--sweep", sweeps, "param:lo:hi:step, param in eps_c_re eps_c_im mu_c_re omega")->required();
  scan->add_option("--channels", channels, "channels 1..4")->delimiter(',');
  scan->add_option("--n-lo", n_lo);
  scan->add_option("--n-hi", n_hi, "defaults to numerics.n_max");

  auto *drude = app.add_subcommand("drude", "Drude model, forward or inverse");
  DrudeFlags df;
  drude->add_flag("--forward", df.forward);
  drude->add_flag("--inverse", df.inverse);
  drude->add_option("--omega-p-sq", df.omega_p_sq);
  drude->add_option("--tau", df.tau);
  drude->add_option("--filling", df.filling);
  drude->add_option("--omega0", df.omega0);
  drude->add_option("--omega", df.omega);
  drude->add_option("--eps-c-re", df.eps_re);
  drude->add_option("--eps-c-im", df.eps_im);
  drude->add_option("--mu-c-re", df.mu_re);
  drude->add_option("--mu-c-im", df.mu_im);

  auto *verify = app.add_subcommand("verify", "check closed forms against brute-force oracles");
  std::string level = "quick";
  double fault = 0.0;
  verify->add_option("--level", level)->check(CLI::IsMember({"quick", "full"}));
  verify->add_option("--fault-scale", fault, "perturb every j_n by this relative amount");

  for (auto *s : {spectrum, scatter, scan, drude, verify}) s->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int rc = app.exit(e);
    return rc == 0 ? ok : config_error;
  }
  g.seed_set = seed_opt->count() > 0;

  try {
    Globals eff;
    const RunConfig c = resolve(g, read_env(), eff);
    if (*spectrum) return cmd_spectrum(c, n_max_flag);
    if (*scatter) return cmd_scatter(c, grid, !no_H, eff.threads);
    if (*scan) return cmd_scan(c, mode, sweeps, channels, n_lo, n_hi, eff.threads);
    if (*drude) return cmd_drude(c, df);
    if (*verify) return cmd_verify(c, level, eff.seed, fault, eff.threads);
  } catch (const ConfigError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return config_error;
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return inadmissible;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return config_error;
  }
  return config_error;
}
