#include <catch_amalgamated.hpp>

#include <filesystem>
#include <map>

#include "plasmon/config.hpp"
#include "plasmon/io.hpp"

using namespace plasmon;
using Catch::Matchers::ContainsSubstring;

namespace
{
std::string config_path(const char *name)
{
  return std::string(PLASMON_SOURCE_DIR) + "/configs/" + name;
}

std::string error_of(const std::string &text)
{
  try {
    parse_config(text, "cfg.json");
  } catch (const ConfigError &e) {
    return e.what();
  }
  return "";
}
}  // namespace

TEST_CASE("defaults and shipped configs", "[config]")
{
  const auto d = parse_config("{}");
  CHECK(d.medium.R == 1.0);
  CHECK(d.numerics.n_max == 60);
  CHECK(d.numerics.delta_min == delta_min_fraction);
  CHECK(d.output.path == "-");
  CHECK(std::holds_alternative<PlaneWave>(d.incident));

  const auto r = load_config(config_path("resonance.json"));
  CHECK(r.medium.eps_c == cplx(-1.04018, 4e-5));
  CHECK(r.medium.omega == 5.0);
  const auto c = load_config(config_path("cloaking.json"));
  REQUIRE(std::holds_alternative<VortexField>(c.incident));
  CHECK(std::get<VortexField>(c.incident).amplitude == 100.0);
  CHECK(c.medium.eps_c == cplx(-6.55806, 1e-6));
  const auto dr = load_config(config_path("drude_resonance.json"));
  REQUIRE(dr.drude);
  CHECK(dr.medium.eps_c.real() == Catch::Approx(-1.06072).epsilon(1e-6));
  CHECK(dr.medium.mu_c.real() == Catch::Approx(0.880952).epsilon(1e-6));
  CHECK_NOTHROW(load_config(config_path("identical.json")));
  CHECK_THROWS_AS(load_config(config_path("missing.json")), ConfigError);
}

TEST_CASE("schema violations name the line", "[config]")
{
  SECTION("unknown top-level key")
  {
    const auto e = error_of("{\n  \"medium\": {},\n  \"colour\": 3\n}");
    CHECK_THAT(e, ContainsSubstring("cfg.json:3:"));
    CHECK_THAT(e, ContainsSubstring("colour"));
  }
  SECTION("unknown nested key")
  {
    const auto e = error_of("{\n\"medium\": {\n  \"radius\": 1,\n\n  \"radus\": 2\n}\n}");
    CHECK_THAT(e, ContainsSubstring("cfg.json:5:"));
    CHECK_THAT(e, ContainsSubstring("medium/radus"));
  }
  SECTION("same key name in different objects")
  {
    const auto e = error_of("{\n\"incident\": {\"kind\": \"vortex\",\n \"amplitude\": \"x\"}\n}");
    CHECK_THAT(e, ContainsSubstring("cfg.json:3:"));
  }
  SECTION("malformed JSON")
  {
    const auto e = error_of("{\n  \"medium\": {\n    \"radius\": 1,\n  }\n");
    CHECK_THAT(e, ContainsSubstring("malformed"));
    CHECK_THAT(e, ContainsSubstring("cfg.json:4"));
  }
  SECTION("bad values")
  {
    CHECK_THAT(error_of(R"({"medium": {"radius": -1}})"), ContainsSubstring("radius"));
    CHECK_THAT(error_of(R"({"medium": {"eps_c": {"re": 1, "img": 2}}})"), ContainsSubstring("eps_c/img"));
    CHECK_THAT(error_of(R"({"numerics": {"n_max": 2.5}})"), ContainsSubstring("integer"));
    CHECK_THAT(error_of(R"({"numerics": {"delta_min": 0.01}})"), ContainsSubstring("delta_min"));
    CHECK_THAT(error_of(R"({"output": {"format": "xml"}})"), ContainsSubstring("csv or json"));
    CHECK_THAT(error_of(R"({"incident": {"kind": "laser"}})"), ContainsSubstring("kind"));
    CHECK_THAT(error_of(R"({"incident": {"kind": "plane_wave", "amplitude": [1, 0, 0], "direction": [1, 0, 0]}})"),
               ContainsSubstring("orthogonal"));
    CHECK_THAT(error_of(R"({"incident": {"kind": "multipole", "channel": 5}})"), ContainsSubstring("channel"));
    CHECK_THAT(error_of(R"({"medium": {"eps_c": 2, "drude": {"omega_p_sq": 1}}})"), ContainsSubstring("drude"));
    CHECK_THAT(error_of(R"({"medium": {"drude": {"tau": 1}}})"), ContainsSubstring("omega_p_sq"));
    CHECK_THAT(error_of("[1, 2]"), ContainsSubstring("object"));
  }
}

TEST_CASE("values", "[config]")
{
  const auto c = parse_config(R"({
    "medium": {"eps_m": {"re": 2, "im": 0.5}, "mu_c": 3, "omega": 1.5},
    "incident": {"kind": "plane_wave", "amplitude": [0, {"re": 1, "im": 1}, 0], "direction": [2, 0, 0]},
    "numerics": {"n_max": 7, "quad_order": 12, "theta_big": 20, "theta_small": 0.1},
    "output": {"format": "json", "path": "out.json"}
  })");
  CHECK(c.medium.eps_m == cplx(2.0, 0.5));
  CHECK(c.medium.mu_c == cplx(3.0, 0.0));
  const auto &w = std::get<PlaneWave>(c.incident);
  CHECK(w.amplitude[1] == cplx(1.0, 1.0));
  CHECK(w.direction == Vec3(1.0, 0.0, 0.0));
  CHECK(c.numerics.quad_order == 12);
  CHECK(c.thresholds().theta_big == 20.0);
  CHECK(c.output.format == OutputFormat::json);

  const auto m = parse_config(R"({"incident": {"kind": "multipole", "channel": 1, "n": 3, "m": -2, "amplitude": 2}})");
  const auto &mp = std::get<SpectralMultipole>(m.incident);
  CHECK(mp.channel == 1);
  CHECK(mp.index == HarmonicIndex{3, -2});
}

TEST_CASE("environment overrides", "[config]")
{
  std::map<std::string, std::string> env{{"PLASMON_N_MAX", "5"}, {"PLASMON_OUT", "x.csv"}, {"PLASMON_THREADS", "2"}};
  auto get = [&](const char *n) -> const char * {
    auto it = env.find(n);
    return it == env.end() ? nullptr : it->second.c_str();
  };
  auto c = parse_config(R"({"numerics": {"n_max": 9}, "output": {"path": "file.csv"}})");
  const auto e = read_env(get);
  apply_env(c, e);
  CHECK(c.numerics.n_max == 5);
  CHECK(c.output.path == "x.csv");
  CHECK(e.threads == 2);
  CHECK_FALSE(e.seed);

  env["PLASMON_SEED"] = "12x";
  CHECK_THROWS_AS(read_env(get), ConfigError);
  env.erase("PLASMON_SEED");
  env["PLASMON_N_MAX"] = "0";
  CHECK_THROWS_AS(apply_env(c, read_env(get)), ConfigError);
}

TEST_CASE("grid spec", "[config]")
{
  const auto g = parse_grid_spec("z=0:x[-3,3,121]:y[-3,3,121]");
  REQUIRE(g.size() == 121u * 121u);
  CHECK(g.front() == Vec3(-3.0, -3.0, 0.0));
  CHECK(g[1] == Vec3(-3.0, -2.95, 0.0));
  CHECK(g.back() == Vec3(3.0, 3.0, 0.0));

  // the first listed range varies slowest, whatever the axis
  const auto h = parse_grid_spec("x=0.5:z[0,1,2]:y[0,2,3]");
  REQUIRE(h.size() == 6u);
  CHECK(h[1] == Vec3(0.5, 1.0, 0.0));
  CHECK(h[3] == Vec3(0.5, 0.0, 1.0));

  for (const char *bad : {"z=0:x[-3,3,121]", "z=0:z[0,1,2]:y[0,1,2]", "w=0:x[0,1,2]:y[0,1,2]", "z=a:x[0,1,2]:y[0,1,2]",
                          "z=0:x[0,1]:y[0,1,2]", "z=0:x[0,1,0]:y[0,1,2]", "z=0:x[0,1,2.5]:y[0,1,2]"})
    CHECK_THROWS_AS(parse_grid_spec(bad), ConfigError);
}

TEST_CASE("exports", "[config][io]")
{
  MediumConfig m;
  m.omega = 5.0;
  m.eps_c = {-1.04018, 4e-5};
  const auto recs = spectrum_table(m, 12);

  SECTION("spectrum CSV round trip is exact")
  {
    std::stringstream ss;
    write_spectrum_csv(ss, recs);
    const auto rows = read_spectrum_csv(ss);
    REQUIRE(rows.size() == recs.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      CHECK(rows[i][0] == recs[i].n);
      for (int c = 0; c < 4; ++c) {
        CHECK(rows[i][1 + 2 * c] == recs[i].tau[c].real());
        CHECK(rows[i][2 + 2 * c] == recs[i].tau[c].imag());
        CHECK(rows[i][9 + 2 * c] == recs[i].alpha[c].real());
      }
    }
  }
  SECTION("spectrum JSON round trip is exact")
  {
    const auto j = json::parse(spectrum_json(m, recs).dump());
    CHECK(j["records"][3]["tau"][0]["re"].get<double>() == recs[3].tau[0].real());
    CHECK(j["medium"]["eps_c"]["im"].get<double>() == 4e-5);
  }
  SECTION("grid and scan headers")
  {
    FieldGrid g;
    g.points = {Vec3(2.0, 0.0, 0.0)};
    g.region = {Region::exterior};
    g.E = g.H = g.E_inc = {CVec3::Zero()};
    std::stringstream ss;
    write_grid_csv(ss, g, false);
    std::string head;
    std::getline(ss, head);
    CHECK(head == "x,y,z,region,re_Ex,im_Ex,re_Ey,im_Ey,re_Ez,im_Ez");
    CHECK(grid_json(g)["metadata"]["excluded_band"]["count"] == 0);

    ScanSpec s;
    s.axes = {{SweepParam::eps_c_re, -1.1, -1.0, 2}};
    s.n_hi = 5;
    std::stringstream sc;
    write_scan_csv(sc, scan_resonance(m, s));
    std::getline(sc, head);
    CHECK_THAT(head, Catch::Matchers::StartsWith("eps_c_re,channel,n_star,objective,"));
  }
  SECTION("atomic write leaves no temp file")
  {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "plasmon_io_test";
    fs::create_directories(dir);
    const auto target = dir / "out.txt";
    write_atomic(target.string(), "first\n");
    write_atomic(target.string(), "second\n");
    std::ifstream in(target);
    std::string s;
    std::getline(in, s);
    CHECK(s == "second");
    CHECK(std::distance(fs::directory_iterator(dir), fs::directory_iterator()) == 1);
    CHECK_THROWS_AS(write_atomic((dir / "no/such/dir/x").string(), "x"), Error);
    // a character device must survive
    write_atomic("/dev/null", "discarded\n");
    CHECK(fs::is_character_file("/dev/null"));
    fs::remove_all(dir);
  }
  SECTION("17 significant digits")
  {
    CHECK(fmt17(0.1) == "0.10000000000000001");
    CHECK(std::strtod(fmt17(1.0 / 3.0).c_str(), nullptr) == 1.0 / 3.0);
  }
}
