#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <numbers>

#include "finco/config.hpp"
#include "finco/driver.hpp"
#include "finco/io.hpp"

using namespace finco;

namespace {

std::string key_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "<no error>";
}

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("finco_test_config_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("toml subset values", "[config]") {
  const auto t = toml::parse(R"(
top = 1
[a]
n = -2.5e3   # trailing comment
s = "x # not a comment \"q\""
yes = true
no = false
big = inf
small = -inf
arr = [1, 2.5, -3e-2]
empty = []
[b.c]
k = 1_000
)");
  CHECK(std::get<double>(t.at("top")) == 1.0);
  CHECK(std::get<double>(t.at("a.n")) == -2500.0);
  CHECK(std::get<std::string>(t.at("a.s")) == "x # not a comment \"q\"");
  CHECK(std::get<bool>(t.at("a.yes")));
  CHECK_FALSE(std::get<bool>(t.at("a.no")));
  CHECK(std::get<double>(t.at("a.big")) == std::numeric_limits<double>::infinity());
  CHECK(std::get<double>(t.at("a.small")) == -std::numeric_limits<double>::infinity());
  CHECK(std::get<std::vector<double>>(t.at("a.arr")) == std::vector<double>{1, 2.5, -0.03});
  CHECK(std::get<std::vector<double>>(t.at("a.empty")).empty());
  CHECK(std::get<double>(t.at("b.c.k")) == 1000.0);
  CHECK(toml::parse(toml::write(t)) == t);

  CHECK_THROWS_AS(toml::parse("[a]\nx = 1\nx = 2\n"), ConfigError);
  CHECK_THROWS_AS(toml::parse("x = \"open\n"), ConfigError);
  CHECK_THROWS_AS(toml::parse("x = [1, a]\n"), ConfigError);
  CHECK_THROWS_AS(toml::parse("just words\n"), ConfigError);
  CHECK_THROWS_AS(toml::parse("[a\n"), ConfigError);
  CHECK(key_of([] { toml::parse("[s]\nx = 1.2.3\n"); }) == "s.x");
}

TEST_CASE("numbers survive formatting exactly", "[config]") {
  for (double v : {0.1, 1.0 / 3.0, 9.342, -2.437996819863428, 1e-300, 6.02e23, 0.0, -0.0}) {
    double back = 0.0;
    REQUIRE(toml::parse_number(toml::format_number(v), back));
    CHECK(back == v);
  }
}

TEST_CASE("config round trip", "[config]") {
  for (const auto& [name, make] : presets()) {
    INFO(name);
    const auto c = make();
    const auto text = to_toml(c);
    const auto back = parse_config(text);
    CHECK(back == c);
    CHECK(to_toml(back) == text);
  }
  auto c = preset_morse_revival();
  c.filters = FilterThresholds::disabled();
  c.phase = PrefactorPhase::Principal;
  CHECK(parse_config(to_toml(c)) == c);
}

TEST_CASE("default config is the Morse experiment", "[config]") {
  const RunConfig c;
  const auto* m = std::get_if<Morse>(&c.model.params());
  REQUIRE(m != nullptr);
  CHECK(m->depth == 10.25);
  CHECK(m->beta == 0.2209);
  CHECK(c.gaussian.gamma0 == 0.5);
  CHECK(c.gaussian.q0 == 9.342);
  CHECK(c.gaussian.p0 == 0.0);
  CHECK(c.gamma_f == 0.5);
  CHECK(c.filters.sigma == -2.5);
  CHECK(c.filters.nu == -20.0);
  CHECK(c.filters.eps == 1e4);
  CHECK(c.t_cl() == Catch::Approx(12.88).margin(0.01));

  const auto r = preset("morse-revival");
  CHECK(r.checkpoints.times == std::vector<double>{0.5, 1, 4, 10, 19, 20});
  const auto t = r.checkpoint_times();
  CHECK(t.back() == Catch::Approx(20.0 * r.t_cl()));
  // each split replaces one cell by four
  CHECK(static_cast<std::size_t>(r.nx * r.ny) + static_cast<std::size_t>(r.refinement.rounds) * r.refinement.budget * 3 ==
        120000);

  const auto h = preset("harmonic-check");
  CHECK(h.checkpoint_times() == std::vector<double>{std::numbers::pi / 2, std::numbers::pi, 2 * std::numbers::pi});
  CHECK(preset("identity").t_final() == 0.0);
  CHECK_THROWS_AS(preset("nope"), ConfigError);
}

TEST_CASE("config file overrides defaults, overrides override the file", "[config]") {
  const auto c = parse_config("[manifold]\nnx = 40\n[initial]\nq0 = 9.0\n", {},
                              {"manifold.ny=30", "contour.family=real", "checkpoints.times=[0.5, 2]"});
  CHECK(c.nx == 40);
  CHECK(c.ny == 30);
  CHECK(c.gaussian.q0 == 9.0);
  CHECK(c.contour.family == ContourFamily::Real);
  CHECK(c.checkpoints.times == std::vector<double>{0.5, 2.0});
  CHECK(parse_config("", preset_harmonic_check()) == preset_harmonic_check());
  CHECK(parse_config("", {}, {"filters.sigma=-inf"}).filters.sigma == -std::numeric_limits<double>::infinity());
}

TEST_CASE("invalid configs name the offending key", "[config]") {
  CHECK(key_of([] { parse_config("[manifold]\nnxx = 3\n"); }) == "manifold.nxx");
  CHECK(key_of([] { parse_config("", {}, {"nope.key=1"}); }) == "nope.key");
  CHECK(key_of([] { parse_config("[manifold]\nnx = 0\n"); }) == "manifold.nx");
  CHECK(key_of([] { parse_config("[manifold]\nnx = 2.5\n"); }) == "manifold.nx");
  CHECK(key_of([] { parse_config("[manifold]\nre_max = 1\nre_min = 2\n"); }) == "manifold.re_max");
  CHECK(key_of([] { parse_config("[potential]\nkind = \"quartic\"\n"); }) == "potential.kind");
  CHECK(key_of([] { parse_config("[potential]\ndepth = -1\n"); }) == "potential.depth");
  CHECK(key_of([] { parse_config("[potential]\ndepth = \"deep\"\n"); }) == "potential.depth");
  CHECK(key_of([] { parse_config("[initial]\ngamma0 = 0\n"); }) == "initial.gamma0");
  CHECK(key_of([] { parse_config("[finco]\ngamma_f = -0.5\n"); }) == "finco.gamma_f");
  CHECK(key_of([] { parse_config("[checkpoints]\ntimes = [1, 0.5]\n"); }) == "checkpoints.times");
  CHECK(key_of([] { parse_config("[checkpoints]\ntimes = []\n"); }) == "checkpoints.times");
  CHECK(key_of([] { parse_config("[checkpoints]\ntimes = [-1]\n"); }) == "checkpoints.times");
  CHECK(key_of([] { parse_config("[checkpoints]\nunit = \"s\"\n"); }) == "checkpoints.unit");
  CHECK(key_of([] { parse_config("[potential]\nkind = \"free\"\n"); }) == "checkpoints.unit");
  CHECK(key_of([] { parse_config("[initial]\np0 = 10\n"); }) == "checkpoints.unit");
  CHECK(key_of([] { parse_config("[contour]\ndip_start = 0.9\ndip_end = 0.2\n"); }) == "contour.dip_end");
  CHECK(key_of([] { parse_config("[contour]\ndepth = -0.1\n"); }) == "contour.depth");
  CHECK(key_of([] { parse_config("[filters]\nnu_mode = \"sometimes\"\n"); }) == "filters.nu_mode");
  CHECK(key_of([] { parse_config("[reference]\nn = 1000\n"); }) == "reference.n");
  CHECK(key_of([] { parse_config("[window]\nx_min = 100\nx_max = 200\n"); }) == "window.x_min");
  CHECK(key_of([] { parse_config("[stepper]\ndt_min = 1\n"); }) == "stepper.dt_min");
  CHECK(key_of([] { parse_config("[output]\ndir = \"\"\n"); }) == "output.dir");
  CHECK(key_of([] { load_config("/nonexistent/finco.toml"); }).empty());
  CHECK(key_of([] { parse_mode("fast"); }) == "mode");
  // a free particle is fine with absolute times
  CHECK(parse_config("[potential]\nkind = \"free\"\n[checkpoints]\nunit = \"au\"\ntimes = [1]\n").model.kind() ==
        PotentialKind::FreeParticle);
}

TEST_CASE("result files embed the resolved config", "[config][io]") {
  const auto dir = scratch("io");
  auto c = preset_harmonic_check();
  c.output_dir = dir.string();
  WavefunctionGrid wf;
  wf.t_final = 1.25;
  for (int i = 0; i < 5; ++i) {
    wf.x.push_back(0.1 * i);
    wf.psi.emplace_back(1.0 / 3.0 + i, -0.1 * i);
  }
  const auto path = dir / "wf.txt";
  write_wavefunction(path, wf, c, {{"note", "abc"}});
  CHECK(config_from_header(path.string()) == c);
  const auto meta = read_metadata(path.string());
  CHECK(meta.at("note") == "abc");
  CHECK(meta.at("t_final") == "1.25");
  CHECK(meta.at("columns") == "x re_psi im_psi density");
  const auto back = read_wavefunction(path.string());
  CHECK(back.x == wf.x);
  CHECK(back.psi == wf.psi);
  CHECK(back.t_final == 1.25);

  const auto g = uniform_grid({0, 1, 0, 1}, 2, 2);
  FieldMap m{g, {cplx(1, 1), cplx(0, 2), cplx(-1, 0), cplx(0)}, FieldKind::WeightMagPhase};
  write_field_map(dir / "w.txt", m, c, {});
  std::ifstream in(dir / "w.txt");
  std::string line;
  std::size_t rows = 0;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#') ++rows;
  CHECK(rows == 4);
  CHECK(read_metadata((dir / "w.txt").string()).at("field") == to_string(FieldKind::WeightMagPhase));
  std::filesystem::remove_all(dir);
}

TEST_CASE("density nodes and comparisons", "[config][io]") {
  WavefunctionGrid wf;
  for (int i = 0; i < 400; ++i) {
    const double x = -10.0 + 0.05 * i;
    wf.x.push_back(x);
    wf.psi.emplace_back(std::exp(-x * x / 200.0) * std::cos(x), 0.0);
  }
  const auto nodes = density_nodes(wf);
  // zeros of cos inside the region where the envelope stays above the floor
  REQUIRE(nodes.size() == 6);
  for (std::size_t k = 0; k < nodes.size(); ++k)
    CHECK(std::abs(nodes[k] - (static_cast<double>(k) - 2.5) * std::numbers::pi) < 0.05 + 1e-12);
  const auto self = compare(wf, wf);
  CHECK(self.rel_l2 == 0.0);
  CHECK(self.l2_psi == 0.0);
  auto scaled = wf;
  for (auto& v : scaled.psi) v *= std::sqrt(1.1);
  CHECK(compare(scaled, wf).rel_l2 == Catch::Approx(0.1));
  CHECK(compare(scaled, wf).rel_linf == Catch::Approx(0.1));
}

TEST_CASE("identity run through the driver", "[config][driver]") {
  auto c = preset_identity();
  c.output_dir = scratch("driver").string();
  const auto rep = run(c, Mode::Compare);
  REQUIRE(rep.comparisons.size() == 1);
  CHECK(rep.comparisons[0].rel_l2 < 1e-3);
  CHECK(rep.comparisons[0].norm == Catch::Approx(1.0).margin(1e-3));
  for (const auto& f : rep.files) CHECK(std::filesystem::exists(f));
  CHECK(config_from_header(rep.files.front().string()) == c);
  std::filesystem::remove_all(c.output_dir);
}

TEST_CASE("shipped configs load", "[config]") {
  for (const auto& [name, make] : presets()) {
    INFO(name);
    CHECK(load_config(std::string(FINCO_CONFIG_DIR) + "/" + name + ".toml") == make());
  }
  const auto c = load_config(std::string(FINCO_CONFIG_DIR) + "/default.toml");
  auto expected = RunConfig{};
  expected.name = "morse";
  expected.output_dir = "out/morse";
  CHECK(c == expected);
}
