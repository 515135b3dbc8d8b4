#include <doctest.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "bubble/cli.hpp"

using namespace bubble;
using namespace bubble::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("bubble_test_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string config_error(std::string_view text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

double parse_double(std::string_view s) {
  double v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  REQUIRE(ec == std::errc());
  REQUIRE(ptr == s.data() + s.size());
  return v;
}

}  // namespace

TEST_CASE("empty config gives the defaults") {
  const ScenarioConfig c = parse_config_text("");
  CHECK(c.mass == 1.0);
  CHECK(c.source.center == -100.0);
  CHECK(c.detector.center == 100.0);
  CHECK(c.source.width == doctest::Approx(2.828427).epsilon(1e-6));
  CHECK(c.detector.width == doctest::Approx(2.828427).epsilon(1e-6));
  CHECK(c.source.momentum == 1.5);
  CHECK(c.detector.momentum == -1.5);
  CHECK(c.t_f() == 240.0);
  CHECK(c.grid_points == 8192);
}

TEST_CASE("config overrides") {
  const ScenarioConfig c = parse_config_text("# comment line\n\ngrid_n = 4096\n");
  CHECK(c.grid_points == 4096);
  CHECK(c.grid_length == 1024.0);
  CHECK(c.mass == 1.0);

  const ScenarioConfig d = parse_config_text(
      "mass=2\r\nx_i = -80   # trailing comment\nx_f = 90\nsigma_i = 3\nsigma_f = 3.5\np_i = 1\np_f = -1\n"
      "t_i = 5\nt_f = 200\ngrid_l = 2048\ndelta_t = 0.01\npanel_times = 5, 100 ,200");
  CHECK(d.mass == 2.0);
  CHECK(d.source.center == -80.0);
  CHECK(d.detector.center == 90.0);
  CHECK(d.source.width == 3.0);
  CHECK(d.detector.width == 3.5);
  CHECK(d.source.momentum == 1.0);
  CHECK(d.detector.momentum == -1.0);
  CHECK(d.t_i() == 5.0);
  CHECK(d.t_f() == 200.0);
  CHECK(d.grid_length == 2048.0);
  CHECK(d.delta_t == 0.01);
  CHECK(d.panel_times == std::vector<double>{5.0, 100.0, 200.0});
}

TEST_CASE("config errors name the key") {
  CHECK(config_error("mass = -1").find("mass") != std::string::npos);
  CHECK(config_error("colour = 3").find("colour") != std::string::npos);
  CHECK(config_error("grid_n = 4096.5").find("grid_n") != std::string::npos);
  CHECK(config_error("grid_n = 1000").find("grid_n") != std::string::npos);
  CHECK(config_error("p_i = fast").find("p_i") != std::string::npos);
  CHECK(config_error("sigma_f =").find("sigma_f") != std::string::npos);
  CHECK(config_error("panel_times = 0,,3").find("panel_times") != std::string::npos);
  CHECK(config_error("just words").find("line 1") != std::string::npos);
  CHECK_THROWS_AS(parse_config("/nonexistent/bubble.cfg"), ConfigError);
}

TEST_CASE("config file on disk") {
  const fs::path dir = scratch("cfgfile");
  fs::create_directories(dir);
  std::ofstream(dir / "run.cfg") << "grid_n = 4096\nx_i = -90\n";
  const ScenarioConfig c = parse_config(dir / "run.cfg");
  CHECK(c.grid_points == 4096);
  CHECK(c.source.center == -90.0);
  fs::remove_all(dir);
}

TEST_CASE("real formatting round-trips") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const double v = u(rng) * std::pow(10.0, static_cast<int>(u(rng) * 300));
    CHECK(parse_double(format_real(v)) == v);
  }
  CHECK(format_real(0.0) == "0");
  CHECK(format_real(-512.0) == "-512");
  CHECK(format_real(0.1) == "0.10000000000000001");
}

TEST_CASE("panel CSV schema") {
  const ScenarioConfig c = parse_config_text("grid_l = 64\ngrid_n = 64\n");
  const Grid1D g = c.grid();
  Field rho(g.size()), cur = Field::Zero(g.size());
  for (Eigen::Index n = 0; n < g.size(); ++n) rho[n] = {std::sin(0.37 * n) / 3.0, std::cos(1.1 * n) * 1e-7};
  const DensityProfile si{g, 0.0, ProfileKind::SI, rho, cur};
  const std::string text = panel_csv(si);

  std::istringstream lines(text);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "x,re,im");
  Eigen::Index n = 0;
  while (std::getline(lines, line)) {
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    REQUIRE(c2 != std::string::npos);
    CHECK(parse_double(line.substr(0, c1)) == g.x(n));
    CHECK(parse_double(line.substr(c1 + 1, c2 - c1 - 1)) == rho[n].real());
    CHECK(parse_double(line.substr(c2 + 1)) == rho[n].imag());
    ++n;
  }
  CHECK(n == g.size());
  CHECK(text.find('\r') == std::string::npos);
  CHECK(text.back() == '\n');

  const DensityProfile ci{g, 0.0, ProfileKind::CI, rho, cur};
  std::istringstream ci_lines(panel_csv(ci));
  std::getline(ci_lines, line);
  while (std::getline(ci_lines, line)) CHECK(line.substr(line.rfind(',') + 1) == "0");
}

TEST_CASE("bubble-si run writes panels, report and manifest") {
  const fs::path dir = scratch("si");
  const Outcome o = invoke({"bubble-si", "--out", dir.string()});
  CHECK(o.code == 0);
  CHECK(o.out.find("A_s=0.43") != std::string::npos);
  CHECK(o.out.find("P_s=0.19") != std::string::npos);
  CHECK(o.out.find("drift=") != std::string::npos);
  for (const char* f : {"panel_si_t0.csv", "panel_si_t120.csv", "panel_si_t239.999.csv", "panel_si_t240.csv",
                        "report.json", "manifest.json"}) {
    CHECK_MESSAGE(fs::exists(dir / f), f);
  }

  const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
  CHECK(report["scenario"] == "bubble-si");
  CHECK(std::abs(report["a_re"].get<double>() - 0.43) <= 0.02);
  CHECK(std::abs(report["a_im"].get<double>() - 0.08) <= 0.02);
  CHECK(std::abs(report["p"].get<double>() - 0.19) <= 0.01);
  for (const char* key : {"drift", "oracle_gap", "symmetry_defect_re", "symmetry_defect_im", "panels"}) {
    CHECK_MESSAGE(report.contains(key), key);
  }
  CHECK_FALSE(report.contains("zitter_ci_freq"));
  REQUIRE(report["panels"].size() == 4);
  for (const auto& p : report["panels"]) {
    for (const char* key : {"t", "file", "centroid", "std"}) CHECK(p.contains(key));
    CHECK(fs::exists(dir / p["file"].get<std::string>()));
  }

  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["scenario"] == "bubble-si");
  CHECK(manifest["version"] == kToolVersion);
  CHECK(manifest["config"]["grid_n"] == 8192);
  for (const auto& f : manifest["files"]) CHECK(fs::exists(dir / f["path"].get<std::string>()));
  fs::remove_all(dir);
}

TEST_CASE("CI and SI runs share one manifest") {
  const fs::path dir = scratch("shared");
  REQUIRE(invoke({"bubble-ci", "--out", dir.string()}).code == 0);
  REQUIRE(invoke({"bubble-si", "--out", dir.string()}).code == 0);
  REQUIRE(invoke({"bubble-si", "--out", dir.string()}).code == 0);
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  std::vector<std::string> labels;
  for (const auto& f : manifest["files"]) {
    if (f["kind"] != "panel") continue;
    labels.push_back(f["label"]);
    const bool ci = f["row"] == "CI";
    const char label = f["label"].get<std::string>()[0];
    CHECK((ci ? (label >= 'a' && label <= 'd') : (label >= 'e' && label <= 'h')));
  }
  CHECK(labels == std::vector<std::string>{"a", "b", "c", "d", "e", "f", "g", "h"});
  fs::remove_all(dir);
}

TEST_CASE("times override") {
  const fs::path dir = scratch("times");
  const Outcome o = invoke({"bubble-ci", "--out", dir.string(), "--times", "0,60.5,240"});
  CHECK(o.code == 0);
  CHECK(fs::exists(dir / "panel_ci_t60.5.csv"));
  CHECK(fs::exists(dir / "panel_ci_t240.csv"));
  CHECK_FALSE(fs::exists(dir / "panel_ci_t120.csv"));
  CHECK(invoke({"bubble-ci", "--out", dir.string(), "--times", "0,abc"}).code == 1);
  CHECK(invoke({"bubble-ci", "--out", dir.string(), "--times", "0,999"}).code == 1);
  fs::remove_all(dir);
}

TEST_CASE("deterministic output") {
  const fs::path a = scratch("det_a");
  const fs::path b = scratch("det_b");
  REQUIRE(invoke({"bubble-si", "--out", a.string()}).code == 0);
  REQUIRE(invoke({"bubble-si", "--out", b.string()}).code == 0);
  for (const auto& entry : fs::directory_iterator(a)) {
    const auto name = entry.path().filename();
    CHECK_MESSAGE(slurp(entry.path()) == slurp(b / name), name.string());
  }
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("exit codes") {
  const Outcome unknown = invoke({"teleport", "--out", "x"});
  CHECK(unknown.code == 1);
  CHECK(unknown.err.find("Usage") != std::string::npos);
  CHECK(invoke({}).code == 1);
  CHECK(invoke({"bubble-si"}).code == 1);
  CHECK(invoke({"bubble-si", "--out", "x", "--config", "/nonexistent.cfg"}).code == 1);
  CHECK(invoke({"--help"}).code == 0);

  const fs::path dir = scratch("codes");
  fs::create_directories(dir);
  std::ofstream(dir / "bad.cfg") << "mass = -1\n";
  const Outcome bad = invoke({"bubble-si", "--out", (dir / "o").string(), "--config", (dir / "bad.cfg").string()});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("mass") != std::string::npos);

  std::ofstream(dir / "small.cfg") << "grid_l = 256\ngrid_n = 2048\n";
  const Outcome small =
      invoke({"bubble-si", "--out", (dir / "o").string(), "--config", (dir / "small.cfg").string()});
  CHECK(small.code == 2);
  CHECK(small.err.find("numerical") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("zitter and check subcommands") {
  const fs::path dir = scratch("zc");
  const Outcome z = invoke({"zitter", "--out", (dir / "z").string()});
  CHECK(z.code == 0);
  const auto zr = nlohmann::json::parse(slurp(dir / "z" / "report.json"));
  CHECK(zr["scenario"] == "zitter");
  CHECK(std::abs(zr["zitter_ci_freq"].get<double>() - 2.03) <= 0.05 * 2.03);
  CHECK(zr["zitter_ratio"].get<double>() >= 1e6);
  CHECK(fs::exists(dir / "z" / "zitter_series.csv"));
  CHECK(slurp(dir / "z" / "zitter_series.csv").rfind("t,ci,si_re,si_im,retarded\n", 0) == 0);

  const Outcome c = invoke({"check", "--out", (dir / "c").string()});
  CHECK(c.code == 0);
  CHECK(c.out.find("12/12 passed") != std::string::npos);
  const auto cr = nlohmann::json::parse(slurp(dir / "c" / "report.json"));
  CHECK(cr["passed"] == true);
  fs::remove_all(dir);
}

TEST_CASE("manifest JSON") {
  RunManifest m;
  m.scenario = "bubble-ci";
  m.config = config_json(ScenarioConfig{});
  m.files = {{"panel_ci_t0.csv", "panel", "bubble-ci", "a", "CI", 0.0}, {"report.json", "report", "bubble-ci", "", "", 0}};
  const auto j = manifest_json(m);
  CHECK(j["tool"] == "bubble");
  CHECK(j["files"][0]["label"] == "a");
  CHECK(j["files"][0]["t"] == 0.0);
  CHECK_FALSE(j["files"][1].contains("label"));
  CHECK(j["config"]["panel_times"].size() == 4);
}

TEST_CASE("executable entry point") {
  const fs::path dir = scratch("exe");
  const std::string cmd = std::string(BUBBLE_EXE) + " bubble-si --out " + dir.string() + " > " +
                          (fs::temp_directory_path() / "bubble_test_cli_exe.txt").string();
  CHECK(std::system(cmd.c_str()) == 0);
  CHECK(fs::exists(dir / "manifest.json"));
  CHECK(std::system((std::string(BUBBLE_EXE) + " nonsense 2>/dev/null").c_str()) != 0);
  fs::remove_all(dir);
}
