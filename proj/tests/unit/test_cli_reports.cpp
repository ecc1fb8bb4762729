#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include "degenlab/cli_reports.hpp"
#include "json.hpp"

using namespace degenlab;
namespace fs = std::filesystem;

namespace {

std::string config_error(const std::string& text, std::optional<ExperimentKind> kind = ExperimentKind::spectrum) {
  try {
    parse_config(text, "cfg.ini", kind);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::config);
    return e.what();
  }
  FAIL("config accepted: " << text);
  return {};
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("degenlab_unit_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("config: defaults and overrides") {
  const auto cfg = parse_config("seed = 9\n[torus]\nnx = 32 ; inline comment\nnt = 64\n[experiment]\ntype = heat\n"
                                "dt = 0.02\nscheme = crank_nicolson\ns_shift = none\n",
                                "cfg.ini");
  CHECK(cfg.experiment == ExperimentKind::heat);
  CHECK(cfg.seed == 9);
  CHECK(cfg.torus.nx == 32);
  CHECK(cfg.torus.nt == 64);
  CHECK(cfg.torus.period_x == 2.0);
  CHECK(cfg.heat.dt == 0.02);
  CHECK(cfg.heat.scheme == HeatScheme::crank_nicolson);
  CHECK_FALSE(cfg.heat.s_shift.has_value());
  CHECK(cfg.text_checksum.size() == 16);
}

TEST_CASE("config: diagnostics carry source and line") {
  CHECK(config_error("[torus]\nnx = 64\ncolour = red\n").find("cfg.ini:3: unknown key 'colour'") != std::string::npos);
  CHECK(config_error("[torus]\nnx = 64\nnx = 32\n").find("cfg.ini:3: duplicate key 'nx' (first set on line 2)") !=
        std::string::npos);
  CHECK(config_error("[tours]\n").find("cfg.ini:1: unknown section") != std::string::npos);
  CHECK(config_error("\n[torus]\nperiod_x = 1.0\n").find("cfg.ini:3:") != std::string::npos);
  CHECK(config_error("[torus]\nnt = 65\n").find("must be even") != std::string::npos);
  CHECK(config_error("[torus]\nnx = sixty\n").find("expects an integer") != std::string::npos);
  CHECK(config_error("[experiment]\ntype = model\nntau = 1000\n", std::nullopt).find("power of two") !=
        std::string::npos);
  CHECK(config_error("[experiment]\ntype = probe\neps_values = 0.25, 0.5\n", std::nullopt)
            .find("strictly decreasing") != std::string::npos);
  CHECK(config_error("[experiment]\ntype = heat\n", ExperimentKind::probe).find("asks for 'probe'") !=
        std::string::npos);
  CHECK(config_error("[torus]\n", std::nullopt).find("no experiment selected") != std::string::npos);
  // per-kind keys are checked against the resolved experiment
  CHECK(config_error("[experiment]\ntype = spectrum\ndt = 0.1\n", std::nullopt).find("unknown key 'dt'") !=
        std::string::npos);
}

TEST_CASE("config: alpha vanishing on a subinterval is a config error naming the hypothesis") {
  std::ostringstream alpha, beta;
  const int n = 257;
  for (int k = 0; k < n; ++k) {
    const double x = -1.0 + 2.0 * k / (n - 1);
    alpha << (k ? ", " : "") << (std::abs(x) < 0.2 ? 0.0 : 1.0);
    beta << (k ? ", " : "") << 0.0;
  }
  const std::string text = "[profile]\nkind = tabulated\nalpha = " + alpha.str() + "\nbeta = " + beta.str() + "\n";
  const auto msg = config_error(text);
  CHECK(msg.find("cfg.ini:3:") != std::string::npos);
  CHECK(msg.find("nonvanishing hypothesis") != std::string::npos);
  CHECK(exit_code_for(ErrorKind::config) == 2);
}

TEST_CASE("exit codes") {
  CHECK(exit_code_for(ErrorKind::config) == 2);
  CHECK(exit_code_for(ErrorKind::resonance) == 3);
  CHECK(exit_code_for(ErrorKind::solver) == 4);
  CHECK(exit_code_for(ErrorKind::io) == 5);
  CHECK(kExitOk == 0);
}

TEST_CASE("spectrum run: s0 in JSON, deterministic bytes, complete manifest") {
  const auto cfg = parse_config("[experiment]\ntype = spectrum\n", "flat.ini");
  const auto a = scratch("spec_a"), b = scratch("spec_b");
  const auto ra = run_experiment(cfg, {a, 1, std::nullopt});
  run_experiment(cfg, {b, 1, std::nullopt});

  const auto j = nlohmann::json::parse(slurp(a / "spectrum.json"));
  CHECK(std::abs(j["s0"].get<double>() - 1.6484543) <= 1e-6);
  CHECK(j["zero_membership_flag"].get<bool>() == false);

  std::size_t on_disk = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    ++on_disk;
    CHECK_MESSAGE(slurp(e.path()) == slurp(b / e.path().filename()), e.path().filename());
  }
  CHECK(on_disk == ra.files.size());
  CHECK(ra.files.back() == "manifest.json");

  const auto m = nlohmann::json::parse(slurp(a / "manifest.json"));
  CHECK(m["files"].size() + 1 == on_disk);
  for (const auto& f : m["files"]) {
    const auto p = a / f["name"].get<std::string>();
    REQUIRE(fs::exists(p));
    CHECK(f["bytes"].get<std::uintmax_t>() == fs::file_size(p));
    CHECK(f["fnv1a"].get<std::string>() == hex64(fnv1a(slurp(p))));
  }
  const auto csv = slurp(a / "spectrum.csv");
  CHECK(csv.rfind("# report schema=spectrum config=" + ra.config_checksum + "\n", 0) == 0);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("seed and grid scale enter the checksum; invalid scale rejected") {
  const auto cfg = parse_config("[experiment]\ntype = spectrum\n[output]\nplot = false\n", "flat.ini");
  const auto d = scratch("seed");
  const auto r1 = run_experiment(cfg, {d, 1, std::nullopt});
  const auto r2 = run_experiment(cfg, {d, 1, 5});
  CHECK(r1.config_checksum != r2.config_checksum);
  CHECK_THROWS_AS(run_experiment(cfg, {d, 3, std::nullopt}), Error);
  CHECK_THROWS_AS(run_experiment(cfg, {d, 32, std::nullopt}), Error);
  fs::remove_all(d);
}

TEST_CASE("model run at a resonant exponent maps to exit code 3") {
  const auto cfg = parse_config("[experiment]\ntype = model\ns = 1.6484541547\nnx = 65\nntau = 256\n", "res.ini");
  const auto d = scratch("res");
  try {
    run_experiment(cfg, {d, 1, std::nullopt});
    FAIL("resonant exponent accepted");
  } catch (const Error& e) {
    CHECK(exit_code_for(e.kind()) == 3);
  }
  fs::remove_all(d);
}

TEST_CASE("plot: SVG carries the checksum, log axis for wide positive data, schema checks") {
  const auto d = scratch("plot");
  const auto cfg = parse_config("[torus]\nnx = 16\nnt = 64\n[experiment]\ntype = heat\ntau_max = 0.3\n", "h.ini");
  const auto r = run_experiment(cfg, {d, 1, std::nullopt});
  const auto svg = slurp(d / "heat.svg");
  CHECK(svg.find("<!-- config-checksum: " + r.config_checksum) != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK_THROWS_WITH_AS(plot_report(d / "heat.csv", "regularity_probe", d / "x.svg"), doctest::Contains("schema"),
                       Error);
  CHECK_THROWS_AS(plot_report(d / "manifest.json", "auto", d / "x.svg"), Error);
  plot_report(d / "heat.csv", "auto", d / "again.svg");
  CHECK(slurp(d / "again.svg") == svg);
  fs::remove_all(d);
}

TEST_CASE("selftest internal checks pass without goldens") {
  std::ostringstream log;
  CHECK(selftest({}, log));
  CHECK(log.str().find("FAIL") == std::string::npos);
}
