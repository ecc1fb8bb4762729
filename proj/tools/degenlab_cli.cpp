// Command-line front end. Talks to the library only through degenlab.h.
#include <cstdint>
#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "degenlab/degenlab.h"

namespace {

int report(dl_status status) {
  if (status != DL_OK) std::fprintf(stderr, "error [%s]: %s\n", dl_status_name(status), dl_last_error());
  return dl_exit_code(status);
}

struct RunArgs {
  std::string config;
  std::string out;
  int grid_scale = 1;
  std::uint64_t seed = 0;
  bool has_seed = false;
};

void print_line(const char* line, void*) { std::printf("%s\n", line); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical experiments for degenerate elliptic operators"};
  app.require_subcommand(1);
  app.set_version_flag("--version", dl_version());

  RunArgs run;
  const char* experiments[] = {"spectrum", "model", "singular", "probe", "heat"};
  const char* blurbs[] = {
      "Dirichlet values and the exceptional Sobolev set",
      "Strip model problem solved through the Mellin transform",
      "Singular solutions: Sobolev threshold or Gevrey decay",
      "Regularity probe with squeezed data on the torus",
      "Heat flow, growth windows and spectral gap on the torus",
  };
  for (int k = 0; k < 5; ++k) {
    auto* sub = app.add_subcommand(experiments[k], blurbs[k]);
    sub->add_option("-c,--config", run.config, "INI experiment config")->required()->check(CLI::ExistingFile);
    sub->add_option("-o,--out", run.out, "output directory (default: [output] dir)");
    sub->add_option("--grid-scale", run.grid_scale, "refine every grid by this power of two")
        ->check(CLI::IsMember({1, 2, 4, 8, 16}));
    sub->add_option_function<std::uint64_t>(
        "--seed", [&](const std::uint64_t& s) { run.seed = s, run.has_seed = true; }, "override the config seed");
  }

  std::string report_csv, kind = "auto", svg;
  auto* plot = app.add_subcommand("plot", "Render a report CSV as SVG");
  plot->add_option("report", report_csv, "report CSV written by an experiment")->required();
  plot->add_option("-k,--kind", kind, "expected report schema or auto");
  plot->add_option("-o,--out", svg, "SVG path (default: report with .svg)");

  std::string golden;
  auto* self = app.add_subcommand("selftest", "Internal checks and golden comparison");
  self->add_option("-g,--golden", golden, "directory of pinned configs and CSVs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : dl_exit_code(DL_ERR_CONFIG);
  }

  if (plot->parsed()) {
    if (svg.empty()) {
      svg = report_csv;
      const auto dot = svg.rfind('.');
      svg = (dot == std::string::npos ? svg : svg.substr(0, dot)) + ".svg";
    }
    return report(dl_plot(report_csv.c_str(), kind.c_str(), svg.c_str()));
  }
  if (self->parsed()) {
    int passed = 0;
    const dl_status st = dl_selftest(golden.empty() ? nullptr : golden.c_str(), print_line, nullptr, &passed);
    if (st != DL_OK) return report(st);
    std::printf("selftest %s\n", passed ? "passed" : "FAILED");
    return passed ? 0 : 1;
  }
  for (const char* name : experiments) {
    if (!app.got_subcommand(name)) continue;
    char checksum[17] = {0};
    const dl_status st = dl_run_config(run.config.c_str(), name, run.out.empty() ? nullptr : run.out.c_str(),
                                       run.grid_scale, run.has_seed, run.seed, checksum, sizeof checksum);
    if (st == DL_OK) std::printf("%s: done (config %s)\n", name, checksum);
    return report(st);
  }
  return 1;
}
