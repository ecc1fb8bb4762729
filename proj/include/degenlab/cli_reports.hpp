#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "degenlab/coefficient_models.hpp"
#include "degenlab/torus_lab.hpp"

namespace degenlab {

enum class ExperimentKind { spectrum, model, singular, probe, heat };

const char* to_string(ExperimentKind kind) noexcept;
std::optional<ExperimentKind> experiment_from_string(std::string_view name);

struct ProfileSection {
  ProfileKind kind = ProfileKind::constant;
  std::vector<double> alpha{1.0};
  std::vector<double> beta{0.0};
  int m = 1;
};

struct TorusSection {
  double period_x = 2.0;
  double period_t = 1.0;
  int nx = 64;
  int nt = 1024;
};

struct SpectrumParams {
  std::size_t count = 3;
  double w_max = 200.0;
};

struct ModelParams {
  double s = 1.0;
  int nx = 129;
  int ntau = 4096;
  double u_min = -20.0;
  double u_max = 14.0;
  double tail_min = 10.0;
  double tail_max = 100.0;
};

struct SingularParams {
  std::size_t j = 0;
  double t1 = 0.5;
  double t2 = 1.0;
  std::vector<double> r_values;  ///< empty: 0.25-spaced grid below gamma + 1
  double xi_min = 1e2;
  double xi_max = 1e8;
  int points = 61;
};

struct ProbeParams {
  std::vector<double> s_values{0.0, 1.0, 2.0};
  std::optional<double> s_shift = 0.5;  ///< also probes s0 + shift
  std::vector<double> eps_values{0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625};
};

struct HeatParams {
  std::vector<double> s_values{0.0, 1.0, 2.0};
  std::optional<double> s_shift = 0.5;
  double eps = 0.125;
  double dt = 0.01;
  double tau_max = 2.0;
  HeatScheme scheme = HeatScheme::implicit_euler;
  bool random_data = false;  ///< seeded random mean-zero data instead of the squeezed bump
  bool control = true;       ///< also run the constant-coefficient control
};

struct OutputSection {
  std::string dir = "out";
  bool csv = true;
  bool json = true;
  bool plot = true;
};

/// Parsed experiment configuration. See README for the grammar; every key
/// is optional and defaults to the values above.
struct ExperimentConfig {
  ProfileSection profile;
  TorusSection torus;
  ExperimentKind experiment = ExperimentKind::spectrum;
  SpectrumParams spectrum;
  ModelParams model;
  SingularParams singular;
  ProbeParams probe;
  HeatParams heat;
  OutputSection output;
  std::uint64_t seed = 1;
  std::string source;
  std::string text_checksum;  ///< FNV-1a of the raw text
};

/// Parses INI-style text. `selected` is the experiment chosen on the
/// command line; it must agree with [experiment] type when both are given.
/// Throws config with "<source>:<line>: ..." diagnostics for unknown
/// sections or keys, duplicates, malformed values and out-of-range numbers.
ExperimentConfig parse_config(std::string_view text, const std::string& source = "<config>",
                              std::optional<ExperimentKind> selected = std::nullopt);
ExperimentConfig load_config(const std::filesystem::path& path, std::optional<ExperimentKind> selected = std::nullopt);

struct RunOptions {
  std::filesystem::path out_dir;  ///< empty: the [output] dir of the config
  int grid_scale = 1;             ///< power of two in [1, 16]
  std::optional<std::uint64_t> seed;
};

struct RunResult {
  std::filesystem::path out_dir;
  std::vector<std::string> files;  ///< relative names, sorted, manifest last
  std::string config_checksum;
};

/// Runs the selected pipeline and writes reports, plots and manifest.json.
/// Output is a pure function of the config, grid scale and seed.
RunResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

/// Process exit status for an error category: 2 config, 3 resonance,
/// 4 solver, 5 io, 1 anything else.
int exit_code_for(ErrorKind kind) noexcept;
inline constexpr int kExitOk = 0;
inline constexpr int kExitOther = 1;

/// Renders a report CSV written by run_experiment as SVG. `kind` is the
/// report schema (heat_run, regularity_probe, sobolev_scan, tau_decay,
/// gevrey_scan, spectrum) or "auto". Throws schema on an unknown or
/// mismatching schema.
void plot_report(const std::filesystem::path& report, const std::string& kind, const std::filesystem::path& svg);

/// Fast internal consistency checks, then (when golden_dir is nonempty)
/// reruns every pinned *.ini in golden_dir and compares each pinned CSV
/// byte for byte. Writes one line per check to `log`.
bool selftest(const std::filesystem::path& golden_dir, std::ostream& log);

}  // namespace degenlab
