#include "degenlab/degenlab.h"

#include <algorithm>
#include <cstring>
#include <optional>
#include <exception>
#include <sstream>
#include <string>

#include "degenlab/cli_reports.hpp"
#include "degenlab/sturm_shooting.hpp"
#include "degenlab/irregularity_spectrum.hpp"

struct dl_profile {
  degenlab::CoefficientProfile profile;
};

struct dl_torus {
  degenlab::DiscreteOperator op;
};

namespace {

thread_local std::string last_error;

dl_status status_for(degenlab::ErrorKind kind) {
  using degenlab::ErrorKind;
  switch (kind) {
    case ErrorKind::parameter: return DL_ERR_PARAMETER;
    case ErrorKind::degenerate_profile: return DL_ERR_DEGENERATE_PROFILE;
    case ErrorKind::resolution: return DL_ERR_RESOLUTION;
    case ErrorKind::overflow: return DL_ERR_OVERFLOW;
    case ErrorKind::not_eigenvalue: return DL_ERR_NOT_EIGENVALUE;
    case ErrorKind::resonance: return DL_ERR_RESONANCE;
    case ErrorKind::truncation: return DL_ERR_TRUNCATION;
    case ErrorKind::solver: return DL_ERR_SOLVER;
    case ErrorKind::config: return DL_ERR_CONFIG;
    case ErrorKind::io: return DL_ERR_IO;
    case ErrorKind::schema: return DL_ERR_SCHEMA;
  }
  return DL_ERR_INTERNAL;
}

// No exception crosses the C boundary.
template <class F>
dl_status guard(F&& body) noexcept {
  try {
    body();
    return DL_OK;
  } catch (const degenlab::Error& e) {
    last_error = e.what();
    return status_for(e.kind());
  } catch (const std::exception& e) {
    last_error = e.what();
    return DL_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown exception";
    return DL_ERR_INTERNAL;
  }
}

dl_status null_argument(const char* name) {
  last_error = std::string("null argument: ") + name;
  return DL_ERR_PARAMETER;
}

}  // namespace

extern "C" {

const char* dl_version(void) { return "1.0.0"; }

const char* dl_last_error(void) { return last_error.c_str(); }

const char* dl_status_name(dl_status status) {
  switch (status) {
    case DL_OK: return "ok";
    case DL_ERR_INTERNAL: return "internal";
    default: break;
  }
  for (int k = 0; k <= static_cast<int>(degenlab::ErrorKind::schema); ++k) {
    const auto kind = static_cast<degenlab::ErrorKind>(k);
    if (status_for(kind) == status) return degenlab::to_string(kind);
  }
  return "unknown";
}

int dl_exit_code(dl_status status) {
  if (status == DL_OK) return degenlab::kExitOk;
  for (int k = 0; k <= static_cast<int>(degenlab::ErrorKind::schema); ++k) {
    const auto kind = static_cast<degenlab::ErrorKind>(k);
    if (status_for(kind) == status) return degenlab::exit_code_for(kind);
  }
  return degenlab::kExitOther;
}

dl_status dl_profile_create(dl_profile_kind kind, const double* alpha, size_t n_alpha, const double* beta,
                            size_t n_beta, int m, dl_profile** out) {
  if (!out) return null_argument("out");
  if (!alpha && n_alpha) return null_argument("alpha");
  if (!beta && n_beta) return null_argument("beta");
  *out = nullptr;
  return guard([&] {
    degenlab::ProfileParams p;
    p.alpha.assign(alpha, alpha + n_alpha);
    p.beta.assign(beta, beta + n_beta);
    p.m = m;
    if (kind < DL_PROFILE_CONSTANT || kind > DL_PROFILE_TABULATED)
      degenlab::fail(degenlab::ErrorKind::parameter, "unknown profile kind");
    *out = new dl_profile{degenlab::make_profile(static_cast<degenlab::ProfileKind>(kind), p)};
  });
}

void dl_profile_destroy(dl_profile* profile) { delete profile; }

dl_status dl_profile_sigma(const dl_profile* profile, size_t max_count, double w_max, double* s_out, size_t capacity,
                           size_t* count, double* s0) {
  if (!profile) return null_argument("profile");
  if (!count) return null_argument("count");
  if (!s_out && capacity) return null_argument("s_out");
  return guard([&] {
    const auto scan = degenlab::find_sigma0(profile->profile, w_max, max_count);
    if (scan.roots.empty()) degenlab::fail(degenlab::ErrorKind::solver, "no Dirichlet value found below w_max");
    const auto rep = degenlab::compute_sigma(scan.roots, profile->profile.fingerprint());
    *count = rep.sigma.size();
    for (size_t k = 0; k < rep.sigma.size() && k < capacity; ++k) s_out[k] = rep.sigma[k];
    if (s0) *s0 = rep.s0;
  });
}

dl_status dl_torus_create(const dl_profile* profile, double period_x, double period_t, int nx, int nt,
                          dl_torus_variant variant, dl_torus** out) {
  if (!profile) return null_argument("profile");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guard([&] {
    if (variant != DL_TORUS_INVERTIBLE && variant != DL_TORUS_DIFFUSION)
      degenlab::fail(degenlab::ErrorKind::parameter, "unknown torus variant");
    const auto v = variant == DL_TORUS_INVERTIBLE ? degenlab::TorusVariant::invertible : degenlab::TorusVariant::diffusion;
    *out = new dl_torus{degenlab::assemble(degenlab::extend_to_torus(profile->profile, period_x, period_t, {nx, nt}, v))};
  });
}

void dl_torus_destroy(dl_torus* torus) { delete torus; }

dl_status dl_torus_size(const dl_torus* torus, size_t* n) {
  if (!torus) return null_argument("torus");
  if (!n) return null_argument("n");
  *n = torus->op.size();
  return DL_OK;
}

dl_status dl_torus_defects(const dl_torus* torus, double* symmetry, double* row_sum) {
  if (!torus) return null_argument("torus");
  return guard([&] {
    if (symmetry) *symmetry = torus->op.symmetry_defect();
    if (row_sum) *row_sum = torus->op.row_sum_defect();
  });
}

dl_status dl_torus_spectral_gap(const dl_torus* torus, double* lambda1) {
  if (!torus) return null_argument("torus");
  if (!lambda1) return null_argument("lambda1");
  return guard([&] { *lambda1 = degenlab::spectral_gap_check(torus->op).lambda1; });
}

dl_status dl_torus_write_triplets(const dl_torus* torus, const char* path) {
  if (!torus) return null_argument("torus");
  if (!path) return null_argument("path");
  return guard([&] { degenlab::write_triplets(torus->op, path); });
}

dl_status dl_run_config(const char* config_path, const char* experiment, const char* out_dir, int grid_scale,
                        int has_seed, uint64_t seed, char* checksum, size_t checksum_size) {
  if (!config_path) return null_argument("config_path");
  return guard([&] {
    std::optional<degenlab::ExperimentKind> kind;
    if (experiment) {
      kind = degenlab::experiment_from_string(experiment);
      if (!kind) degenlab::fail(degenlab::ErrorKind::config, std::string("unknown experiment '") + experiment + "'");
    }
    const auto cfg = degenlab::load_config(config_path, kind);
    degenlab::RunOptions opt;
    if (out_dir) opt.out_dir = out_dir;
    opt.grid_scale = grid_scale;
    if (has_seed) opt.seed = seed;
    const auto result = degenlab::run_experiment(cfg, opt);
    if (checksum && checksum_size) {
      const auto n = std::min(checksum_size - 1, result.config_checksum.size());
      std::memcpy(checksum, result.config_checksum.data(), n);
      checksum[n] = '\0';
    }
  });
}

dl_status dl_plot(const char* report_csv, const char* kind, const char* svg_path) {
  if (!report_csv) return null_argument("report_csv");
  if (!svg_path) return null_argument("svg_path");
  return guard([&] { degenlab::plot_report(report_csv, kind ? kind : "auto", svg_path); });
}

dl_status dl_selftest(const char* golden_dir, dl_line_callback on_line, void* user, int* passed) {
  if (!passed) return null_argument("passed");
  return guard([&] {
    std::ostringstream log;
    *passed = degenlab::selftest(golden_dir ? golden_dir : "", log) ? 1 : 0;
    if (on_line) {
      std::istringstream is(log.str());
      std::string line;
      while (std::getline(is, line)) on_line(line.c_str(), user);
    }
  });
}

}  // extern "C"
