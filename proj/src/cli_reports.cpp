#include "degenlab/cli_reports.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include "json.hpp"
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "degenlab/irregularity_spectrum.hpp"
#include "degenlab/mellin_solver.hpp"
#include "degenlab/singular_solutions.hpp"
#include "degenlab/sturm_shooting.hpp"

namespace degenlab {

namespace {

using Json = nlohmann::ordered_json;

// --- config parsing ----------------------------------------------------------

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

struct Entry {
  std::string value;
  int line = 0;
};

struct ConfigContext {
  const std::string& source;
  [[noreturn]] void error(int line, const std::string& msg) const {
    fail(ErrorKind::config, source + ":" + std::to_string(line) + ": " + msg);
  }
};

double parse_number(const ConfigContext& ctx, const std::string& key, const Entry& e) {
  double v = 0;
  const char* b = e.value.data();
  const char* end = b + e.value.size();
  const auto [ptr, ec] = std::from_chars(b, end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v))
    ctx.error(e.line, "key '" + key + "' expects a finite number, got '" + e.value + "'");
  return v;
}

long long parse_integer(const ConfigContext& ctx, const std::string& key, const Entry& e) {
  long long v = 0;
  const char* b = e.value.data();
  const char* end = b + e.value.size();
  const auto [ptr, ec] = std::from_chars(b, end, v);
  if (ec != std::errc() || ptr != end) ctx.error(e.line, "key '" + key + "' expects an integer, got '" + e.value + "'");
  return v;
}

bool parse_bool(const ConfigContext& ctx, const std::string& key, const Entry& e) {
  if (e.value == "true" || e.value == "yes" || e.value == "1") return true;
  if (e.value == "false" || e.value == "no" || e.value == "0") return false;
  ctx.error(e.line, "key '" + key + "' expects true or false, got '" + e.value + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(v);
  while (std::getline(is, item, ',')) out.push_back(trim(item));
  return out;
}

std::vector<double> parse_list(const ConfigContext& ctx, const std::string& key, const Entry& e) {
  std::vector<double> out;
  for (const auto& item : split_list(e.value)) out.push_back(parse_number(ctx, key, Entry{item, e.line}));
  if (out.empty()) ctx.error(e.line, "key '" + key + "' expects a nonempty comma-separated list");
  return out;
}

void check_range(const ConfigContext& ctx, const std::string& key, const Entry& e, double v, double lo, double hi,
                 bool open_lo = false) {
  if (v > hi || v < lo || (open_lo && v == lo)) {
    std::ostringstream msg;
    msg << "key '" << key << "' = " << e.value << " outside " << (open_lo ? "(" : "[") << lo << ", " << hi << "]";
    ctx.error(e.line, msg.str());
  }
}

using Section = std::map<std::string, Entry>;

/// Consumes known keys; anything left over is reported as unknown.
class SectionReader {
 public:
  SectionReader(const ConfigContext& ctx, std::string name, Section entries)
      : ctx_(ctx), name_(std::move(name)), entries_(std::move(entries)) {}

  const Entry* take(const std::string& key) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return nullptr;
    taken_.insert(key);
    return &it->second;
  }
  double number(const std::string& key, double current, double lo, double hi, bool open_lo = false) {
    const Entry* e = take(key);
    if (!e) return current;
    const double v = parse_number(ctx_, key, *e);
    check_range(ctx_, key, *e, v, lo, hi, open_lo);
    return v;
  }
  long long integer(const std::string& key, long long current, long long lo, long long hi) {
    const Entry* e = take(key);
    if (!e) return current;
    const long long v = parse_integer(ctx_, key, *e);
    check_range(ctx_, key, *e, static_cast<double>(v), static_cast<double>(lo), static_cast<double>(hi));
    return v;
  }
  bool boolean(const std::string& key, bool current) {
    const Entry* e = take(key);
    return e ? parse_bool(ctx_, key, *e) : current;
  }
  std::vector<double> list(const std::string& key, std::vector<double> current, double lo, double hi) {
    const Entry* e = take(key);
    if (!e) return current;
    auto v = parse_list(ctx_, key, *e);
    for (double x : v) check_range(ctx_, key, *e, x, lo, hi);
    return v;
  }
  int line_of(const std::string& key) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? 0 : it->second.line;
  }
  void finish() const {
    for (const auto& [key, e] : entries_)
      if (!taken_.count(key)) ctx_.error(e.line, "unknown key '" + key + "' in [" + name_ + "]");
  }
  const ConfigContext& ctx() const { return ctx_; }

 private:
  const ConfigContext& ctx_;
  std::string name_;
  Section entries_;
  std::set<std::string> taken_;
};

std::optional<double> read_shift(SectionReader& r, std::optional<double> current) {
  const Entry* e = r.take("s_shift");
  if (!e) return current;
  if (e->value == "none") return std::nullopt;
  const double v = parse_number(r.ctx(), "s_shift", *e);
  check_range(r.ctx(), "s_shift", *e, v, 0.0, 4.0);
  return v;
}

void require_decreasing(SectionReader& r, const std::string& key, const std::vector<double>& v) {
  for (std::size_t k = 1; k < v.size(); ++k)
    if (!(v[k] < v[k - 1])) r.ctx().error(r.line_of(key), "key '" + key + "' must be strictly decreasing");
}

void read_experiment(SectionReader& r, ExperimentKind kind, ExperimentConfig& cfg) {
  switch (kind) {
    case ExperimentKind::spectrum:
      cfg.spectrum.count = static_cast<std::size_t>(r.integer("count", 3, 1, 50));
      cfg.spectrum.w_max = r.number("w_max", cfg.spectrum.w_max, 0.0, 1e5, true);
      break;
    case ExperimentKind::model: {
      auto& m = cfg.model;
      m.s = r.number("s", m.s, 0.0, 8.0, true);
      m.nx = static_cast<int>(r.integer("nx", m.nx, 65, 4097));
      if (m.nx % 2 == 0) r.ctx().error(r.line_of("nx"), "key 'nx' must be odd");
      m.ntau = static_cast<int>(r.integer("ntau", m.ntau, 256, 65536));
      if (!std::has_single_bit(static_cast<unsigned>(m.ntau)))
        r.ctx().error(r.line_of("ntau"), "key 'ntau' must be a power of two");
      m.u_min = r.number("u_min", m.u_min, -200.0, 200.0);
      m.u_max = r.number("u_max", m.u_max, -200.0, 200.0);
      if (!(m.u_min < m.u_max)) r.ctx().error(r.line_of("u_max"), "key 'u_max' must exceed u_min");
      m.tail_min = r.number("tail_min", m.tail_min, 0.0, 1e6, true);
      m.tail_max = r.number("tail_max", m.tail_max, 0.0, 1e6, true);
      if (!(m.tail_min < m.tail_max)) r.ctx().error(r.line_of("tail_max"), "key 'tail_max' must exceed tail_min");
      break;
    }
    case ExperimentKind::singular: {
      auto& s = cfg.singular;
      s.j = static_cast<std::size_t>(r.integer("j", 0, 0, 20));
      s.t1 = r.number("t1", s.t1, 0.0, 4.0, true);
      s.t2 = r.number("t2", s.t2, 0.0, 4.0, true);
      if (!(s.t1 < s.t2)) r.ctx().error(r.line_of("t2"), "key 't2' must exceed t1");
      s.r_values = r.list("r_values", s.r_values, 0.0, 9.0);
      s.xi_min = r.number("xi_min", s.xi_min, 0.0, 1e12, true);
      s.xi_max = r.number("xi_max", s.xi_max, 0.0, 1e12, true);
      if (!(s.xi_min < s.xi_max)) r.ctx().error(r.line_of("xi_max"), "key 'xi_max' must exceed xi_min");
      s.points = static_cast<int>(r.integer("points", s.points, 8, 1000));
      break;
    }
    case ExperimentKind::probe: {
      auto& p = cfg.probe;
      p.s_values = r.list("s_values", p.s_values, -4.0, 8.0);
      p.s_shift = read_shift(r, p.s_shift);
      p.eps_values = r.list("eps_values", p.eps_values, 1e-6, 1.0);
      require_decreasing(r, "eps_values", p.eps_values);
      break;
    }
    case ExperimentKind::heat: {
      auto& h = cfg.heat;
      h.s_values = r.list("s_values", h.s_values, -4.0, 8.0);
      h.s_shift = read_shift(r, h.s_shift);
      h.eps = r.number("eps", h.eps, 0.0, 1.0, true);
      h.dt = r.number("dt", h.dt, 0.0, 1.0, true);
      h.tau_max = r.number("tau_max", h.tau_max, 0.0, 100.0, true);
      if (const Entry* e = r.take("scheme")) {
        if (e->value == "implicit_euler") h.scheme = HeatScheme::implicit_euler;
        else if (e->value == "crank_nicolson") h.scheme = HeatScheme::crank_nicolson;
        else r.ctx().error(e->line, "key 'scheme' must be implicit_euler or crank_nicolson");
      }
      if (const Entry* e = r.take("data")) {
        if (e->value == "bump") h.random_data = false;
        else if (e->value == "random") h.random_data = true;
        else r.ctx().error(e->line, "key 'data' must be bump or random");
      }
      h.control = r.boolean("control", h.control);
      break;
    }
  }
}

// --- reports -----------------------------------------------------------------

std::string report_line(const std::string& schema, const std::string& checksum) {
  return "# report schema=" + schema + " config=" + checksum + "\n";
}

Json number_array(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(x);
  return a;
}

Json string_array(const std::vector<std::string>& v) {
  Json a = Json::array();
  for (const auto& x : v) a.push_back(x);
  return a;
}

class OutputDir {
 public:
  OutputDir(std::filesystem::path dir, std::string checksum) : dir_(std::move(dir)), checksum_(std::move(checksum)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) fail(ErrorKind::io, "cannot create output directory " + dir_.string() + ": " + ec.message());
  }
  void write(const std::string& name, const std::string& content) {
    std::ofstream os(dir_ / name, std::ios::binary);
    if (!os) fail(ErrorKind::io, "cannot open " + (dir_ / name).string() + " for writing");
    os << content;
    if (!os) fail(ErrorKind::io, "failed writing " + (dir_ / name).string());
    names_.push_back(name);
  }
  void write_json(const std::string& name, const Json& j) { write(name, j.dump(2) + "\n"); }
  void plot(const std::string& report, const std::string& schema, const std::string& svg) {
    plot_report(dir_ / report, schema, dir_ / svg);
    names_.push_back(svg);
  }
  const std::filesystem::path& dir() const { return dir_; }
  const std::string& checksum() const { return checksum_; }
  std::vector<std::string> names() const { return names_; }

 private:
  std::filesystem::path dir_;
  std::string checksum_;
  std::vector<std::string> names_;
};

std::string file_checksum(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  if (!is) fail(ErrorKind::io, "cannot read " + p.string());
  const std::string bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return hex64(fnv1a(bytes));
}

CoefficientProfile build_profile(const ExperimentConfig& cfg) {
  return make_profile(cfg.profile.kind, {cfg.profile.alpha, cfg.profile.beta, cfg.profile.m});
}

std::vector<double> with_shift(std::vector<double> s, const std::optional<double>& shift, double s0) {
  if (shift) {
    const double v = s0 + *shift;
    if (!(v <= 8.0)) fail(ErrorKind::config, "s0 + s_shift exceeds the Sobolev index range [-4, 8]");
    if (std::find(s.begin(), s.end(), v) == s.end()) s.push_back(v);
  }
  return s;
}

SpectrumReport spectrum_of(const CoefficientProfile& profile, std::size_t count, double w_max) {
  const auto scan = find_sigma0(profile, w_max, count);
  if (scan.roots.empty()) fail(ErrorKind::solver, "no Dirichlet value found below w_max");
  auto rep = compute_sigma(scan.roots, profile.fingerprint());
  for (const auto& w : scan.warnings) rep.warnings.push_back(w);
  return rep;
}

Json header_json(const ExperimentConfig& cfg, const CoefficientProfile& profile, const std::string& checksum) {
  Json j;
  j["experiment"] = to_string(cfg.experiment);
  j["config_checksum"] = checksum;
  j["profile"] = profile.describe();
  j["seed"] = cfg.seed;
  return j;
}

void run_spectrum(const ExperimentConfig& cfg, OutputDir& out) {
  const auto profile = build_profile(cfg);
  const auto rep = spectrum_of(profile, cfg.spectrum.count, cfg.spectrum.w_max);
  Json j = header_json(cfg, profile, out.checksum());
  j["sigma0"] = number_array(rep.sigma0);
  j["sigma"] = number_array(rep.sigma);
  j["s0"] = rep.s0;
  j["zero_membership_flag"] = rep.zero_membership_flag;
  j["nonreal_pair_count"] = rep.nonreal_pair_count;
  j["warnings"] = string_array(rep.warnings);
  if (cfg.output.json) out.write_json("spectrum.json", j);
  if (cfg.output.csv) {
    std::ostringstream os;
    os << report_line("spectrum", out.checksum()) << "k,w,s\n";
    for (std::size_t k = 0; k < rep.sigma.size(); ++k)
      os << k << ',' << format_double(rep.sigma0[rep.source[k]]) << ',' << format_double(rep.sigma[k]) << '\n';
    out.write("spectrum.csv", os.str());
    if (cfg.output.plot) out.plot("spectrum.csv", "spectrum", "spectrum.svg");
  }
}

void run_model(const ExperimentConfig& cfg, int scale, OutputDir& out) {
  const auto profile = build_profile(cfg);
  const auto& m = cfg.model;
  const StripGrid grid{(m.nx - 1) * scale + 1, m.ntau * scale, m.u_min, m.u_max};
  grid.validate();
  // sin(pi (x + 1) / 2) |t|^{-1/2} min(|t|, 1/|t|)^2: algebraic decay in tau
  const auto f = StripField::sample(grid, [](double x, double t) {
    const double a = std::abs(t);
    return Complex(std::sin(std::numbers::pi * (x + 1) / 2) / std::sqrt(a) * std::pow(std::min(a, 1 / a), 2));
  });
  const auto spectrum = spectrum_for_exponent(profile, m.s);
  const ModelSolveOptions opts{1e-4, spectrum};
  const auto u = solve_model_dirichlet(profile, m.s, f, opts);
  const auto decay = tau_decay_report(profile, m.s, f, m.tail_min, m.tail_max, opts);
  Json j = header_json(cfg, profile, out.checksum());
  j["s"] = m.s;
  j["distance_to_sigma"] = distance_to_sigma(spectrum, m.s);
  j["residual"] = model_residual(profile, m.s, u, f);
  j["solution_norm"] = std::sqrt(u.norm_sq());
  j["data_norm"] = std::sqrt(f.norm_sq());
  j["tail_slope"] = decay.tail_slope;
  j["decay_constant"] = decay.constant;
  j["grid"] = {{"nx", grid.nx}, {"ntau", grid.ntau}, {"u_min", grid.u_min}, {"u_max", grid.u_max}};
  if (cfg.output.json) out.write_json("model.json", j);
  if (cfg.output.csv) {
    std::ostringstream os;
    os << report_line("tau_decay", out.checksum()) << "tau,ratio\n";
    for (const auto& row : decay.rows) os << format_double(row.tau) << ',' << format_double(row.ratio) << '\n';
    out.write("tau_decay.csv", os.str());
    if (cfg.output.plot) out.plot("tau_decay.csv", "tau_decay", "tau_decay.svg");
  }
}

void run_singular(const ExperimentConfig& cfg, OutputDir& out) {
  const auto profile = build_profile(cfg);
  const auto& p = cfg.singular;
  const CutoffParams cutoff{p.t1, p.t2};
  Json j = header_json(cfg, profile, out.checksum());
  const StripGrid grid{129, 2048, -14.0, 0.5};
  if (profile.m() == 1) {
    const auto sol = build_singular(profile, p.j, cutoff);
    std::vector<double> r = p.r_values;
    if (r.empty())
      for (double v = 0.25; v < sol.gamma + 1; v += 0.25) r.push_back(v);
    const auto scan = sobolev_scan(sol, r, default_cutoffs());
    const auto res = residual_check(profile, sol, grid);
    j["gamma"] = sol.gamma;
    j["w"] = sol.w;
    j["s_hat"] = scan.threshold;
    j["threshold_slope"] = scan.threshold_slope;
    j["tail_exponent"] = scan.tail_exponent;
    j["predicted_tail_exponent"] = -(sol.gamma + 0.5);
    j["core_residual"] = res.core_residual;
    j["identity_error"] = res.identity_error;
    j["growth_exponent"] = number_array(scan.growth_exponent);
    j["warnings"] = string_array(scan.warnings);
    if (cfg.output.json) out.write_json("singular.json", j);
    if (cfg.output.csv) {
      std::ostringstream os;
      os << report_line("sobolev_scan", out.checksum()) << "r,cutoff,norm\n";
      for (std::size_t i = 0; i < scan.r_values.size(); ++i)
        for (std::size_t c = 0; c < scan.cutoffs.size(); ++c)
          os << format_double(scan.r_values[i]) << ',' << format_double(scan.cutoffs[c]) << ','
             << format_double(scan.norms[i][c]) << '\n';
      out.write("sobolev_scan.csv", os.str());
      if (cfg.output.plot) out.plot("sobolev_scan.csv", "sobolev_scan", "sobolev_scan.svg");
    }
  } else {
    const auto sol = higher_order_singular(profile, profile.m(), p.j, cutoff);
    const auto gev = gevrey_scan(sol, p.xi_min, p.xi_max, p.points);
    const auto res = residual_check(profile, sol, grid);
    j["lambda"] = sol.lambda;
    j["w"] = sol.w;
    j["m"] = sol.m;
    j["derivative_ladder"] = number_array(derivative_ladder(sol));
    j["core_residual"] = res.core_residual;
    j["kappa"] = gev.kappa;
    j["r_hat"] = gev.r_hat;
    j["predicted_r"] = gev.predicted_r;
    j["note"] = gev.note;
    if (cfg.output.json) out.write_json("singular.json", j);
    if (cfg.output.csv) {
      std::ostringstream os;
      os << report_line("gevrey_scan", out.checksum()) << "xi,log_abs\n";
      for (std::size_t k = 0; k < gev.xi.size(); ++k)
        os << format_double(gev.xi[k]) << ',' << format_double(gev.log_abs[k]) << '\n';
      out.write("gevrey_scan.csv", os.str());
      if (cfg.output.plot) out.plot("gevrey_scan.csv", "gevrey_scan", "gevrey_scan.svg");
    }
  }
}

TorusOperatorSpec torus_spec(const ExperimentConfig& cfg, const CoefficientProfile& profile, int scale,
                             TorusVariant variant) {
  const auto& t = cfg.torus;
  return extend_to_torus(profile, t.period_x, t.period_t, {t.nx * scale, t.nt * scale}, variant);
}

Json growth_json(const GrowthReport& g) {
  Json w = Json::array();
  for (const auto& win : g.windows) w.push_back({win.start, win.end});
  return {{"s", g.s}, {"max_slope", g.max_slope}, {"longest_window", g.longest_window}, {"windows", w}};
}

void run_probe(const ExperimentConfig& cfg, int scale, OutputDir& out) {
  const auto profile = build_profile(cfg);
  const double s0 = spectrum_of(profile, 1, 200.0).s0;
  const auto s_values = with_shift(cfg.probe.s_values, cfg.probe.s_shift, s0);
  const auto op = assemble(torus_spec(cfg, profile, scale, TorusVariant::invertible));
  const auto rep = regularity_probe(op, probe_bump, s_values, cfg.probe.eps_values);
  Json j = header_json(cfg, profile, out.checksum());
  j["s0"] = s0;
  j["grid"] = {{"nx", rep.nx}, {"nt", rep.nt}};
  j["s_values"] = number_array(rep.s_values);
  j["eps_values"] = number_array(rep.eps_values);
  j["skipped_eps"] = number_array(rep.skipped_eps);
  j["input_exponent"] = number_array(rep.input_exponent);
  Json spread = Json::array();
  for (const auto& r : rep.ratios)
    spread.push_back(r.empty() ? 0.0 : *std::max_element(r.begin(), r.end()) / *std::min_element(r.begin(), r.end()));
  j["ratio_spread"] = spread;
  j["warnings"] = string_array(rep.warnings);
  if (cfg.output.json) out.write_json("probe.json", j);
  if (cfg.output.csv) {
    std::ostringstream os;
    os << report_line("regularity_probe", out.checksum());
    write_probe_csv(rep, os);
    out.write("probe.csv", os.str());
    if (cfg.output.plot) out.plot("probe.csv", "regularity_probe", "probe.svg");
  }
}

void run_heat(const ExperimentConfig& cfg, int scale, OutputDir& out) {
  const auto profile = build_profile(cfg);
  const double s0 = spectrum_of(profile, 1, 200.0).s0;
  const auto& h = cfg.heat;
  HeatOptions opt;
  opt.dt = h.dt;
  opt.tau_max = h.tau_max;
  opt.scheme = h.scheme;
  opt.s_values = with_shift(h.s_values, h.s_shift, s0);
  const double eps = h.eps;
  auto data = [&](const TorusOperatorSpec& spec) {
    if (h.random_data) {
      std::mt19937_64 rng(cfg.seed);
      std::uniform_real_distribution<double> d(-1.0, 1.0);
      return TorusField::sample(spec, [&](double, double) { return d(rng); }).minus_mean();
    }
    return TorusField::sample(spec, [eps](double x, double t) { return probe_bump(x, t / eps); }).minus_mean();
  };
  const auto spec = torus_spec(cfg, profile, scale, TorusVariant::diffusion);
  const auto op = assemble(spec);
  const auto run = heat_evolve(op, data(spec), opt);
  const auto gap = spectral_gap_check(op);
  Json j = header_json(cfg, profile, out.checksum());
  j["s0"] = s0;
  j["scheme"] = to_string(run.scheme);
  j["dt"] = run.dt;
  j["grid"] = {{"nx", spec.grid().nx}, {"nt", spec.grid().nt}};
  j["lambda1"] = gap.lambda1;
  j["decay_rate"] = decay_rate(run);
  j["max_l2_increase"] = run.max_l2_increase;
  j["mean_drift"] = run.mean_drift;
  Json growth = Json::array();
  for (double s : opt.s_values) growth.push_back(growth_json(growth_scan(run, s)));
  j["growth"] = growth;

  std::optional<HeatRun> control;
  if (h.control) {
    const auto cspec = make_elliptic_torus(spec.period_x(), spec.period_t(), spec.grid(), TorusVariant::diffusion);
    control = heat_evolve(assemble(cspec), data(cspec), opt);
    Json cg = Json::array();
    for (double s : opt.s_values) cg.push_back(growth_json(growth_scan(*control, s)));
    j["control_growth"] = cg;
  }
  if (cfg.output.json) out.write_json("heat.json", j);
  if (cfg.output.csv) {
    std::ostringstream os;
    os << report_line("heat_run", out.checksum());
    write_heat_csv(run, os);
    out.write("heat.csv", os.str());
    if (cfg.output.plot) out.plot("heat.csv", "heat_run", "heat.svg");
    if (control) {
      std::ostringstream cs;
      cs << report_line("heat_run", out.checksum());
      write_heat_csv(*control, cs);
      out.write("heat_control.csv", cs.str());
      if (cfg.output.plot) out.plot("heat_control.csv", "heat_run", "heat_control.svg");
    }
  }
}

// --- plotting ------------------------------------------------------------------

struct Series {
  std::string name;
  std::vector<double> x, y;
};

struct ReportTable {
  std::string schema;
  std::string checksum;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

ReportTable read_report(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorKind::io, "cannot read report " + path.string());
  ReportTable t;
  std::string line;
  if (!std::getline(is, line) || line.rfind("# report schema=", 0) != 0)
    fail(ErrorKind::schema, path.string() + ": not a report written by this tool");
  std::istringstream meta(line.substr(2));
  std::string kv;
  while (meta >> kv) {
    if (kv.rfind("schema=", 0) == 0) t.schema = kv.substr(7);
    if (kv.rfind("config=", 0) == 0) t.checksum = kv.substr(7);
  }
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (t.columns.empty()) {
      t.columns = split_list(line);
      continue;
    }
    std::vector<double> row;
    for (const auto& cell : split_list(line)) {
      double v = 0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size())
        fail(ErrorKind::schema, path.string() + ": non-numeric cell '" + cell + "'");
      row.push_back(v);
    }
    if (row.size() != t.columns.size()) fail(ErrorKind::schema, path.string() + ": ragged row");
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::vector<Series> group_by(const ReportTable& t, std::size_t key, std::size_t xcol, std::size_t ycol,
                             const std::string& label) {
  std::vector<Series> out;
  for (const auto& row : t.rows) {
    const std::string name = label + "=" + format_double(row[key]);
    if (out.empty() || out.back().name != name) out.push_back({name, {}, {}});
    out.back().x.push_back(row[xcol]);
    out.back().y.push_back(row[ycol]);
  }
  return out;
}

struct PlotSpec {
  std::string title, xlabel, ylabel;
  std::vector<Series> series;
};

PlotSpec plot_spec(const ReportTable& t) {
  auto col = [&](const std::string& name) {
    const auto it = std::find(t.columns.begin(), t.columns.end(), name);
    if (it == t.columns.end()) fail(ErrorKind::schema, "report " + t.schema + " lacks column '" + name + "'");
    return static_cast<std::size_t>(it - t.columns.begin());
  };
  PlotSpec p;
  if (t.schema == "heat_run") {
    p = {"Sobolev norms along the heat flow", "tau", "norm", {}};
    const std::size_t tau = col("tau");
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      if (t.columns[c].rfind("H^", 0) != 0) continue;
      Series s{"s=" + t.columns[c].substr(2), {}, {}};
      for (const auto& row : t.rows) {
        s.x.push_back(row[tau]);
        s.y.push_back(row[c]);
      }
      p.series.push_back(std::move(s));
    }
  } else if (t.schema == "regularity_probe") {
    p = {"Solution-to-data norm ratio", "eps", "ratio", group_by(t, col("s"), col("eps"), col("ratio"), "s")};
  } else if (t.schema == "sobolev_scan") {
    p = {"Truncated Sobolev norms", "cutoff", "norm", group_by(t, col("r"), col("cutoff"), col("norm"), "r")};
  } else if (t.schema == "tau_decay") {
    Series s{"ratio", {}, {}};
    for (const auto& row : t.rows) {
      s.x.push_back(std::sqrt(1 + row[col("tau")] * row[col("tau")]));
      s.y.push_back(row[col("ratio")]);
    }
    p = {"Per-frequency solution gain", "<tau>", "ratio", {s}};
  } else if (t.schema == "gevrey_scan") {
    Series s{"-log|h^|", {}, {}};
    for (const auto& row : t.rows) {
      s.x.push_back(row[col("xi")]);
      s.y.push_back(-row[col("log_abs")]);
    }
    p = {"Fourier decay of the exponential profile", "xi", "-log|h^(xi)|", {s}};
  } else if (t.schema == "spectrum") {
    Series s{"s_k", {}, {}};
    for (const auto& row : t.rows) {
      s.x.push_back(row[col("k")]);
      s.y.push_back(row[col("s")]);
    }
    p = {"Exceptional Sobolev indices", "k", "s_k", {s}};
  } else {
    fail(ErrorKind::schema, "unknown report schema '" + t.schema + "'");
  }
  return p;
}

std::string fmt(double v, const char* f = "%.2f") {
  char buf[48];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

struct Axis {
  bool log = false;
  double lo = 0, hi = 1;
  double map(double v, double a, double b) const {
    const double r = log ? (std::log10(v) - std::log10(lo)) / (std::log10(hi) - std::log10(lo)) : (v - lo) / (hi - lo);
    return a + r * (b - a);
  }
  std::vector<double> ticks() const {
    std::vector<double> out;
    if (log) {
      const int a = static_cast<int>(std::ceil(std::log10(lo) - 1e-12));
      const int b = static_cast<int>(std::floor(std::log10(hi) + 1e-12));
      const int step = std::max(1, (b - a) / 8 + 1);
      for (int k = a; k <= b; k += step) out.push_back(std::pow(10.0, k));
    } else {
      const double raw = (hi - lo) / 5;
      const double mag = std::pow(10.0, std::floor(std::log10(raw)));
      const double unit = raw / mag < 2 ? 2 * mag : (raw / mag < 5 ? 5 * mag : 10 * mag);
      for (double v = std::ceil(lo / unit) * unit; v <= hi + 1e-9 * unit; v += unit) out.push_back(v);
    }
    return out;
  }
};

/// Log scale when every value is positive and the data span at least two
/// decades.
Axis make_axis(const std::vector<Series>& series, bool use_x) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  bool positive = true;
  for (const auto& s : series)
    for (double v : use_x ? s.x : s.y) {
      if (!std::isfinite(v)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      positive = positive && v > 0;
    }
  Axis a;
  if (!std::isfinite(lo)) return a;
  a.log = positive && hi / lo >= 100.0;
  if (a.log) {
    a.lo = std::pow(10.0, std::floor(std::log10(lo)));
    a.hi = std::pow(10.0, std::ceil(std::log10(hi)));
  } else {
    const double pad = hi > lo ? 0.05 * (hi - lo) : std::max(1.0, std::abs(lo)) * 0.5;
    a.lo = lo - pad;
    a.hi = hi + pad;
  }
  return a;
}

std::string render_svg(const PlotSpec& p, const std::string& schema, const std::string& checksum) {
  constexpr double W = 720, H = 480, L = 80, R = 170, T = 40, B = 60;
  const Axis ax = make_axis(p.series, true), ay = make_axis(p.series, false);
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                  "#8c564b", "#e377c2", "#17becf", "#7f7f7f", "#bcbd22"};
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<!-- config-checksum: " << checksum << " schema: " << schema << " -->\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
     << ' ' << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << (L + (W - L - R) / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
     << xml_escape(p.title) << "</text>\n";
  os << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << (W - L - R) << "\" height=\"" << (H - T - B)
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  const char* tick_fmt_x = ax.log ? "%.0e" : "%g";
  const char* tick_fmt_y = ay.log ? "%.0e" : "%g";
  for (double v : ax.ticks()) {
    const double x = ax.map(v, L, W - R);
    os << "<line x1=\"" << fmt(x) << "\" y1=\"" << (H - B) << "\" x2=\"" << fmt(x) << "\" y2=\"" << (H - B + 5)
       << "\" stroke=\"black\"/><text x=\"" << fmt(x) << "\" y=\"" << (H - B + 20)
       << "\" text-anchor=\"middle\" font-size=\"11\">" << fmt(v, tick_fmt_x) << "</text>\n";
  }
  for (double v : ay.ticks()) {
    const double y = ay.map(v, H - B, T);
    os << "<line x1=\"" << (L - 5) << "\" y1=\"" << fmt(y) << "\" x2=\"" << L << "\" y2=\"" << fmt(y)
       << "\" stroke=\"black\"/><text x=\"" << (L - 8) << "\" y=\"" << fmt(y + 4)
       << "\" text-anchor=\"end\" font-size=\"11\">" << fmt(v, tick_fmt_y) << "</text>\n";
  }
  os << "<text x=\"" << (L + (W - L - R) / 2) << "\" y=\"" << (H - 15) << "\" text-anchor=\"middle\" font-size=\"13\">"
     << xml_escape(p.xlabel) << (ax.log ? " (log)" : "") << "</text>\n";
  os << "<text x=\"18\" y=\"" << (T + (H - T - B) / 2) << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 "
     << (T + (H - T - B) / 2) << ")\">" << xml_escape(p.ylabel) << (ay.log ? " (log)" : "") << "</text>\n";
  for (std::size_t k = 0; k < p.series.size(); ++k) {
    const auto& s = p.series[k];
    const char* color = palette[k % std::size(palette)];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      if ((ax.log && s.x[i] <= 0) || (ay.log && s.y[i] <= 0)) continue;
      os << fmt(ax.map(s.x[i], L, W - R)) << ',' << fmt(ay.map(s.y[i], H - B, T)) << ' ';
    }
    os << "\"/>\n";
    const double ly = T + 14 + 18 * static_cast<double>(k);
    os << "<line x1=\"" << (W - R + 12) << "\" y1=\"" << ly << "\" x2=\"" << (W - R + 36) << "\" y2=\"" << ly
       << "\" stroke=\"" << color << "\" stroke-width=\"2\"/><text x=\"" << (W - R + 42) << "\" y=\"" << (ly + 4)
       << "\" font-size=\"11\">" << xml_escape(s.name) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

// --- selftest ------------------------------------------------------------------

bool check_line(std::ostream& log, const std::string& name, bool ok, const std::string& detail) {
  log << (ok ? "PASS " : "FAIL ") << name << ": " << detail << '\n';
  return ok;
}

std::string read_all(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  if (!is) fail(ErrorKind::io, "cannot read " + p.string());
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

}  // namespace

// --- public --------------------------------------------------------------------

const char* to_string(ExperimentKind kind) noexcept {
  switch (kind) {
    case ExperimentKind::spectrum: return "spectrum";
    case ExperimentKind::model: return "model";
    case ExperimentKind::singular: return "singular";
    case ExperimentKind::probe: return "probe";
    case ExperimentKind::heat: return "heat";
  }
  return "unknown";
}

std::optional<ExperimentKind> experiment_from_string(std::string_view name) {
  for (auto k : {ExperimentKind::spectrum, ExperimentKind::model, ExperimentKind::singular, ExperimentKind::probe,
                 ExperimentKind::heat})
    if (name == to_string(k)) return k;
  return std::nullopt;
}

ExperimentConfig parse_config(std::string_view text, const std::string& source,
                              std::optional<ExperimentKind> selected) {
  const ConfigContext ctx{source};
  std::map<std::string, Section> sections;
  std::map<std::string, int> section_line;
  std::string current;  // "" holds top-level keys
  sections[current];
  std::istringstream is{std::string(text)};
  std::string raw;
  int line_no = 0;
  static const std::set<std::string> known{"profile", "torus", "experiment", "output"};
  while (std::getline(is, raw)) {
    ++line_no;
    const auto cut = raw.find_first_of("#;");
    const std::string line = trim(cut == std::string::npos ? raw : raw.substr(0, cut));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') ctx.error(line_no, "malformed section header '" + line + "'");
      current = trim(line.substr(1, line.size() - 2));
      if (!known.count(current)) ctx.error(line_no, "unknown section [" + current + "]");
      if (section_line.count(current)) ctx.error(line_no, "duplicate section [" + current + "]");
      section_line[current] = line_no;
      sections[current];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) ctx.error(line_no, "expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) ctx.error(line_no, "missing key before '='");
    if (value.empty()) ctx.error(line_no, "key '" + key + "' has no value");
    auto& sec = sections[current];
    if (sec.count(key))
      ctx.error(line_no, "duplicate key '" + key + "' (first set on line " + std::to_string(sec[key].line) + ")");
    sec[key] = Entry{value, line_no};
  }

  ExperimentConfig cfg;
  cfg.source = source;
  cfg.text_checksum = hex64(fnv1a(text));
  {
    SectionReader top(ctx, "top level", sections[""]);
    if (const Entry* e = top.take("seed")) {
      std::uint64_t v = 0;
      const auto [ptr, ec] = std::from_chars(e->value.data(), e->value.data() + e->value.size(), v);
      if (ec != std::errc() || ptr != e->value.data() + e->value.size())
        ctx.error(e->line, "key 'seed' expects a nonnegative integer, got '" + e->value + "'");
      cfg.seed = v;
    }
    top.finish();
  }
  {
    SectionReader r(ctx, "profile", sections["profile"]);
    int profile_line = section_line.count("profile") ? section_line["profile"] : 0;
    if (const Entry* e = r.take("kind")) {
      if (e->value == "constant") cfg.profile.kind = ProfileKind::constant;
      else if (e->value == "polynomial") cfg.profile.kind = ProfileKind::polynomial;
      else if (e->value == "tabulated") cfg.profile.kind = ProfileKind::tabulated;
      else ctx.error(e->line, "key 'kind' must be constant, polynomial or tabulated");
    }
    cfg.profile.alpha = r.list("alpha", cfg.profile.alpha, -1e6, 1e6);
    if (r.line_of("alpha")) profile_line = r.line_of("alpha");
    cfg.profile.beta = r.list("beta", cfg.profile.beta, -1e6, 1e6);
    cfg.profile.m = static_cast<int>(r.integer("m", cfg.profile.m, 1, 8));
    r.finish();
    try {
      build_profile(cfg);
    } catch (const Error& e) {
      ctx.error(profile_line, std::string("[profile] rejected: ") + e.what() +
                                  (e.kind() == ErrorKind::degenerate_profile
                                       ? "; the nonvanishing hypothesis on alpha fails"
                                       : ""));
    }
  }
  {
    SectionReader r(ctx, "torus", sections["torus"]);
    cfg.torus.period_x = r.number("period_x", cfg.torus.period_x, 1.1, 64.0);
    cfg.torus.period_t = r.number("period_t", cfg.torus.period_t, 0.0, 64.0, true);
    cfg.torus.nx = static_cast<int>(r.integer("nx", cfg.torus.nx, 8, 4096));
    cfg.torus.nt = static_cast<int>(r.integer("nt", cfg.torus.nt, 8, 65536));
    if (cfg.torus.nt % 2) ctx.error(r.line_of("nt"), "key 'nt' must be even");
    r.finish();
  }
  {
    SectionReader r(ctx, "output", sections["output"]);
    if (const Entry* e = r.take("dir")) cfg.output.dir = e->value;
    if (const Entry* e = r.take("formats")) {
      cfg.output.csv = cfg.output.json = false;
      for (const auto& f : split_list(e->value)) {
        if (f == "csv") cfg.output.csv = true;
        else if (f == "json") cfg.output.json = true;
        else ctx.error(e->line, "key 'formats' accepts csv and json, got '" + f + "'");
      }
      if (!cfg.output.csv && !cfg.output.json) ctx.error(e->line, "key 'formats' selects no format");
    }
    cfg.output.plot = r.boolean("plot", cfg.output.plot);
    if (cfg.output.plot && !cfg.output.csv)
      ctx.error(r.line_of("plot") ? r.line_of("plot") : r.line_of("formats"), "plots need the csv format");
    r.finish();
  }
  {
    SectionReader r(ctx, "experiment", sections["experiment"]);
    std::optional<ExperimentKind> declared;
    if (const Entry* e = r.take("type")) {
      declared = experiment_from_string(e->value);
      if (!declared) ctx.error(e->line, "key 'type' must be one of spectrum, model, singular, probe, heat");
      if (selected && *selected != *declared)
        ctx.error(e->line, std::string("config selects experiment '") + to_string(*declared) +
                               "' but the command asks for '" + to_string(*selected) + "'");
    }
    if (!declared && !selected) ctx.error(section_line.count("experiment") ? section_line["experiment"] : 1,
                                          "no experiment selected: set [experiment] type");
    cfg.experiment = declared ? *declared : *selected;
    read_experiment(r, cfg.experiment, cfg);
    r.finish();
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path, std::optional<ExperimentKind> selected) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorKind::io, "cannot read config " + path.string());
  const std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return parse_config(text, path.string(), selected);
}

int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::config:
    case ErrorKind::parameter:
    case ErrorKind::degenerate_profile:
    case ErrorKind::resolution:
      return 2;
    case ErrorKind::resonance:
    case ErrorKind::not_eigenvalue:
      return 3;
    case ErrorKind::solver:
    case ErrorKind::overflow:
    case ErrorKind::truncation:
      return 4;
    case ErrorKind::io:
    case ErrorKind::schema:
      return 5;
  }
  return kExitOther;
}

RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
  const int scale = options.grid_scale;
  if (scale < 1 || scale > 16 || !std::has_single_bit(static_cast<unsigned>(scale)))
    fail(ErrorKind::config, "--grid-scale must be a power of two in [1, 16]");
  ExperimentConfig effective = cfg;
  if (options.seed) effective.seed = *options.seed;
  const std::string checksum =
      hex64(fnv1a("grid_scale=" + std::to_string(scale) + ";seed=" + std::to_string(effective.seed),
                  fnv1a(cfg.text_checksum + to_string(cfg.experiment))));
  const std::filesystem::path dir = options.out_dir.empty() ? std::filesystem::path(cfg.output.dir) : options.out_dir;
  OutputDir out(dir, checksum);
  switch (effective.experiment) {
    case ExperimentKind::spectrum: run_spectrum(effective, out); break;
    case ExperimentKind::model: run_model(effective, scale, out); break;
    case ExperimentKind::singular: run_singular(effective, out); break;
    case ExperimentKind::probe: run_probe(effective, scale, out); break;
    case ExperimentKind::heat: run_heat(effective, scale, out); break;
  }
  auto names = out.names();
  std::sort(names.begin(), names.end());
  Json manifest;
  manifest["experiment"] = to_string(effective.experiment);
  manifest["config"] = cfg.source;
  manifest["config_checksum"] = checksum;
  manifest["grid_scale"] = scale;
  manifest["seed"] = effective.seed;
  Json files = Json::array();
  for (const auto& n : names) {
    files.push_back({{"name", n},
                     {"bytes", static_cast<std::uint64_t>(std::filesystem::file_size(dir / n))},
                     {"fnv1a", file_checksum(dir / n)}});
  }
  manifest["files"] = files;
  out.write_json("manifest.json", manifest);
  names.push_back("manifest.json");
  return {dir, names, checksum};
}

void plot_report(const std::filesystem::path& report, const std::string& kind, const std::filesystem::path& svg) {
  const auto table = read_report(report);
  if (kind != "auto" && kind != table.schema)
    fail(ErrorKind::schema, "report " + report.string() + " has schema '" + table.schema + "', not '" + kind + "'");
  const auto spec = plot_spec(table);
  std::ofstream os(svg, std::ios::binary);
  if (!os) fail(ErrorKind::io, "cannot open " + svg.string() + " for writing");
  os << render_svg(spec, table.schema, table.checksum);
  if (!os) fail(ErrorKind::io, "failed writing " + svg.string());
}

bool selftest(const std::filesystem::path& golden_dir, std::ostream& log) {
  bool ok = true;
  auto guarded = [&](const std::string& name, const std::function<std::pair<bool, std::string>()>& body) {
    try {
      const auto [pass, detail] = body();
      ok = check_line(log, name, pass, detail) && ok;
    } catch (const std::exception& e) {
      ok = check_line(log, name, false, std::string("threw: ") + e.what()) && ok;
    }
  };
  const double pi = std::numbers::pi;
  guarded("flat-profile Dirichlet values", [&] {
    const auto scan = find_sigma0(make_profile(ProfileKind::constant, {}), 30.0, 3);
    double worst = 0;
    for (int k = 0; k < 3; ++k) {
      const double exact = std::pow((k + 1) * pi / 2, 2);
      worst = std::max(worst, std::abs(scan.roots.at(k) - exact) / exact);
    }
    return std::pair{worst <= 1e-8, "max relative error " + format_double(worst)};
  });
  guarded("sigma reduction", [&] {
    const auto r = verify_sigma_reduction();
    return std::pair{r.reduction_holds && r.reflection_invariant, std::string("symbolic expansion")};
  });
  guarded("torus energy identity", [&] {
    const auto op = assemble(make_elliptic_torus(2.0, 1.0, {16, 32}, TorusVariant::invertible, 0.5));
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> d(-1, 1);
    const auto u = TorusField::sample(op.spec(), [&](double, double) { return d(rng); });
    const double lhs = op.inner(op.apply(u), u), rhs = op.energy(u).total();
    const double err = std::abs(lhs - rhs) / rhs;
    return std::pair{err <= 1e-10 && op.symmetry_defect() == 0.0, "relative defect " + format_double(err)};
  });
  guarded("config rejects unknown keys", [&] {
    try {
      parse_config("[torus]\nbogus = 1\n", "selftest", ExperimentKind::spectrum);
    } catch (const Error& e) {
      const std::string msg = e.what();
      return std::pair{e.kind() == ErrorKind::config && msg.find("bogus") != std::string::npos &&
                           msg.find(":2:") != std::string::npos,
                       msg};
    }
    return std::pair{false, std::string("no error raised")};
  });
  if (!golden_dir.empty()) {
    std::vector<std::filesystem::path> configs;
    for (const auto& entry : std::filesystem::directory_iterator(golden_dir))
      if (entry.path().extension() == ".ini") configs.push_back(entry.path());
    std::sort(configs.begin(), configs.end());
    if (configs.empty()) ok = check_line(log, "golden", false, "no pinned configs in " + golden_dir.string()) && ok;
    for (const auto& c : configs) {
      guarded("golden " + c.stem().string(), [&] {
        const auto expected = golden_dir / c.stem();
        const auto scratch = std::filesystem::temp_directory_path() /
                             ("degenlab_golden_" + c.stem().string() + "_" + std::to_string(std::random_device{}()));
        std::filesystem::remove_all(scratch);
        const auto result = run_experiment(load_config(c), {scratch, 1, std::nullopt});
        std::size_t compared = 0;
        std::string mismatch;
        for (const auto& entry : std::filesystem::directory_iterator(expected)) {
          if (entry.path().extension() != ".csv") continue;
          ++compared;
          const auto fresh = scratch / entry.path().filename();
          if (!std::filesystem::exists(fresh) || read_all(fresh) != read_all(entry.path()))
            mismatch += " " + entry.path().filename().string();
        }
        std::filesystem::remove_all(scratch);
        const bool pass = compared > 0 && mismatch.empty();
        return std::pair{pass, std::to_string(compared) + " pinned CSV(s)" +
                                   (mismatch.empty() ? " bit-identical" : "; differing:" + mismatch)};
      });
    }
  }
  return ok;
}

}  // namespace degenlab
