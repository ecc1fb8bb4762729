#include "degenlab/mellin_solver.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "degenlab/sturm_shooting.hpp"
#include "fft.hpp"
#include "tridiagonal.hpp"

namespace degenlab {

using detail::FftDirection;

void StripGrid::validate() const {
  if (nx < 65) fail(ErrorKind::parameter, "strip grid needs at least 65 x-nodes");
  if (ntau < 2 || !std::has_single_bit(static_cast<unsigned>(ntau)))
    fail(ErrorKind::parameter, "strip grid log-t node count must be a power of two");
  if (!std::isfinite(u_min) || !std::isfinite(u_max) || !(u_min < u_max))
    fail(ErrorKind::parameter, "strip grid needs finite log t_min < log t_max");
}

double StripGrid::t(int n) const noexcept { return std::exp(u(n)); }

double StripGrid::tau(int k) const noexcept {
  const int kk = k < ntau / 2 ? k : k - ntau;
  return 2.0 * std::numbers::pi * kk / (ntau * du());
}

double StripGrid::dtau() const noexcept { return 2.0 * std::numbers::pi / (ntau * du()); }

// --- StripField --------------------------------------------------------------

StripField::StripField(const StripGrid& grid) : grid_(grid) {
  grid.validate();
  const std::size_t n = static_cast<std::size_t>(grid.nx) * grid.ntau;
  pos_.assign(n, Complex{});
  neg_.assign(n, Complex{});
}

StripField StripField::sample(const StripGrid& grid, const std::function<Complex(double, double)>& fn) {
  StripField f(grid);
  for (int i = 0; i < grid.nx; ++i) {
    const double x = grid.x(i);
    for (int n = 0; n < grid.ntau; ++n) {
      const double t = grid.t(n);
      f.at(Half::positive, i, n) = fn(x, t);
      f.at(Half::negative, i, n) = fn(x, -t);
    }
  }
  return f;
}

double StripField::norm_sq(Half h) const {
  const auto& d = data(h);
  double acc = 0;
  for (int i = 0; i < grid_.nx; ++i) {
    double row = 0;
    for (int n = 0; n < grid_.ntau; ++n) row += std::norm(d[static_cast<std::size_t>(i) * grid_.ntau + n]) * grid_.t(n);
    acc += grid_.x_weight(i) * row;
  }
  return acc * grid_.du();
}

double StripField::boundary_trace_max() const {
  double m = 0;
  for (Half h : {Half::positive, Half::negative})
    for (int n = 0; n < grid_.ntau; ++n)
      m = std::max({m, std::abs(at(h, 0, n)), std::abs(at(h, grid_.nx - 1, n))});
  return m;
}

double StripField::endpoint_ratio(Half h) const {
  double peak = 0, ends = 0;
  const double e0 = std::exp(0.5 * grid_.u(0));
  const double e1 = std::exp(0.5 * grid_.u(grid_.ntau - 1));
  for (int i = 0; i < grid_.nx; ++i) {
    for (int n = 0; n < grid_.ntau; ++n) peak = std::max(peak, std::abs(at(h, i, n)) * std::exp(0.5 * grid_.u(n)));
    ends = std::max({ends, std::abs(at(h, i, 0)) * e0, std::abs(at(h, i, grid_.ntau - 1)) * e1});
  }
  return peak > 0 ? ends / peak : 0.0;
}

StripField& StripField::operator+=(const StripField& o) {
  if (!(grid_ == o.grid_)) fail(ErrorKind::parameter, "strip fields live on different grids");
  for (std::size_t k = 0; k < pos_.size(); ++k) {
    pos_[k] += o.pos_[k];
    neg_[k] += o.neg_[k];
  }
  return *this;
}

StripField& StripField::operator*=(Complex c) {
  for (auto& v : pos_) v *= c;
  for (auto& v : neg_) v *= c;
  return *this;
}

StripField operator-(const StripField& a, const StripField& b) {
  StripField r = b;
  r *= -1.0;
  r += a;
  return r;
}

// --- MellinField -------------------------------------------------------------

MellinField::MellinField(const StripGrid& grid) : grid_(grid) {
  grid.validate();
  values_.assign(static_cast<std::size_t>(grid.nx) * grid.ntau, Complex{});
}

double MellinField::plancherel_norm_sq() const {
  double acc = 0;
  for (int i = 0; i < grid_.nx; ++i) {
    double row = 0;
    for (int k = 0; k < grid_.ntau; ++k) row += std::norm(at(i, k));
    acc += grid_.x_weight(i) * row;
  }
  return acc * grid_.dtau() / (2.0 * std::numbers::pi);
}

double MellinField::column_norm(int k) const {
  double acc = 0;
  for (int i = 0; i < grid_.nx; ++i) acc += grid_.x_weight(i) * std::norm(at(i, k));
  return std::sqrt(acc);
}

// --- transforms --------------------------------------------------------------

namespace {

MellinField forward_unchecked(const StripField& field, Half half) {
  const StripGrid& g = field.grid();
  MellinField mf(g);
  const int n = g.ntau;
  std::vector<Complex> phase(n), weight(n);
  for (int k = 0; k < n; ++k) phase[k] = g.du() * std::polar(1.0, -g.tau(k) * g.u_min);
  for (int j = 0; j < n; ++j) weight[j] = std::exp(0.5 * g.u(j));
  parallel_for(static_cast<std::size_t>(g.nx), [&](std::size_t i) {
    std::vector<Complex> row(n);
    for (int j = 0; j < n; ++j) row[j] = field.at(half, static_cast<int>(i), j) * weight[j];
    Complex* out = &mf.values()[i * n];
    detail::fft(n, FftDirection::forward, row.data(), out);
    for (int k = 0; k < n; ++k) out[k] *= phase[k];
  });
  return mf;
}

}  // namespace

MellinField mellin_forward(const StripField& field, Half half) {
  const double ratio = field.endpoint_ratio(half);
  if (ratio > kDecayFail)
    fail(ErrorKind::truncation, "field does not decay at the ends of the log-t window (endpoint ratio " +
                                    format_double(ratio) + ")");
  if (ratio > kDecayWarn)
    warn("field decays only to " + format_double(ratio) + " of its maximum at the log-t window ends");
  return forward_unchecked(field, half);
}

void mellin_inverse(const MellinField& mf, Half half, StripField& out) {
  const StripGrid& g = mf.grid();
  if (!(out.grid() == g) || out.data(half).size() != mf.values().size()) out = StripField(g);
  const int n = g.ntau;
  std::vector<Complex> phase(n);
  std::vector<double> weight(n);
  for (int k = 0; k < n; ++k) phase[k] = std::polar(1.0, g.tau(k) * g.u_min) / (n * g.du());
  for (int j = 0; j < n; ++j) weight[j] = std::exp(-0.5 * g.u(j));
  parallel_for(static_cast<std::size_t>(g.nx), [&](std::size_t i) {
    std::vector<Complex> row(n);
    for (int k = 0; k < n; ++k) row[k] = mf.at(static_cast<int>(i), k) * phase[k];
    detail::fft(n, FftDirection::backward, row.data(), row.data());
    for (int j = 0; j < n; ++j) out.at(half, static_cast<int>(i), j) = row[j] * weight[j];
  });
}

StripField mellin_inverse(const MellinField& mf, Half half) {
  StripField out(mf.grid());
  mellin_inverse(mf, half, out);
  return out;
}

Complex t_dt_symbol(double tau) noexcept { return {-0.5, tau}; }

// --- per-frequency BVP -------------------------------------------------------

namespace {

struct Coefficients {
  std::vector<double> alpha_sq, beta;
};

Coefficients sample_coefficients(const CoefficientProfile& profile, std::size_t nodes) {
  Coefficients c;
  c.alpha_sq.resize(nodes);
  c.beta.resize(nodes);
  const double h = 2.0 / static_cast<double>(nodes - 1);
  for (std::size_t i = 0; i < nodes; ++i) {
    const double x = -1.0 + h * static_cast<double>(i);
    const double a = profile.alpha(x);
    c.alpha_sq[i] = a * a;
    c.beta[i] = profile.beta(x);
  }
  return c;
}

std::vector<Complex> solve_hz_sampled(const Coefficients& c, Complex w, const std::vector<Complex>& rhs) {
  const std::size_t nodes = rhs.size();
  std::vector<Complex> g(nodes, Complex{});
  if (nodes < 3) return g;
  const std::size_t m = nodes - 2;
  const double h = 2.0 / static_cast<double>(nodes - 1);
  const double inv_h2 = 1.0 / (h * h);
  std::vector<Complex> sub(m - 1, -inv_h2), sup(m - 1, -inv_h2), diag(m), b(m);
  for (std::size_t k = 0; k < m; ++k) {
    diag[k] = 2.0 * inv_h2 - w * c.alpha_sq[k + 1] + c.beta[k + 1];
    b[k] = rhs[k + 1];
  }
  if (!detail::solve_tridiagonal(std::move(sub), std::move(diag), std::move(sup), b))
    fail(ErrorKind::resonance, "resonant frequency: discrete H_z is singular at z(z+1) = " +
                                   format_double(w.real()) + " + " + format_double(w.imag()) + "i");
  for (std::size_t k = 0; k < m; ++k) g[k + 1] = b[k];
  return g;
}

}  // namespace

std::vector<Complex> solve_hz_bvp(const CoefficientProfile& profile, Complex z,
                                  const std::vector<Complex>& rhs, const HzSolveOptions& opts) {
  if (rhs.size() < 3) fail(ErrorKind::parameter, "H_z solve needs at least 3 grid nodes");
  for (const Complex& v : rhs)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      fail(ErrorKind::parameter, "H_z right-hand side must be finite");
  const Complex w = z * (z + 1.0);
  if (opts.check_resonance) {
    double end = 0;
    try {
      end = std::abs(shoot(profile, w, opts.shooting_step).end_value);
    } catch (const Error& e) {
      // overflow means exponential growth, far from any Dirichlet value
      if (e.kind() != ErrorKind::overflow) throw;
      end = std::numeric_limits<double>::infinity();
    }
    if (end < opts.resonance_threshold)
      fail(ErrorKind::resonance, "resonant frequency: homogeneous end value " + format_double(end) +
                                     " at z = " + format_double(z.real()) + " + " +
                                     format_double(z.imag()) + "i");
  }
  return solve_hz_sampled(sample_coefficients(profile, rhs.size()), w, rhs);
}

double hz_residual(const CoefficientProfile& profile, Complex z, const std::vector<Complex>& g,
                   const std::vector<Complex>& rhs) {
  if (g.size() != rhs.size() || g.size() < 3) fail(ErrorKind::parameter, "size mismatch in hz_residual");
  const Coefficients c = sample_coefficients(profile, g.size());
  const Complex w = z * (z + 1.0);
  const double h = 2.0 / static_cast<double>(g.size() - 1);
  double res = 0, scale = 0;
  for (std::size_t i = 1; i + 1 < g.size(); ++i) {
    const Complex lhs = -(g[i + 1] - 2.0 * g[i] + g[i - 1]) / (h * h) + (c.beta[i] - w * c.alpha_sq[i]) * g[i];
    res = std::max(res, std::abs(lhs - rhs[i]));
    scale = std::max(scale, std::abs(rhs[i]));
  }
  return scale > 0 ? res / scale : res;
}

// --- model problem -----------------------------------------------------------

SpectrumReport spectrum_for_exponent(const CoefficientProfile& profile, double s) {
  const double top = std::abs(s) + 1.0;
  const double w_max = std::max(top * top - 0.25, 1.0);
  const Sigma0Scan scan = find_sigma0(profile, w_max, 0, 1.0 / 1024);
  return compute_sigma(scan.roots, profile.fingerprint());
}

namespace {

void check_exponent(const CoefficientProfile& profile, double s, const ModelSolveOptions& opts) {
  if (!std::isfinite(s)) fail(ErrorKind::parameter, "exponent s must be finite");
  const SpectrumReport rep = opts.spectrum ? *opts.spectrum : spectrum_for_exponent(profile, s);
  // Sigma is symmetric under s -> -s because z(z+1) depends on (s + i tau)^2
  const double d = distance_to_sigma(rep, std::abs(s));
  if (d < opts.resonance_margin)
    fail(ErrorKind::resonance, "resonant exponent: s = " + format_double(s) + " lies within " +
                                   format_double(d) + " of the irregularity set");
  if (rep.zero_membership_flag && std::abs(s) < opts.resonance_margin)
    fail(ErrorKind::resonance, "resonant exponent: s = 0 belongs to the irregularity set of this profile");
}

MellinField combined_rhs(const ModelRhs& rhs, Half half) {
  MellinField f = mellin_forward(rhs.f1, half);
  const StripGrid& g = f.grid();
  for (int slot = 1; slot <= 2; ++slot) {
    const auto& part = slot == 1 ? rhs.f2 : rhs.f3;
    if (!part) continue;
    if (!(part->grid() == g)) fail(ErrorKind::parameter, "right-hand side slots live on different grids");
    const MellinField p = mellin_forward(*part, half);
    for (int i = 0; i < g.nx; ++i)
      for (int k = 0; k < g.ntau; ++k) f.at(i, k) += std::pow(t_dt_symbol(g.tau(k)), slot) * p.at(i, k);
  }
  return f;
}

/// Solves H_z per tau-column; z = s - 1/2 + i tau.
MellinField solve_columns(const Coefficients& c, double s, const MellinField& fhat) {
  const StripGrid& g = fhat.grid();
  MellinField ghat(g);
  parallel_for(static_cast<std::size_t>(g.ntau), [&](std::size_t kk) {
    const int k = static_cast<int>(kk);
    const Complex z(s - 0.5, g.tau(k));
    std::vector<Complex> col(g.nx);
    for (int i = 0; i < g.nx; ++i) col[i] = fhat.at(i, k);
    const std::vector<Complex> sol = solve_hz_sampled(c, z * (z + 1.0), col);
    for (int i = 0; i < g.nx; ++i) ghat.at(i, k) = sol[i];
  });
  return ghat;
}

}  // namespace

StripField solve_model_dirichlet(const CoefficientProfile& profile, double s, const ModelRhs& rhs,
                                 const ModelSolveOptions& opts) {
  check_exponent(profile, s, opts);
  const StripGrid& g = rhs.f1.grid();
  const Coefficients c = sample_coefficients(profile, static_cast<std::size_t>(g.nx));
  StripField u(g);
  for (Half half : {Half::positive, Half::negative})
    mellin_inverse(solve_columns(c, s, combined_rhs(rhs, half)), half, u);
  // Dirichlet data imposed exactly
  for (Half half : {Half::positive, Half::negative})
    for (int n = 0; n < g.ntau; ++n) u.at(half, 0, n) = u.at(half, g.nx - 1, n) = 0.0;
  return u;
}

StripField solve_model_dirichlet(const CoefficientProfile& profile, double s, const StripField& f,
                                 const ModelSolveOptions& opts) {
  return solve_model_dirichlet(profile, s, ModelRhs{f, std::nullopt, std::nullopt}, opts);
}

StripField apply_model_operator(const CoefficientProfile& profile, double s, const StripField& u) {
  const StripGrid& g = u.grid();
  const Coefficients c = sample_coefficients(profile, static_cast<std::size_t>(g.nx));
  const double inv_h2 = 1.0 / (g.hx() * g.hx());
  StripField out(g);
  for (Half half : {Half::positive, Half::negative}) {
    MellinField uh = forward_unchecked(u, half);
    for (int i = 0; i < g.nx; ++i)
      for (int k = 0; k < g.ntau; ++k) {
        const Complex sym = t_dt_symbol(g.tau(k));
        uh.at(i, k) *= (sym + s + 1.0) * (sym + s);
      }
    const StripField tpart = mellin_inverse(uh, half);
    for (int i = 1; i + 1 < g.nx; ++i)
      for (int n = 0; n < g.ntau; ++n) {
        const Complex d2 = (u.at(half, i + 1, n) - 2.0 * u.at(half, i, n) + u.at(half, i - 1, n)) * inv_h2;
        out.at(half, i, n) = -d2 - c.alpha_sq[i] * tpart.at(half, i, n) + c.beta[i] * u.at(half, i, n);
      }
  }
  return out;
}

double model_residual(const CoefficientProfile& profile, double s, const StripField& u, const StripField& f) {
  StripField r = apply_model_operator(profile, s, u) - f;
  StripField fi = f;
  const StripGrid& g = f.grid();
  for (Half half : {Half::positive, Half::negative})
    for (int n = 0; n < g.ntau; ++n) {
      r.at(half, 0, n) = r.at(half, g.nx - 1, n) = 0.0;
      fi.at(half, 0, n) = fi.at(half, g.nx - 1, n) = 0.0;
    }
  const double fn = fi.norm_sq();
  return fn > 0 ? std::sqrt(r.norm_sq() / fn) : std::sqrt(r.norm_sq());
}

// --- tau decay ---------------------------------------------------------------

TauDecayReport tau_decay_report(const CoefficientProfile& profile, double s, const MellinField& fhat,
                                double tail_min, double tail_max, const ModelSolveOptions& opts) {
  check_exponent(profile, s, opts);
  if (!(0 <= tail_min && tail_min < tail_max)) fail(ErrorKind::parameter, "tail window must satisfy 0 <= min < max");
  const StripGrid& g = fhat.grid();
  const Coefficients c = sample_coefficients(profile, static_cast<std::size_t>(g.nx));
  const MellinField ghat = solve_columns(c, s, fhat);

  double fmax = 0;
  for (int k = 0; k < g.ntau; ++k) fmax = std::max(fmax, fhat.column_norm(k));

  TauDecayReport rep;
  rep.s = s;
  rep.tail_min = tail_min;
  rep.tail_max = tail_max;
  for (int k = 0; k < g.ntau; ++k) {
    const double fn = fhat.column_norm(k);
    if (!(fn > 1e-250 * fmax) || fn == 0) continue;
    rep.rows.push_back({g.tau(k), ghat.column_norm(k) / fn});
  }
  std::sort(rep.rows.begin(), rep.rows.end(), [](const auto& a, const auto& b) { return a.tau < b.tau; });

  std::vector<double> lx, ly;
  for (const auto& row : rep.rows) {
    const double bracket_sq = 1.0 + row.tau * row.tau;
    rep.constant = std::max(rep.constant, row.ratio * bracket_sq);
    const double at = std::abs(row.tau);
    if (at >= tail_min && at <= tail_max && row.ratio > 0) {
      lx.push_back(0.5 * std::log(bracket_sq));
      ly.push_back(std::log(row.ratio));
    }
  }
  if (lx.size() >= 2) rep.tail_slope = fit_slope(lx, ly);
  return rep;
}

TauDecayReport tau_decay_report(const CoefficientProfile& profile, double s, const StripField& f,
                                double tail_min, double tail_max, const ModelSolveOptions& opts) {
  return tau_decay_report(profile, s, mellin_forward(f, Half::positive), tail_min, tail_max, opts);
}

// --- interchange -------------------------------------------------------------

namespace {
constexpr char kStripMagic[8] = {'D', 'G', 'L', 'S', 'T', 'R', 'P', '1'};

template <typename T>
void put(std::ostream& os, T v) {
  static_assert(std::endian::native == std::endian::little, "binary format assumes a little-endian host");
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!is) fail(ErrorKind::io, "truncated strip-field binary");
  return v;
}
}  // namespace

void write_strip_csv(const StripField& field, std::ostream& os) {
  const StripGrid& g = field.grid();
  os << "# strip_field nx=" << g.nx << " ntau=" << g.ntau << " u_min=" << format_double(g.u_min)
     << " u_max=" << format_double(g.u_max) << "\n";
  os << "x,t,Re,Im\n";
  for (Half half : {Half::positive, Half::negative}) {
    const double sign = half == Half::positive ? 1.0 : -1.0;
    for (int i = 0; i < g.nx; ++i)
      for (int n = 0; n < g.ntau; ++n) {
        const Complex v = field.at(half, i, n);
        os << format_double(g.x(i)) << ',' << format_double(sign * g.t(n)) << ',' << format_double(v.real())
           << ',' << format_double(v.imag()) << '\n';
      }
  }
  if (!os) fail(ErrorKind::io, "failed writing strip-field CSV");
}

StripField read_strip_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# strip_field", 0) != 0)
    fail(ErrorKind::schema, "strip-field CSV must start with a '# strip_field' line");
  StripGrid g;
  {
    std::istringstream meta(line.substr(13));
    std::string kv;
    int seen = 0;
    while (meta >> kv) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) fail(ErrorKind::schema, "malformed strip-field metadata: " + kv);
      const std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
      if (key == "nx") g.nx = std::stoi(val);
      else if (key == "ntau") g.ntau = std::stoi(val);
      else if (key == "u_min") g.u_min = std::stod(val);
      else if (key == "u_max") g.u_max = std::stod(val);
      else fail(ErrorKind::schema, "unknown strip-field metadata key: " + key);
      ++seen;
    }
    if (seen != 4) fail(ErrorKind::schema, "strip-field metadata needs nx, ntau, u_min, u_max");
  }
  if (!std::getline(is, line) || line != "x,t,Re,Im") fail(ErrorKind::schema, "expected header x,t,Re,Im");
  StripField f(g);
  for (Half half : {Half::positive, Half::negative})
    for (int i = 0; i < g.nx; ++i)
      for (int n = 0; n < g.ntau; ++n) {
        if (!std::getline(is, line)) fail(ErrorKind::io, "strip-field CSV ends early");
        double vals[4];
        std::size_t pos = 0;
        for (int c = 0; c < 4; ++c) {
          const std::size_t next = c < 3 ? line.find(',', pos) : line.size();
          if (next == std::string::npos) fail(ErrorKind::schema, "strip-field CSV row needs 4 columns");
          vals[c] = std::stod(line.substr(pos, next - pos));
          pos = next + 1;
        }
        f.at(half, i, n) = Complex(vals[2], vals[3]);
      }
  return f;
}

void write_strip_binary(const StripField& field, std::ostream& os) {
  const StripGrid& g = field.grid();
  os.write(kStripMagic, sizeof kStripMagic);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(g.nx));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(g.ntau));
  put<double>(os, g.u_min);
  put<double>(os, g.u_max);
  for (Half half : {Half::positive, Half::negative})
    for (const Complex& v : field.data(half)) {
      put<double>(os, v.real());
      put<double>(os, v.imag());
    }
  if (!os) fail(ErrorKind::io, "failed writing strip-field binary");
}

StripField read_strip_binary(std::istream& is) {
  char magic[8];
  is.read(magic, sizeof magic);
  if (!is || std::memcmp(magic, kStripMagic, sizeof magic) != 0)
    fail(ErrorKind::schema, "not a strip-field binary (bad magic)");
  StripGrid g;
  g.nx = static_cast<int>(get<std::uint32_t>(is));
  g.ntau = static_cast<int>(get<std::uint32_t>(is));
  g.u_min = get<double>(is);
  g.u_max = get<double>(is);
  StripField f(g);
  for (Half half : {Half::positive, Half::negative})
    for (Complex& v : f.data(half)) {
      const double re = get<double>(is);
      v = Complex(re, get<double>(is));
    }
  return f;
}

}  // namespace degenlab
