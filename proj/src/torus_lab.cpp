#include "degenlab/torus_lab.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "fft.hpp"

namespace degenlab {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

struct DiscreteOperator::Impl {
  TorusOperatorSpec spec;
  SpMat matrix;
  double cx = 0;               // x coupling, 1 / hx^2 after rounding
  std::vector<double> ct;      // t coupling between (i, j) and (i, j + 1)
  std::vector<double> b;       // zero-order coefficient per node
};

namespace {

std::size_t node_index(int nt, int i, int j) { return static_cast<std::size_t>(i) * nt + j; }

Eigen::Map<const Vec> as_vec(const TorusField& u) {
  return Eigen::Map<const Vec>(u.values.data(), static_cast<Eigen::Index>(u.values.size()));
}

TorusField field_like(const TorusField& shape, const Vec& v) {
  TorusField out = shape;
  out.values.assign(v.data(), v.data() + v.size());
  return out;
}

TorusField zeros_for(const DiscreteOperator& op) { return TorusField::zeros(op.spec()); }

void check_shape(const DiscreteOperator& op, const TorusField& u, const char* what) {
  const auto& g = op.spec().grid();
  if (u.nx != g.nx || u.nt != g.nt || u.values.size() != op.size())
    fail(ErrorKind::parameter, std::string(what) + ": field shape does not match the operator grid");
}

/// Rounds to a multiple of q; exact sums of a handful of such values stay
/// exact as long as they remain below 2^53 q.
double round_to(double v, double q) { return std::nearbyint(v / q) * q; }

double frequency(int k, int n, double period) {
  const int signed_k = k <= n / 2 ? k : k - n;
  return 2 * std::numbers::pi * signed_k / (2 * period);
}

std::vector<double> frequency_sq(int nx, int nt, double px, double pt) {
  std::vector<double> out(static_cast<std::size_t>(nx) * nt);
  for (int i = 0; i < nx; ++i) {
    const double xi = frequency(i, nx, px);
    for (int j = 0; j < nt; ++j) {
      const double tau = frequency(j, nt, pt);
      out[node_index(nt, i, j)] = xi * xi + tau * tau;
    }
  }
  return out;
}

/// |c_k|^2 for the normalized DFT c = F(u) / N.
std::vector<double> power_spectrum(const TorusField& u) {
  const std::size_t n = u.values.size();
  std::vector<Complex> buf(u.values.begin(), u.values.end());
  detail::fft2(u.nx, u.nt, detail::FftDirection::forward, buf.data(), buf.data());
  std::vector<double> power(n);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) power[k] = std::norm(buf[k] * scale);
  return power;
}

void check_s(double s) {
  if (!(s >= -4.0 && s <= 8.0)) fail(ErrorKind::parameter, "Sobolev index must lie in [-4, 8]");
}

/// Precomputed multipliers (1 + |k|^2)^s for repeated norm evaluation.
class SobolevTable {
 public:
  SobolevTable(int nx, int nt, double px, double pt, const std::vector<double>& s_values)
      : area_(4 * px * pt) {
    const auto k2 = frequency_sq(nx, nt, px, pt);
    for (double s : s_values) {
      check_s(s);
      std::vector<double> w(k2.size());
      for (std::size_t k = 0; k < k2.size(); ++k) w[k] = std::pow(1.0 + k2[k], s);
      weights_.push_back(std::move(w));
    }
  }
  std::vector<double> norms(const TorusField& u) const {
    const auto power = power_spectrum(u);
    std::vector<double> out;
    out.reserve(weights_.size());
    for (const auto& w : weights_) {
      double acc = 0;
      for (std::size_t k = 0; k < w.size(); ++k) acc += w[k] * power[k];
      out.push_back(std::sqrt(area_ * acc));
    }
    return out;
  }

 private:
  double area_;
  std::vector<std::vector<double>> weights_;
};

// --- Lanczos ---------------------------------------------------------------

struct RitzPair {
  double theta = 0;
  Vec vector;
  double residual_estimate = 0;
  int iterations = 0;
  bool converged = false;
};

enum class Extreme { largest, smallest };

/// Lanczos with full (twice-applied) reorthogonalization.
RitzPair lanczos(const std::function<Vec(const Vec&)>& apply, Vec start, int max_iterations, double tol,
                 Extreme which) {
  const Eigen::Index n = start.size();
  max_iterations = static_cast<int>(std::min<Eigen::Index>(max_iterations, n));
  std::vector<Vec> basis;
  std::vector<double> alpha, beta;
  start.normalize();
  basis.push_back(start);
  RitzPair best;
  for (int k = 0; k < max_iterations; ++k) {
    Vec w = apply(basis.back());
    const double a = basis.back().dot(w);
    alpha.push_back(a);
    for (int pass = 0; pass < 2; ++pass)
      for (const Vec& q : basis) w -= q.dot(w) * q;
    const double b = w.norm();

    const int m = static_cast<int>(alpha.size());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    Vec diag = Eigen::Map<const Vec>(alpha.data(), m);
    Vec off = m > 1 ? Vec(Eigen::Map<const Vec>(beta.data(), m - 1)) : Vec(0);
    es.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
    const int pick = which == Extreme::largest ? m - 1 : 0;
    const double theta = es.eigenvalues()(pick);
    const double est = std::abs(b * es.eigenvectors()(m - 1, pick));
    best.theta = theta;
    best.residual_estimate = est;
    best.iterations = m;
    const bool done = est <= tol * std::max(std::abs(theta), 1e-300) || b <= 1e-14 * std::abs(a) ||
                      m == max_iterations;
    if (done) {
      best.converged = est <= tol * std::max(std::abs(theta), 1e-300) || b <= 1e-14 * std::abs(a);
      best.vector = Vec::Zero(n);
      for (int i = 0; i < m; ++i) best.vector += es.eigenvectors()(i, pick) * basis[i];
      best.vector.normalize();
      return best;
    }
    beta.push_back(b);
    basis.push_back(w / b);
  }
  return best;
}

Vec random_start(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = dist(rng);
  return v;
}

void project_mean_zero(Vec& v) { v.array() -= v.mean(); }

/// Direct solver for L u = f on the mean-zero complement: node 0 is grounded,
/// which leaves a nonsingular system because the coupling graph is connected.
class GroundedSolver {
 public:
  explicit GroundedSolver(const SpMat& L) {
    const Eigen::Index n = L.rows();
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(L.nonZeros()));
    for (Eigen::Index c = 0; c < L.outerSize(); ++c)
      for (SpMat::InnerIterator it(L, c); it; ++it)
        if (it.row() > 0 && it.col() > 0) trips.emplace_back(it.row() - 1, it.col() - 1, it.value());
    SpMat reduced(n - 1, n - 1);
    reduced.setFromTriplets(trips.begin(), trips.end());
    ldlt_.compute(reduced);
    if (ldlt_.info() != Eigen::Success) fail(ErrorKind::solver, "grounded factorization failed");
  }
  Vec solve(Vec f) const {
    project_mean_zero(f);
    Vec u(f.size());
    u(0) = 0;
    u.tail(f.size() - 1) = ldlt_.solve(f.tail(f.size() - 1));
    project_mean_zero(u);
    return u;
  }

 private:
  Eigen::SimplicialLDLT<SpMat> ldlt_;
};

void require_variant(const DiscreteOperator& op, TorusVariant v, const char* what) {
  if (op.variant() != v)
    fail(ErrorKind::parameter, std::string(what) + " requires the " + to_string(v) + " variant");
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorKind::io, "cannot open " + path.string() + " for writing");
  return os;
}

}  // namespace

// --- TorusField ------------------------------------------------------------

TorusField TorusField::zeros(const TorusOperatorSpec& spec) {
  TorusField f;
  f.nx = spec.grid().nx;
  f.nt = spec.grid().nt;
  f.period_x = spec.period_x();
  f.period_t = spec.period_t();
  f.values.assign(static_cast<std::size_t>(f.nx) * f.nt, 0.0);
  return f;
}

TorusField TorusField::sample(const TorusOperatorSpec& spec, const std::function<double(double, double)>& fn) {
  TorusField f = zeros(spec);
  for (int i = 0; i < f.nx; ++i)
    for (int j = 0; j < f.nt; ++j) f.at(i, j) = fn(spec.node_x(i), spec.node_t(j));
  return f;
}

double TorusField::mean() const {
  double acc = 0;
  for (double v : values) acc += v;
  return values.empty() ? 0.0 : acc / static_cast<double>(values.size());
}

double TorusField::l2_norm() const {
  double acc = 0;
  for (double v : values) acc += v * v;
  return std::sqrt(cell_area() * acc);
}

TorusField TorusField::minus_mean() const {
  TorusField out = *this;
  const double m = mean();
  for (double& v : out.values) v -= m;
  return out;
}

// --- DiscreteOperator ------------------------------------------------------

const TorusOperatorSpec& DiscreteOperator::spec() const { return impl_->spec; }
TorusVariant DiscreteOperator::variant() const { return impl_->spec.variant(); }
std::size_t DiscreteOperator::size() const { return static_cast<std::size_t>(impl_->matrix.rows()); }
std::size_t DiscreteOperator::nonzeros() const { return static_cast<std::size_t>(impl_->matrix.nonZeros()); }

TorusField DiscreteOperator::apply(const TorusField& u) const {
  check_shape(*this, u, "apply");
  return field_like(u, impl_->matrix * as_vec(u));
}

std::vector<SparseTriplet> DiscreteOperator::triplets() const {
  Eigen::SparseMatrix<double, Eigen::RowMajor> rm = impl_->matrix;
  std::vector<SparseTriplet> out;
  out.reserve(static_cast<std::size_t>(rm.nonZeros()));
  for (Eigen::Index r = 0; r < rm.outerSize(); ++r)
    for (decltype(rm)::InnerIterator it(rm, r); it; ++it)
      out.push_back({static_cast<int>(it.row()), static_cast<int>(it.col()), it.value()});
  return out;
}

double DiscreteOperator::symmetry_defect() const {
  const SpMat& m = impl_->matrix;
  const SpMat mt = m.transpose();
  double defect = 0;
  for (Eigen::Index c = 0; c < m.outerSize(); ++c)
    for (SpMat::InnerIterator it(m, c); it; ++it)
      defect = std::max(defect, std::abs(it.value() - mt.coeff(it.row(), it.col())));
  return defect;
}

double DiscreteOperator::row_sum_defect() const {
  const Vec ones = Vec::Ones(impl_->matrix.rows());
  const Vec r = impl_->matrix * ones;
  double defect = 0;
  for (Eigen::Index p = 0; p < r.size(); ++p) defect = std::max(defect, std::abs(r(p) - impl_->b[p]));
  return defect;
}

double DiscreteOperator::max_eigenvalue_bound() const {
  const SpMat& m = impl_->matrix;
  Vec rows = Vec::Zero(m.rows());
  for (Eigen::Index c = 0; c < m.outerSize(); ++c)
    for (SpMat::InnerIterator it(m, c); it; ++it) rows(it.row()) += std::abs(it.value());
  return rows.maxCoeff();
}

double DiscreteOperator::inner(const TorusField& u, const TorusField& v) const {
  check_shape(*this, u, "inner");
  check_shape(*this, v, "inner");
  return spec().hx() * spec().ht() * as_vec(u).dot(as_vec(v));
}

DiscreteOperator::EnergyTerms DiscreteOperator::energy(const TorusField& u) const {
  check_shape(*this, u, "energy");
  const auto& im = *impl_;
  const int nx = u.nx, nt = u.nt;
  const double w = spec().hx() * spec().ht();
  EnergyTerms e;
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < nt; ++j) {
      const double c = u.at(i, j);
      const double dx = u.at((i + 1) % nx, j) - c;
      const double dt = u.at(i, (j + 1) % nt) - c;
      e.dx += im.cx * dx * dx;
      e.dt += im.ct[node_index(nt, i, j)] * dt * dt;
      e.b += im.b[node_index(nt, i, j)] * c * c;
    }
  e.dx *= w;
  e.dt *= w;
  e.b *= w;
  return e;
}

DiscreteOperator assemble(const TorusOperatorSpec& spec) {
  const int nx = spec.grid().nx, nt = spec.grid().nt;
  if (nx < 4 || nt < 4) fail(ErrorKind::parameter, "torus grid needs at least 4 nodes per direction");
  auto impl = std::make_shared<DiscreteOperator::Impl>(DiscreteOperator::Impl{spec, {}, 0, {}, {}});
  const std::size_t n = static_cast<std::size_t>(nx) * nt;
  const double hx = spec.hx(), ht = spec.ht();

  std::vector<double> a(n);
  impl->b.resize(n);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < nt; ++j) {
      const double x = spec.node_x(i), t = spec.node_t(j);
      a[node_index(nt, i, j)] = spec.a_field(x, t);
      impl->b[node_index(nt, i, j)] = spec.b_field(x, t);
    }
  impl->ct.resize(n);
  double largest = 1.0 / (hx * hx);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < nt; ++j) {
      const double half = 0.5 * (a[node_index(nt, i, j)] + a[node_index(nt, i, (j + 1) % nt)]);
      if (!(half >= 0) || !std::isfinite(half))
        fail(ErrorKind::parameter, "torus coefficient A must be finite and nonnegative");
      impl->ct[node_index(nt, i, j)] = half / (ht * ht);
      largest = std::max(largest, impl->ct[node_index(nt, i, j)]);
    }
  for (double bv : impl->b) largest = std::max(largest, std::abs(bv));
  // Common dyadic quantum: 2^-40 of the largest coupling.
  const double q = std::ldexp(1.0, std::ilogb(largest) + 1 - 40);
  impl->cx = round_to(1.0 / (hx * hx), q);
  for (double& c : impl->ct) c = round_to(c, q);
  for (double& bv : impl->b) bv = round_to(bv, q);

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(5 * n);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < nt; ++j) {
      const int p = static_cast<int>(node_index(nt, i, j));
      const int xr = static_cast<int>(node_index(nt, (i + 1) % nx, j));
      const int xl = static_cast<int>(node_index(nt, (i + nx - 1) % nx, j));
      const int tu = static_cast<int>(node_index(nt, i, (j + 1) % nt));
      const int td = static_cast<int>(node_index(nt, i, (j + nt - 1) % nt));
      const double cu = impl->ct[static_cast<std::size_t>(p)];
      const double cd = impl->ct[static_cast<std::size_t>(td)];
      trips.emplace_back(p, xr, -impl->cx);
      trips.emplace_back(p, xl, -impl->cx);
      trips.emplace_back(p, tu, -cu);
      trips.emplace_back(p, td, -cd);
      trips.emplace_back(p, p, 2 * impl->cx + cu + cd + impl->b[static_cast<std::size_t>(p)]);
    }
  impl->matrix.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  impl->matrix.setFromTriplets(trips.begin(), trips.end());
  impl->matrix.makeCompressed();
  return DiscreteOperator(std::move(impl));
}

void write_triplets(const DiscreteOperator& op, const std::filesystem::path& path) {
  auto os = open_out(path);
  const auto trips = op.triplets();
  os << "# sparse_triplets n=" << op.size() << " nnz=" << trips.size() << "\n";
  for (const auto& t : trips) os << t.row << ' ' << t.col << ' ' << format_double(t.value) << '\n';
  if (!os) fail(ErrorKind::io, "failed writing " + path.string());
}

// --- norms -----------------------------------------------------------------

double sobolev_norm(const TorusField& u, double s) { return sobolev_norms(u, {s}).front(); }

std::vector<double> sobolev_norms(const TorusField& u, const std::vector<double>& s_values) {
  if (u.values.size() != static_cast<std::size_t>(u.nx) * u.nt || u.values.empty())
    fail(ErrorKind::parameter, "torus field has inconsistent shape");
  return SobolevTable(u.nx, u.nt, u.period_x, u.period_t, s_values).norms(u);
}

// --- elliptic solves -------------------------------------------------------

EllipticSolve solve_elliptic(const DiscreteOperator& op, const TorusField& f, double tol, int max_iterations) {
  require_variant(op, TorusVariant::invertible, "solve_elliptic");
  check_shape(op, f, "solve_elliptic");
  Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>> cg;
  cg.setTolerance(tol);
  cg.setMaxIterations(max_iterations);
  cg.compute(op.impl().matrix);
  const Vec u = cg.solve(as_vec(f));
  if (cg.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "conjugate gradients stagnated after " << cg.iterations() << " iterations, relative residual "
        << cg.error() << " (target " << tol << ")";
    fail(ErrorKind::solver, msg.str());
  }
  return {field_like(f, u), static_cast<int>(cg.iterations()), cg.error()};
}

TorusField pseudo_inverse(const DiscreteOperator& op, const TorusField& f) {
  require_variant(op, TorusVariant::diffusion, "pseudo_inverse");
  check_shape(op, f, "pseudo_inverse");
  return field_like(f, GroundedSolver(op.impl().matrix).solve(as_vec(f)));
}

SmoothingReport smoothing_check(const DiscreteOperator& op, const TorusField& f, const TorusField& chi,
                                const std::vector<double>& s_values) {
  check_shape(op, chi, "smoothing_check");
  TorusField u = solve_elliptic(op, f).u;
  for (std::size_t k = 0; k < u.values.size(); ++k) u.values[k] *= chi.values[k];
  std::vector<double> shifted;
  for (double s : s_values) shifted.push_back(s + 2);
  const auto nf = sobolev_norms(f, s_values);
  const auto nu = sobolev_norms(u, shifted);
  SmoothingReport rep;
  rep.s_values = s_values;
  for (std::size_t k = 0; k < s_values.size(); ++k) rep.ratios.push_back(nf[k] > 0 ? nu[k] / nf[k] : 0.0);
  return rep;
}

// --- regularity probe ------------------------------------------------------

double probe_bump(double x, double t) {
  const double bx = std::abs(x) < 0.8 ? std::pow(std::cos(std::numbers::pi * x / 1.6), 2) : 0.0;
  const double bt = std::abs(t) < 0.5 ? std::pow(std::cos(std::numbers::pi * t), 2) : 0.0;
  return bx * bt;
}

RegularityProbeReport regularity_probe(const DiscreteOperator& op, const std::function<double(double, double)>& f,
                                       const std::vector<double>& s_values, const std::vector<double>& eps_values,
                                       const ProbeOptions& options) {
  require_variant(op, TorusVariant::invertible, "regularity_probe");
  if (s_values.empty() || eps_values.empty()) fail(ErrorKind::parameter, "probe needs s and eps values");
  for (std::size_t k = 0; k < eps_values.size(); ++k) {
    if (!(eps_values[k] > 0 && eps_values[k] <= 1)) fail(ErrorKind::parameter, "probe eps must lie in (0, 1]");
    if (k > 0 && !(eps_values[k] < eps_values[k - 1]))
      fail(ErrorKind::parameter, "probe eps values must be strictly decreasing");
  }
  const auto& spec = op.spec();
  RegularityProbeReport rep;
  rep.s_values = s_values;
  rep.nx = spec.grid().nx;
  rep.nt = spec.grid().nt;
  for (double eps : eps_values) {
    const double nodes = 2 * options.support_t * eps / spec.ht();
    if (nodes + 1e-9 < options.min_nodes) {
      rep.skipped_eps.push_back(eps);
      std::ostringstream msg;
      msg << "probe eps=" << eps << " skipped: " << nodes << " nodes across the squeezed bump, need "
          << options.min_nodes;
      rep.warnings.push_back(msg.str());
      warn(msg.str());
    } else {
      rep.eps_values.push_back(eps);
    }
  }
  const std::size_t ne = rep.eps_values.size(), ns = s_values.size();
  const SobolevTable table(spec.grid().nx, spec.grid().nt, spec.period_x(), spec.period_t(), s_values);
  std::vector<std::vector<double>> in(ne), out(ne);
  parallel_for(ne, [&](std::size_t e) {
    const double eps = rep.eps_values[e];
    const TorusField fe = TorusField::sample(spec, [&](double x, double t) { return f(x, t / eps); });
    in[e] = table.norms(fe);
    out[e] = table.norms(solve_elliptic(op, fe, options.tol).u);
  });
  rep.input_norms.assign(ns, std::vector<double>(ne));
  rep.output_norms = rep.input_norms;
  rep.ratios = rep.input_norms;
  for (std::size_t s = 0; s < ns; ++s) {
    std::vector<double> le, ln;
    for (std::size_t e = 0; e < ne; ++e) {
      rep.input_norms[s][e] = in[e][s];
      rep.output_norms[s][e] = out[e][s];
      rep.ratios[s][e] = out[e][s] / in[e][s];
      le.push_back(std::log(rep.eps_values[e]));
      ln.push_back(std::log(in[e][s]));
    }
    rep.input_exponent.push_back(ne >= 2 ? fit_slope(le, ln) : 0.0);
  }
  return rep;
}

// --- heat semigroup --------------------------------------------------------

const char* to_string(HeatScheme scheme) noexcept {
  return scheme == HeatScheme::implicit_euler ? "implicit_euler" : "crank_nicolson";
}

HeatRun heat_evolve(const DiscreteOperator& op, const TorusField& f, const HeatOptions& options) {
  require_variant(op, TorusVariant::diffusion, "heat_evolve");
  check_shape(op, f, "heat_evolve");
  if (!(options.dt > 0) || !std::isfinite(options.dt)) fail(ErrorKind::parameter, "heat step dt must be positive");
  if (!(options.tau_max >= 0)) fail(ErrorKind::parameter, "heat tau_max must be nonnegative");
  const auto& spec = op.spec();
  const SpMat& L = op.impl().matrix;
  const bool cn = options.scheme == HeatScheme::crank_nicolson;
  const double c = cn ? 0.5 * options.dt : options.dt;
  SpMat id(L.rows(), L.cols());
  id.setIdentity();
  const SpMat M = id + c * L;
  Eigen::SimplicialLDLT<SpMat> ldlt(M);
  if (ldlt.info() != Eigen::Success) fail(ErrorKind::solver, "heat step factorization failed");

  const SobolevTable table(spec.grid().nx, spec.grid().nt, spec.period_x(), spec.period_t(), options.s_values);
  HeatRun run;
  run.scheme = options.scheme;
  run.dt = options.dt;
  run.s_values = options.s_values;
  run.sobolev.resize(options.s_values.size());
  const double m0 = f.mean();
  auto record = [&](double tau, const TorusField& u) {
    run.tau.push_back(tau);
    const double m = u.mean();
    run.mean.push_back(m);
    run.mean_drift = std::max(run.mean_drift, std::abs(m - m0));
    run.l2_mean_zero.push_back(u.minus_mean().l2_norm());
    const auto norms = table.norms(u);
    for (std::size_t s = 0; s < norms.size(); ++s) run.sobolev[s].push_back(norms[s]);
    if (options.keep_snapshots) run.snapshots.push_back(u);
  };

  const int steps = static_cast<int>(std::ceil(options.tau_max / options.dt - 1e-9));
  Vec u = as_vec(f);
  record(0.0, f);
  for (int n = 1; n <= steps; ++n) {
    if (cn && n == 1) {
      u = ldlt.solve(u);
      u = ldlt.solve(u);
    } else if (cn) {
      u = ldlt.solve(u - c * (L * u));
    } else {
      u = ldlt.solve(u);
    }
    if (ldlt.info() != Eigen::Success) fail(ErrorKind::solver, "heat step solve failed");
    record(n * options.dt, field_like(f, u));
    const std::size_t k = run.l2_mean_zero.size();
    run.max_l2_increase = std::max(run.max_l2_increase, run.l2_mean_zero[k - 1] - run.l2_mean_zero[k - 2]);
  }
  if (steps == 0) run.max_l2_increase = 0;
  return run;
}

double decay_rate(const HeatRun& run, double trailing_fraction) {
  const std::size_t n = run.tau.size();
  if (n < 3) fail(ErrorKind::parameter, "decay rate needs at least three records");
  const std::size_t first = std::min(n - 2, static_cast<std::size_t>(std::floor((1 - trailing_fraction) * (n - 1))));
  std::vector<double> x, y;
  for (std::size_t k = first; k < n; ++k) {
    x.push_back(run.tau[k]);
    y.push_back(std::log(run.l2_mean_zero[k]));
  }
  return -fit_slope(x, y);
}

GrowthReport growth_scan(const HeatRun& run, double s, double threshold) {
  std::size_t idx = run.s_values.size();
  for (std::size_t k = 0; k < run.s_values.size(); ++k)
    if (std::abs(run.s_values[k] - s) <= 1e-12) idx = k;
  if (idx == run.s_values.size()) fail(ErrorKind::parameter, "growth scan: s was not recorded by the run");
  GrowthReport rep;
  rep.s = s;
  const auto& series = run.sobolev[idx];
  rep.max_slope = -std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n + 1 < series.size(); ++n) {
    const double slope = (std::log(series[n + 1]) - std::log(series[n])) / (run.tau[n + 1] - run.tau[n]);
    rep.slopes.push_back(slope);
    rep.max_slope = std::max(rep.max_slope, slope);
  }
  for (std::size_t n = 0; n < rep.slopes.size();) {
    if (rep.slopes[n] > threshold) {
      std::size_t e = n;
      while (e + 1 < rep.slopes.size() && rep.slopes[e + 1] > threshold) ++e;
      rep.windows.push_back({run.tau[n], run.tau[e + 1]});
      rep.longest_window = std::max(rep.longest_window, rep.windows.back().length());
      n = e + 1;
    } else {
      ++n;
    }
  }
  if (rep.slopes.empty()) rep.max_slope = 0;
  return rep;
}

// --- spectra ---------------------------------------------------------------

SpectralGap spectral_gap_check(const DiscreteOperator& op, double tol, int max_iterations, std::uint64_t seed) {
  const SpMat& L = op.impl().matrix;
  const bool diffusion = op.variant() == TorusVariant::diffusion;
  std::function<Vec(const Vec&)> apply;
  std::shared_ptr<GroundedSolver> grounded;
  std::shared_ptr<Eigen::SimplicialLDLT<SpMat>> ldlt;
  if (diffusion) {
    grounded = std::make_shared<GroundedSolver>(L);
    apply = [grounded](const Vec& v) { return grounded->solve(v); };
  } else {
    ldlt = std::make_shared<Eigen::SimplicialLDLT<SpMat>>(L);
    if (ldlt->info() != Eigen::Success) fail(ErrorKind::solver, "factorization for shift-invert failed");
    apply = [ldlt](const Vec& v) { return Vec(ldlt->solve(v)); };
  }
  Vec start = random_start(L.rows(), seed);
  if (diffusion) project_mean_zero(start);
  const RitzPair rp = lanczos(apply, start, max_iterations, tol, Extreme::largest);
  if (!rp.converged) {
    std::ostringstream msg;
    msg << "Lanczos did not converge in " << rp.iterations << " iterations (residual estimate "
        << rp.residual_estimate << ")";
    fail(ErrorKind::solver, msg.str());
  }
  if (!(rp.theta > 0)) fail(ErrorKind::solver, "shift-invert Ritz value is not positive");
  SpectralGap gap;
  gap.lambda1 = 1.0 / rp.theta;
  gap.constant = rp.theta;
  gap.iterations = rp.iterations;
  Vec v = rp.vector;
  if (diffusion) {
    project_mean_zero(v);
    v.normalize();
  }
  gap.residual = (L * v - gap.lambda1 * v).norm() / gap.lambda1;
  TorusField shape = zeros_for(op);
  gap.eigenvector = field_like(shape, v / std::sqrt(op.spec().hx() * op.spec().ht()));
  return gap;
}

double min_ritz_value(const DiscreteOperator& op, int iterations, std::uint64_t seed) {
  const SpMat& L = op.impl().matrix;
  const RitzPair rp =
      lanczos([&L](const Vec& v) { return Vec(L * v); }, random_start(L.rows(), seed), iterations, 0.0,
              Extreme::smallest);
  return rp.theta;
}

SemigroupCheck semigroup_inverse_check(const DiscreteOperator& op, const TorusField& f, double tau_factor,
                                       double dt) {
  require_variant(op, TorusVariant::diffusion, "semigroup_inverse_check");
  return semigroup_inverse_check(op, f, spectral_gap_check(op).lambda1, tau_factor, dt);
}

SemigroupCheck semigroup_inverse_check(const DiscreteOperator& op, const TorusField& f, double lambda1,
                                       double tau_factor, double dt) {
  require_variant(op, TorusVariant::diffusion, "semigroup_inverse_check");
  check_shape(op, f, "semigroup_inverse_check");
  if (!(lambda1 > 0) || !(tau_factor > 0) || !(dt > 0))
    fail(ErrorKind::parameter, "semigroup check needs positive lambda1, tau factor and dt");
  double scale = 0;
  for (double v : f.values) scale = std::max(scale, std::abs(v));
  if (std::abs(f.mean()) > 1e-12 * std::max(scale, 1e-300) && scale > 0)
    fail(ErrorKind::parameter, "semigroup check needs mean-zero data");
  SemigroupCheck out;
  out.lambda1 = lambda1;
  out.tau_max = tau_factor / lambda1;
  out.steps = static_cast<int>(std::ceil(out.tau_max / dt));
  out.tail_bound = std::pow(1 + dt * lambda1, -out.steps);
  const SpMat& L = op.impl().matrix;
  SpMat id(L.rows(), L.cols());
  id.setIdentity();
  Eigen::SimplicialLDLT<SpMat> ldlt(SpMat(id + dt * L));
  if (ldlt.info() != Eigen::Success) fail(ErrorKind::solver, "semigroup step factorization failed");
  Vec u = as_vec(f), acc = Vec::Zero(u.size());
  for (int n = 0; n < out.steps; ++n) {
    u = ldlt.solve(u);
    acc += dt * u;
  }
  out.integral = field_like(f, acc);
  const Vec direct = as_vec(pseudo_inverse(op, f));
  const double denom = direct.norm();
  out.discrepancy = denom > 0 ? (acc - direct).norm() / denom : acc.norm();
  return out;
}

// --- trace inequality ------------------------------------------------------

TraceReport trace_inequality_check(const TorusField& u, double gamma) {
  if (u.values.size() != static_cast<std::size_t>(u.nx) * u.nt || u.values.empty())
    fail(ErrorKind::parameter, "torus field has inconsistent shape");
  const double hx = u.hx(), ht = u.ht();
  if (!(gamma > 0) || 1 + gamma >= u.period_x) fail(ErrorKind::parameter, "trace check needs 0 < gamma < Px - 1");
  auto node_of = [&](double x) {
    const double r = (x + u.period_x) / hx;
    const int i = static_cast<int>(std::lround(r));
    if (std::abs(r - i) > 1e-9) fail(ErrorKind::parameter, "trace check needs grid nodes at x = +-1 and +-(1 + gamma)");
    return i;
  };
  const int il = node_of(-1.0), ir = node_of(1.0), ol = node_of(-1.0 - gamma), orr = node_of(1.0 + gamma);
  double umax = 0;
  for (double v : u.values) umax = std::max(umax, std::abs(v));
  for (int i = 0; i < u.nx; ++i) {
    if (i > ol && i < orr) continue;
    for (int j = 0; j < u.nt; ++j)
      if (std::abs(u.at(i, j)) > 1e-14 * umax)
        fail(ErrorKind::parameter, "trace check: field does not vanish for |x| >= 1 + gamma");
  }
  TraceReport rep;
  rep.gamma = gamma;
  for (int j = 0; j < u.nt; ++j) rep.trace_sq += ht * (u.at(il, j) * u.at(il, j) + u.at(ir, j) * u.at(ir, j));
  for (int i = 0; i < u.nx; ++i)
    for (int j = 0; j < u.nt; ++j) {
      const double d = (u.at((i + 1) % u.nx, j) - u.at(i, j)) / hx;
      const double e = hx * ht * d * d;
      rep.full_grad_sq += e;
      if ((i >= ol && i < il) || (i >= ir && i < orr)) rep.strip_grad_sq += e;
    }
  rep.constant = rep.strip_grad_sq > 0 ? rep.trace_sq / (gamma * rep.strip_grad_sq) : 0.0;
  rep.holds = rep.constant <= 1.05;
  return rep;
}

// --- CSV -------------------------------------------------------------------

void write_heat_csv(const HeatRun& run, std::ostream& os) {
  os << "# heat_run scheme=" << to_string(run.scheme) << " dt=" << format_double(run.dt) << "\n";
  os << "tau,mean,l2_mean_zero";
  for (double s : run.s_values) os << ",H^" << format_double(s);
  os << '\n';
  for (std::size_t n = 0; n < run.tau.size(); ++n) {
    os << format_double(run.tau[n]) << ',' << format_double(run.mean[n]) << ',' << format_double(run.l2_mean_zero[n]);
    for (const auto& series : run.sobolev) os << ',' << format_double(series[n]);
    os << '\n';
  }
  if (!os) fail(ErrorKind::io, "failed writing heat CSV");
}

void write_heat_csv(const HeatRun& run, const std::filesystem::path& path) {
  auto os = open_out(path);
  write_heat_csv(run, os);
}

void write_probe_csv(const RegularityProbeReport& report, std::ostream& os) {
  os << "# regularity_probe nx=" << report.nx << " nt=" << report.nt << "\n";
  os << "s,eps,input_norm,output_norm,ratio\n";
  for (std::size_t s = 0; s < report.s_values.size(); ++s)
    for (std::size_t e = 0; e < report.eps_values.size(); ++e)
      os << format_double(report.s_values[s]) << ',' << format_double(report.eps_values[e]) << ','
         << format_double(report.input_norms[s][e]) << ',' << format_double(report.output_norms[s][e]) << ','
         << format_double(report.ratios[s][e]) << '\n';
  if (!os) fail(ErrorKind::io, "failed writing probe CSV");
}

void write_probe_csv(const RegularityProbeReport& report, const std::filesystem::path& path) {
  auto os = open_out(path);
  write_probe_csv(report, os);
}

}  // namespace degenlab
