#include "degenlab/irregularity_spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace degenlab {

SpectrumReport compute_sigma(const std::vector<double>& sigma0, std::string fingerprint) {
  if (sigma0.empty())
    fail(ErrorKind::parameter,
         "sigma0 is empty; the Dirichlet set is nonempty for every valid profile, so the scan is broken");
  if (!std::is_sorted(sigma0.begin(), sigma0.end()))
    fail(ErrorKind::parameter, "sigma0 must be sorted ascending");

  SpectrumReport rep;
  rep.sigma0 = sigma0;
  rep.profile_fingerprint = std::move(fingerprint);
  for (std::size_t k = 0; k < sigma0.size(); ++k) {
    const double w = sigma0[k];
    if (!std::isfinite(w)) fail(ErrorKind::parameter, "sigma0 entries must be finite");
    if (w <= -0.25) {
      rep.zero_membership_flag = true;
      if (w < -0.25) ++rep.nonreal_pair_count;
      continue;
    }
    const double s = std::sqrt(w + 0.25);
    if (!rep.sigma.empty() && !(s > rep.sigma.back())) continue;  // duplicate w
    rep.sigma.push_back(s);
    rep.source.push_back(k);
    rep.gamma.push_back(s);
  }
  if (rep.zero_membership_flag) {
    rep.warnings.push_back(
        "sigma0 contains w <= -1/4, so s = 0 would belong to the irregularity set; this "
        "contradicts 0 not in Sigma and indicates an invalid operator or a broken scan");
    warn(rep.warnings.back());
  }
  // Drop the boundary value s = 0 itself from the positive list.
  while (!rep.sigma.empty() && rep.sigma.front() == 0.0) {
    rep.sigma.erase(rep.sigma.begin());
    rep.source.erase(rep.source.begin());
    rep.gamma.erase(rep.gamma.begin());
  }
  rep.s0 = rep.sigma.empty() ? 0.0 : rep.sigma.front();
  for (std::size_t j = 0; j < rep.sigma.size(); ++j)
    rep.predicted_codimension.push_back(2 * static_cast<int>(j + 1));
  return rep;
}

std::size_t count_nonreal_z_pairs(const std::vector<double>& sigma0) {
  std::size_t nonreal_roots = 0;
  for (double w : sigma0) {
    // z^2 + z - w = 0
    const Complex disc = std::sqrt(Complex(1.0 + 4.0 * w, 0.0));
    for (const Complex z : {(-1.0 + disc) / 2.0, (-1.0 - disc) / 2.0})
      if (z.imag() != 0.0) ++nonreal_roots;
  }
  return nonreal_roots / 2;
}

IntervalLocation locate_interval(const SpectrumReport& report, double s, double guard) {
  IntervalLocation loc;
  const auto& sig = report.sigma;
  for (std::size_t j = 0; j < sig.size(); ++j) {
    if (std::abs(s - sig[j]) < guard) {
      loc.kind = IntervalLocation::Kind::resonant;
      loc.j = j;
      return loc;
    }
  }
  if (sig.empty() || s < sig.front()) {
    loc.kind = IntervalLocation::Kind::below_s0;
    return loc;
  }
  const auto it = std::upper_bound(sig.begin(), sig.end(), s);
  loc.kind = IntervalLocation::Kind::between;
  loc.j = static_cast<std::size_t>(it - sig.begin()) - 1;
  return loc;
}

double distance_to_sigma(const SpectrumReport& report, double s) {
  double d = std::numeric_limits<double>::infinity();
  for (double v : report.sigma) d = std::min(d, std::abs(s - v));
  return d;
}

// ---------------------------------------------------------------------------

BivariatePoly BivariatePoly::constant(Complex c) {
  BivariatePoly p;
  p.terms_[{0, 0}] = c;
  p.prune();
  return p;
}

BivariatePoly BivariatePoly::s() {
  BivariatePoly p;
  p.terms_[{1, 0}] = 1.0;
  return p;
}

BivariatePoly BivariatePoly::tau() {
  BivariatePoly p;
  p.terms_[{0, 1}] = 1.0;
  return p;
}

void BivariatePoly::prune() {
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (it->second == Complex(0.0, 0.0))
      it = terms_.erase(it);
    else
      ++it;
  }
}

BivariatePoly BivariatePoly::operator+(const BivariatePoly& o) const {
  BivariatePoly r = *this;
  for (const auto& [mono, c] : o.terms_) r.terms_[mono] += c;
  r.prune();
  return r;
}

BivariatePoly BivariatePoly::operator-(const BivariatePoly& o) const {
  BivariatePoly r = *this;
  for (const auto& [mono, c] : o.terms_) r.terms_[mono] -= c;
  r.prune();
  return r;
}

BivariatePoly BivariatePoly::operator*(const BivariatePoly& o) const {
  BivariatePoly r;
  for (const auto& [ma, ca] : terms_)
    for (const auto& [mb, cb] : o.terms_) r.terms_[{ma.first + mb.first, ma.second + mb.second}] += ca * cb;
  r.prune();
  return r;
}

BivariatePoly BivariatePoly::reflect() const {
  BivariatePoly r;
  for (const auto& [mono, c] : terms_) r.terms_[mono] = ((mono.first + mono.second) % 2 == 0) ? c : -c;
  r.prune();
  return r;
}

BivariatePoly BivariatePoly::real_part() const {
  BivariatePoly r;
  for (const auto& [mono, c] : terms_) r.terms_[mono] = c.real();
  r.prune();
  return r;
}

BivariatePoly BivariatePoly::imag_part() const {
  BivariatePoly r;
  for (const auto& [mono, c] : terms_) r.terms_[mono] = c.imag();
  r.prune();
  return r;
}

bool BivariatePoly::equals(const BivariatePoly& o, double tol) const {
  const BivariatePoly d = *this - o;
  for (const auto& [mono, c] : d.terms_)
    if (std::abs(c) > tol) return false;
  return true;
}

Complex BivariatePoly::evaluate(double s_val, double tau_val) const {
  Complex acc = 0;
  for (const auto& [mono, c] : terms_) acc += c * std::pow(s_val, mono.first) * std::pow(tau_val, mono.second);
  return acc;
}

ReductionCheck verify_sigma_reduction() {
  const Complex i(0.0, 1.0);
  const auto S = BivariatePoly::s();
  const auto T = BivariatePoly::tau();
  const auto z = S - BivariatePoly::constant(0.5) + BivariatePoly::constant(i) * T;
  ReductionCheck chk;
  chk.expanded = z * (z + BivariatePoly::constant(1.0));
  const auto st = S + BivariatePoly::constant(i) * T;
  chk.reduced = st * st - BivariatePoly::constant(0.25);
  chk.reduction_holds = chk.expanded.equals(chk.reduced);
  chk.reflection_invariant = chk.expanded.equals(chk.expanded.reflect());
  chk.imag_is_2_s_tau = chk.expanded.imag_part().equals(BivariatePoly::constant(2.0) * S * T);
  return chk;
}

}  // namespace degenlab
