#include <cmath>
#include <numbers>

#include "../oracles.hpp"
#include "degenlab/singular_solutions.hpp"
#include "doctest.h"

using namespace degenlab;
using std::numbers::pi;

namespace {

CoefficientProfile flat() { return make_profile(ProfileKind::constant, {{1.0}, {0.0}, 1}); }
CoefficientProfile quartic_alpha() { return make_profile(ProfileKind::polynomial, {{1.0, 0.0, 0.25}, {0.5}, 1}); }

/// integral_0^t2 t^a eta(t) e^{-i xi t} dt by Gauss-Legendre after t = v^2,
/// split at the cutoff joints.
Complex model_transform(double a, double xi, const CutoffParams& c) {
  auto part = [&](bool imag, double lo, double hi) {
    return oracle::integrate(
        [&](double v) {
          const double t = v * v;
          const double base = 2 * v * std::pow(t, a) * cutoff_eta(t, c);
          return imag ? -base * std::sin(xi * t) : base * std::cos(xi * t);
        },
        lo, hi, 600, 16);
  };
  const double j1 = std::sqrt(c.t1), j2 = std::sqrt(c.t2);
  return {part(false, 0, j1) + part(false, j1, j2), part(true, 0, j1) + part(true, j1, j2)};
}

}  // namespace

TEST_CASE("power-type singular solution") {
  const auto sol = build_singular(flat(), 0);
  CHECK(sol.gamma == doctest::Approx(1.6484543).epsilon(1e-7));
  for (double t : {1e-6, 1e-3, 0.1, 0.4})
    CHECK(sol.value(0.0, t) == doctest::Approx(std::pow(t, 1.1484543)).epsilon(1e-6));
  for (double x : {-1.0, -0.3, 0.0, 0.8}) {
    CHECK(sol.value(x, -0.5) == 0.0);
    CHECK(sol.value(x, 1.0) == 0.0);
    CHECK(sol.value(x, 3.0) == 0.0);
  }
  for (double t : {1e-4, 0.3, 0.7}) {
    CHECK(sol.value(-1.0, t) == 0.0);
    CHECK(sol.value(1.0, t) == 0.0);
  }
  const StripGrid g{129, 1024, -20.0, 6.0};
  const auto f = sample_singular(sol, g);
  CHECK(f.boundary_trace_max() == 0.0);
  CHECK(f.norm_sq(Half::negative) == 0.0);

  CHECK_THROWS_AS(build_singular(flat(), 0, {0.8, 0.5}), Error);
  CHECK_THROWS_AS(build_singular(flat(), 0, {0.0, 0.5}), Error);
}

TEST_CASE("singular solutions are annihilated where the cutoff is flat") {
  const StripGrid g{513, 4096, -20.0, 6.0};
  for (const auto& p : {flat(), quartic_alpha()}) {
    const auto sol = build_singular(p, 0);
    const auto rep = residual_check(p, sol, g);
    CHECK(rep.identity_error <= 1e-10);
    CHECK(rep.core_residual <= 1e-8);
    CHECK(rep.core_columns > 1000);
    CHECK(std::isfinite(rep.transition_residual));
    CHECK(rep.transition_residual <= 10 * rep.transition_bound);

    auto perturbed = sol;
    perturbed.gamma += 1e-3;
    CHECK(residual_check(p, perturbed, g).core_residual >= 1e-4);
  }
  const auto second = build_singular(flat(), 1);
  CHECK(second.gamma == doctest::Approx(std::sqrt(pi * pi + 0.25)).epsilon(1e-9));
  CHECK(residual_check(flat(), second, g).core_residual <= 1e-8);
}

TEST_CASE("pure model transform matches quadrature") {
  const CutoffParams c;
  const PowerCutoffTransform tr(0.5, c);
  for (int k : {0, 3, 100, 1000, 10000}) {
    const double xi = k * tr.dxi();
    const Complex ref = model_transform(0.5, xi, c);
    CHECK(std::abs(tr(xi) - ref) <= 1e-9 * std::max(1.0, std::abs(ref)) + 1e-12);
  }
  // tail exponent of the oracle itself
  std::vector<double> lx, ly;
  for (int k = 200; k <= 20000; k = static_cast<int>(k * 1.3)) {
    const double xi = k * tr.dxi();
    lx.push_back(std::log(xi));
    ly.push_back(std::log(std::abs(model_transform(0.5, xi, c))));
  }
  CHECK(fit_slope(lx, ly) == doctest::Approx(-1.5).epsilon(0.05 / 1.5));
  const auto scan = sobolev_scan(0.5, 1.0, c, {0.0, 0.5}, default_cutoffs());
  CHECK(std::abs(scan.tail_exponent + 1.5) <= 0.05);
}

TEST_CASE("Sobolev scan locates the threshold") {
  const auto sol = build_singular(flat(), 0);
  const std::vector<double> rs{0.0, 0.5, 1.0, 1.4, 1.6, sol.gamma, 1.8, 2.0};
  const auto scan = sobolev_scan(sol, rs, default_cutoffs());
  CHECK(std::abs(scan.threshold - 1.648) <= 0.01);
  CHECK(std::abs(scan.threshold - sol.gamma) <= 0.01);
  CHECK(std::abs(scan.tail_exponent + (sol.gamma + 0.5)) <= 0.05);
  CHECK(scan.threshold_slope == doctest::Approx(2.0).epsilon(0.05));

  const std::size_t top = scan.cutoffs.size() - 1;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    for (std::size_t c = 1; c <= top; ++c) CHECK(scan.norms[i][c] >= scan.norms[i][c - 1]);
    if (i > 0)
      for (std::size_t c = 0; c <= top; ++c) CHECK(scan.norms[i][c] >= scan.norms[i - 1][c]);
  }
  // convergent below the threshold
  for (std::size_t i : {0u, 1u, 2u}) CHECK((scan.norms[i][top] - scan.norms[i][top - 1]) / scan.norms[i][top] < 1e-3);
  // logarithmic growth at r = s_j
  std::vector<double> lc, nv;
  for (std::size_t c = top - 5; c <= top; ++c) {
    lc.push_back(std::log(scan.cutoffs[c]));
    nv.push_back(scan.norms[5][c]);
  }
  CHECK(fit_slope(lc, nv) > 0);
  CHECK(std::abs(scan.growth_exponent[5]) < 0.02);

  // Parseval at r = 0: ||u||^2 = ||g||^2 integral t^{2a} eta^2
  const double a = sol.gamma - 0.5;
  const CutoffParams c;
  const double l2 = oracle::integrate([&](double v) {
                      const double t = v * v;
                      const double e = cutoff_eta(t, c);
                      return 2 * v * std::pow(t, 2 * a) * e * e;
                    }, 0, std::sqrt(c.t1), 64) +
                    oracle::integrate([&](double v) {
                      const double t = v * v;
                      const double e = cutoff_eta(t, c);
                      return 2 * v * std::pow(t, 2 * a) * e * e;
                    }, std::sqrt(c.t1), 1.0, 64);
  CHECK(std::abs(scan.norms[0][top] / l2 - 1) <= 1e-8);

  // changing the cutoff scale leaves the exponents alone
  const auto wide = sobolev_scan(build_singular(flat(), 0, {1.0, 2.0}), rs, default_cutoffs());
  CHECK(std::abs(wide.threshold - scan.threshold) <= 0.01);
  CHECK(std::abs(wide.tail_exponent - scan.tail_exponent) <= 0.01);

  CHECK_THROWS_AS(sobolev_scan(sol, {0.5}, {10.0, 5.0}), Error);
  CHECK_THROWS_AS(sobolev_scan(sol, {sol.gamma + 1.5}, default_cutoffs()), Error);
}

TEST_CASE("Sobolev threshold agrees with the spectrum for a variable profile") {
  const auto p = quartic_alpha();
  const auto sol = build_singular(p, 0);
  const auto scan = sobolev_scan(sol, {0.5, 1.0, 1.5, 2.0}, default_cutoffs());
  CHECK(std::abs(scan.threshold - sol.gamma) <= 0.01);
}

TEST_CASE("exponential-type solutions") {
  const auto s2 = higher_order_singular(flat(), 2, 0);
  CHECK(s2.lambda == doctest::Approx(pi / 2).epsilon(1e-8));
  const auto s3 = higher_order_singular(flat(), 3, 0);
  CHECK(s3.lambda == doctest::Approx(pi / 4).epsilon(1e-8));
  const StripGrid g{513, 256, -4.0, 1.0};
  for (const auto* s : {&s2, &s3}) {
    const auto rep = residual_check(flat(), *s, g);
    CHECK(rep.core_residual <= 1e-8);
    CHECK(rep.core_columns > 1000);
    for (double d : derivative_ladder(*s)) CHECK(d <= 1e-10);
  }
  const auto rq = residual_check(quartic_alpha(), higher_order_singular(quartic_alpha(), 2, 0), g);
  CHECK(rq.core_residual <= 1e-8);

  const auto negative = make_profile(ProfileKind::constant, {{1.0}, {-5.0}, 1});
  CHECK_THROWS_AS(higher_order_singular(negative, 2, 0), Error);
  CHECK_THROWS_AS(higher_order_singular(flat(), 1, 0), Error);
}

TEST_CASE("Gevrey probe") {
  const auto g2 = gevrey_scan(higher_order_singular(flat(), 2, 0));
  CHECK(g2.gevrey_type);
  CHECK(std::abs(g2.kappa - 0.5) <= 0.05);
  CHECK(g2.predicted_r == 2.0);
  const auto g3 = gevrey_scan(higher_order_singular(flat(), 3, 0));
  CHECK(std::abs(g3.kappa - 2.0 / 3.0) <= 0.05);
  const auto g1 = gevrey_scan(build_singular(flat(), 0));
  CHECK_FALSE(g1.gevrey_type);
  CHECK(g1.note == "not Gevrey-type; algebraic decay");
}
