#include <cmath>
#include <complex>
#include <numbers>

#include "../oracles.hpp"
#include "degenlab/sturm_shooting.hpp"
#include "doctest.h"

using namespace degenlab;
using std::numbers::pi;

namespace {
CoefficientProfile constant(double a, double b) { return make_profile(ProfileKind::constant, {{a}, {b}, 1}); }
CoefficientProfile quartic_alpha() { return make_profile(ProfileKind::polynomial, {{1.0, 0.0, 0.25}, {0.0}, 1}); }
}  // namespace

TEST_CASE("shooting closed forms") {
  const auto sol = shoot(constant(1, 0), 0.0);
  CHECK(sol.values.front() == Complex(0.0));
  CHECK(sol.derivatives.front() == Complex(1.0));
  CHECK(std::abs(sol.end_value - 2.0) < 1e-12);
  for (std::size_t k = 0; k < sol.values.size(); k += 97) CHECK(std::abs(sol.values[k] - (sol.x(k) + 1.0)) < 1e-12);

  CHECK(std::abs(shoot(constant(1, 0), pi * pi / 4).end_value) <= 1e-8);
  CHECK(std::abs(shoot(constant(1, 1), 0.0).end_value - std::sinh(2.0)) < 1e-10);
  for (const auto& v : shoot(constant(1, 0), 3.7).values) CHECK(v.imag() == 0.0);
}

TEST_CASE("shooting parameter and overflow errors") {
  CHECK_THROWS_AS(shoot(constant(1, 0), 0.0, 1.0 / 64), Error);
  try {
    shoot(constant(1, 0), Complex(-1e6, 0.0), 1.0 / 128);
    FAIL("expected overflow");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::overflow);
  }
}

TEST_CASE("RK4 convergence order") {
  const auto p = quartic_alpha();
  const double w = 7.3;
  const double e1 = shoot(p, w, 1.0 / 128).end_value.real();
  const double e2 = shoot(p, w, 1.0 / 256).end_value.real();
  const double e3 = shoot(p, w, 1.0 / 512).end_value.real();
  const double order = std::log2(std::abs(e1 - e2) / std::abs(e2 - e3));
  CHECK(order >= 3.5);
}

TEST_CASE("no Dirichlet values off the real axis") {
  const ShootingKernel k(quartic_alpha(), 1.0 / 1024);
  for (double re : {-5.0, 0.0, 2.4674, 10.0, 30.0})
    for (double im : {-2.0, -0.1, 0.05, 1.0}) CHECK(std::abs(k.end_value(Complex(re, im))) > 1e-6);
}

TEST_CASE("sigma0 of the flat profile") {
  const auto scan = find_sigma0(constant(1, 0), 25.0, 0);
  REQUIRE(scan.roots.size() == 3);
  for (int k = 1; k <= 3; ++k) CHECK(std::abs(scan.roots[k - 1] - (k * pi / 2) * (k * pi / 2)) < 1e-8);
  CHECK_FALSE(scan.partial);

  const auto shifted = find_sigma0(constant(1, 1), 26.0, 0);
  REQUIRE(shifted.roots.size() == 3);
  for (int k = 0; k < 3; ++k) CHECK(std::abs(shifted.roots[k] - scan.roots[k] - 1.0) < 1e-8);
}

TEST_CASE("sigma0 partial result is a warning") {
  std::vector<std::string> seen;
  set_warning_sink([&](std::string_view m) { seen.emplace_back(m); });
  const auto scan = find_sigma0(constant(1, 0), 100.0, 2);
  set_warning_sink(nullptr);
  CHECK(scan.partial);
  CHECK(scan.roots.size() == 2);
  CHECK(seen.size() == 1);
}

TEST_CASE("sigma0 agrees with the dense matrix oracle") {
  const auto p = quartic_alpha();
  const auto scan = find_sigma0(p, 40.0, 0);
  const auto ref = oracle::dirichlet_values([&](double x) { return 1.0 + 0.25 * x * x; }, [](double) { return 0.0; },
                                            scan.roots.size());
  REQUIRE(scan.roots.size() >= 3);
  for (std::size_t k = 0; k < scan.roots.size(); ++k)
    CHECK(std::abs(scan.roots[k] - ref[k]) / ref[k] <= 1e-6);

  // negative beta exercises the lower scan bound
  const auto neg = make_profile(ProfileKind::polynomial, {{1.0, 0.0, 0.25}, {-3.0, 0.0, 1.0}, 1});
  const auto scan2 = find_sigma0(neg, 30.0, 0);
  const auto ref2 = oracle::dirichlet_values([](double x) { return 1.0 + 0.25 * x * x; },
                                             [](double x) { return -3.0 + x * x; }, scan2.roots.size());
  REQUIRE(scan2.roots.size() >= 2);
  CHECK(scan2.roots.front() < 0.0);
  CHECK(scan2.roots.front() > scan2.w_min);
  for (std::size_t k = 0; k < scan2.roots.size(); ++k)
    CHECK(std::abs(scan2.roots[k] - ref2[k]) <= 1e-6 * std::max(1.0, std::abs(ref2[k])));
}

TEST_CASE("eigenfunction of the flat profile") {
  const auto ef = eigenfunction(constant(1, 0), pi * pi / 4);
  double err = 0;
  for (std::size_t k = 0; k < ef.values.size(); ++k)
    err = std::max(err, std::abs(ef.values[k] - std::sin(pi * (ef.x(k) + 1) / 2)));
  CHECK(err <= 1e-7);
  CHECK(ef.value_at(0.0) == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(ef.boundary_defect <= 1e-8);
  CHECK(ef.difference_residual <= 1e-6);
  CHECK(ef.interior_zeros == 0);
  CHECK(eigenfunction(constant(1, 0), pi * pi).interior_zeros == 1);
  try {
    eigenfunction(constant(1, 0), 3.0);
    FAIL("expected not_eigenvalue");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::not_eigenvalue);
  }
}

TEST_CASE("interior zero count is nondecreasing in w") {
  const ShootingKernel k(quartic_alpha(), 1.0 / 512);
  int prev = 0;
  for (double w = -2.0; w < 60.0; w += 0.37) {
    std::vector<double> g;
    for (const auto& v : k.solve(w).values) g.push_back(v.real());
    const int z = count_interior_zeros(g);
    CHECK(z >= prev);
    prev = z;
  }
  CHECK(prev >= 3);
}
