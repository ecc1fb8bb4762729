#include <cmath>
#include <numbers>

#include "degenlab/irregularity_spectrum.hpp"
#include "degenlab/sturm_shooting.hpp"
#include "doctest.h"

using namespace degenlab;
using std::numbers::pi;

TEST_CASE("sigma from sigma0") {
  const auto rep = compute_sigma({pi * pi / 4, pi * pi});
  REQUIRE(rep.sigma.size() == 2);
  CHECK(std::abs(rep.sigma[0] - std::sqrt(pi * pi / 4 + 0.25)) < 1e-12);
  CHECK(std::abs(rep.sigma[1] - std::sqrt(pi * pi + 0.25)) < 1e-12);
  CHECK(rep.sigma[0] == doctest::Approx(1.6484543).epsilon(1e-7));
  CHECK(rep.sigma[1] == doctest::Approx(3.1811326).epsilon(1e-7));
  CHECK(rep.s0 == rep.sigma[0]);
  CHECK_FALSE(rep.zero_membership_flag);
  CHECK(rep.predicted_codimension == std::vector<int>{2, 4});
  for (std::size_t j = 0; j < rep.sigma.size(); ++j)
    CHECK(std::abs(rep.sigma[j] * rep.sigma[j] - 0.25 - rep.sigma0[rep.source[j]]) < 1e-9);

  CHECK(compute_sigma({0.0}).sigma == std::vector<double>{0.5});
}

TEST_CASE("w <= -1/4 raises the zero-membership flag with a warning") {
  int warnings = 0;
  set_warning_sink([&](std::string_view) { ++warnings; });
  const auto rep = compute_sigma({-0.25});
  set_warning_sink(nullptr);
  CHECK(rep.zero_membership_flag);
  CHECK(warnings == 1);
  CHECK(rep.sigma.empty());
}

TEST_CASE("compute_sigma input errors") {
  CHECK_THROWS_AS(compute_sigma({}), Error);
  CHECK_THROWS_AS(compute_sigma({3.0, 1.0}), Error);
}

TEST_CASE("both counting rules for nonreal z agree") {
  set_warning_sink([](std::string_view) {});
  for (const std::vector<double>& s0 : std::vector<std::vector<double>>{
           {-3.0, -1.0, 0.5, 2.0}, {-0.3, 4.0}, {1.0, 2.0}, {-0.25, 1.0}}) {
    const auto rep = compute_sigma(s0);
    CHECK(rep.nonreal_pair_count == count_nonreal_z_pairs(s0));
  }
  set_warning_sink(nullptr);
}

TEST_CASE("example profiles never put 0 in sigma") {
  for (const auto& p : {make_profile(ProfileKind::constant, {{1.0}, {0.0}, 1}),
                        make_profile(ProfileKind::constant, {{1.0}, {1.0}, 1}),
                        make_profile(ProfileKind::polynomial, {{1.0, 0.0, 0.25}, {0.0}, 1})}) {
    const auto rep = compute_sigma(find_sigma0(p, 30.0, 0).roots, p.fingerprint());
    CHECK_FALSE(rep.zero_membership_flag);
    CHECK(rep.s0 > 0);
    CHECK(std::is_sorted(rep.sigma.begin(), rep.sigma.end()));
    CHECK(std::adjacent_find(rep.sigma.begin(), rep.sigma.end()) == rep.sigma.end());
    CHECK(rep.profile_fingerprint == p.fingerprint());
  }
}

TEST_CASE("interval location") {
  const auto rep = compute_sigma({pi * pi / 4, pi * pi});
  CHECK(locate_interval(rep, 1.0).kind == IntervalLocation::Kind::below_s0);
  const auto mid = locate_interval(rep, 2.0);
  CHECK(mid.kind == IntervalLocation::Kind::between);
  CHECK(mid.j == 0);
  CHECK(locate_interval(rep, 4.0).j == 1);
  const auto res = locate_interval(rep, 1.6484543);
  CHECK(res.kind == IntervalLocation::Kind::resonant);
  CHECK(res.j == 0);
}

TEST_CASE("symbolic reduction of z(z+1)") {
  const auto chk = verify_sigma_reduction();
  CHECK(chk.reduction_holds);
  CHECK(chk.reflection_invariant);
  CHECK(chk.imag_is_2_s_tau);
  // spot check the expanded polynomial numerically
  const Complex z(0.7 - 0.5, 1.3);
  CHECK(std::abs(chk.expanded.evaluate(0.7, 1.3) - z * (z + 1.0)) < 1e-14);
}
