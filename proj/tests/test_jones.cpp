#include "polsim/jones.hpp"

#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "polsim/errors.hpp"
#include "polsim/rng.hpp"

using namespace polsim;

TEST_CASE("waveplate with zero retardation is the identity") {
  for (double phi : {0.0, 0.3, 1.7, -2.5, 12.0}) {
    const JonesMatrix m = waveplate_matrix({phi, 0.0});
    CHECK(oracles::max_entry_diff(m, JonesMatrix::identity()) < 1e-15);
  }
}

TEST_CASE("half-wave plate at 0 degrees reflects s2 and s3") {
  Rng rng(7);
  const JonesMatrix hwp = waveplate_matrix({0.0, M_PI});
  for (int i = 0; i < 50; ++i) {
    const JonesVector v = oracles::random_jones(rng, 2.0);
    const StokesVector in = jones_to_stokes(v);
    const StokesVector out = jones_to_stokes(hwp * v);
    CHECK(out.s0 == doctest::Approx(in.s0).epsilon(1e-12));
    CHECK(out.s1 == doctest::Approx(in.s1).epsilon(1e-12));
    CHECK(out.s2 == doctest::Approx(-in.s2).epsilon(1e-12));
    CHECK(out.s3 == doctest::Approx(-in.s3).epsilon(1e-12));
  }
}

TEST_CASE("quarter-wave plate at 45 degrees sends 0-deg linear to circular") {
  const JonesMatrix qwp = waveplate_matrix({M_PI / 4.0, M_PI / 2.0});
  const StokesVector out = jones_to_stokes(qwp * JonesVector{1.0, 0.0});
  CHECK(out.s0 == doctest::Approx(1.0));
  CHECK(out.s1 == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(out.s2 == doctest::Approx(0.0).epsilon(1e-12));
  // Sign frozen by the project retarder convention.
  CHECK(out.s3 == doctest::Approx(-1.0));
}

TEST_CASE("jones_to_stokes reference states") {
  const StokesVector lin0 = jones_to_stokes({1.0, 0.0});
  CHECK(oracles::stokes_diff(lin0, {1, 1, 0, 0}) < 1e-12);
  const StokesVector lin45 = jones_to_stokes({1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)});
  CHECK(oracles::stokes_diff(lin45, {1, 0, 1, 0}) < 1e-12);
  const StokesVector circ =
      jones_to_stokes({{1.0 / std::sqrt(2.0), 0.0}, {0.0, 1.0 / std::sqrt(2.0)}});
  CHECK(oracles::stokes_diff(circ, {1, 0, 0, 1}) < 1e-12);
}

TEST_CASE("stokes_to_jones reference states and power scaling") {
  const JonesVector a = stokes_to_jones({1, 1, 0, 0});
  CHECK(std::abs(a.ex - Complex{1, 0}) < 1e-12);
  CHECK(std::abs(a.ey) < 1e-12);

  const JonesVector b = stokes_to_jones({1, -1, 0, 0});
  CHECK(std::abs(b.ex) < 1e-12);
  CHECK(std::abs(b.ey - Complex{1, 0}) < 1e-12);

  const JonesVector c = stokes_to_jones({2, 0, 2, 0});
  CHECK(std::abs(c.ex - Complex{1, 0}) < 1e-9);
  CHECK(std::abs(c.ey - Complex{1, 0}) < 1e-9);
  CHECK(c.power() == doctest::Approx(2.0));
}

TEST_CASE("stokes_to_jones rejects partially polarized input") {
  CHECK_THROWS_AS(stokes_to_jones({1, 0.5, 0, 0}), NotFullyPolarized);
  CHECK_THROWS_AS(stokes_to_jones({1, 0.9, 0.9, 0.9}), NotFullyPolarized);
}

TEST_CASE("conversion roundtrip up to global phase") {
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const JonesVector v = oracles::random_jones(rng, rng.uniform(0.1, 3.0));
    const StokesVector s = jones_to_stokes(v);
    const JonesVector w = stokes_to_jones(s);
    CHECK(oracles::stokes_diff(jones_to_stokes(w), s) < 1e-9 * s.s0);
    CHECK(w.ex.imag() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(w.ex.real() >= 0.0);
  }
}

TEST_CASE("south-pole branch of the canonical representative") {
  const JonesVector v = stokes_to_jones({3.0, -3.0, 0.0, 0.0});
  CHECK(std::abs(v.ex) < 1e-12);
  CHECK(v.power() == doctest::Approx(3.0));
}

TEST_CASE("sphere_angle reference values") {
  const StokesVector lin0{1, 1, 0, 0};
  const StokesVector lin90{1, -1, 0, 0};
  const StokesVector lin45{1, 0, 1, 0};
  CHECK(sphere_angle(lin0, lin90) == doctest::Approx(M_PI));
  // 0-deg and 45-deg pilots span a quarter turn on the sphere.
  CHECK(sphere_angle(lin0, lin45) == doctest::Approx(M_PI / 2.0));
  CHECK(sphere_angle(lin45, lin45) == doctest::Approx(0.0));
  CHECK_THROWS_AS(sphere_angle(lin0, {1, 0.2, 0, 0}), NotFullyPolarized);
}

TEST_CASE("analyzer_power is Malus' law") {
  const JonesVector lin0{1.0, 0.0};  // 1 W at 0 degrees
  CHECK(analyzer_power(lin0, {1, 1, 0, 0}) == doctest::Approx(1.0));
  CHECK(analyzer_power(lin0, {1, -1, 0, 0}) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(analyzer_power(lin0, {1, 0, 1, 0}) == doctest::Approx(0.5));
}

TEST_CASE("analyzer_power matches the sphere-angle form for random states") {
  Rng rng(13);
  for (int i = 0; i < 100; ++i) {
    const StokesVector sv = oracles::random_sop(rng);
    const StokesVector axis = oracles::random_sop(rng);
    const JonesVector v = stokes_to_jones(sv);
    const double cosang =
        sv.s1 * axis.s1 + sv.s2 * axis.s2 + sv.s3 * axis.s3;
    CHECK(analyzer_power(v, axis) ==
          doctest::Approx((1.0 + cosang) / 2.0).epsilon(1e-9));
  }
}

TEST_CASE("unitarity: lossless matrices preserve power") {
  Rng rng(17);
  for (int i = 0; i < 200; ++i) {
    const JonesMatrix m = waveplate_matrix(
        {rng.uniform(-10.0, 10.0), rng.uniform(-10.0, 10.0)});
    CHECK(m.unitarity_defect() < 1e-12);
    const JonesVector v = oracles::random_jones(rng, rng.uniform(0.1, 2.0));
    CHECK(std::abs((m * v).power() - v.power()) <= 1e-12 * v.power());
  }
}

TEST_CASE("retardation additivity at a common orientation") {
  Rng rng(19);
  for (int i = 0; i < 100; ++i) {
    const double phi = rng.uniform(-3.0, 3.0);
    const double d1 = rng.uniform(-6.0, 6.0);
    const double d2 = rng.uniform(-6.0, 6.0);
    const JonesMatrix lhs =
        waveplate_matrix({phi, d1}) * waveplate_matrix({phi, d2});
    const JonesMatrix rhs = waveplate_matrix({phi, d1 + d2});
    CHECK(oracles::max_entry_diff(lhs, rhs) < 1e-12);
  }
}

TEST_CASE("sphere doubling: physical rotation alpha moves the sphere by 2 alpha") {
  for (double alpha : {M_PI / 8.0, M_PI / 4.0}) {
    // A rotated linear state vs. the unrotated one.
    const JonesVector in{1.0, 0.0};
    const JonesVector rot{std::cos(alpha), std::sin(alpha)};
    CHECK(sphere_angle(jones_to_stokes(in), jones_to_stokes(rot)) ==
          doctest::Approx(2.0 * alpha).epsilon(1e-12));
  }
}

TEST_CASE("PBS splits all power between its two ports") {
  Rng rng(23);
  for (int i = 0; i < 100; ++i) {
    const JonesVector v = oracles::random_jones(rng, rng.uniform(0.1, 2.0));
    const StokesVector axis = oracles::random_sop(rng);
    const double sum =
        analyzer_power(v, axis) + analyzer_power(v, antipode(axis));
    CHECK(std::abs(sum - v.power()) <= 1e-12 * v.power());
  }
}

TEST_CASE("rotation_about_stokes_axis agrees with the Rodrigues oracle") {
  Rng rng(29);
  for (int i = 0; i < 100; ++i) {
    const StokesVector axis = oracles::random_sop(rng);
    const double angle = rng.uniform(-7.0, 7.0);
    const JonesMatrix m = rotation_about_stokes_axis(axis, angle);
    CHECK(m.unitarity_defect() < 1e-12);
    const StokesVector in = oracles::random_sop(rng);
    const StokesVector expect =
        oracles::rotate_stokes(in, {axis.s1, axis.s2, axis.s3}, angle);
    const StokesVector got = jones_to_stokes(m * stokes_to_jones(in));
    CHECK(oracles::stokes_diff(got, expect) < 1e-9);
  }
}

TEST_CASE("waveplate equals the equatorial-axis rotation") {
  Rng rng(31);
  for (int i = 0; i < 50; ++i) {
    const double phi = rng.uniform(-3.0, 3.0);
    const double delta = rng.uniform(0.0, 2.0 * M_PI);
    const JonesMatrix wp = waveplate_matrix({phi, delta});
    const StokesVector in = oracles::random_sop(rng);
    const StokesVector expect = oracles::rotate_stokes(
        in, {std::cos(2 * phi), std::sin(2 * phi), 0.0}, delta);
    const StokesVector got = jones_to_stokes(wp * stokes_to_jones(in));
    CHECK(oracles::stokes_diff(got, expect) < 1e-9);
  }
}
