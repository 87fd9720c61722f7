#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "dnls/lattice.hpp"
#include "dnls/potential.hpp"
#include "support.hpp"

using namespace dnls;
using testing::random_field;

TEST_CASE("params validation") {
  LatticeParams p;
  CHECK_NOTHROW(p.validate());
  for (auto bad : {LatticeParams{0, 2, 1, 1, 1}, LatticeParams{1, 1, 1, 1, 1},
                   LatticeParams{1, 2, 0, 1, 1}, LatticeParams{1, 2, 1, -1, 1},
                   LatticeParams{1, 2, 1, 1, 0}})
    CHECK_THROWS_AS(bad.validate(), InvalidParams);
  CHECK(LatticeParams{3, 5, 1, 1, 1}.size() == 15);
}

TEST_CASE("field construction and periodic access") {
  CHECK_THROWS_AS(LatticeField(2, 2, std::vector<cplx>(3)), DimensionMismatch);
  Rng rng(1);
  const LatticeField phi = random_field(rng, 3, 4);
  for (long t = -7; t < 7; ++t)
    for (long k = -9; k < 9; ++k) {
      CHECK(phi(t, k) == phi(t + 3, k));
      CHECK(phi(t, k) == phi(t, k + 4));
      CHECK(phi(t, k) == testing::at(phi, t, k));
    }
  CHECK(phi.index(1, 2) == 6);
}

TEST_CASE("sup norm") {
  CHECK(sup_norm(LatticeField(3, 3)) == 0.0);
  LatticeField phi(2, 3);
  phi(1, 2) = {3.0, 4.0};
  CHECK(sup_norm(phi) == doctest::Approx(5.0).epsilon(1e-15));
  Rng rng(2);
  for (int n = 0; n < 50; ++n) {
    const LatticeField r = random_field(rng, 4, 5, 3.0);
    CHECK(sup_norm(r) == testing::brute_max_modulus(r));
  }
}

TEST_CASE("central time difference") {
  Rng rng(3);
  CHECK(sup_norm(central_time_diff(LatticeField::constant(4, 3, {2, -1}))) ==
        0.0);
  for (int T : {1, 2}) {
    const LatticeField phi = random_field(rng, T, 5);
    CHECK(sup_norm(central_time_diff(phi)) == 0.0);
  }
  const LatticeField phi = random_field(rng, 5, 3);
  const LatticeField d = central_time_diff(phi);
  for (long t = 0; t < 5; ++t)
    for (long k = 0; k < 3; ++k)
      CHECK(d(t, k) ==
            testing::at(phi, t + 1, k) - testing::at(phi, t - 1, k));
}

TEST_CASE("spatial laplacian") {
  CHECK(sup_norm(spatial_laplacian(LatticeField::constant(2, 6, {1, 1}))) ==
        0.0);

  SUBCASE("K = 2 collapse") {
    LatticeField phi(3, 2);
    const cplx a{1.5, -2.0}, b{-0.25, 3.0};
    for (long t = 0; t < 3; ++t) {
      phi(t, 0) = a;
      phi(t, 1) = b;
    }
    const LatticeField d = spatial_laplacian(phi);
    for (long t = 0; t < 3; ++t) {
      CHECK(d(t, 0) == 2.0 * (b - a));
      CHECK(d(t, 1) == 2.0 * (a - b));
    }
  }

  SUBCASE("fourth roots of unity") {
    LatticeField phi(1, 4);
    const cplx i{0, 1};
    cplx p = 1.0;
    for (long k = 0; k < 4; ++k, p *= i)
      phi(0, k) = p;
    const LatticeField d = spatial_laplacian(phi);
    for (long k = 0; k < 4; ++k)
      CHECK(std::abs(d(0, k) + 2.0 * phi(0, k)) == 0.0);
  }

  SUBCASE("stencil identity") {
    Rng rng(4);
    const LatticeField phi = random_field(rng, 3, 7);
    const LatticeField d = spatial_laplacian(phi);
    for (long t = 0; t < 3; ++t)
      for (long k = 0; k < 7; ++k)
        CHECK(d(t, k) - (testing::at(phi, t, k + 1) -
                         2.0 * testing::at(phi, t, k) +
                         testing::at(phi, t, k - 1)) ==
              cplx{0.0, 0.0});
  }
}

TEST_CASE("L annihilates constants and matches the formula") {
  const LatticeParams p{4, 4, 1.3, 0.7, 1.0};
  CHECK(sup_norm(apply_L(LatticeField::constant(4, 4, {3, 2}), p)) == 0.0);
  Rng rng(5);
  for (int n = 0; n < 20; ++n) {
    const LatticeField phi = random_field(rng, 4, 4);
    CHECK(testing::max_entry_diff(apply_L(phi, p),
                                  testing::naive_L(phi, 1.3, 0.7)) <= 1e-14);
  }
}

TEST_CASE("L is complex linear") {
  const LatticeParams p{5, 3, 1.0, 2.0, 1.0};
  Rng rng(6);
  for (int n = 0; n < 100; ++n) {
    const cplx a = testing::random_complex(rng, 2.0);
    const cplx b = testing::random_complex(rng, 2.0);
    const LatticeField phi = random_field(rng, 5, 3);
    const LatticeField psi = random_field(rng, 5, 3);
    const LatticeField lhs = apply_L(a * phi + b * psi, p);
    const LatticeField rhs = a * apply_L(phi, p) + b * apply_L(psi, p);
    const double scale = 1.0 + sup_norm(lhs) + sup_norm(rhs);
    CHECK(testing::max_entry_diff(lhs, rhs) <= 1e-13 * scale);
  }
}

TEST_CASE("cubic map") {
  LatticeParams p{1, 2, 1, 1, 2.0};
  CHECK(sup_norm(apply_F(LatticeField(1, 2), p)) == 0.0);
  LatticeField phi(1, 2);
  phi[0] = {1, 1};
  CHECK(apply_F(phi, p)[0] == cplx{-4, -4});

  Rng rng(7);
  p = {3, 4, 1, 1, -1.7};
  for (int n = 0; n < 100; ++n) {
    const LatticeField r = random_field(rng, 3, 4, rng.uniform(0.0, 7.0));
    const LatticeField fr = apply_F(r, p);
    const LatticeField fm = apply_F(-r, p);
    CHECK(testing::max_entry_diff(fm, -fr) <= 1e-14);
    const double n3 = 1.7 * std::pow(sup_norm(r), 3);
    CHECK(std::abs(sup_norm(fr) - n3) <= 1e-12 * n3);
  }
}

TEST_CASE("Nemytskii operator") {
  Rng rng(8);
  const LatticeField phi = random_field(rng, 4, 3);
  CHECK(sup_norm(apply_G(phi, zero_potential())) == 0.0);

  const LatticeField alt = apply_G(phi, power_law({1.0, -1.0}, 1.0));
  for (long k = 0; k < 3; ++k) {
    CHECK(std::abs(alt(0, k) - phi(0, k)) <= 1e-15);
    CHECK(std::abs(alt(1, k) + phi(1, k)) <= 1e-15);
    CHECK(std::abs(alt(2, k) - phi(2, k)) <= 1e-15);
  }

  LatticeField single(1, 2);
  single[0] = {0, 2};
  CHECK(std::abs(apply_G(single, power_law({1.0}, 2.0))[0] - cplx{0, 4}) <=
        1e-15);

  CHECK_THROWS_AS(apply_G(LatticeField(3, 2), power_law({1.0, 2.0}, 1.0)),
                  PeriodMismatch);
}

TEST_CASE("operators commute with lattice translation") {
  const LatticeParams p{4, 5, 1.1, 0.9, 1.0};
  const Potential g = bounded_potential({1.0});
  Rng rng(9);
  const LatticeField phi = random_field(rng, 4, 5);
  LatticeField shifted(4, 5);
  for (long t = 0; t < 4; ++t)
    for (long k = 0; k < 5; ++k)
      shifted(t, k) = phi(t + 1, k + 2);
  const auto check = [&](const LatticeField &a, const LatticeField &b) {
    for (long t = 0; t < 4; ++t)
      for (long k = 0; k < 5; ++k)
        CHECK(std::abs(b(t, k) - a(t + 1, k + 2)) <= 1e-14);
  };
  check(apply_L(phi, p), apply_L(shifted, p));
  check(apply_F(phi, p), apply_F(shifted, p));
  check(apply_G(phi, g), apply_G(shifted, g));
}
