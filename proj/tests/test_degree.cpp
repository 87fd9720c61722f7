#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "dnls/degree.hpp"
#include "support.hpp"

using namespace dnls;

TEST_CASE("Jacobian sign") {
  CHECK(jacobian_sign(Eigen::MatrixXd::Identity(4, 4)).first == 1);
  Eigen::MatrixXd flip = Eigen::MatrixXd::Identity(4, 4);
  flip(2, 2) = -3.0;
  CHECK(jacobian_sign(flip).first == -1);
  // Nearly parallel columns; a small but well-conditioned scale is fine.
  Eigen::MatrixXd singular = Eigen::MatrixXd::Identity(4, 4);
  singular(0, 1) = 1.0;
  singular(1, 1) = 1e-14;
  CHECK(jacobian_sign(singular).first == 0);
  Eigen::MatrixXd scaled = 1e-8 * Eigen::MatrixXd::Identity(4, 4);
  CHECK(jacobian_sign(scaled).first == 1);
}

TEST_CASE("zero forcing on the smallest lattice") {
  const ShiftedOperator op = build_shifted({1, 2, 1, 1, 1});
  const Potential g = zero_potential();
  const ExistenceCertificate cert = certify(op, g, {.samples = 2000});
  REQUIRE(cert.valid());

  for (std::uint64_t seed : {0u, 1u, 2u}) {
    const DegreeReport s =
        estimate_degree(DegreeTarget::S_map, op, g, cert, {.seed = seed});
    const DegreeReport q =
        estimate_degree(DegreeTarget::Q_map, op, g, cert, {.seed = seed});
    CHECK(s.degree_estimate == 1);
    CHECK(s.parity_ok);
    CHECK(q.degree_estimate == s.degree_estimate);
    CHECK(s.completeness == "heuristic");

    // Origin is a zero of S with identity Jacobian.
    bool origin = false;
    for (const LocatedZero &z : s.zeros)
      if (sup_norm(z.field) <= 1e-9) {
        origin = true;
        CHECK(z.det_sign == 1);
      }
    CHECK(origin);

    int sum = 0;
    for (const LocatedZero &z : s.counted)
      sum += z.det_sign;
    CHECK(sum == s.degree_estimate);
  }
}

TEST_CASE("listed zeros are verified independently") {
  const ShiftedOperator op = build_shifted({1, 2, 1, 1, 1});
  const Potential g = power_law({{0.5, 0.5}}, 1.0);
  const ExistenceCertificate cert = certify(op, g, {.samples = 2000});
  REQUIRE(cert.valid());
  for (DegreeTarget target : {DegreeTarget::S_map, DegreeTarget::Q_map}) {
    const DegreeReport rep = estimate_degree(target, op, g, cert, {.seed = 4});
    const double tau = target == DegreeTarget::S_map ? 0.0 : 1.0;
    for (const LocatedZero &z : rep.zeros) {
      CHECK(sup_norm(z.field) < rep.radius);
      CHECK(sup_norm(homotopy_map(z.field, op, g, tau)) <= 1e-9);
      CHECK(z.residual <= 1e-9);
    }
    for (const LocatedZero &z : rep.counted)
      CHECK(sup_norm(z.field) < rep.radius);
  }
}

TEST_CASE("S zeros come in antipodal pairs with equal signs") {
  const ShiftedOperator op = build_shifted({1, 2, 1, 1, 1});
  const Potential g = power_law({1.0}, 2.0);
  const ExistenceCertificate cert = certify(op, g, {.samples = 2000});
  const DegreeReport s =
      estimate_degree(DegreeTarget::S_map, op, g, cert, {.seed = 1});
  for (const LocatedZero &z : s.zeros) {
    if (sup_norm(z.field) <= 1e-9)
      continue;
    const LatticeField neg = -z.field;
    CHECK(sup_norm(apply_S(neg, op)) <= 1e-9);
    const auto [sign, rel] = jacobian_sign(
        homotopy_jacobian(neg, op, g, 0.0, JacobianMode::analytic));
    CHECK(sign == z.det_sign);
    (void)rel;
  }
}

TEST_CASE("parity and homotopy invariance for built-in families") {
  const ShiftedOperator op = build_shifted({1, 2, 1, 1, 1});
  for (const Potential &g :
       {power_law({1.0}, 2.0), power_law({1.0}, 0.5), bounded_potential({1.0}),
        constant_potential({1.0})}) {
    const ExistenceCertificate cert = certify(op, g, {.samples = 2000});
    REQUIRE(cert.valid());
    for (std::uint64_t seed : {0u, 1u, 2u}) {
      const DegreeReport s =
          estimate_degree(DegreeTarget::S_map, op, g, cert, {.seed = seed});
      const DegreeReport q =
          estimate_degree(DegreeTarget::Q_map, op, g, cert, {.seed = seed});
      CHECK(s.parity_ok);
      CHECK(s.degree_estimate == q.degree_estimate);
    }
  }
}

TEST_CASE("deterministic for a fixed seed") {
  const ShiftedOperator op = build_shifted({1, 2, 1, 1, 1});
  const Potential g = power_law({1.0}, 2.0);
  const ExistenceCertificate cert = certify(op, g, {.samples = 500});
  const DegreeReport a =
      estimate_degree(DegreeTarget::Q_map, op, g, cert, {.seed = 9});
  const DegreeReport b =
      estimate_degree(DegreeTarget::Q_map, op, g, cert, {.seed = 9});
  REQUIRE(a.counted.size() == b.counted.size());
  for (std::size_t i = 0; i < a.counted.size(); ++i)
    CHECK(a.counted[i].field == b.counted[i].field);
  CHECK(a.perturbation == b.perturbation);
}

TEST_CASE("guards") {
  const ShiftedOperator big = build_shifted({4, 9, 1, 1, 1});
  const ExistenceCertificate cert =
      certify(big, zero_potential(), {.samples = 10});
  CHECK_THROWS_AS(
      estimate_degree(DegreeTarget::S_map, big, zero_potential(), cert),
      DimensionTooLarge);

  const ShiftedOperator op = build_shifted({1, 2, 1, 1, 1});
  ExistenceCertificate invalid = certify(op, zero_potential(), {.samples = 0});
  CHECK_THROWS(
      estimate_degree(DegreeTarget::S_map, op, zero_potential(), invalid));
}
