#include <doctest.h>

#include <cmath>

#include "hopfcm/manifold.hpp"
#include "hopfcm/numerics.hpp"
#include "oracles.hpp"

using namespace hopfcm;

namespace {

struct Prepared {
  DDESystem sys;
  SpectralData data;
  CoefficientChain chain;
};

Prepared prepare(const testkit::Instance& inst) {
  const HopfPair hopf = find_hopf(inst.sys, inst.omega);
  SpectralData data = build_spectral_data(inst.sys, hopf);
  CoefficientChain chain = coefficient_chain(inst.sys, data);
  return {inst.sys, std::move(data), std::move(chain)};
}

ExpPolyFunction order2_forcing(const SpectralData& data,
                               const ReducedCoefficients& rc, int j, int k) {
  if (j == 2)
    return data.phi1.scaled(rc.g20).plus(data.phi2.scaled(std::conj(rc.g02)));
  REQUIRE(j == 1);
  REQUIRE(k == 1);
  return data.phi1.scaled(rc.g11).plus(data.phi2.scaled(std::conj(rc.g11)));
}

void check_against_collocation(const DDESystem& sys, cplx nu,
                               const ExpPolyFunction& F, const CVec& fjk,
                               const ManifoldCoefficient& w) {
  const CVec rhs0 = fjk - F.evaluate(0.0);
  const auto ref = testkit::collocate(sys, nu, F, rhs0);
  double sup = 1.0;
  for (const auto& v : ref.w) sup = std::max(sup, v.norm());
  for (size_t i = 0; i < ref.theta.size(); ++i)
    CHECK((w.w.evaluate(ref.theta[i]) - ref.w[i]).norm() <= 1e-8 * sup);
}

}  // namespace

TEST_CASE("order-2 coefficients solve their boundary-value problems") {
  for (std::uint32_t seed : {1101u, 1102u}) {
    const auto pre = prepare(testkit::random_instance(2, seed));
    const ReducedCoefficients& rc = pre.chain.rc;
    const SecondOrderCoefficients& so = pre.chain.so;
    const cplx la(0.0, pre.data.omega);
    check_against_collocation(pre.sys, 2.0 * la,
                              order2_forcing(pre.data, rc, 2, 0), rc.f20,
                              so.w20);
    check_against_collocation(pre.sys, cplx(0.0, 0.0),
                              order2_forcing(pre.data, rc, 1, 1), rc.f11,
                              so.w11);
  }
}

TEST_CASE("order-2 structure: conjugation, realness, stacked pairs") {
  for (Eigen::Index n : {1, 3}) {
    const auto pre = prepare(testkit::random_instance(n, 1110u + std::uint32_t(n)));
    const SecondOrderCoefficients& so = pre.chain.so;
    const double r = pre.sys.r;
    for (int i = 0; i <= 9; ++i) {
      const double theta = -r * i / 9.0;
      CHECK((so.w02.w.evaluate(theta) - so.w20.w.evaluate(theta).conjugate())
                .norm() <= 1e-10);
      CHECK(so.w11.w.evaluate(theta).imag().norm() <= 1e-10);
    }
    const ReducedCoefficients& rc = pre.chain.rc;
    CHECK((rc.W20.head(n) - so.w20.at0).norm() == 0.0);
    CHECK((rc.W20.tail(n) - so.w20.at_mr).norm() == 0.0);
    CHECK((rc.W11.head(n) - so.w11.at0).norm() == 0.0);
    CHECK((rc.W02.tail(n) - so.w02.at_mr).norm() == 0.0);
    CHECK((so.w20.at0 - so.w20.w.evaluate(0.0)).norm() <= 1e-14);
    CHECK((so.w20.at_mr - so.w20.w.evaluate(-r)).norm() <= 1e-14);
  }
}

TEST_CASE("scalar demo: frozen third-order chain") {
  const auto pre = prepare(testkit::demo_n1(/*cubic=*/true));
  const ReducedCoefficients& rc = pre.chain.rc;
  CHECK(std::abs(rc.g21 - cplx(-2.39419611381, -1.19344057673)) <= 1e-9);
  CHECK(std::abs(rc.g12 - cplx(2.09452265545, 1.66416654438)) <= 1e-9);
  CHECK(std::abs(rc.f21(0) - cplx(-0.5195440396358749, -4.954235037937501)) <=
        1e-9);
  CHECK(std::abs(pre.chain.so.w20.at0(0) -
                 cplx(-0.129886009909, 0.0196920261146)) <= 1e-9);
  CHECK(std::abs(pre.chain.so.w11.at0(0) - cplx(0.119637788167, 0.0)) <= 1e-9);

  const ThirdOrderSolution third =
      solve_w21(pre.sys, pre.data, rc, pre.chain.so);
  CHECK(std::abs(third.R1(0) -
                 cplx(-0.14756916118659005, -1.7882243287713615)) <= 1e-9);
  CHECK(std::abs(third.R2(0) -
                 cplx(0.23180109634009927, 2.8089362071193236)) <= 1e-9);
  CHECK(std::abs(third.Rtilde -
                 cplx(-0.0759653759971020, -0.6542862437755286)) <= 1e-9);
  CHECK(std::abs(third.w21.at0(0) -
                 cplx(-0.0379826879985510, -0.3271431218877643)) <= 1e-10);
  CHECK(std::abs(third.w21.at_mr(0) - cplx(-0.474712283074, -1.75024164077)) <=
        1e-9);

  // Without the cubic term the (2,1) data change but the machinery doesn't.
  const auto quad = prepare(testkit::demo_n1(/*cubic=*/false));
  const ThirdOrderSolution tq =
      solve_w21(quad.sys, quad.data, quad.chain.rc, quad.chain.so);
  CHECK(std::abs(tq.w21.at0(0) -
                 cplx(-0.0306786964954990, -0.2172973905951020)) <= 1e-10);
}

TEST_CASE("R1/R2 equal the closed integrals of the (2,1) forcing") {
  for (Eigen::Index n : {1, 2, 5}) {
    const auto pre = prepare(testkit::random_instance(n, 1120u + std::uint32_t(n)));
    const ReducedCoefficients& rc = pre.chain.rc;
    const SecondOrderCoefficients& so = pre.chain.so;
    const cplx la(0.0, pre.data.omega);
    const cplx ed = std::exp(-la * pre.sys.r);
    const ExpPolyFunction F21 = third_order_forcing(pre.data, rc, so);

    const CVec R1 = assemble_R1(pre.sys, pre.data, rc, so);
    const CVec R1_generic = -ed * F21.integral_weighted(-la);
    CHECK((R1 - R1_generic).norm() <= 1e-11 * std::max(1.0, R1.norm()));

    const CVec R2 = assemble_R2(pre.sys, pre.data, rc, so);
    const CVec R2_generic = F21.evaluate(0.0) - rc.f21;
    CHECK((R2 - R2_generic).norm() <= 1e-11 * std::max(1.0, R2.norm()));
  }
}

TEST_CASE("solvability: the five identities vanish one by one") {
  for (Eigen::Index n : {1, 2, 3, 5}) {
    const auto pre = prepare(testkit::random_instance(n, 1130u + std::uint32_t(n)));
    const ReducedCoefficients& rc = pre.chain.rc;
    const SecondOrderCoefficients& so = pre.chain.so;
    const FredholmIdentities id =
        fredholm_identities(pre.sys, pre.data, rc, so);
    CHECK(std::abs(id.r1a) <= 1e-9);
    CHECK(std::abs(id.r1b) <= 1e-9);
    CHECK(std::abs(id.r2) <= 1e-9);
    CHECK(std::abs(id.r3) <= 1e-9);
    CHECK(std::abs(id.r4) <= 1e-9);

    const CVec R1 = assemble_R1(pre.sys, pre.data, rc, so);
    const CVec R2 = assemble_R2(pre.sys, pre.data, rc, so);
    const double defect = solvability_defect(pre.data, pre.sys, R1, R2);
    const double scale =
        singular_extrema(pre.data.Bc).sigma_max * R1.norm() + R2.norm();
    CHECK(defect <= 1e-8 * std::max(scale, 1.0));
    // The identities are exactly the five summands of the defect.
    const cplx sum = id.r1a + id.r1b + id.r2 + id.r3 + id.r4;
    CHECK(std::abs(std::abs(sum) - defect) <= 1e-12 * std::max(scale, 1.0));
  }
}

TEST_CASE("the regularized (2,1) solve and its diagnostics") {
  for (Eigen::Index n : {1, 2, 3, 5}) {
    const auto pre = prepare(testkit::random_instance(n, 1140u + std::uint32_t(n)));
    const ReducedCoefficients& rc = pre.chain.rc;
    const SecondOrderCoefficients& so = pre.chain.so;
    const ThirdOrderSolution third = solve_w21(pre.sys, pre.data, rc, so);
    const cplx la(0.0, pre.data.omega);
    const CVec rhs = pre.data.Bc * third.R1 - third.R2;
    const double rhs_scale = std::max(1.0, rhs.norm());

    CHECK((third.M * third.w21.at0 - rhs).norm() <= 1e-8 * rhs_scale);
    CHECK(third.reduced_residual <= 1e-8 * rhs_scale);
    CHECK(third.first_row_annihilation <= 1e-10);
    CHECK(third.cond_regularized < 1e6);

    // Row replaced by the limit condition: Psi_1(0) Mtilde w21(0) = Rtilde.
    const cplx row0 = (pre.data.Psi1_0 * (third.Mtilde * third.w21.at0)).value();
    CHECK(std::abs(row0 - third.Rtilde) <=
          1e-9 * std::max(1.0, std::abs(third.Rtilde)));

    // Endpoint reached two ways: the assembled value and the ODE solve.
    CHECK((third.w21.at_mr - (std::exp(-la * pre.sys.r) * third.w21.at0 +
                              third.R1)).norm() <= 1e-12 * rhs_scale);
    CHECK((third.w21.w.evaluate(-pre.sys.r) - third.w21.at_mr).norm() <=
          1e-10 * std::max(1.0, third.w21.at_mr.norm()));

    // Boundary relation of the underlying BVP.
    const ExpPolyFunction F21 = third_order_forcing(pre.data, rc, so);
    const CMat Ac = pre.sys.A.cast<cplx>();
    const CVec boundary = la * third.w21.at0 - Ac * third.w21.at0 -
                          pre.data.Bc * third.w21.at_mr;
    CHECK((boundary - (rc.f21 - F21.evaluate(0.0))).norm() <= 1e-8 * rhs_scale);

    // And the function really integrates the forced equation.
    const CVec back =
        testkit::rk4_propagate(la, F21, third.w21.at0, -pre.sys.r);
    CHECK((third.w21.w.evaluate(-pre.sys.r) - back).norm() <=
          1e-9 * std::max(1.0, back.norm()));
  }
}

TEST_CASE("a corrupted order-2 coefficient shows up in the defect") {
  const auto pre = prepare(testkit::demo_n1());
  SecondOrderCoefficients so = pre.chain.so;
  so.w11.at0(0) += 1e-3;
  const CVec R1 = assemble_R1(pre.sys, pre.data, pre.chain.rc, so);
  const CVec R2 = assemble_R2(pre.sys, pre.data, pre.chain.rc, so);
  CHECK(solvability_defect(pre.data, pre.sys, R1, R2) > 1e-4);
}

TEST_CASE("resonant rates are rejected") {
  const auto pre = prepare(testkit::demo_n1());
  const ExpPolyFunction F11 = order2_forcing(pre.data, pre.chain.rc, 1, 1);
  CHECK_THROWS_AS(
      solve_manifold_order(pre.sys, 1, 1, cplx(0.0, pre.data.omega), F11,
                           pre.chain.rc.f11),
      ResonantSecondOrder);

  // 1:2 resonance: rotation blocks at omega and 2 omega make the
  // characteristic matrix at 2 i omega singular.
  RMat A = RMat::Zero(4, 4);
  A(0, 1) = 1.0; A(1, 0) = -1.0;
  A(2, 3) = 2.0; A(3, 2) = -2.0;
  const DDESystem sys =
      make_system(4, 1.0, A, RMat::Zero(4, 4),
                  std::vector<RMat>(4, RMat::Zero(8, 8)), {});
  HopfPair hopf;
  hopf.omega = 1.0;
  hopf.lambda = cplx(0.0, 1.0);
  const SpectralData data = build_spectral_data(sys, hopf);
  CHECK_THROWS_AS(coefficient_chain(sys, data), ResonantSecondOrder);
}
