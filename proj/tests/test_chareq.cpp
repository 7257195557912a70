#include <doctest.h>

#include <cmath>
#include <random>

#include "hopfcm/chareq.hpp"
#include "hopfcm/numerics.hpp"
#include "hopfcm/perturbation.hpp"
#include "oracles.hpp"

using namespace hopfcm;

namespace {

const double kHalfPi = std::acos(0.0);

std::vector<RMat> zero_d2(Eigen::Index n) {
  return std::vector<RMat>(size_t(n), RMat::Zero(2 * n, 2 * n));
}

}  // namespace

TEST_CASE("make_system rejects malformed input") {
  const RMat one = RMat::Identity(1, 1);
  CHECK_THROWS_AS(make_system(0, 1.0, RMat(), RMat(), {}, {}), InputError);
  CHECK_THROWS_AS(make_system(1, 0.0, one, one, zero_d2(1), {}), InputError);
  CHECK_THROWS_AS(make_system(1, 1.0, RMat::Zero(1, 2), one, zero_d2(1), {}),
                  InputError);
  CHECK_THROWS_AS(make_system(1, 1.0, one, one, {}, {}), InputError);
  CHECK_THROWS_AS(make_system(1, 1.0, one, one, {RMat::Zero(3, 3)}, {}),
                  InputError);
  CHECK_THROWS_AS(
      make_system(1, 1.0, one, one, zero_d2(1), {std::vector<double>(7, 0.0)}),
      InputError);
  RMat bad = one;
  bad(0, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(make_system(1, 1.0, bad, one, zero_d2(1), {}), InputError);
}

TEST_CASE("make_system symmetrizes the multilinear data") {
  std::mt19937 rng(801);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  RMat S(4, 4);
  for (Eigen::Index i = 0; i < 4; ++i)
    for (Eigen::Index j = 0; j < 4; ++j) S(i, j) = u(rng);
  std::vector<double> T(64);
  for (double& v : T) v = u(rng);
  RMat A = RMat::Zero(2, 2), B = RMat::Zero(2, 2);
  const DDESystem sys = make_system(2, 1.0, A, B, {S, RMat(S.transpose())},
                                    {T, T});

  CVec u1(4), u2(4), u3(4);
  u1 << cplx(1, 2), cplx(0, -1), cplx(3, 0), cplx(-1, 1);
  u2 << cplx(0, 1), cplx(2, 2), cplx(-1, 0), cplx(1, -3);
  u3 << cplx(1, 0), cplx(0, 0), cplx(2, -1), cplx(0, 2);
  CHECK((sys.apply_D2(u1, u2) - sys.apply_D2(u2, u1)).norm() <= 1e-14);
  const CVec d3 = sys.apply_D3(u1, u2, u3);
  CHECK((d3 - sys.apply_D3(u2, u1, u3)).norm() <= 1e-13);
  CHECK((d3 - sys.apply_D3(u3, u2, u1)).norm() <= 1e-13);
  CHECK((d3 - sys.apply_D3(u1, u3, u2)).norm() <= 1e-13);
}

TEST_CASE("char_matrix assembles lambda I - A - e^{-lambda r} B") {
  const auto inst = testkit::random_instance(3, 802);
  const cplx lam(0.2, -1.3);
  const CMat M = char_matrix(inst.sys, lam);
  const CMat ref = lam * CMat::Identity(3, 3) - inst.sys.A.cast<cplx>() -
                   std::exp(-lam * inst.sys.r) * inst.sys.B.cast<cplx>();
  CHECK((M - ref).norm() <= 1e-15 * ref.norm());
}

TEST_CASE("find_hopf lands on the engineered frequency of the scalar demo") {
  const auto inst = testkit::demo_n1();
  const HopfPair hopf = find_hopf(inst.sys, 1.0);
  CHECK(hopf.omega == doctest::Approx(kHalfPi).epsilon(1e-13));
  CHECK(std::abs(hopf.lambda - cplx(0.0, kHalfPi)) <= 1e-12);
  CHECK(hopf.root_residual <= 1e-10);
  CHECK(hopf.simplicity_margin == 1.0);  // n = 1: margin is 1 by convention
}

TEST_CASE("find_hopf resolves the planar demo and random instances") {
  const auto planar = testkit::demo_n2();
  const HopfPair hopf = find_hopf(planar.sys, 1.0);
  CHECK(hopf.omega == doctest::Approx(planar.omega).epsilon(1e-12));
  CHECK(hopf.simplicity_margin > 1e-3);

  for (std::uint32_t seed : {803u, 804u, 805u}) {
    const auto inst = testkit::random_instance(2, seed);
    const HopfPair h = find_hopf(inst.sys, inst.omega * 1.05);
    CHECK(h.omega == doctest::Approx(inst.omega).epsilon(1e-10));
  }
}

TEST_CASE("find_hopf guards: bad guess, off-axis root, non-simple pair") {
  const auto inst = testkit::demo_n1();
  CHECK_THROWS_AS(find_hopf(inst.sys, -1.0), InputError);

  // Shifting the whole spectrum right by 0.3 moves the critical pair off
  // the axis while keeping it the nearest root to the guess.
  const DDESystem moved = shifted_system(inst.sys, 0.3);
  CHECK_THROWS_AS(find_hopf(moved, kHalfPi), NotOnAxis);

  // Two identical rotation blocks: +-i is a double root.
  RMat A = RMat::Zero(4, 4);
  A(0, 1) = 1.0; A(1, 0) = -1.0;
  A(2, 3) = 1.0; A(3, 2) = -1.0;
  const DDESystem twin =
      make_system(4, 1.0, A, RMat::Zero(4, 4), zero_d2(4), {});
  CHECK_THROWS_AS(find_hopf(twin, 1.0), NotSimple);
}

TEST_CASE("scan_hopf_guess seeds Newton well enough to recover the root") {
  const auto inst = testkit::demo_n1();
  const double guess = scan_hopf_guess(inst.sys);
  CHECK(guess > 0.0);
  const HopfPair hopf = find_hopf(inst.sys, guess);
  CHECK(hopf.omega == doctest::Approx(kHalfPi).epsilon(1e-12));
}

TEST_CASE("hypothesis check passes on the demo and fills the report") {
  const auto inst = testkit::demo_n1();
  const HopfPair hopf = find_hopf(inst.sys, 1.0);
  const HypothesisReport rep = verify_hypothesis_H(inst.sys, hopf);
  CHECK(rep.pass);
  CHECK(rep.margin > 1.0);          // the scalar demo is comfortably stable
  CHECK(rep.margin < 3.0);
  CHECK(rep.simplicity_margin == 1.0);
  CHECK(rep.char_deriv_scaled > 1e-3);
  CHECK(!rep.rightmost.empty());
  CHECK(rep.rightmost_other_root.real() ==
        doctest::Approx(-rep.margin).epsilon(1e-12));
  // The reported rightmost roots are sorted by real part.
  for (size_t i = 1; i < rep.rightmost.size(); ++i)
    CHECK(rep.rightmost[i - 1].real() >= rep.rightmost[i].real());
}

TEST_CASE("hypothesis check flags a root right of the axis") {
  // Rotation block plus a decoupled unstable scalar mode at +0.3.
  RMat A = RMat::Zero(3, 3);
  A(0, 1) = 1.0; A(1, 0) = -1.0;
  A(2, 2) = 0.3;
  const DDESystem sys =
      make_system(3, 1.0, A, RMat::Zero(3, 3), zero_d2(3), {});
  HopfPair hopf;
  hopf.omega = 1.0;
  hopf.lambda = cplx(0.0, 1.0);

  const HypothesisReport rep = verify_hypothesis_H(sys, hopf, {}, false);
  CHECK(!rep.pass);
  CHECK(rep.margin == doctest::Approx(-0.3).epsilon(1e-6));
  CHECK(rep.rightmost_other_root.real() == doctest::Approx(0.3).epsilon(1e-6));
  CHECK_THROWS_AS(verify_hypothesis_H(sys, hopf), HypothesisViolated);
}
