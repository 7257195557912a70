#include <doctest.h>

#include <cmath>

#include "hopfcm/numerics.hpp"
#include "hopfcm/spectral.hpp"
#include "oracles.hpp"

using namespace hopfcm;

namespace {

SpectralData data_for(const testkit::Instance& inst) {
  const HopfPair hopf = find_hopf(inst.sys, inst.omega);
  return build_spectral_data(inst.sys, hopf);
}

}  // namespace

TEST_CASE("critical eigenvectors annihilate the characteristic matrix") {
  for (Eigen::Index n : {1, 2, 3, 5}) {
    const auto inst = testkit::random_instance(n, 900u + std::uint32_t(n));
    const SpectralData data = data_for(inst);
    const CMat M = char_matrix(inst.sys, cplx(0.0, data.omega));
    const double scale = data.omega + inst.sys.A.norm() + inst.sys.B.norm();
    CHECK(data.phi1_0.norm() == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(data.psi1_0.norm() == doctest::Approx(1.0).epsilon(1e-13));
    CHECK((M * data.phi1_0).norm() <= 1e-12 * scale);
    CHECK((data.psi1_0 * M).norm() <= 1e-12 * scale);
  }
}

TEST_CASE("normalization: <Psi_1, phi_1> = 1 and the cross pairings vanish") {
  for (Eigen::Index n : {1, 2, 3, 5}) {
    const auto inst = testkit::random_instance(n, 910u + std::uint32_t(n));
    const SpectralData data = data_for(inst);
    const cplx p11 = bilinear_pair(data.Psi1, data.phi1, data.Bc, data.r);
    const cplx p12 = bilinear_pair(data.Psi1, data.phi2, data.Bc, data.r);
    const cplx p21 = bilinear_pair(data.Psi2, data.phi1, data.Bc, data.r);
    const cplx p22 = bilinear_pair(data.Psi2, data.phi2, data.Bc, data.r);
    CHECK(std::abs(p11 - 1.0) <= 1e-10);
    CHECK(std::abs(p12) <= 1e-10);
    CHECK(std::abs(p21) <= 1e-10);
    CHECK(std::abs(p22 - 1.0) <= 1e-10);

    const auto coords = project(data, data.phi1);
    CHECK(std::abs(coords.first - 1.0) <= 1e-10);
    CHECK(std::abs(coords.second) <= 1e-10);
  }
}

TEST_CASE("closed-form e11 equals the pairing of the raw eigenfunctions") {
  const auto inst = testkit::random_instance(3, 921);
  const SpectralData data = data_for(inst);
  // Raw (unnormalized) adjoint eigenfunction psi_1(0) e^{-i omega zeta}.
  const ExpPolyFunction psi1 = ExpPolyFunction::exponential(
      0.0, data.r, Orient::row, data.psi1_0.transpose(), cplx(0.0, -data.omega));
  const cplx paired = bilinear_pair(psi1, data.phi1, data.Bc, data.r);
  CHECK(std::abs(paired - data.e11) <= 1e-12 * std::abs(data.e11));
  CHECK(data.e22 == std::conj(data.e11));
  CHECK((data.Psi1_0 - data.psi1_0 / data.e11).norm() <= 1e-15);
}

TEST_CASE("eigenfunctions are the expected exponentials") {
  const auto inst = testkit::demo_n2();
  const SpectralData data = data_for(inst);
  const cplx lam(0.0, data.omega);
  for (double theta : {-data.r, -0.7, 0.0}) {
    CHECK((data.phi1.evaluate(theta) - std::exp(lam * theta) * data.phi1_0)
              .norm() <= 1e-14);
    CHECK((data.phi2.evaluate(theta) -
           CVec(std::exp(-lam * theta) * data.phi1_0.conjugate()))
              .norm() <= 1e-14);
  }
  for (double zeta : {0.0, 0.9, data.r}) {
    CHECK((data.Psi1.evaluate(zeta) -
           CVec(std::exp(-lam * zeta) * data.Psi1_0.transpose()))
              .norm() <= 1e-13 * data.Psi1_0.norm());
  }
}

TEST_CASE("the eigenvector phase is deterministic") {
  const auto inst = testkit::random_instance(2, 931);
  const SpectralData a = data_for(inst);
  const SpectralData b = data_for(inst);
  CHECK((a.phi1_0 - b.phi1_0).norm() == 0.0);
  CHECK((a.psi1_0 - b.psi1_0).norm() == 0.0);
  // And the representative itself: leading significant entry real positive.
  const CVec fixed = phase_fix(a.phi1_0);
  CHECK((fixed - a.phi1_0).norm() <= 1e-15);
}

TEST_CASE("a defective critical pair is rejected at normalization") {
  // Real 4x4 Jordan structure: +-i with algebraic multiplicity two but a
  // one-dimensional eigenspace. The rank test upstream accepts it; the
  // pairing e11, which vanishes exactly for a defective root, must not.
  RMat A = RMat::Zero(4, 4);
  A(0, 1) = 1.0; A(1, 0) = -1.0;
  A(2, 3) = 1.0; A(3, 2) = -1.0;
  A(0, 2) = 1.0; A(1, 3) = 1.0;
  const DDESystem sys =
      make_system(4, 1.0, A, RMat::Zero(4, 4),
                  std::vector<RMat>(4, RMat::Zero(8, 8)), {});
  HopfPair hopf;
  hopf.omega = 1.0;
  hopf.lambda = cplx(0.0, 1.0);
  hopf.simplicity_margin = 1.0;
  CHECK_THROWS_AS(build_spectral_data(sys, hopf), NormalizationDegenerate);
}
