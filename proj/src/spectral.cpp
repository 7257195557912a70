#include "hopfcm/spectral.hpp"

#include "hopfcm/numerics.hpp"

namespace hopfcm {

SpectralData build_spectral_data(const DDESystem& sys, const HopfPair& hopf,
                                 const Tolerances& tol) {
  const double om = hopf.omega;
  const double r = sys.r;
  // Everything downstream works at the on-axis point i omega; find_hopf has
  // already certified that the located root is on the axis within tolerance.
  const cplx lam(0.0, om);
  const CMat M = char_matrix(sys, lam);
  const double row_scale = std::abs(lam) +
                           sys.A.cwiseAbs().rowwise().sum().maxCoeff() +
                           sys.B.cwiseAbs().rowwise().sum().maxCoeff();
  const CVec phi1_0 = right_null_vector(M, tol.tol_rank, row_scale);
  const CRow psi1_0 = left_null_vector(M, tol.tol_rank, row_scale);

  const cplx e_delay = std::exp(-lam * r);
  const CMat Bc = sys.B.cast<cplx>();
  const cplx e11 = (psi1_0 * phi1_0).value() +
                   (psi1_0 * (Bc * phi1_0)).value() * e_delay * r;
  const double e_scale = 1.0 + r * sys.B.cwiseAbs().rowwise().sum().maxCoeff();
  if (std::abs(e11) <= tol.tol_rank * e_scale)
    throw NormalizationDegenerate("build_spectral_data: |e11| = " +
                                  std::to_string(std::abs(e11)) + " too small");
  const CRow Psi1_0 = psi1_0 / e11;

  return SpectralData{
      om,
      r,
      Bc,
      phi1_0,
      psi1_0,
      e11,
      std::conj(e11),
      Psi1_0,
      ExpPolyFunction::exponential(-r, 0.0, Orient::column, phi1_0, lam),
      ExpPolyFunction::exponential(-r, 0.0, Orient::column, phi1_0.conjugate(),
                                   std::conj(lam)),
      ExpPolyFunction::exponential(0.0, r, Orient::row, Psi1_0.transpose(), -lam),
      ExpPolyFunction::exponential(0.0, r, Orient::row,
                                   Psi1_0.conjugate().transpose(), lam),
  };
}

std::pair<cplx, cplx> project(const SpectralData& data, const ExpPolyFunction& phi) {
  return {bilinear_pair(data.Psi1, phi, data.Bc, data.r),
          bilinear_pair(data.Psi2, phi, data.Bc, data.r)};
}

}  // namespace hopfcm
