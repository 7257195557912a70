#include "hopfcm/numerics.hpp"

#include <Eigen/SVD>

namespace hopfcm {

SolveResult solve(const CMat& M, const CVec& b, double tol_rank) {
  if (M.rows() != M.cols() || M.rows() != b.size())
    throw DimensionMismatch("solve: matrix/vector shapes disagree");
  Eigen::JacobiSVD<CMat> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double smax = s(0);
  const double smin = s(s.size() - 1);
  if (!(smin > tol_rank * smax))
    throw SingularMatrix("solve: numerical rank deficiency, sigma_min/sigma_max = " +
                         std::to_string(smax > 0 ? smin / smax : 0.0));
  SolveResult out;
  out.x = svd.solve(b);
  out.cond_estimate = smax / smin;
  return out;
}

CVec phase_fix(const CVec& v) {
  const double nrm = v.norm();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double m = std::abs(v(i));
    if (m > 1e-8 * nrm) {
      return v * (std::conj(v(i)) / m);
    }
  }
  return v;
}

namespace {

CVec smallest_right_singular(const CMat& M, double tol_rank, double scale,
                             const char* who) {
  Eigen::JacobiSVD<CMat> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const Eigen::Index n = s.size();
  // For a 1 x 1 matrix sigma_max IS the near-zero entry, so the caller's
  // scale is the only meaningful yardstick there.
  const double yard = std::max(s(0), scale);
  if (n >= 2 && !(s(n - 2) > tol_rank * yard))
    throw NullSpaceTooLarge(std::string(who) + ": sigma_{n-1} below rank tolerance");
  if (yard > 0 && s(n - 1) > tol_rank * yard)
    throw NotRankDeficient(std::string(who) + ": smallest singular value " +
                           std::to_string(s(n - 1) / yard) + " (relative) not below tolerance");
  return phase_fix(svd.matrixV().col(n - 1));
}

}  // namespace

CVec right_null_vector(const CMat& M, double tol_rank, double scale) {
  return smallest_right_singular(M, tol_rank, scale, "right_null_vector");
}

CRow left_null_vector(const CMat& M, double tol_rank, double scale) {
  // psi M = 0  <=>  M^T psi^T = 0; transpose, not adjoint, so the bilinear
  // products downstream need no conjugation.
  return smallest_right_singular(M.transpose(), tol_rank, scale, "left_null_vector")
      .transpose();
}

std::vector<CVec> orthonormal_complete(const CVec& v1, double tol_unit) {
  const Eigen::Index n = v1.size();
  if (std::abs(v1.norm() - 1.0) > tol_unit)
    throw NotUnit("orthonormal_complete: ||v1|| differs from 1");
  cplx c{1.0, 0.0};
  if (std::abs(v1(0)) > 0) c = v1(0) / std::abs(v1(0));
  CVec p = v1;
  p(0) += c;
  p /= p.norm();
  // Columns of -c (I - 2 p p^H): unitary, maps e1 exactly onto v1.
  std::vector<CVec> basis;
  basis.reserve(static_cast<size_t>(n));
  basis.push_back(v1);
  for (Eigen::Index j = 1; j < n; ++j) {
    CVec ej = CVec::Zero(n);
    ej(j) = 1.0;
    basis.push_back(-c * (ej - 2.0 * p * (p.adjoint() * ej)));
  }
  return basis;
}

SingularExtrema singular_extrema(const CMat& M) {
  Eigen::JacobiSVD<CMat> svd(M);
  const auto& s = svd.singularValues();
  const Eigen::Index n = s.size();
  SingularExtrema out;
  out.sigma_max = s(0);
  out.sigma_min = s(n - 1);
  out.simplicity_margin = (n >= 2 && s(0) > 0) ? s(n - 2) / s(0) : 1.0;
  return out;
}

}  // namespace hopfcm
