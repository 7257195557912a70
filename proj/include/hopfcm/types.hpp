#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace hopfcm {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;   // column
using CRow = Eigen::RowVectorXcd;
using RMat = Eigen::MatrixXd;

constexpr cplx I{0.0, 1.0};

// All knobs in one place; every default can be overridden from the CLI
// or the input file.
struct Tolerances {
  double tol_solve = 1e-12;      // relative residual bound for dense solves
  double tol_rank = 1e-8;        // sigma_min/sigma_max rank cutoff
  double tol_root = 1e-10;       // scaled characteristic-determinant residual
  double tol_imaginary = 1e-8;   // |Re lambda| <= tol_imaginary * |lambda|
  double tol_resonance = 1e-10;  // absolute, on exponent differences
  double tol_fredholm = 1e-8;    // relative to ||B|| ||R1|| + ||R2||
  double tol_resid = 1e-8;       // same scale as tol_fredholm
  double tol_oracle = 1e-6;      // relative, Richardson-extrapolated distance
  double delta_spectrum = 1e-6;  // scan: all non-critical roots Re <= -delta
  int scan_nodes = 64;           // Chebyshev nodes in the spectrum scan
  int scan_report = 10;          // rightmost roots kept in the report
};

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define HOPFCM_ERROR(NAME)                                      \
  struct NAME : Error {                                         \
    explicit NAME(const std::string& msg) : Error(msg) {}       \
  }

HOPFCM_ERROR(SingularMatrix);
HOPFCM_ERROR(NotRankDeficient);
HOPFCM_ERROR(NullSpaceTooLarge);
HOPFCM_ERROR(NotUnit);
HOPFCM_ERROR(DimensionMismatch);
HOPFCM_ERROR(OutOfDomain);
HOPFCM_ERROR(NoConvergence);
HOPFCM_ERROR(NotOnAxis);
HOPFCM_ERROR(NotSimple);
HOPFCM_ERROR(HypothesisViolated);
HOPFCM_ERROR(ResonantSecondOrder);
HOPFCM_ERROR(RegularizedSystemSingular);
HOPFCM_ERROR(NormalizationDegenerate);
HOPFCM_ERROR(EpsTooLarge);
HOPFCM_ERROR(OracleMismatch);
HOPFCM_ERROR(SolvabilityExceeded);
HOPFCM_ERROR(InputError);

#undef HOPFCM_ERROR

}  // namespace hopfcm
