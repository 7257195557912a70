#pragma once

#include <vector>

#include "hopfcm/types.hpp"

namespace hopfcm {

struct SolveResult {
  CVec x;
  double cond_estimate;  // sigma_max/sigma_min of the matrix
};

// Dense solve with a conditioning report. Throws SingularMatrix when the
// numerical rank drops below full.
SolveResult solve(const CMat& M, const CVec& b, double tol_rank = 1e-8);

// Rotates the first component of modulus > 1e-8*||v|| to the positive real
// axis. Idempotent; used on every null vector so downstream results are
// reproducible bit for bit.
CVec phase_fix(const CVec& v);

// Unit right null vector of a matrix with numerical rank n-1. `scale`
// widens the rank yardstick to max(sigma_max, scale); pass the natural size
// of the matrix entries when n may be 1 and sigma_max itself is the residual.
CVec right_null_vector(const CMat& M, double tol_rank = 1e-8, double scale = 0.0);

// Row vector psi with psi*M = 0, same conventions as right_null_vector.
CRow left_null_vector(const CMat& M, double tol_rank = 1e-8, double scale = 0.0);

// Completes a unit vector to an orthonormal basis (Hermitian inner product)
// via a Householder reflector; column j >= 2 depends continuously on v1.
std::vector<CVec> orthonormal_complete(const CVec& v1, double tol_unit = 1e-10);

// sigma_min/sigma_max and the n-1 simplicity margin sigma_{n-1}/sigma_max.
struct SingularExtrema {
  double sigma_max;
  double sigma_min;
  double simplicity_margin;  // sigma_{n-1}/sigma_max; 1.0 when n == 1
};
SingularExtrema singular_extrema(const CMat& M);

}  // namespace hopfcm
