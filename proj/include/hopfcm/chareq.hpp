#pragma once

#include <limits>
#include <string>
#include <vector>

#include "hopfcm/types.hpp"

namespace hopfcm {

// x'(t) = A x(t) + B x(t-r) + f(x(t), x(t-r)), with f given through its
// second and third differentials at the origin. D2/D3 act on the stacked
// argument (x(t)-block, x(t-r)-block) in R^{2n} and are kept symmetric.
struct DDESystem {
  Eigen::Index n = 0;
  double r = 0.0;
  RMat A, B;
  std::vector<RMat> D2;             // n slices, 2n x 2n each
  std::vector<std::vector<double>> D3;  // n slices, (2n)^3 each, index (p,q,s)

  CVec apply_D2(const CVec& u, const CVec& v) const;
  CVec apply_D3(const CVec& u, const CVec& v, const CVec& w) const;
  bool has_D3() const { return !D3.empty(); }
};

// Validates shapes, symmetrizes the multilinear data, checks finiteness.
DDESystem make_system(Eigen::Index n, double r, RMat A, RMat B,
                      std::vector<RMat> D2, std::vector<std::vector<double>> D3);

struct HopfPair {
  double omega = 0.0;
  cplx lambda;                 // the located root, Re within tol_imaginary of 0
  double root_residual = 0.0;  // |det| / det scale at lambda
  double simplicity_margin = 0.0;
  cplx rightmost_other_root{std::numeric_limits<double>::quiet_NaN(), 0.0};  // filled by the scan
};

CMat char_matrix(const DDESystem& sys, cplx lambda);

// Complex Newton on det(char_matrix(.)) started at i*omega_guess. The root
// is accepted only if it sits on the imaginary axis within tol_imaginary
// (relative); the system is never nudged onto the axis.
HopfPair find_hopf(const DDESystem& sys, double omega_guess,
                   const Tolerances& tol = {});

struct HypothesisReport {
  bool pass = false;
  double simplicity_margin = 0.0;
  double char_deriv_scaled = 0.0;    // |d/d lambda det| at i omega, scaled
  std::vector<cplx> rightmost;       // K rightmost non-critical scan roots
  cplx rightmost_other_root{0.0, 0.0};
  double margin = 0.0;               // -max Re over the non-critical roots
  std::string note;
};

// Simplicity plus a pseudospectral rightmost-root scan (Chebyshev
// differentiation matrix on scan_nodes nodes). The scan is a heuristic
// certificate: a transcendental characteristic equation has infinitely many
// roots and only the rightmost ones are resolved.
HypothesisReport verify_hypothesis_H(const DDESystem& sys, const HopfPair& hopf,
                                     const Tolerances& tol = {},
                                     bool throw_on_fail = true);

// All scan eigenvalues, for reuse by callers that need a frequency guess.
std::vector<cplx> spectrum_scan(const DDESystem& sys, int nodes);

// Initial guess for find_hopf when the caller has none: the scan eigenvalue
// closest to the imaginary axis with positive imaginary part.
double scan_hopf_guess(const DDESystem& sys, const Tolerances& tol = {});

}  // namespace hopfcm
