#pragma once

#include <string>
#include <vector>

#include "hopfcm/manifold.hpp"

namespace hopfcm {

// The uniformly shifted family A_eps = A + eps I, B_eps = e^{eps r} B. Its
// characteristic matrix at lambda equals the original one at lambda - eps
// entrywise, so the whole spectrum moves right by exactly eps: the critical
// root is eps + i omega, mu_eps = eps, and the eigenvectors do not move.
DDESystem shifted_system(const DDESystem& sys, double eps);

// Everything the oracle computes at one eps, from scratch: Taylor data at
// lambda_eps, order-2 coefficients at the shifted rates, and the now
// nonsingular endpoint solve for w_eps21(0).
struct PerturbedRecord {
  double eps = 0.0;
  cplx lambda;      // eps + i omega, exact root of the shifted problem
  cplx e11_tilde;   // <psi_eps1, phi_eps1> under the shifted bilinear form
  CRow Psi1_0;      // psi1(0) / e11_tilde
  ReducedCoefficients rc;       // Q, f, g at lambda_eps; W pairs of the w_eps
  SecondOrderCoefficients so;   // w_eps20, w_eps11, w_eps02
  CMat M;           // nu I - A_eps - B_eps e^{-nu r}, nu = 2 lambda + conj(lambda)
  double cond_M = 0.0;
  CVec R1, R2;
  CVec w21_0;       // M^{-1} (B_eps R1 - R2)
  CRow h1;          // Psi_eps1(0) M / eps
  cplx h2;          // Psi_eps1(0) (B_eps R1 - R2) / eps
  cplx E1a, E1b, E2, E3, E4;  // summands of eps * h2, grouped per coefficient
};

struct PerturbationPath {
  DDESystem sys;    // unperturbed
  SpectralData data;
  ReducedCoefficients rc;  // unperturbed Taylor data, W pairs filled
  std::vector<double> eps_schedule;
  std::vector<PerturbedRecord> records;  // one per eps, schedule order
  CRow h1_limit;    // 2 Psi1(0) (B e^{-i omega r} r + I)
  cplx h2_limit;    // Rtilde of the regularized limit system
};

// Builds the per-eps records eagerly. The schedule must be positive and
// strictly decreasing, and its largest entry must stay below the spectral
// margin so the shifted non-critical roots remain in the left half-plane;
// pass margin < 0 to have the scan run here.
PerturbationPath build_path(const DDESystem& sys, const SpectralData& data,
                            std::vector<double> eps_schedule,
                            const Tolerances& tol = {}, double margin = -1.0);

// w_eps21(0) for a scheduled eps.
CVec solve_perturbed_w21(const PerturbationPath& path, double eps);

struct HLimits {
  CRow h1;
  cplx h2;
  CRow h1_limit;
  cplx h2_limit;
};
// The eps-scaled row and scalar quotients at one eps next to their analytic
// limits; both differences shrink like O(eps).
HLimits h_limits(const PerturbationPath& path, double eps);

struct ConvergenceReport {
  bool pass = false;
  std::vector<double> eps;
  std::vector<double> dist;   // ||w_eps21(0) - reference|| per eps
  double rate = 0.0;          // least-squares exponent of dist ~ C eps^p
  double extrapolated = 0.0;  // relative distance of the Richardson value
  double reference_scale = 1.0;  // max(1, ||reference||)
  std::string note;
};

// Fits the convergence order of the path against the regularized answer and
// Richardson-extrapolates the two smallest eps. PASS needs p in [0.8, 1.5]
// and an extrapolated relative distance at most tol_oracle; distances that
// are all at roundoff pass outright (nothing to fit).
ConvergenceReport converge_study(const PerturbationPath& path,
                                 const CVec& reference,
                                 double tol_oracle = 1e-6,
                                 bool throw_on_fail = true);

}  // namespace hopfcm
