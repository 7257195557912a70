#pragma once

#include <vector>

#include "hopfcm/taylor.hpp"

namespace hopfcm {

struct ManifoldCoefficient {
  int j = 0, k = 0;
  ExpPolyFunction w;   // column on [-r, 0]
  CVec at0, at_mr;     // cached endpoint values
};

struct SecondOrderCoefficients {
  ManifoldCoefficient w20, w11, w02;
};

// Elimination device at a single non-resonant rate: the endpoint condition
// and the integrated ODE collapse to the n x n solve
//   (nu I - A - B e^{-nu r}) w(0)
//     = f_jk - F(0) - B e^{-nu r} int_{-r}^0 e^{-nu tau} F(tau) d tau,
// after which w' = nu w + F is reconstructed in closed form. Throws
// ResonantSecondOrder when the matrix on the left is numerically singular.
ManifoldCoefficient solve_manifold_order(const DDESystem& sys, int j, int k,
                                         cplx nu, const ExpPolyFunction& forcing,
                                         const CVec& fjk,
                                         const Tolerances& tol = {});

// Order-2 coefficients at rates 2 i omega and 0; w02 is the conjugate of w20.
SecondOrderCoefficients solve_second_order(const DDESystem& sys,
                                           const SpectralData& data,
                                           const ReducedCoefficients& rc,
                                           const Tolerances& tol = {});

// Taylor data and order-2 coefficients in one pass: f/g at orders 2, then
// the w_jk solves, then the order-3 f/g which need the (w(0), w(-r)) pairs.
struct CoefficientChain {
  ReducedCoefficients rc;
  SecondOrderCoefficients so;
};
CoefficientChain coefficient_chain(const DDESystem& sys, const SpectralData& data,
                                   const Tolerances& tol = {});

// Inhomogeneity of the order-(2,1) differential system:
// g21 phi1 + conj(g12) phi2 + 2 g11 w20 + (g20 + 2 conj(g11)) w11
//   + conj(g02) w02, a column function on [-r, 0].
ExpPolyFunction third_order_forcing(const SpectralData& data,
                                    const ReducedCoefficients& rc,
                                    const SecondOrderCoefficients& so);

// Right-hand sides of the two endpoint relations the w21 system reduces to.
CVec assemble_R1(const DDESystem& sys, const SpectralData& data,
                 const ReducedCoefficients& rc, const SecondOrderCoefficients& so);
CVec assemble_R2(const DDESystem& sys, const SpectralData& data,
                 const ReducedCoefficients& rc, const SecondOrderCoefficients& so);

// |Psi_1(0) (B R1 - R2)|: vanishes analytically; reported as a diagnostic.
double solvability_defect(const SpectralData& data, const DDESystem& sys,
                          const CVec& R1, const CVec& R2);

// The five summands of Psi_1(0)(B R1 - R2), grouped by reduced-flow
// coefficient; each one vanishes on its own.
struct FredholmIdentities {
  cplx r1a, r1b, r2, r3, r4;
};
FredholmIdentities fredholm_identities(const DDESystem& sys, const SpectralData& data,
                                       const ReducedCoefficients& rc,
                                       const SecondOrderCoefficients& so);

struct ThirdOrderSolution {
  CVec R1, R2;
  CMat M;        // i omega I - A - B e^{-i omega r}, singular by construction
  CMat Mtilde;   // 2 (B e^{-i omega r} r + I)
  cplx Rtilde;
  ExpPolyFunction rho;  // -2 s e^{i omega s} phi1(0) on [-r, 0]
  ExpPolyFunction eta;  // 2 zeta e^{-i omega zeta} Psi1(0) on [0, r]
  std::vector<CVec> basis;  // v1 = Psi1(0)^H / ||Psi1(0)||, completed
  CVec coords;              // x with w21(0) = sum x_j v_j
  ManifoldCoefficient w21;
  FredholmIdentities fredholm;
  double solvability_defect = 0.0;
  double defect_scale = 0.0;      // ||B|| ||R1|| + ||R2||
  double reduced_residual = 0.0;  // ||M w21(0) - (B R1 - R2)||
  double cond_regularized = 0.0;
  double first_row_annihilation = 0.0;  // max_j |Psi1(0) M v_j| / ||Psi1(0)||
};

// Solves the singular endpoint system for w21(0) through the regularized
// n x n system: rows 2..n act by v_j^H on M, row 1 is replaced by
// sum_j (Psi1(0) Mtilde v_j) x_j = Rtilde. The resulting w21 is the member
// of the solution family selected by the vanishing eps -> 0 perturbation.
ThirdOrderSolution solve_w21(const DDESystem& sys, const SpectralData& data,
                             const ReducedCoefficients& rc,
                             const SecondOrderCoefficients& so,
                             const Tolerances& tol = {});

}  // namespace hopfcm
