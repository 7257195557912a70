#pragma once

#include <utility>

#include "hopfcm/chareq.hpp"
#include "hopfcm/expfun.hpp"

namespace hopfcm {

// Critical eigentriple at +- i omega plus the normalized adjoint row and the
// four eigenfunctions in closed form. Carries r and B so the projector is
// self-contained.
struct SpectralData {
  double omega;
  double r;
  CMat Bc;         // B cast to complex, for the bilinear form
  CVec phi1_0;     // column, phase-fixed
  CRow psi1_0;     // row, phase-fixed, unnormalized
  cplx e11, e22;   // <psi_1, phi_1> and its conjugate
  CRow Psi1_0;     // psi1_0 / e11
  ExpPolyFunction phi1, phi2;  // columns on [-r, 0]
  ExpPolyFunction Psi1, Psi2;  // rows on [0, r]
};

// phi1(0) and psi1(0) are the null directions of the characteristic matrix
// at i omega; e11 comes from the closed form
// psi1(0) phi1(0) + psi1(0) B phi1(0) e^{-i omega r} r.
SpectralData build_spectral_data(const DDESystem& sys, const HopfPair& hopf,
                                 const Tolerances& tol = {});

// Coordinates of phi against the critical eigenspace:
// ( <Psi_1, phi>, <Psi_2, phi> ).
std::pair<cplx, cplx> project(const SpectralData& data, const ExpPolyFunction& phi);

}  // namespace hopfcm
