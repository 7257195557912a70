#pragma once

#include <vector>

#include "hopfcm/types.hpp"

namespace hopfcm {

enum class Orient { column, row };

// One summand P(theta) e^{mu theta}; coef[k] multiplies theta^k.
struct ExpPolyTerm {
  cplx mu;
  std::vector<CVec> coef;
};

// Finite sum of exponential-polynomial terms on a fixed interval. This is
// the closed-form carrier for every eigenfunction and manifold coefficient:
// ODE solves, integrals and the bilinear pairing below all stay exact in
// this algebra (up to roundoff), which is what makes the solvability defect
// a meaningful diagnostic instead of discretization noise.
class ExpPolyFunction {
 public:
  ExpPolyFunction(double lo, double hi, Orient orient, Eigen::Index dim,
                  std::vector<ExpPolyTerm> terms,
                  double tol_resonance = 1e-10);

  static ExpPolyFunction zero(double lo, double hi, Orient orient, Eigen::Index dim);
  // Single term c * e^{mu theta}.
  static ExpPolyFunction exponential(double lo, double hi, Orient orient,
                                     const CVec& c, cplx mu);

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  Orient orient() const { return orient_; }
  Eigen::Index dim() const { return dim_; }
  const std::vector<ExpPolyTerm>& terms() const { return terms_; }

  CVec evaluate(double theta) const;
  ExpPolyFunction conjugate() const;
  ExpPolyFunction derivative() const;
  ExpPolyFunction scaled(cplx a) const;
  ExpPolyFunction plus(const ExpPolyFunction& other) const;

  // integral over [lo,hi] of f(theta) e^{nu theta} d theta
  CVec integral_weighted(cplx nu) const;

 private:
  double lo_, hi_;
  Orient orient_;
  Eigen::Index dim_;
  std::vector<ExpPolyTerm> terms_;
};

// Closed form / series evaluation of int_a^b theta^k e^{mu theta} d theta.
cplx monomial_exp_integral(int k, cplx mu, double a, double b);

// <psi, phi> = psi(0) phi(0) + int_{-r}^0 psi(zeta + r) B phi(zeta) d zeta.
// psi is a row function on [0, r], phi a column function on [-r, 0]; the
// form is bilinear (no conjugation anywhere).
cplx bilinear_pair(const ExpPolyFunction& psi, const ExpPolyFunction& phi,
                   const CMat& B, double r);

// Unique w on the forcing's domain with w' = rate*w + forcing, w(0) given.
// Forcing terms whose exponent falls within tol_resonance of the rate get
// the degree-raising particular solution (secular theta e^{rate theta}).
ExpPolyFunction solve_linear_ode(cplx rate, const ExpPolyFunction& forcing,
                                 const CVec& value_at_0,
                                 double tol_resonance = 1e-10);

}  // namespace hopfcm
