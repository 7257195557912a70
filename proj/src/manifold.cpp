#include "hopfcm/manifold.hpp"

#include <cmath>
#include <complex>
#include <string>
#include <utility>

#include "hopfcm/numerics.hpp"

namespace hopfcm {

ManifoldCoefficient solve_manifold_order(const DDESystem& sys, int j, int k,
                                         cplx nu, const ExpPolyFunction& F,
                                         const CVec& fjk, const Tolerances& tol) {
  const CMat Mred = char_matrix(sys, nu);
  const SingularExtrema ext = singular_extrema(Mred);
  // Yardstick on the assembly scale, not just sigma_max: a 1x1 (or uniformly
  // tiny) matrix has sigma_min == sigma_max, so a purely relative test could
  // never flag it as singular.
  const double mscale = std::abs(nu) + sys.A.norm() +
                        std::exp(-nu.real() * sys.r) * sys.B.norm();
  if (ext.sigma_min <= tol.tol_rank * std::max(ext.sigma_max, mscale)) {
    throw ResonantSecondOrder(
        "characteristic matrix at rate (" + std::to_string(nu.real()) + ", " +
        std::to_string(nu.imag()) + ") is singular; 2 i omega or 0 resonates");
  }
  const CMat Bc = sys.B.cast<cplx>();
  const cplx decay = std::exp(-nu * sys.r);
  const CVec rhs =
      fjk - F.evaluate(0.0) - decay * (Bc * F.integral_weighted(-nu));
  const CVec w0 = solve(Mred, rhs, tol.tol_rank).x;
  ExpPolyFunction w = solve_linear_ode(nu, F, w0, tol.tol_resonance);
  CVec at0 = w.evaluate(0.0);
  CVec at_mr = w.evaluate(-sys.r);
  return ManifoldCoefficient{j, k, std::move(w), std::move(at0),
                             std::move(at_mr)};
}

SecondOrderCoefficients solve_second_order(const DDESystem& sys,
                                           const SpectralData& data,
                                           const ReducedCoefficients& rc,
                                           const Tolerances& tol) {
  const cplx la(0.0, data.omega);

  const ExpPolyFunction F20 =
      data.phi1.scaled(rc.g20).plus(data.phi2.scaled(std::conj(rc.g02)));
  ManifoldCoefficient w20 =
      solve_manifold_order(sys, 2, 0, 2.0 * la, F20, rc.f20, tol);

  // lambda + conj(lambda) = 0 exactly: the (1,1) rate is not rounded to it.
  const ExpPolyFunction F11 =
      data.phi1.scaled(rc.g11).plus(data.phi2.scaled(std::conj(rc.g11)));
  ManifoldCoefficient w11 =
      solve_manifold_order(sys, 1, 1, cplx(0.0, 0.0), F11, rc.f11, tol);

  ManifoldCoefficient w02{0, 2, w20.w.conjugate(), w20.at0.conjugate(),
                          w20.at_mr.conjugate()};
  return SecondOrderCoefficients{std::move(w20), std::move(w11),
                                 std::move(w02)};
}

CoefficientChain coefficient_chain(const DDESystem& sys, const SpectralData& data,
                                   const Tolerances& tol) {
  const Eigen::Index n = sys.n;
  ReducedCoefficients rc;
  rc.Q = head_pair(data);
  const SecondOrderF f2 = f_second_order(sys, rc.Q);
  rc.f20 = f2.f20;
  rc.f11 = f2.f11;
  rc.f02 = f2.f02;
  rc.g20 = g_from_f(data, rc.f20);
  rc.g11 = g_from_f(data, rc.f11);
  rc.g02 = g_from_f(data, rc.f02);

  SecondOrderCoefficients so = solve_second_order(sys, data, rc, tol);
  const auto stack = [n](const ManifoldCoefficient& w) {
    CVec W(2 * n);
    W.head(n) = w.at0;
    W.tail(n) = w.at_mr;
    return W;
  };
  rc.W20 = stack(so.w20);
  rc.W11 = stack(so.w11);
  rc.W02 = stack(so.w02);

  const ThirdOrderF f3 = f_third_order(sys, rc.Q, rc.W20, rc.W11, rc.W02);
  rc.f21 = f3.f21;
  rc.f12 = f3.f12;
  rc.g21 = g_from_f(data, rc.f21);
  rc.g12 = g_from_f(data, rc.f12);
  return CoefficientChain{std::move(rc), std::move(so)};
}

ExpPolyFunction third_order_forcing(const SpectralData& data,
                                    const ReducedCoefficients& rc,
                                    const SecondOrderCoefficients& so) {
  return data.phi1.scaled(rc.g21)
      .plus(data.phi2.scaled(std::conj(rc.g12)))
      .plus(so.w20.w.scaled(2.0 * rc.g11))
      .plus(so.w11.w.scaled(rc.g20 + 2.0 * std::conj(rc.g11)))
      .plus(so.w02.w.scaled(std::conj(rc.g02)));
}

CVec assemble_R1(const DDESystem& sys, const SpectralData& data,
                 const ReducedCoefficients& rc,
                 const SecondOrderCoefficients& so) {
  const double om = data.omega;
  const double r = sys.r;
  const cplx la(0.0, om);
  const cplx ed = std::exp(-la * r);
  const CVec phi1bar = data.phi1_0.conjugate();

  CVec out = (-rc.g21 * r * ed) * data.phi1_0;
  out += (I / (2.0 * om)) * std::conj(rc.g12) *
         (std::exp(la * r) - ed) * phi1bar;
  out -= (2.0 * rc.g11 * ed) * so.w20.w.integral_weighted(-la);
  out -= ((rc.g20 + 2.0 * std::conj(rc.g11)) * ed) *
         so.w11.w.integral_weighted(-la);
  out -= (std::conj(rc.g02) * ed) * so.w02.w.integral_weighted(-la);
  return out;
}

CVec assemble_R2(const DDESystem& /*sys*/, const SpectralData& data,
                 const ReducedCoefficients& rc,
                 const SecondOrderCoefficients& so) {
  const CVec phi1bar = data.phi1_0.conjugate();
  CVec out = rc.g21 * data.phi1_0 + std::conj(rc.g12) * phi1bar - rc.f21;
  out += (2.0 * rc.g11) * so.w20.at0;
  out += (rc.g20 + 2.0 * std::conj(rc.g11)) * so.w11.at0;
  out += std::conj(rc.g02) * so.w02.at0;
  return out;
}

double solvability_defect(const SpectralData& data, const DDESystem& sys,
                          const CVec& R1, const CVec& R2) {
  const CMat Bc = sys.B.cast<cplx>();
  return std::abs((data.Psi1_0 * (Bc * R1 - R2)).value());
}

FredholmIdentities fredholm_identities(const DDESystem& sys,
                                       const SpectralData& data,
                                       const ReducedCoefficients& rc,
                                       const SecondOrderCoefficients& so) {
  const double om = data.omega;
  const double r = sys.r;
  const cplx la(0.0, om);
  const cplx ed = std::exp(-la * r);
  const CMat Bc = sys.B.cast<cplx>();
  const CVec phi1bar = data.phi1_0.conjugate();

  const auto pair_with = [&](const CVec& v) {
    return (data.Psi1_0 * v).value();
  };

  // Each identity is a disguised instance of the normalization
  // <Psi_1, phi_1> = 1, <Psi_1, phi_2> = 0 or <Psi_1, w_jk> = 0; they are
  // reported separately so a defect can be traced to its source term.
  FredholmIdentities out;
  out.r1a = pair_with((-rc.g21 * r * ed) * (Bc * data.phi1_0) -
                      rc.g21 * data.phi1_0 + rc.f21);
  out.r1b = pair_with((I / (2.0 * om)) * std::conj(rc.g12) *
                          (std::exp(la * r) - ed) * (Bc * phi1bar) -
                      std::conj(rc.g12) * phi1bar);

  const auto tail = [&](cplx coef, const ManifoldCoefficient& w) {
    return pair_with((-coef * ed) * (Bc * w.w.integral_weighted(-la)) -
                     coef * w.at0);
  };
  out.r2 = tail(2.0 * rc.g11, so.w20);
  out.r3 = tail(rc.g20 + 2.0 * std::conj(rc.g11), so.w11);
  out.r4 = tail(std::conj(rc.g02), so.w02);
  return out;
}

ThirdOrderSolution solve_w21(const DDESystem& sys, const SpectralData& data,
                             const ReducedCoefficients& rc,
                             const SecondOrderCoefficients& so,
                             const Tolerances& tol) {
  const Eigen::Index n = sys.n;
  const double om = data.omega;
  const double r = sys.r;
  const cplx la(0.0, om);
  const cplx ed = std::exp(-la * r);
  const CMat Bc = sys.B.cast<cplx>();

  const CVec R1 = assemble_R1(sys, data, rc, so);
  const CVec R2 = assemble_R2(sys, data, rc, so);
  const CVec rhs = Bc * R1 - R2;

  const CMat M = char_matrix(sys, la);
  const CMat Mtilde = 2.0 * (Bc * (ed * r) + CMat::Identity(n, n));

  // rho(s) = -2 s e^{i omega s} phi_1(0) on [-r, 0] and
  // eta(zeta) = 2 zeta e^{-i omega zeta} Psi_1(0) on [0, r] carry the
  // epsilon -> 0 limits of the perturbed pairings; their brackets against
  // the eigenfunctions and the order-2 coefficients fill the replaced row.
  const ExpPolyFunction rho(
      -r, 0.0, Orient::column, n,
      {ExpPolyTerm{la, {CVec::Zero(n), -2.0 * data.phi1_0}}});
  const ExpPolyFunction eta(
      0.0, r, Orient::row, n,
      {ExpPolyTerm{-la, {CVec::Zero(n), 2.0 * data.Psi1_0.transpose()}}});

  const cplx Rtilde = rc.g21 * bilinear_pair(data.Psi1, rho, Bc, r) +
                      std::conj(rc.g12) * bilinear_pair(eta, data.phi2, Bc, r) +
                      2.0 * rc.g11 * bilinear_pair(eta, so.w20.w, Bc, r) +
                      (rc.g20 + 2.0 * std::conj(rc.g11)) *
                          bilinear_pair(eta, so.w11.w, Bc, r) +
                      std::conj(rc.g02) * bilinear_pair(eta, so.w02.w, Bc, r);

  CVec v1 = data.Psi1_0.adjoint();
  v1 /= v1.norm();
  const std::vector<CVec> basis = orthonormal_complete(v1);

  CMat S(n, n);
  CVec b(n);
  for (Eigen::Index j = 0; j < n; ++j)
    S(0, j) = (data.Psi1_0 * (Mtilde * basis[j])).value();
  b(0) = Rtilde;
  for (Eigen::Index i = 1; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j)
      S(i, j) = (basis[i].adjoint() * (M * basis[j])).value();
    b(i) = (basis[i].adjoint() * rhs).value();
  }

  const double psi_norm = data.Psi1_0.norm();
  if (std::abs(S(0, 0)) <= tol.tol_rank * psi_norm * Mtilde.norm()) {
    throw RegularizedSystemSingular(
        "replaced row annihilates the null direction; regularization broke down");
  }

  SolveResult sol = [&] {
    try {
      return solve(S, b, tol.tol_rank);
    } catch (const SingularMatrix&) {
      throw RegularizedSystemSingular("bordered system is numerically singular");
    }
  }();
  const CVec& x = sol.x;

  CVec w21_0 = CVec::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j) w21_0 += x(j) * basis[j];
  const CVec w21_mr = ed * w21_0 + R1;

  const ExpPolyFunction F21 = third_order_forcing(data, rc, so);
  ExpPolyFunction w21_fun = solve_linear_ode(la, F21, w21_0, tol.tol_resonance);
  ManifoldCoefficient w21{2, 1, std::move(w21_fun), w21_0, w21_mr};

  double annihilation = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    annihilation =
        std::max(annihilation,
                 std::abs((data.Psi1_0 * (M * basis[j])).value()) / psi_norm);
  }

  const double defect = solvability_defect(data, sys, R1, R2);
  const double scale =
      singular_extrema(Bc).sigma_max * R1.norm() + R2.norm();
  const double resid = (M * w21_0 - rhs).norm();

  return ThirdOrderSolution{R1,
                            R2,
                            M,
                            Mtilde,
                            Rtilde,
                            rho,
                            eta,
                            basis,
                            x,
                            std::move(w21),
                            fredholm_identities(sys, data, rc, so),
                            defect,
                            scale,
                            resid,
                            sol.cond_estimate,
                            annihilation};
}

}  // namespace hopfcm
