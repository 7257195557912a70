#include "hopfcm/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <sstream>
#include <utility>

#include "hopfcm/numerics.hpp"

namespace hopfcm {

DDESystem shifted_system(const DDESystem& sys, double eps) {
  DDESystem out = sys;
  out.A += eps * RMat::Identity(sys.n, sys.n);
  out.B *= std::exp(eps * sys.r);
  return out;
}

namespace {

PerturbedRecord solve_at(const DDESystem& sys, const SpectralData& data,
                         double eps, const Tolerances& tol) {
  const Eigen::Index n = sys.n;
  const double r = sys.r;
  const cplx la(eps, data.omega);
  const cplx mu2 = la + std::conj(la);  // 2 eps, the gap the limit divides by
  const cplx nu = 2.0 * la + std::conj(la);
  const DDESystem psys = shifted_system(sys, eps);
  const CMat Bc = psys.B.cast<cplx>();

  // The shift leaves the null vectors in place; only the pairing weight and
  // the head evaluation move with lambda.
  const cplx e11_tilde =
      (data.psi1_0 * data.phi1_0).value() +
      (data.psi1_0 * (Bc * data.phi1_0)).value() * std::exp(-la * r) * r;
  const CRow Psi1_0 = data.psi1_0 / e11_tilde;
  const auto g_of = [&](const CVec& f) { return (Psi1_0 * f).value(); };

  ReducedCoefficients rc;
  rc.Q = CVec(2 * n);
  rc.Q.head(n) = data.phi1_0;
  rc.Q.tail(n) = data.phi1_0 * std::exp(-la * r);
  const SecondOrderF f2 = f_second_order(psys, rc.Q);
  rc.f20 = f2.f20;
  rc.f11 = f2.f11;
  rc.f02 = f2.f02;
  rc.g20 = g_of(rc.f20);
  rc.g11 = g_of(rc.f11);
  rc.g02 = g_of(rc.f02);

  const ExpPolyFunction phi1 =
      ExpPolyFunction::exponential(-r, 0.0, Orient::column, data.phi1_0, la);
  const ExpPolyFunction phi2 = phi1.conjugate();

  const ExpPolyFunction F20 =
      phi1.scaled(rc.g20).plus(phi2.scaled(std::conj(rc.g02)));
  ManifoldCoefficient w20 =
      solve_manifold_order(psys, 2, 0, 2.0 * la, F20, rc.f20, tol);
  const ExpPolyFunction F11 =
      phi1.scaled(rc.g11).plus(phi2.scaled(std::conj(rc.g11)));
  ManifoldCoefficient w11 =
      solve_manifold_order(psys, 1, 1, mu2, F11, rc.f11, tol);
  ManifoldCoefficient w02{0, 2, w20.w.conjugate(), w20.at0.conjugate(),
                          w20.at_mr.conjugate()};

  const auto stack = [n](const ManifoldCoefficient& w) {
    CVec W(2 * n);
    W.head(n) = w.at0;
    W.tail(n) = w.at_mr;
    return W;
  };
  rc.W20 = stack(w20);
  rc.W11 = stack(w11);
  rc.W02 = stack(w02);
  const ThirdOrderF f3 = f_third_order(psys, rc.Q, rc.W20, rc.W11, rc.W02);
  rc.f21 = f3.f21;
  rc.f12 = f3.f12;
  rc.g21 = g_of(rc.f21);
  rc.g12 = g_of(rc.f12);

  const cplx ed_nu = std::exp(-nu * r);
  const CVec phi1bar = data.phi1_0.conjugate();

  CVec R1 = (-rc.g21 * (std::exp(-la * r) - ed_nu) / mu2) * data.phi1_0;
  R1 += (-std::conj(rc.g12) * (std::exp(-std::conj(la) * r) - ed_nu) /
         (2.0 * la)) *
        phi1bar;
  R1 -= (2.0 * rc.g11 * ed_nu) * w20.w.integral_weighted(-nu);
  R1 -= ((rc.g20 + 2.0 * std::conj(rc.g11)) * ed_nu) *
        w11.w.integral_weighted(-nu);
  R1 -= (std::conj(rc.g02) * ed_nu) * w02.w.integral_weighted(-nu);

  CVec R2 = rc.g21 * data.phi1_0 + std::conj(rc.g12) * phi1bar - rc.f21;
  R2 += (2.0 * rc.g11) * w20.at0;
  R2 += (rc.g20 + 2.0 * std::conj(rc.g11)) * w11.at0;
  R2 += std::conj(rc.g02) * w02.at0;

  const CMat M = char_matrix(psys, nu);
  const CVec rhs = Bc * R1 - R2;
  const SolveResult sol = solve(M, rhs, tol.tol_rank);

  const CRow h1 = (Psi1_0 * M) / eps;
  const cplx h2 = (Psi1_0 * rhs).value() / eps;

  // eps * h2 split into the five summands that the limit argument bounds
  // one by one; their sum reproduces Psi_eps1(0)(B_eps R1 - R2) exactly.
  const cplx E1a = (-rc.g21 / mu2) * (Psi1_0 * (Bc * data.phi1_0)).value() *
                       (std::exp(-la * r) - ed_nu) -
                   rc.g21 * (Psi1_0 * data.phi1_0).value() + rc.g21;
  const cplx E1b = (-std::conj(rc.g12) / (2.0 * la)) *
                       (Psi1_0 * (Bc * phi1bar)).value() *
                       (std::exp(-std::conj(la) * r) - ed_nu) -
                   std::conj(rc.g12) * (Psi1_0 * phi1bar).value();
  const auto e_tail = [&](cplx coef, const ManifoldCoefficient& w) {
    return -coef * ed_nu *
               (Psi1_0 * (Bc * w.w.integral_weighted(-nu))).value() -
           coef * (Psi1_0 * w.at0).value();
  };
  const cplx E2 = e_tail(2.0 * rc.g11, w20);
  const cplx E3 = e_tail(rc.g20 + 2.0 * std::conj(rc.g11), w11);
  const cplx E4 = e_tail(std::conj(rc.g02), w02);

  return PerturbedRecord{eps,
                         la,
                         e11_tilde,
                         Psi1_0,
                         std::move(rc),
                         SecondOrderCoefficients{std::move(w20), std::move(w11),
                                                 std::move(w02)},
                         M,
                         sol.cond_estimate,
                         std::move(R1),
                         std::move(R2),
                         sol.x,
                         h1,
                         h2,
                         E1a,
                         E1b,
                         E2,
                         E3,
                         E4};
}

const PerturbedRecord& record_at(const PerturbationPath& path, double eps) {
  for (const PerturbedRecord& rec : path.records) {
    if (std::abs(rec.eps - eps) <= 1e-15 + 1e-9 * rec.eps) return rec;
  }
  throw InputError("eps " + std::to_string(eps) + " is not in the schedule");
}

}  // namespace

PerturbationPath build_path(const DDESystem& sys, const SpectralData& data,
                            std::vector<double> eps_schedule,
                            const Tolerances& tol, double margin) {
  if (eps_schedule.empty()) throw InputError("eps schedule is empty");
  for (std::size_t i = 0; i < eps_schedule.size(); ++i) {
    if (!(eps_schedule[i] > 0.0))
      throw InputError("eps schedule entries must be positive");
    if (i > 0 && !(eps_schedule[i] < eps_schedule[i - 1]))
      throw InputError("eps schedule must be strictly decreasing");
  }
  if (margin < 0.0) {
    HopfPair hp;
    hp.omega = data.omega;
    hp.lambda = cplx(0.0, data.omega);
    margin = verify_hypothesis_H(sys, hp, tol, false).margin;
  }
  // Every root moves right by eps; the non-critical ones must stay strictly
  // left of the axis.
  if (eps_schedule.front() >= margin) {
    throw EpsTooLarge("largest eps " + std::to_string(eps_schedule.front()) +
                      " reaches the spectral margin " + std::to_string(margin));
  }

  CoefficientChain chain = coefficient_chain(sys, data, tol);
  const ThirdOrderSolution limit = solve_w21(sys, data, chain.rc, chain.so, tol);
  const CRow h1_limit = data.Psi1_0 * limit.Mtilde;

  std::vector<PerturbedRecord> records;
  records.reserve(eps_schedule.size());
  for (double eps : eps_schedule) records.push_back(solve_at(sys, data, eps, tol));

  return PerturbationPath{sys,
                          data,
                          std::move(chain.rc),
                          std::move(eps_schedule),
                          std::move(records),
                          h1_limit,
                          limit.Rtilde};
}

CVec solve_perturbed_w21(const PerturbationPath& path, double eps) {
  return record_at(path, eps).w21_0;
}

HLimits h_limits(const PerturbationPath& path, double eps) {
  const PerturbedRecord& rec = record_at(path, eps);
  return HLimits{rec.h1, rec.h2, path.h1_limit, path.h2_limit};
}

ConvergenceReport converge_study(const PerturbationPath& path,
                                 const CVec& reference, double tol_oracle,
                                 bool throw_on_fail) {
  ConvergenceReport rep;
  rep.eps = path.eps_schedule;
  rep.reference_scale = std::max(1.0, reference.norm());
  for (const PerturbedRecord& rec : path.records)
    rep.dist.push_back((rec.w21_0 - reference).norm());

  const double floor = 1e-12 * rep.reference_scale;
  const std::size_t m = rep.dist.size();
  if (*std::max_element(rep.dist.begin(), rep.dist.end()) <= floor) {
    rep.pass = true;
    rep.rate = 0.0;
    rep.extrapolated =
        *std::max_element(rep.dist.begin(), rep.dist.end()) / rep.reference_scale;
    rep.note = "all distances at roundoff; nothing to fit";
    return rep;
  }
  if (m < 2) {
    rep.note = "schedule too short to fit a rate";
    if (throw_on_fail) throw OracleMismatch("converge_study: " + rep.note);
    return rep;
  }

  // Least-squares slope of log dist against log eps.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double x = std::log(rep.eps[i]);
    const double y = std::log(std::max(rep.dist[i], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double dm = double(m);
  rep.rate = (dm * sxy - sx * sy) / (dm * sxx - sx * sx);

  // Richardson on the two smallest eps: with dist ~ C eps^p the combination
  // (w1 - t w0) / (1 - t), t = dist1/dist0, cancels the leading term.
  const CVec& w0 = path.records[m - 2].w21_0;
  const CVec& w1 = path.records[m - 1].w21_0;
  const double d0 = rep.dist[m - 2], d1 = rep.dist[m - 1];
  if (d1 <= floor || d0 <= floor) {
    rep.extrapolated = d1 / rep.reference_scale;
  } else {
    const double t = d1 / d0;
    if (t >= 0.999) {
      rep.extrapolated = d1 / rep.reference_scale;
      rep.note = "no contraction between the two smallest eps";
    } else {
      const CVec w_ext = (w1 - t * w0) / (1.0 - t);
      rep.extrapolated = (w_ext - reference).norm() / rep.reference_scale;
    }
  }

  rep.pass = rep.rate >= 0.8 && rep.rate <= 1.5 && rep.extrapolated <= tol_oracle;
  if (!rep.pass && throw_on_fail) {
    std::ostringstream os;
    os.setf(std::ios::scientific);
    os.precision(3);
    os << "converge_study: rate " << rep.rate << ", extrapolated relative distance "
       << rep.extrapolated << " (tol " << tol_oracle << ")\n";
    for (std::size_t i = 0; i < m; ++i)
      os << "  eps " << rep.eps[i] << "  dist " << rep.dist[i] << "\n";
    throw OracleMismatch(os.str());
  }
  return rep;
}

}  // namespace hopfcm
