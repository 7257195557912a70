#include "hopfcm/chareq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "hopfcm/numerics.hpp"

namespace hopfcm {

CVec DDESystem::apply_D2(const CVec& u, const CVec& v) const {
  CVec out = CVec::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const CVec Sv = D2[size_t(i)].cast<cplx>() * v;
    out(i) = u.cwiseProduct(Sv).sum();
  }
  return out;
}

CVec DDESystem::apply_D3(const CVec& u, const CVec& v, const CVec& w) const {
  const Eigen::Index m = 2 * n;
  CVec out = CVec::Zero(n);
  if (D3.empty()) return out;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& T = D3[size_t(i)];
    cplx acc = 0.0;
    for (Eigen::Index p = 0; p < m; ++p) {
      if (u(p) == 0.0) continue;
      cplx accp = 0.0;
      for (Eigen::Index q = 0; q < m; ++q) {
        if (v(q) == 0.0) continue;
        const double* row = T.data() + size_t((p * m + q) * m);
        cplx accq = 0.0;
        for (Eigen::Index s = 0; s < m; ++s) accq += row[s] * w(s);
        accp += v(q) * accq;
      }
      acc += u(p) * accp;
    }
    out(i) = acc;
  }
  return out;
}

DDESystem make_system(Eigen::Index n, double r, RMat A, RMat B,
                      std::vector<RMat> D2, std::vector<std::vector<double>> D3) {
  if (n < 1) throw InputError("make_system: n must be positive");
  if (!(r > 0)) throw InputError("make_system: delay must be positive");
  if (A.rows() != n || A.cols() != n || B.rows() != n || B.cols() != n)
    throw InputError("make_system: A and B must be n x n");
  const Eigen::Index m = 2 * n;
  if (Eigen::Index(D2.size()) != n) throw InputError("make_system: D2 needs n slices");
  for (auto& S : D2) {
    if (S.rows() != m || S.cols() != m)
      throw InputError("make_system: D2 slices must be 2n x 2n");
    S = ((S + S.transpose()) / 2.0).eval();
  }
  if (!D3.empty()) {
    if (Eigen::Index(D3.size()) != n) throw InputError("make_system: D3 needs n slices");
    for (auto& T : D3) {
      if (Eigen::Index(T.size()) != m * m * m)
        throw InputError("make_system: D3 slices must be (2n)^3");
      std::vector<double> S(T.size());
      auto at = [&](Eigen::Index p, Eigen::Index q, Eigen::Index s) {
        return T[size_t((p * m + q) * m + s)];
      };
      for (Eigen::Index p = 0; p < m; ++p)
        for (Eigen::Index q = 0; q < m; ++q)
          for (Eigen::Index s = 0; s < m; ++s)
            S[size_t((p * m + q) * m + s)] =
                (at(p, q, s) + at(p, s, q) + at(q, p, s) + at(q, s, p) +
                 at(s, p, q) + at(s, q, p)) / 6.0;
      T = std::move(S);
    }
  }
  for (double v : {A.cwiseAbs().maxCoeff(), B.cwiseAbs().maxCoeff()})
    if (!std::isfinite(v)) throw InputError("make_system: non-finite matrix entry");
  DDESystem sys;
  sys.n = n;
  sys.r = r;
  sys.A = std::move(A);
  sys.B = std::move(B);
  sys.D2 = std::move(D2);
  sys.D3 = std::move(D3);
  return sys;
}

CMat char_matrix(const DDESystem& sys, cplx lambda) {
  CMat M = CMat::Zero(sys.n, sys.n);
  M.diagonal().setConstant(lambda);
  M -= sys.A;
  M -= std::exp(-lambda * sys.r) * sys.B.cast<cplx>();
  return M;
}

namespace {

double row_scale(const DDESystem& sys, cplx lambda) {
  const double na = sys.A.cwiseAbs().rowwise().sum().maxCoeff();
  const double nb = sys.B.cwiseAbs().rowwise().sum().maxCoeff();
  return std::abs(lambda) + na + nb;
}

double det_scale(const DDESystem& sys, cplx lambda) {
  return std::pow(row_scale(sys, lambda), double(sys.n));
}

cplx char_det(const DDESystem& sys, cplx lambda) {
  return Eigen::PartialPivLU<CMat>(char_matrix(sys, lambda)).determinant();
}

// d/d lambda det, by replacing one row at a time with the corresponding row
// of d/d lambda (char matrix) = I + r e^{-lambda r} B. Stable at the root,
// where the trace formula det * tr(M^{-1} M') degenerates.
cplx char_det_deriv(const DDESystem& sys, cplx lambda) {
  const CMat M = char_matrix(sys, lambda);
  const CMat Mp = CMat::Identity(sys.n, sys.n) +
                  sys.r * std::exp(-lambda * sys.r) * sys.B.cast<cplx>();
  cplx out = 0.0;
  for (Eigen::Index k = 0; k < sys.n; ++k) {
    CMat Mk = M;
    Mk.row(k) = Mp.row(k);
    out += Eigen::PartialPivLU<CMat>(Mk).determinant();
  }
  return out;
}

}  // namespace

HopfPair find_hopf(const DDESystem& sys, double omega_guess, const Tolerances& tol) {
  if (!(omega_guess > 0)) throw InputError("find_hopf: omega_guess must be positive");
  cplx lam(0.0, omega_guess);
  bool converged = false;
  for (int it = 0; it < 100; ++it) {
    const cplx d = char_det(sys, lam);
    if (std::abs(d) <= 1e-3 * tol.tol_root * det_scale(sys, lam)) {
      converged = true;  // already effectively at a root
      break;
    }
    const cplx dp = char_det_deriv(sys, lam);
    if (!(std::abs(dp) > 0) || !std::isfinite(std::abs(dp)))
      throw NoConvergence("find_hopf: vanishing determinant derivative");
    const cplx step = -d / dp;
    lam += step;
    if (!std::isfinite(std::abs(lam)))
      throw NoConvergence("find_hopf: iteration diverged");
    if (std::abs(step) <= 1e-14 * (1.0 + std::abs(lam))) {
      converged = true;
      break;
    }
  }
  if (!converged) throw NoConvergence("find_hopf: Newton did not converge");
  HopfPair hopf;
  hopf.root_residual = std::abs(char_det(sys, lam)) / det_scale(sys, lam);
  if (hopf.root_residual > tol.tol_root)
    throw NoConvergence("find_hopf: residual " + std::to_string(hopf.root_residual) +
                        " above tol_root");
  if (std::abs(lam.real()) > tol.tol_imaginary * std::abs(lam))
    throw NotOnAxis("find_hopf: converged root " + std::to_string(lam.real()) + " + " +
                    std::to_string(lam.imag()) + "i is not on the imaginary axis");
  if (lam.imag() < 0) lam = std::conj(lam);  // the pair is symmetric
  if (!(lam.imag() > 0))
    throw NotOnAxis("find_hopf: converged to a real root");
  hopf.lambda = lam;
  hopf.omega = lam.imag();
  hopf.simplicity_margin = singular_extrema(char_matrix(sys, lam)).simplicity_margin;
  if (hopf.simplicity_margin <= tol.tol_rank)
    throw NotSimple("find_hopf: simplicity margin " +
                    std::to_string(hopf.simplicity_margin) + " below tol_rank");
  return hopf;
}

std::vector<cplx> spectrum_scan(const DDESystem& sys, int nodes) {
  const int N = nodes;
  const Eigen::Index n = sys.n;
  // Chebyshev points x_j = cos(j pi / N) mapped onto [-r, 0]; theta_0 = 0
  // carries the boundary row A w_0 + B w_N.
  Eigen::VectorXd x(N + 1), c(N + 1);
  for (int j = 0; j <= N; ++j) {
    x(j) = std::cos(M_PI * j / N);
    c(j) = (j == 0 || j == N) ? 2.0 : 1.0;
    if (j % 2) c(j) = -c(j);
  }
  RMat D = RMat::Zero(N + 1, N + 1);
  for (int i = 0; i <= N; ++i)
    for (int j = 0; j <= N; ++j)
      if (i != j) D(i, j) = (c(i) / c(j)) / (x(i) - x(j));
  for (int i = 0; i <= N; ++i) D(i, i) = -D.row(i).sum();
  D *= 2.0 / sys.r;

  RMat G = RMat::Zero((N + 1) * n, (N + 1) * n);
  G.block(0, 0, n, n) = sys.A;
  G.block(0, N * n, n, n) += sys.B;
  for (int i = 1; i <= N; ++i)
    for (int j = 0; j <= N; ++j)
      G.block(i * n, j * n, n, n).diagonal().setConstant(D(i, j));
  Eigen::EigenSolver<RMat> es(G, /*computeEigenvectors=*/false);
  std::vector<cplx> out(es.eigenvalues().data(),
                        es.eigenvalues().data() + es.eigenvalues().size());
  return out;
}

double scan_hopf_guess(const DDESystem& sys, const Tolerances& tol) {
  auto ev = spectrum_scan(sys, tol.scan_nodes);
  double best = -1.0, best_re = std::numeric_limits<double>::infinity();
  for (cplx e : ev) {
    if (e.imag() <= 1e-8) continue;
    if (std::abs(e.real()) < best_re) {
      best_re = std::abs(e.real());
      best = e.imag();
    }
  }
  if (best <= 0)
    throw NoConvergence("scan_hopf_guess: no candidate frequency in the scan");
  return best;
}

HypothesisReport verify_hypothesis_H(const DDESystem& sys, const HopfPair& hopf,
                                     const Tolerances& tol, bool throw_on_fail) {
  HypothesisReport rep;
  rep.note = "pseudospectral scan: heuristic certificate, rightmost roots only";
  const CMat M = char_matrix(sys, hopf.lambda);
  rep.simplicity_margin = singular_extrema(M).simplicity_margin;
  const double sp = double(sys.n) *
                    std::pow(row_scale(sys, hopf.lambda), double(sys.n - 1)) *
                    (1.0 + sys.r * sys.B.cwiseAbs().rowwise().sum().maxCoeff());
  rep.char_deriv_scaled = std::abs(char_det_deriv(sys, hopf.lambda)) / sp;
  bool simple = rep.simplicity_margin > tol.tol_rank &&
                rep.char_deriv_scaled > tol.tol_rank;

  auto ev = spectrum_scan(sys, tol.scan_nodes);
  // Remove the discretization's copies of +-i omega.
  for (cplx target : {cplx(0, hopf.omega), cplx(0, -hopf.omega)}) {
    size_t best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < ev.size(); ++i) {
      const double d = std::abs(ev[i] - target);
      if (d < bd) {
        bd = d;
        best = i;
      }
    }
    if (bd > 1e-5 * (1.0 + std::abs(target))) {
      rep.note += "; scan did not resolve the critical pair";
      simple = false;
    }
    ev.erase(ev.begin() + long(best));
  }
  std::sort(ev.begin(), ev.end(),
            [](cplx a, cplx b) { return a.real() > b.real(); });
  const size_t K = std::min(ev.size(), size_t(tol.scan_report));
  rep.rightmost.assign(ev.begin(), ev.begin() + long(K));
  rep.rightmost_other_root = ev.empty() ? cplx(0, 0) : ev.front();
  rep.margin = ev.empty() ? 0.0 : -ev.front().real();
  rep.pass = simple && !ev.empty() && ev.front().real() <= -tol.delta_spectrum;
  if (!rep.pass && throw_on_fail) {
    throw HypothesisViolated(
        "verify_hypothesis_H: offending root " +
        std::to_string(rep.rightmost_other_root.real()) + " + " +
        std::to_string(rep.rightmost_other_root.imag()) + "i (margin " +
        std::to_string(rep.margin) + ", simplicity " +
        std::to_string(rep.simplicity_margin) + ")");
  }
  return rep;
}

}  // namespace hopfcm
