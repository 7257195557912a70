#include "hopfcm/expfun.hpp"

#include <algorithm>
#include <cmath>

namespace hopfcm {

namespace {

bool vanishes(const CVec& v) { return v.norm() == 0.0; }

double binom(int k, int m) {
  double out = 1.0;
  for (int i = 0; i < m; ++i) out = out * double(k - i) / double(i + 1);
  return out;
}

}  // namespace

ExpPolyFunction::ExpPolyFunction(double lo, double hi, Orient orient,
                                 Eigen::Index dim,
                                 std::vector<ExpPolyTerm> terms,
                                 double tol_resonance)
    : lo_(lo), hi_(hi), orient_(orient), dim_(dim) {
  if (!(lo < hi)) throw OutOfDomain("ExpPolyFunction: empty interval");
  for (auto& t : terms) {
    for (const auto& c : t.coef)
      if (c.size() != dim) throw DimensionMismatch("ExpPolyFunction: ragged coefficient list");
    bool merged = false;
    for (auto& kept : terms_) {
      if (std::abs(kept.mu - t.mu) <= tol_resonance) {
        if (kept.coef.size() < t.coef.size())
          kept.coef.resize(t.coef.size(), CVec::Zero(dim));
        for (size_t k = 0; k < t.coef.size(); ++k) kept.coef[k] += t.coef[k];
        merged = true;
        break;
      }
    }
    if (!merged) terms_.push_back(std::move(t));
  }
  for (auto& t : terms_) {
    while (!t.coef.empty() && vanishes(t.coef.back())) t.coef.pop_back();
  }
  std::erase_if(terms_, [](const ExpPolyTerm& t) { return t.coef.empty(); });
}

ExpPolyFunction ExpPolyFunction::zero(double lo, double hi, Orient orient,
                                      Eigen::Index dim) {
  return ExpPolyFunction(lo, hi, orient, dim, {});
}

ExpPolyFunction ExpPolyFunction::exponential(double lo, double hi, Orient orient,
                                             const CVec& c, cplx mu) {
  return ExpPolyFunction(lo, hi, orient, c.size(), {{mu, {c}}});
}

CVec ExpPolyFunction::evaluate(double theta) const {
  const double slack = 1e-9 * (hi_ - lo_);
  if (theta < lo_ - slack || theta > hi_ + slack)
    throw OutOfDomain("evaluate: argument outside the function's interval");
  CVec out = CVec::Zero(dim_);
  for (const auto& t : terms_) {
    CVec p = CVec::Zero(dim_);
    for (size_t k = t.coef.size(); k-- > 0;) p = p * theta + t.coef[k];
    out += p * std::exp(t.mu * theta);
  }
  return out;
}

ExpPolyFunction ExpPolyFunction::conjugate() const {
  std::vector<ExpPolyTerm> ts;
  ts.reserve(terms_.size());
  for (const auto& t : terms_) {
    ExpPolyTerm c{std::conj(t.mu), {}};
    for (const auto& v : t.coef) c.coef.push_back(v.conjugate());
    ts.push_back(std::move(c));
  }
  return ExpPolyFunction(lo_, hi_, orient_, dim_, std::move(ts));
}

ExpPolyFunction ExpPolyFunction::derivative() const {
  std::vector<ExpPolyTerm> ts;
  for (const auto& t : terms_) {
    ExpPolyTerm d{t.mu, {}};
    const size_t deg = t.coef.size();
    d.coef.resize(deg, CVec::Zero(dim_));
    for (size_t k = 0; k < deg; ++k) {
      d.coef[k] += t.mu * t.coef[k];
      if (k + 1 < deg) d.coef[k] += double(k + 1) * t.coef[k + 1];
    }
    ts.push_back(std::move(d));
  }
  return ExpPolyFunction(lo_, hi_, orient_, dim_, std::move(ts));
}

ExpPolyFunction ExpPolyFunction::scaled(cplx a) const {
  std::vector<ExpPolyTerm> ts = terms_;
  for (auto& t : ts)
    for (auto& c : t.coef) c *= a;
  return ExpPolyFunction(lo_, hi_, orient_, dim_, std::move(ts));
}

ExpPolyFunction ExpPolyFunction::plus(const ExpPolyFunction& other) const {
  if (other.dim_ != dim_ || other.orient_ != orient_)
    throw DimensionMismatch("plus: incompatible functions");
  std::vector<ExpPolyTerm> ts = terms_;
  ts.insert(ts.end(), other.terms_.begin(), other.terms_.end());
  return ExpPolyFunction(lo_, hi_, orient_, dim_, std::move(ts));
}

CVec ExpPolyFunction::integral_weighted(cplx nu) const {
  CVec out = CVec::Zero(dim_);
  for (const auto& t : terms_)
    for (size_t k = 0; k < t.coef.size(); ++k)
      out += t.coef[k] * monomial_exp_integral(int(k), t.mu + nu, lo_, hi_);
  return out;
}

cplx monomial_exp_integral(int k, cplx mu, double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  if (std::abs(mu) * scale <= 1.0) {
    // Antiderivative expanded as sum_m mu^m/m! (b^{k+m+1}-a^{k+m+1})/(k+m+1):
    // factorially convergent here, and free of the cancellation the closed
    // form suffers for small |mu|.
    cplx acc = 0.0;
    cplx fac = 1.0;  // mu^m / m!
    double pa = std::pow(a, k + 1), pb = std::pow(b, k + 1);
    for (int m = 0; m < 64; ++m) {
      acc += fac * (pb - pa) / double(k + m + 1);
      // Stop on the term's envelope, not the term itself: on a symmetric
      // interval every other difference pb - pa vanishes exactly, which must
      // not be mistaken for convergence.
      const double bound =
          std::abs(fac) * (std::abs(pb) + std::abs(pa)) / double(k + m + 1);
      fac *= mu / double(m + 1);
      pa *= a;
      pb *= b;
      if (bound <= 1e-17 * std::abs(acc) && m >= 2) break;
    }
    return acc;
  }
  // F(t) = e^{mu t} sum_{j=0..k} (-1)^j k!/(k-j)! t^{k-j} / mu^{j+1}
  auto F = [&](double t) {
    cplx acc = 0.0;
    double fall = 1.0;
    cplx mu_pow = mu;
    for (int j = 0; j <= k; ++j) {
      acc += (j % 2 ? -1.0 : 1.0) * fall * std::pow(t, k - j) / mu_pow;
      fall *= double(k - j);
      mu_pow *= mu;
    }
    return std::exp(mu * t) * acc;
  };
  return F(b) - F(a);
}

cplx bilinear_pair(const ExpPolyFunction& psi, const ExpPolyFunction& phi,
                   const CMat& B, double r) {
  if (psi.orient() != Orient::row || phi.orient() != Orient::column)
    throw DimensionMismatch("bilinear_pair: expected (row, column) orientations");
  if (psi.dim() != B.rows() || phi.dim() != B.cols())
    throw DimensionMismatch("bilinear_pair: dimensions disagree with B");
  cplx out = psi.evaluate(0.0).cwiseProduct(phi.evaluate(0.0)).sum();
  for (const auto& tp : psi.terms()) {
    // psi(zeta + r): shift the polynomial part by r.
    const size_t deg = tp.coef.size();
    std::vector<CVec> shifted(deg, CVec::Zero(psi.dim()));
    for (size_t m = 0; m < deg; ++m)
      for (size_t k = m; k < deg; ++k)
        shifted[m] += binom(int(k), int(m)) * std::pow(r, double(k - m)) * tp.coef[k];
    const cplx pref = std::exp(tp.mu * r);
    for (const auto& tf : phi.terms()) {
      for (size_t mi = 0; mi < deg; ++mi) {
        const CVec Bc_left = B.transpose() * shifted[mi];  // row acting on B
        for (size_t li = 0; li < tf.coef.size(); ++li) {
          const cplx s = Bc_left.cwiseProduct(tf.coef[li]).sum();
          out += pref * s *
                 monomial_exp_integral(int(mi + li), tp.mu + tf.mu, -r, 0.0);
        }
      }
    }
  }
  return out;
}

ExpPolyFunction solve_linear_ode(cplx rate, const ExpPolyFunction& forcing,
                                 const CVec& value_at_0, double tol_resonance) {
  if (forcing.orient() != Orient::column)
    throw DimensionMismatch("solve_linear_ode: forcing must be column oriented");
  if (value_at_0.size() != forcing.dim())
    throw DimensionMismatch("solve_linear_ode: initial value has wrong length");
  const Eigen::Index n = forcing.dim();
  std::vector<ExpPolyTerm> particular;
  for (const auto& t : forcing.terms()) {
    const int d = int(t.coef.size()) - 1;
    if (std::abs(t.mu - rate) <= tol_resonance) {
      // Resonant: particular solution is the polynomial antiderivative,
      // raising the degree by one.
      ExpPolyTerm q{rate, {}};
      q.coef.resize(size_t(d) + 2, CVec::Zero(n));
      for (int k = 0; k <= d; ++k) q.coef[size_t(k) + 1] = t.coef[size_t(k)] / double(k + 1);
      particular.push_back(std::move(q));
    } else {
      const cplx delta = t.mu - rate;
      ExpPolyTerm q{t.mu, {}};
      q.coef.resize(size_t(d) + 1, CVec::Zero(n));
      q.coef[size_t(d)] = t.coef[size_t(d)] / delta;
      for (int k = d - 1; k >= 0; --k)
        q.coef[size_t(k)] = (t.coef[size_t(k)] - double(k + 1) * q.coef[size_t(k) + 1]) / delta;
      particular.push_back(std::move(q));
    }
  }
  CVec hom = value_at_0;
  for (const auto& q : particular)
    if (!q.coef.empty()) hom -= q.coef[0];
  particular.push_back(ExpPolyTerm{rate, {hom}});
  return ExpPolyFunction(forcing.lo(), forcing.hi(), Orient::column, n,
                         std::move(particular), tol_resonance);
}

}  // namespace hopfcm
