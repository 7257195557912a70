#include "hopfcm/taylor.hpp"

namespace hopfcm {

CVec head_pair(const SpectralData& data) {
  const Eigen::Index n = data.phi1_0.size();
  CVec Q(2 * n);
  Q.head(n) = data.phi1_0;
  Q.tail(n) = data.phi1_0 * std::exp(cplx(0.0, -data.omega * data.r));
  return Q;
}

SecondOrderF f_second_order(const DDESystem& sys, const CVec& Q) {
  const CVec Qb = Q.conjugate();
  return {sys.apply_D2(Q, Q), sys.apply_D2(Q, Qb), sys.apply_D2(Qb, Qb)};
}

ThirdOrderF f_third_order(const DDESystem& sys, const CVec& Q, const CVec& W20,
                          const CVec& W11, const CVec& W02) {
  const CVec Qb = Q.conjugate();
  ThirdOrderF out;
  out.f21 = sys.apply_D3(Q, Q, Qb) + 2.0 * sys.apply_D2(Q, W11) + sys.apply_D2(Qb, W20);
  out.f12 = sys.apply_D3(Q, Qb, Qb) + 2.0 * sys.apply_D2(Qb, W11) + sys.apply_D2(Q, W02);
  return out;
}

cplx g_from_f(const SpectralData& data, const CVec& f) {
  if (f.size() != data.Psi1_0.size())
    throw DimensionMismatch("g_from_f: length mismatch");
  return (data.Psi1_0 * f).value();
}

}  // namespace hopfcm
