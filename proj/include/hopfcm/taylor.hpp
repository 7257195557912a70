#pragma once

#include "hopfcm/spectral.hpp"

namespace hopfcm {

// Taylor data of the reduced flow. The series convention is
//   f(z, zbar) = sum f_{j,k} z^j zbar^k / (j! k!),
// so matching coefficients of f(head + corrections) gives the formulas in
// f_second_order / f_third_order with no stray factorials; the test suite
// re-derives them against a brute-force series extraction.
struct ReducedCoefficients {
  CVec Q;                    // (phi1(0), phi1(0) e^{-i omega r}) in C^{2n}
  CVec f20, f11, f02, f21, f12;
  cplx g20{}, g11{}, g02{}, g21{}, g12{};
  CVec W20, W11, W02;        // (w(0), w(-r)) pairs of the order-2 coefficients
};

// (phi1(0), phi1(0) e^{-i omega r}): the evaluation pair every multilinear
// form acts on.
CVec head_pair(const SpectralData& data);

struct SecondOrderF {
  CVec f20, f11, f02;
};
SecondOrderF f_second_order(const DDESystem& sys, const CVec& Q);

struct ThirdOrderF {
  CVec f21, f12;
};
ThirdOrderF f_third_order(const DDESystem& sys, const CVec& Q, const CVec& W20,
                          const CVec& W11, const CVec& W02);

// g_{j,k} = Psi_1(0) f_{j,k} (row-column contraction).
cplx g_from_f(const SpectralData& data, const CVec& f);

}  // namespace hopfcm
