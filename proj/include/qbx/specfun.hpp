#pragma once

#include <vector>

#include "qbx/types.hpp"

namespace qbx {

// Values of a cylinder function for orders 0..order_max at one argument.
struct CylFunSeq {
  int order_max = 0;
  double argument = 0.0;
  std::vector<cplx> values;

  // Negative orders follow from f_{-l} = (-1)^l f_l.
  cplx operator()(int ell) const {
    if (ell >= 0) return values[static_cast<std::size_t>(ell)];
    cplx v = values[static_cast<std::size_t>(-ell)];
    return (ell & 1) ? -v : v;
  }
};

CylFunSeq bessel_j_seq(double x, int nmax);
CylFunSeq hankel1_seq(double x, int nmax);

struct Hankel01 {
  cplx h0;
  cplx h1;
};

// H_0^(1)(x) and H_1^(1)(x) together; the hot path of every direct kernel sum.
Hankel01 hankel1_01(double x);

// Scaled sequences used by the translation operators so that small boxes at
// low frequency stay in range. out[n] = J_n(x) / s^n and out[n] = s^n H_n(x)
// for n = 0..nmax. No overflow checking; entries may be inf for the Hankel case.
void bessel_j_scaled(double x, int nmax, double s, double* out);
void hankel1_scaled(double x, int nmax, double s, cplx* out);

}  // namespace qbx
