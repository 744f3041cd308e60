#include "qbx/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qbx/errors.hpp"

namespace qbx {
namespace {

constexpr double euler_gamma = 0.57721566490153286061;
constexpr double big = 1e250;
constexpr double rebig = 1e-250;

void check_argument(double x, int nmax) {
  if (!std::isfinite(x) || x <= 0.0)
    throw DomainError("cylinder function argument must be finite and positive, got " + std::to_string(x));
  if (nmax < 0) throw DomainError("negative maximum order");
}

// nmax + max(20, 1.5x) is not enough for small nmax at moderate x (J_21(10) is
// only ~1e-5), so both margins are added.
int miller_start(double x, int nmax) {
  return nmax + 20 + static_cast<int>(std::ceil(1.5 * x));
}

// Downward recurrence for F_n = J_n(x)/s^n, normalized with J_0 + 2 sum J_2k = 1.
// When y01 is given (s must be 1) the Neumann series for Y_0 and Y_1 is
// accumulated in the same sweep.
void miller(double x, int nmax, double s, double* out, double* y01) {
  const int n_start = miller_start(x, nmax);
  const double two_s_over_x = 2.0 * s / x;
  const double s2 = s * s;
  double f_next = 0.0;  // F_{n+1}
  double f = 1e-200;    // F_n
  double norm = 0.0;
  double sum0 = 0.0;  // sum_k (-1)^k J_2k / k
  double sum1 = 0.0;  // sum over odd m of c_m J_m
  for (int n = n_start; n >= 1; --n) {
    if (n <= nmax) out[n] = f;
    if ((n & 1) == 0) {
      double w = (s == 1.0) ? f : f * std::pow(s, n);
      norm += 2.0 * w;
      if (y01) {
        int k = n / 2;
        sum0 += ((k & 1) ? -f : f) / k;
      }
    } else if (y01) {
      int j = (n - 1) / 2;
      double c = 1.0 / (j + 1) + (j >= 1 ? 1.0 / j : 0.0);
      sum1 += ((j & 1) ? c : -c) * f;
    }
    double f_prev = n * two_s_over_x * f - s2 * f_next;
    f_next = f;
    f = f_prev;
    if (std::abs(f) > big) {
      f *= rebig;
      f_next *= rebig;
      norm *= rebig;
      sum0 *= rebig;
      sum1 *= rebig;
      for (int k = n; k <= nmax; ++k) out[k] *= rebig;
    }
  }
  out[0] = f;
  norm += f;
  const double inv = 1.0 / norm;
  for (int k = 0; k <= nmax; ++k) out[k] *= inv;
  if (y01) {
    double j0 = f * inv;
    double j1 = (nmax >= 1) ? out[1] : f_next * inv;
    double lg = std::log(0.5 * x) + euler_gamma;
    y01[0] = (2.0 / pi) * (lg * j0 - 2.0 * sum0 * inv);
    y01[1] = -(2.0 / pi) * j0 / x + (2.0 / pi) * (lg * j1 + sum1 * inv);
  }
}

void hankel_fill(double x, int nmax, double s, const double* j, const double* y01, cplx* out) {
  double y_prev = y01[0];
  double y = s * y01[1];
  out[0] = cplx(j[0], y_prev);
  if (nmax >= 1) out[1] = cplx(s * j[1], y);
  const double two_s_over_x = 2.0 * s / x;
  const double s2 = s * s;
  double sn = s;
  for (int n = 1; n < nmax; ++n) {
    double y_next = n * two_s_over_x * y - s2 * y_prev;
    y_prev = y;
    y = y_next;
    sn *= s;
    out[n + 1] = cplx(sn * j[n + 1], y);
  }
}

}  // namespace

CylFunSeq bessel_j_seq(double x, int nmax) {
  check_argument(x, nmax);
  std::vector<double> j(static_cast<std::size_t>(nmax) + 1);
  miller(x, nmax, 1.0, j.data(), nullptr);
  CylFunSeq r{nmax, x, std::vector<cplx>(j.begin(), j.end())};
  return r;
}

CylFunSeq hankel1_seq(double x, int nmax) {
  check_argument(x, nmax);
  std::vector<double> j(static_cast<std::size_t>(nmax) + 2);
  double y01[2];
  miller(x, std::max(nmax, 1), 1.0, j.data(), y01);
  CylFunSeq r{nmax, x, std::vector<cplx>(static_cast<std::size_t>(std::max(nmax, 1)) + 1)};
  hankel_fill(x, std::max(nmax, 1), 1.0, j.data(), y01, r.values.data());
  r.values.resize(static_cast<std::size_t>(nmax) + 1);
  for (int n = 0; n <= nmax; ++n) {
    if (!std::isfinite(r.values[n].imag()))
      throw OverflowError("Hankel function of order " + std::to_string(n) + " overflows at x = " + std::to_string(x));
  }
  return r;
}

Hankel01 hankel1_01(double x) {
  double j[2] = {};
  double y01[2];
  miller(x, 1, 1.0, j, y01);
  return {cplx(j[0], y01[0]), cplx(j[1], y01[1])};
}

void bessel_j_scaled(double x, int nmax, double s, double* out) {
  if (x == 0.0) {
    out[0] = 1.0;
    for (int n = 1; n <= nmax; ++n) out[n] = 0.0;
    return;
  }
  miller(x, nmax, s, out, nullptr);
}

void hankel1_scaled(double x, int nmax, double s, cplx* out) {
  const int m = std::max(nmax, 1);
  double jbuf[64] = {};
  std::vector<double> jvec;
  double* j = jbuf;
  if (m + 1 > 64) {
    jvec.resize(static_cast<std::size_t>(m) + 1);
    j = jvec.data();
  }
  double y01[2];
  miller(x, m, 1.0, j, y01);
  if (nmax >= 1) {
    hankel_fill(x, nmax, s, j, y01, out);
  } else {
    out[0] = cplx(j[0], y01[0]);
  }
}

}  // namespace qbx
