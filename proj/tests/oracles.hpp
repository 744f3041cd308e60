#pragma once

// Independent reference computations used only by the tests. Nothing here
// calls into the library's special-function or expansion code.

#include <cmath>
#include <complex>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
constexpr double pi = 3.14159265358979323846;

// J_n by its power series, in long double. Accurate for x <= ~5.
inline double bessel_j_series(int n, double xd) {
  long double x = xd, half = x / 2, term = 1, sum = 0;
  for (int k = 1; k <= n; ++k) term *= half / k;
  for (int k = 0; k < 60; ++k) {
    sum += term;
    term *= -half * half / ((k + 1.0L) * (k + 1.0L + n));
  }
  return static_cast<double>(sum);
}

// Y_0 by its logarithmic power series. Accurate for x <= ~5.
inline double bessel_y0_series(double xd) {
  long double x = xd, q = x * x / 4, term = 1, harm = 0, sum = 0;
  const long double gamma = 0.57721566490153286060651209L;
  for (int k = 1; k < 60; ++k) {
    term *= q / ((long double)k * k);
    harm += 1.0L / k;
    sum += ((k & 1) ? 1 : -1) * harm * term;
  }
  long double j0 = bessel_j_series(0, xd);
  return static_cast<double>((2 / (long double)pi) * ((std::log(x / 2) + gamma) * j0 + sum));
}

// J_n(x) = (1/pi) int_0^pi cos(n t - x sin t) dt, by the trapezoid rule on the
// periodic extension. Spectrally accurate once m exceeds x + n by a margin.
inline double bessel_j_integral(int n, double x) {
  int m = static_cast<int>(x + n) * 2 + 200;
  long double s = 0;
  for (int k = 0; k < m; ++k) {
    long double t = 2 * (long double)pi * k / m;
    s += std::cos(n * t - x * std::sin(t));
  }
  return static_cast<double>(s / m);
}

// |H_n(x)| from the series J_n, Y_0, the Wronskian for Y_1 and forward
// recurrence for Y_n. For x <= ~5 away from zeros of J_0.
inline double hankel_abs(int n, double x) {
  const long double j0 = bessel_j_series(0, x), j1 = bessel_j_series(1, x);
  long double y0 = bessel_y0_series(x);
  long double y1 = (j1 * y0 - 2 / ((long double)pi * x)) / j0;
  long double y = n == 0 ? y0 : y1;
  for (int k = 1; k < n; ++k) {
    const long double y2 = 2 * k / (long double)x * y1 - y0;
    y0 = y1;
    y1 = y2;
    y = y2;
  }
  const long double j = bessel_j_series(n, x);
  return static_cast<double>(std::sqrt(j * j + y * y));
}

}  // namespace oracle
