#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "qbx/errors.hpp"
#include "qbx/specfun.hpp"

using namespace qbx;

TEST(Specfun, J0NearZero) {
  auto j = bessel_j_seq(1e-30, 3);
  EXPECT_NEAR(j(0).real(), 1.0, 1e-15);
  EXPECT_NEAR(j(1).real(), 5e-31, 1e-44);
}

TEST(Specfun, JMatchesPowerSeries) {
  for (double x : {0.01, 0.3, 1.0, 2.5, 4.0}) {
    auto j = bessel_j_seq(x, 30);
    for (int n = 0; n <= 30; ++n) {
      double ref = oracle::bessel_j_series(n, x);
      EXPECT_NEAR(j(n).real(), ref, 1e-14 * std::abs(ref) + 1e-300) << "n=" << n << " x=" << x;
    }
  }
  EXPECT_NEAR(bessel_j_seq(1.0, 0)(0).real(), oracle::bessel_j_series(0, 1.0), 1e-14);
}

TEST(Specfun, JMatchesIntegralRepresentationForLargeArguments) {
  for (double x : {7.3, 31.0, 150.0, 1000.0, 10000.0}) {
    auto j = bessel_j_seq(x, 200);
    double jmax = 0;
    for (int n = 0; n <= 200; ++n) jmax = std::max(jmax, std::abs(j(n).real()));
    for (int n : {0, 1, 2, 7, 50, 123, 200}) {
      double ref = oracle::bessel_j_integral(n, x);
      // Relative 1e-14 plus the conditioning of J at a rounded argument, x eps |J'|.
      double tol = 1e-14 * std::abs(ref) + 2.2e-16 * x * jmax;
      EXPECT_NEAR(j(n).real(), ref, tol) << "n=" << n << " x=" << x;
    }
  }
}

TEST(Specfun, HankelRealPartIsJ) {
  auto h = hankel1_seq(2.5, 12);
  auto j = bessel_j_seq(2.5, 12);
  for (int n = 0; n <= 12; ++n) EXPECT_NEAR(h(n).real(), j(n).real(), 1e-13);
}

TEST(Specfun, H0MatchesSeries) {
  auto h = hankel1_seq(1.0, 1);
  EXPECT_NEAR(h(0).real(), oracle::bessel_j_series(0, 1.0), 1e-13);
  EXPECT_NEAR(h(0).imag(), oracle::bessel_y0_series(1.0), 1e-13);
  for (double x : {0.001, 0.2, 3.3}) {
    EXPECT_NEAR(hankel1_seq(x, 0)(0).imag(), oracle::bessel_y0_series(x), 1e-13 * std::max(1.0, std::abs(oracle::bessel_y0_series(x))));
  }
}

TEST(Specfun, KnownValues) {
  EXPECT_NEAR(hankel1_seq(1.0, 1)(1).imag(), -0.78121282130028871655, 1e-14);
  EXPECT_NEAR(hankel1_seq(10.0, 1)(0).imag(), 0.055671167283599391424, 1e-14);
  EXPECT_NEAR(hankel1_seq(10.0, 1)(1).imag(), 0.24901542420695388, 1e-14);
  EXPECT_NEAR(hankel1_seq(100.0, 1)(0).imag(), -0.07724431336508315225, 1e-14);
  EXPECT_NEAR(hankel1_seq(9000.0, 0)(0).imag(), 0.00834748614399659748, 2e-14);
  EXPECT_NEAR(bessel_j_seq(100.0, 0)(0).real(), 0.019985850304223122, 1e-14);
}

TEST(Specfun, Wronskian) {
  const double x = 3.7;
  auto h = hankel1_seq(x, 21);
  for (int n = 0; n <= 20; ++n) {
    double w = h(n + 1).real() * h(n).imag() - h(n).real() * h(n + 1).imag();
    EXPECT_NEAR(w, 2.0 / (pi * x), 1e-12) << n;
  }
}

TEST(Specfun, WronskianWideRange) {
  for (double x : {1e-3, 0.05, 0.9, 12.0, 77.0, 500.0, 9000.0}) {
    auto h = hankel1_seq(x, 5);
    for (int n = 0; n < 5; ++n) {
      double w = h(n + 1).real() * h(n).imag() - h(n).real() * h(n + 1).imag();
      EXPECT_NEAR(w * pi * x / 2.0, 1.0, 1e-12) << "x=" << x << " n=" << n;
    }
  }
}

TEST(Specfun, NegativeOrderSymmetry) {
  auto h = hankel1_seq(4.2, 6);
  for (int n = 0; n <= 6; ++n) EXPECT_EQ(h(-n), (n % 2 ? -1.0 : 1.0) * h(n));
}

TEST(Specfun, JBoundedByOne) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ux(0.01, 200.0);
  for (int t = 0; t < 200; ++t) {
    auto j = bessel_j_seq(ux(rng), 60);
    for (auto v : j.values) EXPECT_LE(std::abs(v.real()), 1.0);
  }
}

TEST(Specfun, RecurrenceResidual) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ux(0.1, 100.0);
  for (int t = 0; t < 200; ++t) {
    double x = ux(rng);
    auto j = bessel_j_seq(x, 51);
    double jmax = 0;
    for (auto v : j.values) jmax = std::max(jmax, std::abs(v.real()));
    for (int l = 1; l <= 50; ++l) {
      double r = j(l - 1).real() + j(l + 1).real() - (2.0 * l / x) * j(l).real();
      EXPECT_LE(std::abs(r), 1e-12 * jmax);
    }
  }
}

namespace {
// Graf: (i/4)H0(w|x-x'|) = sum_l (i/4) H_l(w|x'-c|) e^{i l th'} J_l(w|x-c|) e^{-i l th}
cplx graf_sum(double w, double xr, double xt, double sr, double st, int p) {
  auto h = hankel1_seq(w * sr, p);
  auto j = bessel_j_seq(w * xr, p);
  cplx s = 0;
  for (int l = -p; l <= p; ++l) s += h(l) * std::exp(I * (l * st)) * j(l) * std::exp(-I * (l * xt));
  return 0.25 * I * s;
}
}  // namespace

TEST(Specfun, GrafSelfTest) {
  const double w = 5.0;
  const double sr = 1.3, st = 0.7, xr = 0.3 * sr, xt = 2.1;
  cplx lhs = graf_sum(w, xr, xt, sr, st, 40);
  double dx = xr * std::cos(xt) - sr * std::cos(st), dy = xr * std::sin(xt) - sr * std::sin(st);
  cplx direct = 0.25 * I * hankel1_seq(w * std::hypot(dx, dy), 0)(0);
  EXPECT_NEAR(std::abs(lhs - direct), 0.0, 1e-12);
  // The real part of the kernel is independent of the recurrences under test.
  EXPECT_NEAR(direct.imag(), 0.25 * oracle::bessel_j_integral(0, w * std::hypot(dx, dy)), 1e-14);
}

TEST(Specfun, GrafRandomTriples) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    double w = 0.5 + 10 * u(rng);
    double sr = 0.1 + 2 * u(rng), st = 2 * pi * u(rng);
    double xr = 0.5 * sr * u(rng) + 1e-6, xt = 2 * pi * u(rng);
    cplx lhs = graf_sum(w, xr, xt, sr, st, 60);
    double dx = xr * std::cos(xt) - sr * std::cos(st), dy = xr * std::sin(xt) - sr * std::sin(st);
    cplx direct = 0.25 * I * hankel1_seq(w * std::hypot(dx, dy), 0)(0);
    EXPECT_NEAR(std::abs(lhs - direct), 0.0, 1e-12 * std::max(1.0, std::abs(direct)));
  }
}

TEST(Specfun, Errors) {
  EXPECT_THROW(bessel_j_seq(0.0, 3), DomainError);
  EXPECT_THROW(bessel_j_seq(-1.0, 3), DomainError);
  EXPECT_THROW(hankel1_seq(std::nan(""), 3), DomainError);
  EXPECT_THROW(hankel1_seq(1e-3, 400), OverflowError);
}

TEST(Specfun, ScaledSequencesAgreeWithPlain) {
  const double x = 0.8, s = 0.3;
  std::vector<double> js(30);
  std::vector<cplx> hs(30);
  bessel_j_scaled(x, 29, s, js.data());
  hankel1_scaled(x, 29, s, hs.data());
  auto j = bessel_j_seq(x, 29);
  auto h = hankel1_seq(x, 29);
  for (int n = 0; n < 30; ++n) {
    EXPECT_NEAR(js[n] * std::pow(s, n) / j(n).real(), 1.0, 1e-13);
    EXPECT_NEAR(std::abs(hs[n] / (std::pow(s, n) * h(n)) - 1.0), 0.0, 1e-13);
  }
}

TEST(Specfun, ScaledSequencesAvoidOverflow) {
  std::vector<cplx> hs(121);
  std::vector<double> js(121);
  hankel1_scaled(4e-4, 120, 1e-4, hs.data());
  bessel_j_scaled(1.4e-4, 120, 1e-4, js.data());
  for (int n = 0; n <= 120; ++n) {
    EXPECT_TRUE(std::isfinite(std::abs(hs[n])));
    EXPECT_TRUE(std::isfinite(js[n]));
  }
  // Product of scaled values equals H_n(4s) J_n(1.4 s) ~ (0.35)^n / (pi n)
  EXPECT_NEAR(std::abs(hs[30] * js[30]) * pi * 30 / std::pow(0.35, 30), 1.0, 0.05);
}

TEST(Specfun, Hankel01) {
  for (double x : {1e-6, 0.4, 3.0, 25.0, 600.0}) {
    auto h = hankel1_seq(x, 1);
    auto f = hankel1_01(x);
    EXPECT_EQ(f.h0, h(0));
    EXPECT_EQ(f.h1, h(1));
  }
}
