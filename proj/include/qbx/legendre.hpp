#pragma once

#include <vector>

namespace qbx::legendre {

struct Rule {
  std::vector<double> x;
  std::vector<double> w;
};

// n-point Gauss-Legendre rule on [-1, 1], nodes ascending. Cached; thread-safe.
const Rule& gauss(int n);

// P_0..P_n at x into p[0..n].
void eval_all(int n, double x, double* p);

// Legendre coefficients of the degree < n interpolant of values given at the
// n-point Gauss nodes.
std::vector<double> coefficients(int n, const double* values);

double eval_series(const std::vector<double>& a, double x);

// int_{-1}^{x} sum_n a_n P_n(u) du
double integrate_series(const std::vector<double>& a, double x);

// Row-major (m x n) matrix interpolating from n-point to m-point Gauss nodes.
const std::vector<double>& interp_matrix(int n, int m);

}  // namespace qbx::legendre
