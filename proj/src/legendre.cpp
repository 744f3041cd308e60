#include "qbx/legendre.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <utility>

#include "qbx/errors.hpp"

namespace qbx::legendre {
namespace {

Rule make_rule(int n) {
  Rule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) { p1 = z; p0 = 1.0; }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) { p1 = z; p0 = 1.0; }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
    }
    r.x[n - 1 - i] = z;
    r.x[i] = -z;
    double w = 2.0 / ((1.0 - z * z) * dp * dp);
    r.w[i] = r.w[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.x[n / 2] = 0.0;
  return r;
}

std::mutex cache_mutex;

}  // namespace

const Rule& gauss(int n) {
  if (n < 1) throw DomainError("Gauss rule needs at least one node");
  static std::map<int, std::unique_ptr<Rule>> cache;
  std::lock_guard lock(cache_mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<Rule>(make_rule(n));
  return *slot;
}

void eval_all(int n, double x, double* p) {
  p[0] = 1.0;
  if (n == 0) return;
  p[1] = x;
  for (int k = 2; k <= n; ++k) p[k] = ((2.0 * k - 1.0) * x * p[k - 1] - (k - 1.0) * p[k - 2]) / k;
}

std::vector<double> coefficients(int n, const double* values) {
  const Rule& g = gauss(n);
  std::vector<double> a(n, 0.0), p(n);
  for (int j = 0; j < n; ++j) {
    eval_all(n - 1, g.x[j], p.data());
    for (int k = 0; k < n; ++k) a[k] += g.w[j] * p[k] * values[j];
  }
  for (int k = 0; k < n; ++k) a[k] *= (2.0 * k + 1.0) / 2.0;
  return a;
}

double eval_series(const std::vector<double>& a, double x) {
  // Clenshaw
  double b1 = 0.0, b2 = 0.0;
  for (int k = static_cast<int>(a.size()) - 1; k >= 0; --k) {
    double alpha = (2.0 * k + 1.0) / (k + 1.0) * x;
    double beta = -(k + 1.0) / (k + 2.0);
    double b0 = a[k] + alpha * b1 + beta * b2;
    b2 = b1;
    b1 = b0;
  }
  return b1;
}

double integrate_series(const std::vector<double>& a, double x) {
  const int n = static_cast<int>(a.size());
  std::vector<double> p(n + 1);
  eval_all(n, x, p.data());
  double s = a.empty() ? 0.0 : a[0] * (x + 1.0);
  for (int k = 1; k < n; ++k) s += a[k] * (p[k + 1] - p[k - 1]) / (2.0 * k + 1.0);
  return s;
}

const std::vector<double>& interp_matrix(int n, int m) {
  static std::map<std::pair<int, int>, std::unique_ptr<std::vector<double>>> cache;
  {
    std::lock_guard lock(cache_mutex);
    auto it = cache.find({n, m});
    if (it != cache.end()) return *it->second;
  }
  const Rule& src = gauss(n);
  const Rule& dst = gauss(m);
  auto mat = std::make_unique<std::vector<double>>(static_cast<std::size_t>(m) * n, 0.0);
  std::vector<double> pd(n), ps(n);
  for (int i = 0; i < m; ++i) {
    eval_all(n - 1, dst.x[i], pd.data());
    for (int j = 0; j < n; ++j) {
      eval_all(n - 1, src.x[j], ps.data());
      double v = 0.0;
      for (int k = 0; k < n; ++k) v += (2.0 * k + 1.0) / 2.0 * pd[k] * ps[k];
      (*mat)[static_cast<std::size_t>(i) * n + j] = v * src.w[j];
    }
  }
  std::lock_guard lock(cache_mutex);
  auto& slot = cache[{n, m}];
  if (!slot) slot = std::move(mat);
  return *slot;
}

}  // namespace qbx::legendre
