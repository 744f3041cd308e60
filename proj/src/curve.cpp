#include "qbx/curve.hpp"

#include <algorithm>

#include "qbx/errors.hpp"

namespace qbx {

FourierCurve::FourierCurve(std::vector<cplx> coeffs_x1, std::vector<cplx> coeffs_x2)
    : c1_(std::move(coeffs_x1)), c2_(std::move(coeffs_x2)) {
  if (c1_.empty() && c2_.empty()) throw GeometryError("empty Fourier curve");
  std::size_t n = std::max(c1_.size(), c2_.size());
  c1_.resize(n);
  c2_.resize(n);
}

FourierCurve FourierCurve::circle(double radius, Vec2 center) {
  return FourierCurve({center.x, radius}, {center.y, cplx(0.0, -radius)});
}

FourierCurve FourierCurve::radial(double r0, const std::vector<double>& deltas) {
  // cos(m th) <-> 1, sin(m th) <-> -i
  const std::size_t n = deltas.size() + 2;
  std::vector<cplx> a(n), b(n);
  a[1] += r0;
  b[1] += cplx(0.0, -r0);
  for (std::size_t j = 1; j <= deltas.size(); ++j) {
    double d = 0.5 * deltas[j - 1];
    // sin(j th) cos th = (sin((j+1) th) + sin((j-1) th)) / 2
    a[j + 1] += cplx(0.0, -d);
    if (j > 1) a[j - 1] += cplx(0.0, -d);
    // sin(j th) sin th = (cos((j-1) th) - cos((j+1) th)) / 2
    b[j - 1] += d;
    b[j + 1] -= d;
  }
  return FourierCurve(std::move(a), std::move(b));
}

Vec2 FourierCurve::point(double t) const {
  Vec2 x;
  eval(t, &x, nullptr, nullptr);
  return x;
}

void FourierCurve::eval(double t, Vec2* x, Vec2* dx, Vec2* ddx) const {
  const double w = 2.0 * pi;
  const cplx e1 = std::polar(1.0, w * t);
  cplx e = 1.0;
  cplx p1 = 0, p2 = 0, d1 = 0, d2 = 0, s1 = 0, s2 = 0;
  for (std::size_t j = 0; j < c1_.size(); ++j) {
    const cplx a = c1_[j] * e, b = c2_[j] * e;
    p1 += a;
    p2 += b;
    const double jj = static_cast<double>(j);
    d1 += jj * a;
    d2 += jj * b;
    s1 += jj * jj * a;
    s2 += jj * jj * b;
    e *= e1;
  }
  if (x) *x = {p1.real(), p2.real()};
  // d/dt e^{i w j t} = i w j e^{...}
  if (dx) *dx = {(I * w * d1).real(), (I * w * d2).real()};
  if (ddx) *ddx = {(-w * w * s1).real(), (-w * w * s2).real()};
}

double FourierCurve::signed_area() const {
  // Trapezoid rule is exact for trigonometric polynomials of this degree.
  const int m = 4 * static_cast<int>(c1_.size()) + 8;
  double a = 0.0;
  for (int k = 0; k < m; ++k) {
    Vec2 x, dx;
    eval(static_cast<double>(k) / m, &x, &dx, nullptr);
    a += cross(x, dx);
  }
  return 0.5 * a / m;
}

FourierCurve FourierCurve::reversed() const {
  std::vector<cplx> a(c1_.size()), b(c2_.size());
  for (std::size_t j = 0; j < c1_.size(); ++j) {
    a[j] = std::conj(c1_[j]);
    b[j] = std::conj(c2_[j]);
  }
  return FourierCurve(std::move(a), std::move(b));
}

FourierCurve FourierCurve::transformed(double angle, double scale, Vec2 shift) const {
  const double c = std::cos(angle), s = std::sin(angle);
  std::vector<cplx> a(c1_.size()), b(c2_.size());
  for (std::size_t j = 0; j < c1_.size(); ++j) {
    a[j] = scale * (c * c1_[j] - s * c2_[j]);
    b[j] = scale * (s * c1_[j] + c * c2_[j]);
  }
  a[0] += shift.x;
  b[0] += shift.y;
  return FourierCurve(std::move(a), std::move(b));
}

}  // namespace qbx
