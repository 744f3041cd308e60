#pragma once

#include <vector>

#include "qbx/types.hpp"

namespace qbx {

// Closed curve x_d(t) = Re sum_{j>=0} xhat_{d,j} exp(2 pi i j t), t in [0, 1).
class FourierCurve {
 public:
  FourierCurve() = default;
  FourierCurve(std::vector<cplx> coeffs_x1, std::vector<cplx> coeffs_x2);

  static FourierCurve circle(double radius = 1.0, Vec2 center = {});
  // r(theta) = r0 + sum_j deltas[j-1] sin(j theta), theta = 2 pi t.
  static FourierCurve radial(double r0, const std::vector<double>& deltas);

  const std::vector<cplx>& coeffs_x1() const { return c1_; }
  const std::vector<cplx>& coeffs_x2() const { return c2_; }
  int degree() const { return static_cast<int>(c1_.size()) - 1; }

  Vec2 point(double t) const;
  // Position and the first two t-derivatives.
  void eval(double t, Vec2* x, Vec2* dx, Vec2* ddx) const;

  // Signed enclosed area; positive for counterclockwise traversal.
  double signed_area() const;

  // Same trace, opposite direction (t -> -t).
  FourierCurve reversed() const;
  FourierCurve oriented_ccw() const { return signed_area() < 0 ? reversed() : *this; }
  // x -> shift + scale * R(angle) x
  FourierCurve transformed(double angle, double scale, Vec2 shift) const;

 private:
  std::vector<cplx> c1_;
  std::vector<cplx> c2_;
};

}  // namespace qbx
