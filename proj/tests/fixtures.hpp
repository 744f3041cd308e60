#pragma once

// Shared setup for the unit tests and the acceptance runner.

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "qbx/expansions.hpp"
#include "qbx/geometry.hpp"
#include "qbx/io.hpp"
#include "qbx/specfun.hpp"

namespace fixture {

using qbx::cplx;
using qbx::Vec2;

inline qbx::FourierCurve fish() { return qbx::read_fourier_curve(QBX_DATA_DIR "/fish.txt"); }

inline double rel_l2(std::span<const cplx> a, std::span<const cplx> b) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return den > 0 ? std::sqrt(num / den) : std::sqrt(num);
}

// Relative l2 error of QBX coefficient tables, coefficient n of center c
// weighted by (w r_c / 2)^|n| / |n|!, the size of J_n on the expansion disk.
inline double disk_rel_error(std::span<const cplx> a, std::span<const cplx> ref, std::span<const double> radii,
                             int p, double omega) {
  double num = 0, den = 0;
  const std::size_t np = static_cast<std::size_t>(2 * p + 1);
  for (std::size_t c = 0; c < radii.size(); ++c)
    for (int n = -p; n <= p; ++n) {
      double s = 1;
      for (int k = 1; k <= std::abs(n); ++k) s *= omega * radii[c] / 2 / k;
      const std::size_t i = c * np + static_cast<std::size_t>(n + p);
      num += std::norm(s * (a[i] - ref[i]));
      den += std::norm(s * ref[i]);
    }
  return den > 0 ? std::sqrt(num / den) : std::sqrt(num);
}

struct PointCharges {
  std::vector<Vec2> at;
  std::vector<cplx> q;
};

// u = sum q_j H_0(w |x - x_j|) and its derivative along n.
inline cplx charge_field(const PointCharges& pc, double omega, Vec2 x) {
  cplx u{};
  for (std::size_t j = 0; j < pc.at.size(); ++j) u += pc.q[j] * qbx::hankel1_01(omega * qbx::dist(x, pc.at[j])).h0;
  return u;
}

inline cplx charge_normal_derivative(const PointCharges& pc, double omega, Vec2 x, Vec2 n) {
  cplx du{};
  for (std::size_t j = 0; j < pc.at.size(); ++j) {
    const Vec2 z = x - pc.at[j];
    const double r = qbx::norm(z);
    du -= pc.q[j] * omega * qbx::hankel1_01(omega * r).h1 * (qbx::dot(z, n) / r);
  }
  return du;
}

// Two charges inside the fish.
inline PointCharges fish_charges() { return {{{-0.08, -0.01}, {0.05, 0.01}}, {{1.0, 0.5}, {-0.3, 1.0}}}; }

// Source batch carrying -du/dn (single layer) and u (double layer), so that
// the summed field is D[u] - S[du/dn].
inline qbx::SourceBatch green_batch(const qbx::Discretization& d, const PointCharges& pc, double omega) {
  qbx::SourceBatch b;
  b.points = d.source_points();
  b.normals = d.source_normals();
  b.weights = d.source_weights();
  for (std::size_t j = 0; j < b.points.size(); ++j) {
    b.slp.push_back(-charge_normal_derivative(pc, omega, b.points[j], b.normals[j]));
    b.dlp.push_back(charge_field(pc, omega, b.points[j]));
  }
  return b;
}

}  // namespace fixture
