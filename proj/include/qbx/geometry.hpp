#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "qbx/curve.hpp"
#include "qbx/types.hpp"

namespace qbx {

struct PanelSpan {
  int component = 0;
  double t0 = 0.0;
  double t1 = 0.0;
  int depth = 0;
};

struct Panel {
  int component = 0;
  double t0 = 0.0;
  double t1 = 0.0;
  int depth = 0;
  double h = 0.0;  // arclength

  // Legendre coefficients of x1(t), x2(t) on [t0, t1] mapped to [-1, 1] (q terms).
  std::vector<double> coeffs_x;
  std::vector<double> coeffs_y;
  // Legendre coefficients of |gamma'(t)| on the same interval, for s(t).
  std::vector<double> speed;

  // Density grid: q Gauss points in arclength.
  std::vector<double> node_t;
  std::vector<Vec2> nodes;
  std::vector<Vec2> normals;
  std::vector<double> weights;

  // Oversampled source grid: q-hat Gauss points in arclength.
  std::vector<double> src_t;
  std::vector<Vec2> src_nodes;
  std::vector<Vec2> src_normals;
  std::vector<double> src_weights;

  Vec2 com;
  double bound_radius = 0.0;  // l-inf radius about com enclosing the panel
  int prev = -1;
  int next = -1;
};

struct QbxCenter {
  Vec2 location;
  double radius = 0.0;
  int panel = 0;
  int node = 0;
  Side side = Side::Exterior;
};

class Discretization {
 public:
  Discretization() = default;
  Discretization(std::vector<FourierCurve> curves, int q, int qhat, const std::vector<PanelSpan>& spans);

  int q() const { return q_; }
  int qhat() const { return qhat_; }
  int num_panels() const { return static_cast<int>(panels_.size()); }
  int num_density_nodes() const { return num_panels() * q_; }
  int num_source_nodes() const { return num_panels() * qhat_; }
  const Panel& panel(int k) const { return panels_[static_cast<std::size_t>(k)]; }
  const std::vector<Panel>& panels() const { return panels_; }
  const std::vector<FourierCurve>& curves() const { return curves_; }
  const FourierCurve& curve_of(int k) const { return curves_[static_cast<std::size_t>(panel(k).component)]; }

  bool adjacent(int k, int m) const { return panel(k).prev == m || panel(k).next == m; }
  double total_length() const;

  // Panels in ks are each replaced by two of equal arclength.
  Discretization split(const std::vector<int>& ks) const;
  // One extra uniform subdivision of every panel.
  Discretization split_all() const;

  QbxCenter center(int k, int j, Side side) const;
  // One center per density node, for Side::Exterior or Side::Interior.
  std::vector<QbxCenter> centers(Side side) const;

  std::vector<Vec2> density_points() const;
  std::vector<Vec2> density_normals() const;
  std::vector<double> density_weights() const;
  std::vector<Vec2> source_points() const;
  std::vector<Vec2> source_normals() const;
  std::vector<double> source_weights() const;

  // Exact distance from p to panel k (Newton on the curve parameter).
  double distance_to_panel(Vec2 p, int k) const;
  // Same, also returning the curve parameter of the closest point.
  double closest_on_panel(Vec2 p, int k, double* t_out) const;

 private:
  void link();

  std::vector<FourierCurve> curves_;
  int q_ = 0;
  int qhat_ = 0;
  std::vector<Panel> panels_;
};

// Flat index of a center: 2 * (k q + j) + (interior ? 1 : 0).
inline int center_index(const Discretization& d, int k, int j, Side side) {
  return 2 * (k * d.q() + j) + (side == Side::Interior ? 1 : 0);
}

Discretization build_panels(const FourierCurve& curve, int q, double eps, int qhat = 0);
Discretization build_panels(const std::vector<FourierCurve>& curves, int q, double eps, int qhat = 0);

Discretization split_panel(const Discretization& d, int k);

std::vector<cplx> oversample(const Discretization& d, std::span<const cplx> density);
std::vector<double> oversample(const Discretization& d, std::span<const double> density);

// max_k ||tail|| / ||full|| * h_k over the per-panel Legendre coefficients.
double resolution_metric(const Discretization& d, std::span<const cplx> f);
double resolution_metric(const Discretization& d, std::span<const double> f);
int tail_length(int q);

// Signed area of the polygon through the source nodes, summed over components.
double node_polygon_area(const Discretization& d);

void write_discretization_csv(const Discretization& d, std::ostream& out);

}  // namespace qbx
