#include "qbx/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <set>
#include <string>

#include "qbx/errors.hpp"
#include "qbx/legendre.hpp"
#include "qbx/tables.hpp"

namespace qbx {
namespace {

constexpr int speed_order = 32;
constexpr int initial_panels = 8;
constexpr int max_depth = 30;

std::vector<double> speed_coefficients(const FourierCurve& c, double t0, double t1) {
  const auto& g = legendre::gauss(speed_order);
  std::vector<double> v(speed_order);
  for (int i = 0; i < speed_order; ++i) {
    Vec2 dx;
    c.eval(t0 + 0.5 * (g.x[i] + 1.0) * (t1 - t0), nullptr, &dx, nullptr);
    v[i] = norm(dx);
  }
  return legendre::coefficients(speed_order, v.data());
}

// Parameter t in [t0, t1] at arclength s from t0; Newton with bisection guard.
double invert_arclength(const std::vector<double>& speed, double t0, double t1, double s) {
  const double half_dt = 0.5 * (t1 - t0);
  const double h = 2.0 * half_dt * speed[0];
  double lo = -1.0, hi = 1.0;
  double u = std::clamp(-1.0 + 2.0 * s / h, -1.0, 1.0);
  for (int it = 0; it < 100; ++it) {
    double g = half_dt * legendre::integrate_series(speed, u) - s;
    if (std::abs(g) <= 1e-13 * h) break;
    if (g > 0) hi = u; else lo = u;
    double gp = half_dt * legendre::eval_series(speed, u);
    double un = (gp > 0) ? u - g / gp : 0.5 * (lo + hi);
    if (!(un > lo && un < hi)) un = 0.5 * (lo + hi);
    if (std::abs(un - u) < 1e-16) { u = un; break; }
    u = un;
  }
  return t0 + (u + 1.0) * half_dt;
}

void place_nodes(const FourierCurve& c, const Panel& p, int n, std::vector<double>& ts, std::vector<Vec2>& xs,
                 std::vector<Vec2>& ns, std::vector<double>& ws) {
  const auto& g = legendre::gauss(n);
  ts.resize(n);
  xs.resize(n);
  ns.resize(n);
  ws.resize(n);
  for (int j = 0; j < n; ++j) {
    double t = invert_arclength(p.speed, p.t0, p.t1, 0.5 * p.h * (g.x[j] + 1.0));
    Vec2 x, dx;
    c.eval(t, &x, &dx, nullptr);
    double sp = norm(dx);
    ts[j] = t;
    xs[j] = x;
    ns[j] = {dx.y / sp, -dx.x / sp};
    ws[j] = 0.5 * p.h * g.w[j];
  }
}

Panel make_panel(const FourierCurve& c, const PanelSpan& s, int q, int qhat) {
  Panel p;
  p.component = s.component;
  p.t0 = s.t0;
  p.t1 = s.t1;
  p.depth = s.depth;
  p.speed = speed_coefficients(c, s.t0, s.t1);
  p.h = (s.t1 - s.t0) * p.speed[0];
  {
    const auto& g = legendre::gauss(q);
    std::vector<double> vx(q), vy(q);
    for (int i = 0; i < q; ++i) {
      Vec2 x = c.point(s.t0 + 0.5 * (g.x[i] + 1.0) * (s.t1 - s.t0));
      vx[i] = x.x;
      vy[i] = x.y;
    }
    p.coeffs_x = legendre::coefficients(q, vx.data());
    p.coeffs_y = legendre::coefficients(q, vy.data());
  }
  place_nodes(c, p, q, p.node_t, p.nodes, p.normals, p.weights);
  place_nodes(c, p, qhat, p.src_t, p.src_nodes, p.src_normals, p.src_weights);

  Vec2 m;
  double wsum = 0.0;
  for (int j = 0; j < qhat; ++j) {
    m += p.src_weights[j] * p.src_nodes[j];
    wsum += p.src_weights[j];
  }
  p.com = (1.0 / wsum) * m;
  double r = std::max(dist_inf(c.point(s.t0), p.com), dist_inf(c.point(s.t1), p.com));
  for (const Vec2& x : p.src_nodes) r = std::max(r, dist_inf(x, p.com));
  for (const Vec2& x : p.nodes) r = std::max(r, dist_inf(x, p.com));
  // Samples miss at most a sagitta between nodes; the margin covers it.
  p.bound_radius = r + 0.01 * p.h;
  return p;
}

double tail_ratio(const std::vector<double>& ax, const std::vector<double>& ay, int ntail) {
  const int n = static_cast<int>(ax.size());
  double full = 0.0, tail = 0.0;
  for (int k = 0; k < n; ++k) {
    double e = ax[k] * ax[k] + (ay.empty() ? 0.0 : ay[k] * ay[k]);
    full += e;
    if (k >= n - ntail) tail += e;
  }
  if (full < 1e-300) return 0.0;
  double r = std::sqrt(tail / full);
  // Below this the tail is transform round-off.
  return r < 64.0 * std::numeric_limits<double>::epsilon() ? 0.0 : r;
}

// Resolution of a parameter span: gamma and its first two t-derivatives, and,
// at Gauss points in arclength, the position, unit tangent and curvature
// vector. The arclength part matters where the parametrization slows down.
double span_resolution(const FourierCurve& c, const PanelSpan& s, int q) {
  const auto& g = legendre::gauss(q);
  const auto speed = speed_coefficients(c, s.t0, s.t1);
  const double h = (s.t1 - s.t0) * speed[0];
  std::vector<double> v[6][2];
  for (auto& d : v)
    for (auto& e : d) e.resize(q);
  for (int i = 0; i < q; ++i) {
    Vec2 x, dx, ddx;
    c.eval(s.t0 + 0.5 * (g.x[i] + 1.0) * (s.t1 - s.t0), &x, &dx, &ddx);
    const Vec2 w[3] = {x, dx, ddx};
    for (int m = 0; m < 3; ++m) {
      v[m][0][i] = w[m].x;
      v[m][1][i] = w[m].y;
    }
    double t = invert_arclength(speed, s.t0, s.t1, 0.5 * h * (g.x[i] + 1.0));
    c.eval(t, &x, &dx, &ddx);
    double sp2 = dot(dx, dx);
    Vec2 tau = (1.0 / std::sqrt(sp2)) * dx;
    Vec2 kap = (1.0 / sp2) * (ddx - (dot(dx, ddx) / sp2) * dx);
    const Vec2 z[3] = {x, tau, kap};
    for (int m = 0; m < 3; ++m) {
      v[3 + m][0][i] = z[m].x;
      v[3 + m][1][i] = z[m].y;
    }
  }
  double worst = 0.0;
  for (auto& d : v) {
    auto ax = legendre::coefficients(q, d[0].data());
    auto ay = legendre::coefficients(q, d[1].data());
    worst = std::max(worst, tail_ratio(ax, ay, tail_length(q)) * h);
  }
  // Arclength itself comes from the speed interpolant.
  worst = std::max(worst, tail_ratio(speed, {}, 4) * h);
  return worst;
}

void validate_curve(const FourierCurve& c) {
  const int m = 1024;
  double smin = std::numeric_limits<double>::max(), smax = 0.0, len = 0.0;
  for (int k = 0; k < m; ++k) {
    Vec2 dx;
    c.eval(static_cast<double>(k) / m, nullptr, &dx, nullptr);
    double s = norm(dx);
    smin = std::min(smin, s);
    smax = std::max(smax, s);
    len += s / m;
  }
  if (!(smax > 0.0) || smin < 1e-10 * smax)
    throw GeometryError("curve is degenerate: parametrization speed vanishes (open or collapsed curve)");
  if (std::abs(c.signed_area()) < 1e-12 * len * len) throw GeometryError("curve encloses no area");
}

void check_order(int q) {
  if (q != 2 && q != 4 && q != 8 && q != 16) throw DomainError("panel order q must be 2, 4, 8 or 16");
}

template <class T>
std::vector<T> oversample_impl(const Discretization& d, std::span<const T> f) {
  const int q = d.q(), qh = d.qhat();
  if (f.size() != static_cast<std::size_t>(d.num_density_nodes()))
    throw DomainError("oversample: expected " + std::to_string(d.num_density_nodes()) + " values, got " +
                      std::to_string(f.size()));
  const auto& m = legendre::interp_matrix(q, qh);
  std::vector<T> out(static_cast<std::size_t>(d.num_source_nodes()));
  for (int k = 0; k < d.num_panels(); ++k) {
    const T* in = f.data() + static_cast<std::size_t>(k) * q;
    T* o = out.data() + static_cast<std::size_t>(k) * qh;
    for (int i = 0; i < qh; ++i) {
      T s{};
      for (int j = 0; j < q; ++j) s += m[static_cast<std::size_t>(i) * q + j] * in[j];
      o[i] = s;
    }
  }
  return out;
}

}  // namespace

int tail_length(int q) { return q <= 4 ? 1 : (q <= 8 ? 2 : 3); }

Discretization::Discretization(std::vector<FourierCurve> curves, int q, int qhat, const std::vector<PanelSpan>& spans)
    : curves_(std::move(curves)), q_(q), qhat_(qhat) {
  if (qhat < q) throw DomainError("source order must be at least the density order");
  panels_.reserve(spans.size());
  for (const auto& s : spans) panels_.push_back(make_panel(curves_.at(static_cast<std::size_t>(s.component)), s, q, qhat));
  link();
}

void Discretization::link() {
  std::stable_sort(panels_.begin(), panels_.end(), [](const Panel& a, const Panel& b) {
    return a.component != b.component ? a.component < b.component : a.t0 < b.t0;
  });
  const int n = num_panels();
  int start = 0;
  while (start < n) {
    int end = start;
    while (end < n && panels_[end].component == panels_[start].component) ++end;
    for (int k = start; k < end; ++k) {
      panels_[k].prev = (k == start) ? end - 1 : k - 1;
      panels_[k].next = (k == end - 1) ? start : k + 1;
    }
    start = end;
  }
}

double Discretization::total_length() const {
  double s = 0.0;
  for (const auto& p : panels_) s += p.h;
  return s;
}

Discretization Discretization::split(const std::vector<int>& ks) const {
  std::set<int> which(ks.begin(), ks.end());
  Discretization out;
  out.curves_ = curves_;
  out.q_ = q_;
  out.qhat_ = qhat_;
  out.panels_.reserve(panels_.size() + which.size());
  for (int k = 0; k < num_panels(); ++k) {
    const Panel& p = panels_[k];
    if (!which.count(k)) {
      out.panels_.push_back(p);
      continue;
    }
    double tm = invert_arclength(p.speed, p.t0, p.t1, 0.5 * p.h);
    const FourierCurve& c = curves_[static_cast<std::size_t>(p.component)];
    out.panels_.push_back(make_panel(c, {p.component, p.t0, tm, p.depth + 1}, q_, qhat_));
    out.panels_.push_back(make_panel(c, {p.component, tm, p.t1, p.depth + 1}, q_, qhat_));
  }
  for (int k : which)
    if (k < 0 || k >= num_panels()) throw DomainError("panel index out of range: " + std::to_string(k));
  out.link();
  return out;
}

Discretization Discretization::split_all() const {
  std::vector<int> all(panels_.size());
  for (std::size_t k = 0; k < all.size(); ++k) all[k] = static_cast<int>(k);
  return split(all);
}

QbxCenter Discretization::center(int k, int j, Side side) const {
  const Panel& p = panel(k);
  double sgn = (side == Side::Interior) ? -1.0 : 1.0;
  return {p.nodes[j] + (0.5 * p.h * sgn) * p.normals[j], 0.5 * p.h, k, j, side == Side::Interior ? side : Side::Exterior};
}

std::vector<QbxCenter> Discretization::centers(Side side) const {
  std::vector<QbxCenter> out;
  out.reserve(static_cast<std::size_t>(num_density_nodes()));
  for (int k = 0; k < num_panels(); ++k)
    for (int j = 0; j < q_; ++j) out.push_back(center(k, j, side));
  return out;
}

#define QBX_FLATTEN(name, type, field)            \
  std::vector<type> Discretization::name() const { \
    std::vector<type> out;                         \
    for (const auto& p : panels_)                  \
      out.insert(out.end(), p.field.begin(), p.field.end()); \
    return out;                                    \
  }
QBX_FLATTEN(density_points, Vec2, nodes)
QBX_FLATTEN(density_normals, Vec2, normals)
QBX_FLATTEN(density_weights, double, weights)
QBX_FLATTEN(source_points, Vec2, src_nodes)
QBX_FLATTEN(source_normals, Vec2, src_normals)
QBX_FLATTEN(source_weights, double, src_weights)
#undef QBX_FLATTEN

double Discretization::distance_to_panel(Vec2 p, int k) const { return closest_on_panel(p, k, nullptr); }

double Discretization::closest_on_panel(Vec2 p, int k, double* t_out) const {
  const Panel& pn = panel(k);
  const FourierCurve& c = curve_of(k);
  // Samples: endpoints and source nodes, in parameter order.
  const int n = qhat_ + 2;
  std::vector<double> ts(n), ds(n);
  ts[0] = pn.t0;
  ts[n - 1] = pn.t1;
  ds[0] = dist(c.point(pn.t0), p);
  ds[n - 1] = dist(c.point(pn.t1), p);
  for (int j = 0; j < qhat_; ++j) {
    ts[j + 1] = pn.src_t[j];
    ds[j + 1] = dist(pn.src_nodes[j], p);
  }
  const auto first = std::min_element(ds.begin(), ds.end());
  double best = *first;
  double tbest = ts[static_cast<std::size_t>(first - ds.begin())];
  for (int i = 0; i < n; ++i) {
    bool local_min = (i == 0 || ds[i] <= ds[i - 1]) && (i == n - 1 || ds[i] <= ds[i + 1]);
    if (!local_min) continue;
    double t = ts[i];
    for (int it = 0; it < 40; ++it) {
      Vec2 x, dx, ddx;
      c.eval(t, &x, &dx, &ddx);
      Vec2 r = x - p;
      double f = dot(r, dx);
      double fp = dot(dx, dx) + dot(r, ddx);
      if (fp <= 0.0) break;
      double tn = std::clamp(t - f / fp, pn.t0, pn.t1);
      bool done = std::abs(tn - t) <= 1e-15 * (pn.t1 - pn.t0);
      t = tn;
      if (done) break;
    }
    const double dt = dist(c.point(t), p);
    if (dt < best) {
      best = dt;
      tbest = t;
    }
  }
  if (t_out) *t_out = tbest;
  return best;
}

Discretization build_panels(const FourierCurve& curve, int q, double eps, int qhat) {
  return build_panels(std::vector<FourierCurve>{curve}, q, eps, qhat);
}

Discretization build_panels(const std::vector<FourierCurve>& curves, int q, double eps, int qhat) {
  check_order(q);
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("tolerance must lie in (0, 1)");
  if (curves.empty()) throw GeometryError("no boundary components");
  if (qhat == 0) qhat = lookup_qhat(q, eps);
  std::vector<FourierCurve> oriented;
  for (const auto& c : curves) {
    validate_curve(c);
    oriented.push_back(c.oriented_ccw());
  }
  std::vector<PanelSpan> spans;
  for (int i = 0; i < static_cast<int>(oriented.size()); ++i)
    for (int k = 0; k < initial_panels; ++k)
      spans.push_back({i, static_cast<double>(k) / initial_panels, static_cast<double>(k + 1) / initial_panels, 0});

  for (;;) {
    std::vector<PanelSpan> next;
    bool split_any = false;
    for (const auto& s : spans) {
      const FourierCurve& c = oriented[static_cast<std::size_t>(s.component)];
      if (span_resolution(c, s, q) <= eps) {
        next.push_back(s);
        continue;
      }
      if (s.depth >= max_depth)
        throw ResolutionError("geometry not resolved to " + std::to_string(eps) + " within depth " +
                              std::to_string(max_depth));
      auto sp = speed_coefficients(c, s.t0, s.t1);
      double h = (s.t1 - s.t0) * sp[0];
      double tm = invert_arclength(sp, s.t0, s.t1, 0.5 * h);
      next.push_back({s.component, s.t0, tm, s.depth + 1});
      next.push_back({s.component, tm, s.t1, s.depth + 1});
      split_any = true;
    }
    spans = std::move(next);
    if (!split_any) break;
  }
  return Discretization(std::move(oriented), q, qhat, spans);
}

Discretization split_panel(const Discretization& d, int k) {
  if (k < 0 || k >= d.num_panels()) throw DomainError("panel index out of range: " + std::to_string(k));
  return d.split({k});
}

std::vector<cplx> oversample(const Discretization& d, std::span<const cplx> density) {
  return oversample_impl<cplx>(d, density);
}

std::vector<double> oversample(const Discretization& d, std::span<const double> density) {
  return oversample_impl<double>(d, density);
}

double resolution_metric(const Discretization& d, std::span<const cplx> f) {
  const int q = d.q();
  if (f.size() != static_cast<std::size_t>(d.num_density_nodes()))
    throw DomainError("resolution_metric: length mismatch");
  double worst = 0.0;
  std::vector<double> re(q), im(q);
  for (int k = 0; k < d.num_panels(); ++k) {
    for (int j = 0; j < q; ++j) {
      re[j] = f[static_cast<std::size_t>(k) * q + j].real();
      im[j] = f[static_cast<std::size_t>(k) * q + j].imag();
    }
    auto ar = legendre::coefficients(q, re.data());
    auto ai = legendre::coefficients(q, im.data());
    worst = std::max(worst, tail_ratio(ar, ai, tail_length(q)) * d.panel(k).h);
  }
  return worst;
}

double resolution_metric(const Discretization& d, std::span<const double> f) {
  std::vector<cplx> c(f.begin(), f.end());
  return resolution_metric(d, std::span<const cplx>(c));
}

double node_polygon_area(const Discretization& d) {
  double a = 0.0;
  const int n = d.num_panels();
  for (int k = 0; k < n; ++k) {
    const Panel& p = d.panel(k);
    const Panel& nx = d.panel(p.next);
    for (int j = 0; j < d.qhat(); ++j) {
      Vec2 b = (j + 1 < d.qhat()) ? p.src_nodes[j + 1] : nx.src_nodes[0];
      a += cross(p.src_nodes[j], b);
    }
  }
  return 0.5 * a;
}

void write_discretization_csv(const Discretization& d, std::ostream& out) {
  out << "panel,node,x,y,nx,ny,weight,h\n";
  out.precision(17);
  for (int k = 0; k < d.num_panels(); ++k) {
    const Panel& p = d.panel(k);
    for (int j = 0; j < d.q(); ++j)
      out << k << ',' << j << ',' << p.nodes[j].x << ',' << p.nodes[j].y << ',' << p.normals[j].x << ','
          << p.normals[j].y << ',' << p.weights[j] << ',' << p.h << '\n';
  }
}

}  // namespace qbx
