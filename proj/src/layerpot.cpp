#include "qbx/layerpot.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <ostream>
#include <sstream>

#include "qbx/errors.hpp"
#include "qbx/log.hpp"
#include "qbx/quadtree.hpp"
#include "qbx/specfun.hpp"

namespace qbx {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

QbxCenter center_from_index(const Discretization& d, int idx) {
  const int node = idx / 2;
  return d.center(node / d.q(), node % d.q(), (idx & 1) ? Side::Interior : Side::Exterior);
}

}  // namespace

LayerEvaluator::LayerEvaluator(const Discretization& d, double omega, std::span<const Vec2> targets,
                               const EvalOptions& opt, std::span<const Side> sides)
    : d_(&d), omega_(omega), opt_(opt), targets_(targets.begin(), targets.end()) {
  AssociationOptions ao;
  ao.side = opt.side;
  ao.eps_assoc = opt.eps_assoc;
  ao.n_max = opt.n_max;
  auto t0 = Clock::now();
  assoc_ = associate_targets(d, targets, ao, sides);
  t_assoc_ = seconds_since(t0);
  const auto failed = assoc_.failed();
  if (!failed.empty())
    throw AssociationError(std::to_string(failed.size()) + " target(s) could not be associated, first is target " +
                           std::to_string(failed.front()));

  std::vector<Vec2> direct_pts;
  std::map<int, int> slot;  // center index -> position in the FMM center list
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (assoc_.verdict[i] == Verdict::Direct) {
      direct_idx_.push_back(static_cast<int>(i));
      direct_pts.push_back(targets[i]);
    } else {
      slot.emplace(assoc_.center[i], 0);
    }
  }
  // Center order follows the center index, independent of target order.
  std::vector<Vec2> center_pts;
  for (auto& [c, s] : slot) {
    s = static_cast<int>(center_pts.size());
    center_pts.push_back(center_from_index(d, c).location);
  }
  center_slot_.assign(targets.size(), -1);
  for (std::size_t i = 0; i < targets.size(); ++i)
    if (assoc_.verdict[i] == Verdict::Qbx) center_slot_[i] = slot.at(assoc_.center[i]);

  FmmOptions fo;
  fo.eps = opt.eps;
  fo.p = opt.p;
  fo.p_add = opt.p_add;
  fo.n_max = opt.n_max;
  t0 = Clock::now();
  plan_ = make_plan(omega, d.source_points(), direct_pts, center_pts, fo);
  t_plan_ = seconds_since(t0);
}

std::vector<cplx> LayerEvaluator::apply(const LayerDensities& dens, FmmAudit* audit, double* t_fmm) const {
  const Discretization& d = *d_;
  const std::size_t nd = static_cast<std::size_t>(d.num_density_nodes());
  if ((!dens.slp.empty() && dens.slp.size() != nd) || (!dens.dlp.empty() && dens.dlp.size() != nd))
    throw DomainError("density length must equal the number of density nodes");
  SourceBatch src;
  src.points = d.source_points();
  src.normals = d.source_normals();
  src.weights = d.source_weights();
  if (!dens.slp.empty()) src.slp = oversample(d, dens.slp);
  if (!dens.dlp.empty()) src.dlp = oversample(d, dens.dlp);

  const auto t0 = Clock::now();
  const FmmOutput out = run_fmm(plan_, src);
  if (t_fmm) *t_fmm = seconds_since(t0);
  if (audit) *audit = out.audit;

  std::vector<cplx> values(targets_.size());
  for (std::size_t k = 0; k < direct_idx_.size(); ++k)
    values[static_cast<std::size_t>(direct_idx_[k])] = out.potentials[k];
  const auto& centers = plan_.tree.points(cat_center);
  for (std::size_t i = 0; i < targets_.size(); ++i) {
    const int s = center_slot_[i];
    if (s < 0) continue;
    values[i] = eval_raw(ExpansionKind::Local, centers[static_cast<std::size_t>(s)], opt_.p, omega_, 1.0,
                         out.center_coefficients(s).data(), targets_[i]);
  }
  return values;
}

Evaluation evaluate_layers(const Discretization& d, double omega, const LayerDensities& dens,
                           std::span<const Vec2> targets, const EvalOptions& opt, std::span<const Side> sides) {
  const auto t_start = Clock::now();
  const std::size_t nd = static_cast<std::size_t>(d.num_density_nodes());
  if ((!dens.slp.empty() && dens.slp.size() != nd) || (!dens.dlp.empty() && dens.dlp.size() != nd))
    throw DomainError("density length must equal the number of density nodes");
  const LayerEvaluator le(d, omega, targets, opt, sides);
  Evaluation ev;
  ev.values = le.apply(dens, &ev.audit, &ev.t_fmm);
  ev.assoc = le.association();
  ev.num_centers = le.num_centers();
  ev.t_assoc = le.t_assoc();
  ev.t_plan = le.t_plan();
  ev.t_total = seconds_since(t_start);
  log_info("evaluate: " + std::to_string(targets.size()) + " targets, " + std::to_string(ev.num_centers) +
           " centers, fmm " + std::to_string(ev.t_fmm) + " s");
  return ev;
}

std::vector<cplx> evaluate(const LayerPotentialJob& job) {
  if (!job.disc) throw DomainError("job has no discretization");
  LayerDensities dens;
  switch (job.kind) {
    case LayerKind::SLP:
      dens.slp = job.density;
      break;
    case LayerKind::DLP:
      dens.dlp = job.density;
      break;
    case LayerKind::Combined:
      dens.dlp = job.density;
      dens.slp.resize(job.density.size());
      for (std::size_t i = 0; i < job.density.size(); ++i) dens.slp[i] = cplx(0.0, job.omega) * job.density[i];
      break;
  }
  return evaluate_layers(*job.disc, job.omega, dens, job.targets, job.options).values;
}

double time_point_fmm(const Discretization& d, double omega, std::span<const Vec2> targets, double eps) {
  SourceBatch src;
  src.points = d.source_points();
  src.normals = d.source_normals();
  src.weights = d.source_weights();
  src.slp.assign(src.points.size(), cplx(1.0, 0.0));
  src.dlp.assign(src.points.size(), cplx(1.0, 0.0));
  FmmOptions fo;
  fo.eps = eps;
  fo.point_only = true;
  const auto t0 = Clock::now();
  const FmmPlan plan = make_plan(omega, src.points, targets, {}, fo);
  const FmmOutput out = run_fmm(plan, src);
  return seconds_since(t0);
}

// Even-odd rule on the polygon through panel endpoints and density nodes,
// corrected by the exact closest-point side within h/4 of a panel.
std::vector<Side> classify_points(const Discretization& d, std::span<const Vec2> pts) {
  std::vector<std::vector<Vec2>> polys;
  std::vector<char> seen(static_cast<std::size_t>(d.num_panels()), 0);
  for (int k0 = 0; k0 < d.num_panels(); ++k0) {
    if (seen[k0]) continue;
    std::vector<Vec2> poly;
    for (int k = k0; !seen[k]; k = d.panel(k).next) {
      seen[k] = 1;
      const Panel& pn = d.panel(k);
      poly.push_back(d.curve_of(k).point(pn.t0));
      poly.insert(poly.end(), pn.nodes.begin(), pn.nodes.end());
    }
    polys.push_back(std::move(poly));
  }
  std::vector<Side> out(pts.size(), Side::Exterior);
  const long np = static_cast<long>(pts.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < np; ++i) {
    const Vec2 p = pts[static_cast<std::size_t>(i)];
    bool inside = false;
    for (const auto& poly : polys) {
      const std::size_t n = poly.size();
      for (std::size_t a = 0, b = n - 1; a < n; b = a++) {
        const Vec2 u = poly[a], v = poly[b];
        if ((u.y > p.y) != (v.y > p.y) && p.x < (v.x - u.x) * (p.y - u.y) / (v.y - u.y) + u.x) inside = !inside;
      }
    }
    out[static_cast<std::size_t>(i)] = inside ? Side::Interior : Side::Exterior;
  }

  std::vector<Vec2> coms;
  double reach = 0;
  for (const Panel& pn : d.panels()) {
    coms.push_back(pn.com);
    reach = std::max(reach, pn.bound_radius + pn.h / 4);
  }
  TreeOptions to;
  to.n_max = 10;
  to.level_restrict = false;
  const Tree tree = Tree::build({coms}, to);
#pragma omp parallel for schedule(dynamic, 64)
  for (long i = 0; i < np; ++i) {
    const Vec2 p = pts[static_cast<std::size_t>(i)];
    // Queries are centered inside the root box; points farther out than
    // reach cannot be near a panel.
    const Box& root = tree.box(0);
    const Vec2 c{std::clamp(p.x, root.center.x - root.radius, root.center.x + root.radius),
                 std::clamp(p.y, root.center.y - root.radius, root.center.y + root.radius)};
    if (dist_inf(p, c) > reach) continue;
    double best = 1e300, tbest = 0;
    int kbest = -1;
    for (int leaf : tree.area_query(c, reach + dist_inf(p, c)))
      for (int k : tree.points_in(leaf, 0)) {
        const Panel& pn = d.panel(k);
        const double lim = pn.bound_radius + pn.h / 4;
        if (std::abs(p.x - pn.com.x) > lim || std::abs(p.y - pn.com.y) > lim) continue;
        double t = 0;
        const double dk = d.closest_on_panel(p, k, &t);
        if (dk <= pn.h / 4 && dk < best) {
          best = dk;
          tbest = t;
          kbest = k;
        }
      }
    if (kbest < 0) continue;
    Vec2 x, dx;
    d.curve_of(kbest).eval(tbest, &x, &dx, nullptr);
    const Vec2 nrm{dx.y, -dx.x};
    out[static_cast<std::size_t>(i)] = dot(p - x, nrm) >= 0 ? Side::Exterior : Side::Interior;
  }
  return out;
}

const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = {
      {"e4", 5e-4, 2, 2}, {"e7", 5e-7, 4, 4}, {"e10", 5e-10, 8, 6}, {"e13", 5e-13, 16, 8}};
  return all;
}

const Preset& preset(const std::string& name) {
  for (const Preset& p : presets())
    if (p.name == name) return p;
  throw DomainError("unknown profile '" + name + "' (expected e4, e7, e10 or e13)");
}

GreenErrors greens_identity_errors(const Discretization& d, double omega, std::span<const Vec2> charge_points,
                                   std::span<const cplx> charges, const EvalOptions& opt,
                                   std::span<const Vec2> volume_targets) {
  if (charge_points.size() != charges.size()) throw DomainError("one charge per point expected");
  auto field = [&](Vec2 x, Vec2 n, cplx* du) {
    cplx u{};
    *du = 0;
    for (std::size_t j = 0; j < charges.size(); ++j) {
      const Vec2 z = x - charge_points[j];
      const double r = norm(z);
      const Hankel01 h = hankel1_01(omega * r);
      u += charges[j] * h.h0;
      *du -= charges[j] * omega * h.h1 * (dot(z, n) / r);
    }
    return u;
  };
  const auto nodes = d.density_points();
  const auto normals = d.density_normals();
  const auto weights = d.density_weights();
  LayerDensities dens;
  dens.slp.resize(nodes.size());
  dens.dlp.resize(nodes.size());
  std::vector<cplx> du(nodes.size());
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    dens.dlp[j] = field(nodes[j], normals[j], &du[j]);
    dens.slp[j] = -du[j];
  }

  std::vector<Vec2> targets(nodes.begin(), nodes.end());
  targets.insert(targets.end(), volume_targets.begin(), volume_targets.end());
  EvalOptions eo = opt;
  eo.side = Side::Exterior;
  const Evaluation ev = evaluate_layers(d, omega, dens, targets, eo);

  GreenErrors g;
  g.n_d = d.num_density_nodes();
  g.n_s = d.num_source_nodes();
  g.n_t = static_cast<int>(targets.size());
  g.n_e = ev.num_centers;
  g.t_qbx = ev.t_total;
  g.res_slp = resolution_metric(d, du);
  g.res_dlp = resolution_metric(d, dens.dlp);
  double num = 0, den = 0;
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    g.boundary_exact.push_back(dens.dlp[j]);
    g.boundary_qbx.push_back(ev.values[j]);
    num += std::norm(dens.dlp[j] - ev.values[j]) * weights[j];
    den += std::norm(dens.dlp[j]) * weights[j];
  }
  g.eps_boundary = den > 0 ? std::sqrt(num / den) : 0.0;
  if (!volume_targets.empty()) {
    num = den = 0;
    const Vec2 zero{};
    for (std::size_t i = 0; i < volume_targets.size(); ++i) {
      cplx dummy;
      const cplx u = field(volume_targets[i], zero, &dummy);
      const cplx uq = ev.values[nodes.size() + i];
      g.volume_exact.push_back(u);
      g.volume_qbx.push_back(uq);
      g.volume_verdicts.push_back(ev.assoc.verdict[nodes.size() + i]);
      num += std::norm(u - uq);
      den += std::norm(u);
    }
    g.eps_volume = den > 0 ? std::sqrt(num / den) : 0.0;
  }
  return g;
}

std::vector<Vec2> Grid::points() const {
  std::vector<Vec2> pts;
  pts.reserve(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      pts.push_back({nx > 1 ? xmin + (xmax - xmin) * i / (nx - 1) : xmin,
                     ny > 1 ? ymin + (ymax - ymin) * j / (ny - 1) : ymin});
  return pts;
}

Grid parse_grid(const std::string& spec) {
  std::stringstream ss(spec);
  std::vector<std::string> parts;
  for (std::string tok; std::getline(ss, tok, ',');) parts.push_back(tok);
  if (parts.size() != 6) throw ParseError("grid must be 'xmin,xmax,ymin,ymax,nx,ny': " + spec);
  Grid g;
  try {
    std::size_t used = 0;
    auto num = [&](const std::string& s) {
      const double v = std::stod(s, &used);
      if (used != s.size()) throw ParseError("bad number '" + s + "' in grid");
      return v;
    };
    g.xmin = num(parts[0]);
    g.xmax = num(parts[1]);
    g.ymin = num(parts[2]);
    g.ymax = num(parts[3]);
    const double nx = num(parts[4]), ny = num(parts[5]);
    if (nx < 1 || ny < 1 || nx != std::floor(nx) || ny != std::floor(ny))
      throw ParseError("grid resolution must be positive integers: " + spec);
    g.nx = static_cast<int>(nx);
    g.ny = static_cast<int>(ny);
  } catch (const std::invalid_argument&) {
    throw ParseError("bad number in grid: " + spec);
  } catch (const std::out_of_range&) {
    throw ParseError("number out of range in grid: " + spec);
  }
  if (!(g.xmax > g.xmin) || !(g.ymax > g.ymin)) throw ParseError("empty grid extents: " + spec);
  return g;
}

void write_grid_csv(std::ostream& out, std::span<const Vec2> pts, std::span<const cplx> values,
                    std::span<const Verdict> verdicts) {
  out << "x,y,re_u,im_u,flag\n";
  out.precision(17);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const char* flag = "direct";
    if (i < verdicts.size() && verdicts[i] == Verdict::Qbx) flag = "qbx";
    if (i < verdicts.size() && verdicts[i] == Verdict::Failed) flag = "failed";
    out << pts[i].x << ',' << pts[i].y << ',' << values[i].real() << ',' << values[i].imag() << ',' << flag << '\n';
  }
}

}  // namespace qbx
