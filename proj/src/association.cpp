#include "qbx/association.hpp"

#include <algorithm>
#include <limits>

#include "qbx/errors.hpp"
#include "qbx/quadtree.hpp"

namespace qbx {

std::vector<int> TargetAssociation::failed() const {
  std::vector<int> out;
  for (int i = 0; i < size(); ++i)
    if (verdict[static_cast<std::size_t>(i)] == Verdict::Failed) out.push_back(i);
  return out;
}

int TargetAssociation::count(Verdict v) const {
  return static_cast<int>(std::count(verdict.begin(), verdict.end(), v));
}

namespace {

bool within_tube(const Discretization& d, Vec2 t, int k) {
  const Panel& p = d.panel(k);
  const double tube = p.h / 4;
  if (dist_inf(t, p.com) > p.bound_radius + tube) return false;
  return d.distance_to_panel(t, k) <= tube;
}

}  // namespace

bool gamma_near_test(const Discretization& d, Vec2 t) {
  for (int k = 0; k < d.num_panels(); ++k)
    if (within_tube(d, t, k)) return true;
  return false;
}

TargetAssociation associate_targets(const Discretization& d, std::span<const Vec2> targets,
                                    const AssociationOptions& opt, std::span<const Side> sides) {
  if (!sides.empty() && sides.size() != targets.size()) throw DomainError("one side preference per target expected");
  if (!(opt.eps_assoc >= 0.0) || !(opt.eps_gap >= opt.eps_assoc)) throw DomainError("invalid association tolerances");
  const std::size_t nt = targets.size();
  TargetAssociation a;
  a.verdict.assign(nt, Verdict::Direct);
  a.center.assign(nt, -1);
  a.needs_qbx.assign(nt, 0);
  a.gap.assign(nt, 0);
  a.side.resize(nt);
  for (std::size_t i = 0; i < nt; ++i) a.side[i] = sides.empty() ? opt.side : sides[i];
  if (nt == 0) return a;

  const int q = d.q();
  std::vector<Vec2> nodes = d.density_points();
  TreeOptions to;
  to.n_max = opt.n_max;
  to.subdivide_on = {0, 1};
  to.level_restrict = false;
  Tree tree = Tree::build({std::vector<Vec2>(targets.begin(), targets.end()), nodes}, to);

  // D(b): density nodes whose reach covers leaf b. The square about node
  // x_{j,k} contains both centers' relaxed disks and every point within
  // h_k / 4 of the panel near x_{j,k}.
  std::vector<std::vector<int>> near(static_cast<std::size_t>(tree.num_boxes()));
  for (int k = 0; k < d.num_panels(); ++k) {
    const double h = d.panel(k).h;
    const double reach = h / 2 + (h / 2) * (1 + opt.eps_gap);
    for (int j = 0; j < q; ++j)
      for (int b : tree.area_query(nodes[static_cast<std::size_t>(k * q + j)], reach))
        near[static_cast<std::size_t>(b)].push_back(k * q + j);
  }

  const long n = static_cast<long>(nt);
#pragma omp parallel for schedule(dynamic, 64)
  for (long i = 0; i < n; ++i) {
    const Vec2 t = targets[static_cast<std::size_t>(i)];
    const auto& cand = near[static_cast<std::size_t>(tree.leaf_of(0, static_cast<int>(i)))];
    bool needs = false;
    int last = -1;
    for (int node : cand) {
      int k = node / q;
      if (k == last) continue;
      last = k;
      if (within_tube(d, t, k)) {
        needs = true;
        break;
      }
    }
    const Side pref = a.side[static_cast<std::size_t>(i)];
    auto closest = [&](double eps) {
      int best = -1;
      double best_r = std::numeric_limits<double>::infinity();
      for (int node : cand) {
        const int k = node / q, j = node % q;
        for (Side s : {Side::Exterior, Side::Interior}) {
          if (pref != Side::Any && pref != s) continue;
          const QbxCenter c = d.center(k, j, s);
          const double r = dist(t, c.location);
          if (r > c.radius * (1 + eps)) continue;
          const int id = center_index(d, k, j, s);
          if (r < best_r || (r == best_r && id < best)) {
            best_r = r;
            best = id;
          }
        }
      }
      return best;
    };
    int c = closest(opt.eps_assoc);
    bool gap = false;
    if (c < 0 && needs) {
      c = closest(opt.eps_gap);
      gap = c >= 0;
    }
    const auto ui = static_cast<std::size_t>(i);
    a.needs_qbx[ui] = needs;
    a.gap[ui] = gap;
    a.center[ui] = c;
    a.verdict[ui] = c >= 0 ? Verdict::Qbx : (needs ? Verdict::Failed : Verdict::Direct);
  }
  return a;
}

}  // namespace qbx
