#include "qbx/refinement.hpp"

#include <algorithm>
#include <sstream>

#include "qbx/errors.hpp"

namespace qbx {

namespace {

std::vector<int> to_list(const std::vector<char>& flag) {
  std::vector<int> out;
  for (std::size_t k = 0; k < flag.size(); ++k)
    if (flag[k]) out.push_back(static_cast<int>(k));
  return out;
}

// S(b): the panels whose bounding squares meet leaf b.
std::vector<std::vector<int>> panels_by_leaf(const Discretization& d, const Tree& t) {
  std::vector<std::vector<int>> s(static_cast<std::size_t>(t.num_boxes()));
  for (int k = 0; k < d.num_panels(); ++k)
    for (int b : t.area_query(d.panel(k).com, d.panel(k).bound_radius)) s[static_cast<std::size_t>(b)].push_back(k);
  return s;
}

}  // namespace

bool ConditionReport::all_pass() const {
  for (const auto& f : flagged)
    if (!f.empty()) return false;
  return true;
}

std::vector<int> ConditionReport::all_flagged() const {
  std::vector<int> out;
  for (const auto& f : flagged) out.insert(out.end(), f.begin(), f.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

RefinementTree build_refinement_tree(const Discretization& d, Side centers, int n_max) {
  RefinementTree rt;
  for (int k = 0; k < d.num_panels(); ++k)
    for (int j = 0; j < d.q(); ++j) {
      if (centers != Side::Interior) rt.centers.push_back(d.center(k, j, Side::Exterior));
      if (centers != Side::Exterior) rt.centers.push_back(d.center(k, j, Side::Interior));
    }
  std::vector<Vec2> c, m;
  for (const auto& x : rt.centers) c.push_back(x.location);
  for (const auto& p : d.panels()) m.push_back(p.com);
  TreeOptions o;
  o.n_max = n_max;
  o.subdivide_on = {0};
  o.level_restrict = false;
  rt.tree = Tree::build({c, m}, o);
  return rt;
}

std::vector<int> check_condition1(const Discretization& d, const RefinementTree& rt) {
  const Tree& t = rt.tree;
  const auto s = panels_by_leaf(d, t);
  std::vector<char> flag(static_cast<std::size_t>(d.num_panels()), 0);
  const int nc = static_cast<int>(rt.centers.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (int i = 0; i < nc; ++i) {
    const QbxCenter& c = rt.centers[static_cast<std::size_t>(i)];
    const int n = c.panel;
    const double r = d.panel(n).h / 2;
    bool hit = false;
    for (int b : t.area_query(c.location, r)) {
      for (int m : s[static_cast<std::size_t>(b)]) {
        if (m == n) continue;
        if (dist_inf(c.location, d.panel(m).com) > r + d.panel(m).bound_radius) continue;
        if (d.distance_to_panel(c.location, m) <= r) {
          hit = true;
          break;
        }
      }
      if (hit) break;
    }
    if (hit) {
#pragma omp atomic write
      flag[static_cast<std::size_t>(n)] = 1;
    }
  }
  return to_list(flag);
}

std::vector<int> check_condition2(const Discretization& d) {
  std::vector<char> flag(static_cast<std::size_t>(d.num_panels()), 0);
  for (int k = 0; k < d.num_panels(); ++k) {
    const int m = d.panel(k).next;
    if (m < 0 || m == k) continue;
    const double hk = d.panel(k).h, hm = d.panel(m).h;
    const double ratio = hk / hm;
    if (ratio < 0.5 || ratio > 2.0) flag[static_cast<std::size_t>(hk > hm ? k : m)] = 1;
  }
  return to_list(flag);
}

std::vector<int> check_condition3(const Discretization& d, const RefinementTree& rt) {
  const Tree& t = rt.tree;
  std::vector<char> flag(static_cast<std::size_t>(d.num_panels()), 0);
  const int np = d.num_panels();
#pragma omp parallel for schedule(dynamic, 8)
  for (int l = 0; l < np; ++l) {
    const Panel& pl = d.panel(l);
    const double tube = pl.h / 4;
    bool hit = false;
    for (int b : t.area_query(pl.com, pl.bound_radius + tube)) {
      for (int i : t.points_in(b, 0)) {
        const QbxCenter& c = rt.centers[static_cast<std::size_t>(i)];
        if (c.panel == l || d.adjacent(c.panel, l)) continue;
        if (dist_inf(c.location, pl.com) > pl.bound_radius + tube) continue;
        if (d.distance_to_panel(c.location, l) <= tube) {
          hit = true;
          break;
        }
      }
      if (hit) break;
    }
    if (hit) flag[static_cast<std::size_t>(l)] = 1;
  }
  return to_list(flag);
}

std::vector<int> check_condition4(const Discretization& d, double omega) {
  if (!(omega > 0.0)) throw DomainError("wavenumber must be positive");
  std::vector<char> flag(static_cast<std::size_t>(d.num_panels()), 0);
  for (int k = 0; k < d.num_panels(); ++k)
    if (omega * d.panel(k).h > 5.0) flag[static_cast<std::size_t>(k)] = 1;
  return to_list(flag);
}

ConditionReport check_conditions(const Discretization& d, double omega, const RefineOptions& opt) {
  ConditionReport rep;
  rep.num_panels = d.num_panels();
  rep.flagged[3] = check_condition4(d, omega);
  rep.flagged[1] = check_condition2(d);
  const RefinementTree rt = build_refinement_tree(d, opt.centers, opt.n_max);
  rep.flagged[0] = check_condition1(d, rt);
  rep.flagged[2] = check_condition3(d, rt);
  return rep;
}

std::pair<Discretization, ConditionReport> refine_to_conditions(const Discretization& d0, double omega,
                                                                const RefineOptions& opt) {
  Discretization d = d0;
  std::vector<std::array<int, 4>> history;
  for (int it = 0;; ++it) {
    ConditionReport rep = check_conditions(d, omega, opt);
    std::array<int, 4> counts{};
    for (int c = 0; c < 4; ++c) counts[c] = static_cast<int>(rep.flagged[c].size());
    history.push_back(counts);
    if (rep.all_pass()) {
      rep.iterations = it;
      rep.history = std::move(history);
      return {std::move(d), std::move(rep)};
    }
    if (it >= opt.max_iters) {
      std::ostringstream os;
      os << "refinement did not converge in " << opt.max_iters << " rounds; flagged per condition:";
      for (int c = 0; c < 4; ++c) os << ' ' << counts[c];
      os << "; panels:";
      auto all = rep.all_flagged();
      for (std::size_t i = 0; i < std::min<std::size_t>(all.size(), 20); ++i) os << ' ' << all[i];
      if (all.size() > 20) os << " ...";
      throw ResolutionError(os.str());
    }
    d = d.split(rep.all_flagged());
  }
}

}  // namespace qbx
