#include "qbx/qbxfmm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qbx/errors.hpp"
#include "qbx/log.hpp"
#include "qbx/specfun.hpp"
#include "qbx/tables.hpp"

namespace qbx {

namespace {

constexpr int pfmm_floor = 4;
constexpr int pfmm_cap = 400;
constexpr cplx quarter_i{0.0, 0.25};

int quadrant(const Box& child, const Box& parent) {
  return (child.center.x > parent.center.x ? 1 : 0) + (child.center.y > parent.center.y ? 2 : 0);
}

// Parent minus child center for a child of radius r in quadrant q.
Vec2 child_to_parent(int q, double r) { return {(q & 1) ? -r : r, (q & 2) ? -r : r}; }

int m2l_key(std::int64_t dx, std::int64_t dy) { return static_cast<int>((dx + 3) * 7 + (dy + 3)); }

}  // namespace

// log|H_n(x1)| by the forward ratio recurrence, |J_n(x2)| directly; the
// product stays representable even where the factors do not.
int estimate_pfmm(double omega, double R, double eps) {
  if (!(omega > 0) || !(R > 0) || !(eps > 0)) throw DomainError("estimate_pfmm needs omega, R, eps > 0");
  const double x1 = 3.0 * omega * R, x2 = std::sqrt(2.0) * omega * R;
  const int nscan = pfmm_cap + 40;
  std::vector<double> j(static_cast<std::size_t>(nscan + 1));
  bessel_j_scaled(x2, nscan, 1.0, j.data());
  const Hankel01 h = hankel1_01(x1);
  const double log_eps = std::log(eps);
  double logh = std::log(std::abs(h.h0));
  cplx r = h.h1 / h.h0;
  int last = -1;  // largest n whose product exceeds eps
  for (int n = 0; n <= nscan; ++n) {
    if (n >= 1) {
      logh += std::log(std::abs(r));
      r = 2.0 * n / x1 - 1.0 / r;
    }
    const double aj = std::abs(j[static_cast<std::size_t>(n)]);
    if (aj > 0 && logh + std::log(aj) > log_eps) last = n;
  }
  if (last >= pfmm_cap) throw OverflowError("p_FMM exceeds 400 (omega R = " + std::to_string(omega * R) + ")");
  return std::max(pfmm_floor, last);
}

long long FmmAudit::total_target_pairs() const {
  return target_pairs[0] + target_pairs[1] + target_pairs[2] + target_pairs[3];
}

long long FmmAudit::total_center_pairs() const {
  return center_pairs[0] + center_pairs[1] + center_pairs[2] + center_pairs[3];
}

Expansion FmmOutput::center_expansion(int c, Vec2 location, double omega) const {
  Expansion e = Expansion::zero(ExpansionKind::Local, location, p, omega, 1.0);
  auto co = center_coefficients(c);
  std::copy(co.begin(), co.end(), e.coeffs.begin());
  return e;
}

FmmPlan make_plan(double omega, std::span<const Vec2> sources, std::span<const Vec2> targets,
                  std::span<const Vec2> centers, const FmmOptions& opt) {
  if (!(omega > 0)) throw DomainError("FMM needs omega > 0");
  if (!(opt.eps > 0) || opt.p < 0) throw DomainError("FMM needs eps > 0 and p >= 0");
  if (opt.point_only && !centers.empty()) throw DomainError("point FMM takes no centers");
  FmmPlan plan;
  plan.omega = omega;
  plan.eps = opt.eps;
  plan.p = opt.p;
  plan.p_add = opt.point_only ? 0 : (opt.p_add >= 0 ? opt.p_add : lookup_padd(std::max(opt.p, 1)));
  plan.mechanisms = opt.mechanisms;

  TreeOptions topt;
  topt.n_max = opt.n_max;
  topt.subdivide_on = {cat_source, cat_target};
  topt.level_restrict = true;
  std::vector<std::vector<Vec2>> pts(3);
  pts[cat_source].assign(sources.begin(), sources.end());
  pts[cat_target].assign(targets.begin(), targets.end());
  pts[cat_center].assign(centers.begin(), centers.end());
  plan.tree = Tree::build(pts, topt);
  plan.lists = interaction_lists(plan.tree);

  const Tree& t = plan.tree;
  const int nl = t.num_levels();
  plan.p_fmm.assign(static_cast<std::size_t>(nl), 0);
  plan.p_qbx.assign(static_cast<std::size_t>(nl), 0);
  plan.scale.assign(static_cast<std::size_t>(nl), 1.0);
  for (int l = 0; l < nl; ++l) {
    const double R = t.root_radius() / std::ldexp(1.0, l);
    plan.scale[l] = std::min(1.0, omega * R);
    if (l < 2) continue;
    plan.p_fmm[l] = estimate_pfmm(omega, R, opt.eps);
    plan.p_qbx[l] = plan.p_fmm[l] + plan.p_add;
  }

  plan.offset.assign(static_cast<std::size_t>(t.num_boxes()), -1);
  long off = 0;
  for (int b = 0; b < t.num_boxes(); ++b) {
    const int l = t.box(b).level;
    if (l < 2) continue;
    plan.offset[b] = off;
    off += 2 * plan.p_qbx[l] + 1;
  }
  plan.buffer_size = off;

  plan.m2m.resize(static_cast<std::size_t>(nl));
  plan.l2l.resize(static_cast<std::size_t>(nl));
  plan.m2l.resize(static_cast<std::size_t>(nl));
  for (int l = 2; l < nl; ++l) {
    const double R = t.root_radius() / std::ldexp(1.0, l);
    const int pl = plan.p_qbx[l];
    const double sl = plan.scale[l];
    if (l >= 3) {
      const int pp = plan.p_qbx[l - 1];
      const double sp = plan.scale[l - 1];
      for (int q = 0; q < 4; ++q) {
        const Vec2 d = child_to_parent(q, R);
        plan.m2m[l][q] = make_translation(ExpansionKind::Outgoing, ExpansionKind::Outgoing, d, omega, pl, sl, pp, sp);
        plan.l2l[l][q] = make_translation(ExpansionKind::Local, ExpansionKind::Local, -1.0 * d, omega, pp, sp, pl, sl);
      }
    }
    plan.m2l[l].resize(49);
    for (int dx = -3; dx <= 3; ++dx)
      for (int dy = -3; dy <= 3; ++dy) {
        if (std::abs(dx) <= 1 && std::abs(dy) <= 1) continue;
        const Vec2 d{2.0 * R * dx, 2.0 * R * dy};
        plan.m2l[l][m2l_key(dx, dy)] =
            make_translation(ExpansionKind::Outgoing, ExpansionKind::Local, d, omega, pl, sl, pl, sl);
      }
  }
  log_debug("fmm plan: " + std::to_string(t.num_boxes()) + " boxes, " + std::to_string(nl) + " levels, p_add " +
            std::to_string(plan.p_add));
  return plan;
}

namespace {

struct Direct {
  double omega;
  const SourceBatch& b;
  bool has_slp, has_dlp;

  cplx at(Vec2 x, std::span<const int> idx) const {
    cplx u{};
    for (int j : idx) {
      const auto uj = static_cast<std::size_t>(j);
      const Vec2 d = x - b.points[uj];
      const double r = norm(d);
      if (r == 0.0) continue;
      const Hankel01 h = hankel1_01(omega * r);
      cplx v{};
      if (has_slp) v += b.slp[uj] * h.h0;
      if (has_dlp) v += b.dlp[uj] * (omega * h.h1 * (dot(b.normals[uj], d) / r));
      u += b.weights[uj] * v;
    }
    return quarter_i * u;
  }
};

}  // namespace

FmmOutput run_fmm(const FmmPlan& plan, const SourceBatch& src) {
  src.validate();
  const Tree& t = plan.tree;
  if (static_cast<int>(src.size()) != plan.num_sources()) throw PreconditionError("source batch does not match plan");
  for (std::size_t i = 0; i < src.size(); ++i)
    if (src.points[i].x != t.points(cat_source)[i].x || src.points[i].y != t.points(cat_source)[i].y)
      throw PreconditionError("source batch does not match plan");

  const double w = plan.omega;
  const int p = plan.p, np = 2 * p + 1;
  const unsigned mech = plan.mechanisms;
  const Direct direct{w, src, !src.slp.empty(), !src.dlp.empty()};
  const auto& L = plan.lists;

  FmmOutput out;
  out.p = p;
  out.potentials.assign(static_cast<std::size_t>(plan.num_targets()), cplx{});
  out.coefficients.assign(static_cast<std::size_t>(plan.num_centers()) * static_cast<std::size_t>(np), cplx{});
  std::vector<cplx> mpole(static_cast<std::size_t>(plan.buffer_size));
  std::vector<cplx> local(static_cast<std::size_t>(plan.buffer_size));
  FmmAudit& a = out.audit;

  auto has_src = [&](int b) { return t.box(b).count(cat_source) > 0; };
  auto wants_local = [&](int b) {
    const Box& x = t.box(b);
    return x.level >= 2 && (x.count(cat_target) > 0 || x.count(cat_center) > 0);
  };
  auto M = [&](int b) { return mpole.data() + plan.offset[b]; };
  auto Lc = [&](int b) { return local.data() + plan.offset[b]; };
  auto coeff = [&](int c) { return out.coefficients.data() + static_cast<std::size_t>(c) * np; };
  const int nl = t.num_levels();
  const bool far = (mech & (MechV | MechX)) != 0;

  // Stage 2: outgoing expansions, leaves then upward.
  if (mech & (MechV | MechW)) {
    const auto& leaves = t.leaves();
    long long cnt = 0;
#pragma omp parallel for schedule(dynamic, 8) reduction(+ : cnt)
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      const int b = leaves[i];
      const Box& x = t.box(b);
      if (x.level < 2 || !has_src(b)) continue;
      p2x_raw(ExpansionKind::Outgoing, x.center, plan.p_qbx[x.level], w, plan.scale[x.level], src,
              t.points_in(b, cat_source), M(b));
      cnt += x.count(cat_source);
    }
    a.p2m = cnt;
    cnt = 0;
    for (int l = nl - 2; l >= 2; --l) {
      const auto& lev = t.level(l);
#pragma omp parallel for schedule(dynamic, 8) reduction(+ : cnt)
      for (std::size_t i = 0; i < lev.size(); ++i) {
        const int b = lev[i];
        const Box& x = t.box(b);
        if (x.is_leaf() || !has_src(b)) continue;
        for (int k = 0; k < 4; ++k) {
          const int c = x.child[k];
          if (c < 0 || !has_src(c)) continue;
          apply_translation(plan.m2m[l + 1][quadrant(t.box(c), x)], M(c), M(b));
          ++cnt;
        }
      }
    }
    a.m2m = cnt;
  }

  // Stages 3 and 5: own leaf, U list and W list, per leaf.
  if (mech & (MechU | MechW)) {
    const auto& leaves = t.leaves();
    long long tu = 0, tw = 0, cu = 0, cw = 0, n_p2p = 0, n_p2qbx = 0, n_m2p = 0, n_m2qbx = 0;
#pragma omp parallel for schedule(dynamic, 4) reduction(+ : tu, tw, cu, cw, n_p2p, n_p2qbx, n_m2p, n_m2qbx)
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      const int b = leaves[i];
      auto tg = t.points_in(b, cat_target);
      auto cs = t.points_in(b, cat_center);
      if (tg.empty() && cs.empty()) continue;
      if (mech & MechU) {
        std::vector<int> near;
        near.reserve(L.U[b].size() + 1);
        near.push_back(b);
        near.insert(near.end(), L.U[b].begin(), L.U[b].end());
        for (int nb : near) {
          if (!has_src(nb)) continue;
          auto sidx = t.points_in(nb, cat_source);
          const long long ns = static_cast<long long>(sidx.size());
          for (int ti : tg) out.potentials[static_cast<std::size_t>(ti)] += direct.at(t.points(cat_target)[ti], sidx);
          for (int ci : cs)
            p2x_raw(ExpansionKind::Local, t.points(cat_center)[ci], p, w, 1.0, src, sidx, coeff(ci));
          tu += ns * static_cast<long long>(tg.size());
          cu += ns * static_cast<long long>(cs.size());
          n_p2p += ns * static_cast<long long>(tg.size());
          n_p2qbx += ns * static_cast<long long>(cs.size());
        }
      }
      if (mech & MechW) {
        for (int wb : L.W[b]) {
          if (!has_src(wb)) continue;
          const Box& y = t.box(wb);
          const int pw = plan.p_qbx[y.level];
          const double sw = plan.scale[y.level];
          for (int ti : tg)
            out.potentials[static_cast<std::size_t>(ti)] +=
                eval_raw(ExpansionKind::Outgoing, y.center, pw, w, sw, M(wb), t.points(cat_target)[ti]);
          for (int ci : cs) {
            const Vec2 c = t.points(cat_center)[ci];
            const Translation tr =
                make_translation(ExpansionKind::Outgoing, ExpansionKind::Local, c - y.center, w, pw, sw, p, 1.0);
            apply_translation(tr, M(wb), coeff(ci));
          }
          const long long ns = y.count(cat_source);
          tw += ns * static_cast<long long>(tg.size());
          cw += ns * static_cast<long long>(cs.size());
          n_m2p += static_cast<long long>(tg.size());
          n_m2qbx += static_cast<long long>(cs.size());
        }
      }
    }
    a.target_pairs[0] = tu;
    a.target_pairs[2] = tw;
    a.center_pairs[0] = cu;
    a.center_pairs[2] = cw;
    a.p2p = n_p2p;
    a.p2qbx = n_p2qbx;
    a.m2p = n_m2p;
    a.m2qbx = n_m2qbx;
  }

  // Stages 4 and 6: V list by M2L, X list by P2L, per box.
  if (far) {
    const int nb = t.num_boxes();
    long long tv = 0, tx = 0, cv = 0, cx = 0, n_m2l = 0, n_p2l = 0;
#pragma omp parallel for schedule(dynamic, 8) reduction(+ : tv, tx, cv, cx, n_m2l, n_p2l)
    for (int b = 0; b < nb; ++b) {
      if (!wants_local(b)) continue;
      const Box& x = t.box(b);
      const long long nt = x.count(cat_target), nc = x.count(cat_center);
      if (mech & MechV) {
        for (int vb : L.V[b]) {
          if (!has_src(vb)) continue;
          const Box& y = t.box(vb);
          apply_translation(plan.m2l[x.level][m2l_key(x.ix - y.ix, x.iy - y.iy)], M(vb), Lc(b));
          tv += y.count(cat_source) * nt;
          cv += y.count(cat_source) * nc;
          ++n_m2l;
        }
      }
      if (mech & MechX) {
        for (int xb : L.X[b]) {
          if (!has_src(xb)) continue;
          p2x_raw(ExpansionKind::Local, x.center, plan.p_qbx[x.level], w, plan.scale[x.level], src,
                  t.points_in(xb, cat_source), Lc(b));
          const long long ns = t.box(xb).count(cat_source);
          tx += ns * nt;
          cx += ns * nc;
          n_p2l += ns;
        }
      }
    }
    a.target_pairs[1] = tv;
    a.target_pairs[3] = tx;
    a.center_pairs[1] = cv;
    a.center_pairs[3] = cx;
    a.m2l = n_m2l;
    a.p2l = n_p2l;

    // Stage 7: shift local expansions down the tree.
    long long n_l2l = 0;
    for (int l = 3; l < nl; ++l) {
      const auto& lev = t.level(l);
#pragma omp parallel for schedule(dynamic, 16) reduction(+ : n_l2l)
      for (std::size_t i = 0; i < lev.size(); ++i) {
        const int b = lev[i];
        if (!wants_local(b)) continue;
        const Box& x = t.box(b);
        const Box& par = t.box(x.parent);
        apply_translation(plan.l2l[l][quadrant(x, par)], Lc(x.parent), Lc(b));
        ++n_l2l;
      }
    }
    a.l2l = n_l2l;

    // Stage 8: evaluate at targets, shift onto centers.
    const auto& leaves = t.leaves();
    long long n_l2qbx = 0;
#pragma omp parallel for schedule(dynamic, 8) reduction(+ : n_l2qbx)
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      const int b = leaves[i];
      if (!wants_local(b)) continue;
      const Box& x = t.box(b);
      const int pl = plan.p_qbx[x.level];
      const double sl = plan.scale[x.level];
      for (int ti : t.points_in(b, cat_target))
        out.potentials[static_cast<std::size_t>(ti)] +=
            eval_raw(ExpansionKind::Local, x.center, pl, w, sl, Lc(b), t.points(cat_target)[ti]);
      for (int ci : t.points_in(b, cat_center)) {
        const Vec2 c = t.points(cat_center)[ci];
        const Translation tr =
            make_translation(ExpansionKind::Local, ExpansionKind::Local, c - x.center, w, pl, sl, p, 1.0);
        apply_translation(tr, Lc(b), coeff(ci));
        ++n_l2qbx;
      }
    }
    a.l2qbx = n_l2qbx;
  }
  return out;
}

FmmOutput direct_fmm_reference(double omega, const SourceBatch& sources, std::span<const Vec2> targets,
                               std::span<const Vec2> centers, int p) {
  sources.validate();
  const int np = 2 * p + 1;
  FmmOutput out;
  out.p = p;
  out.potentials.assign(targets.size(), cplx{});
  out.coefficients.assign(centers.size() * static_cast<std::size_t>(np), cplx{});
  std::vector<int> all(sources.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  const Direct direct{omega, sources, !sources.slp.empty(), !sources.dlp.empty()};
  const long nt = static_cast<long>(targets.size()), nc = static_cast<long>(centers.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (long i = 0; i < nt; ++i) out.potentials[static_cast<std::size_t>(i)] = direct.at(targets[i], all);
#pragma omp parallel for schedule(dynamic, 16)
  for (long i = 0; i < nc; ++i)
    p2x_raw(ExpansionKind::Local, centers[i], p, omega, 1.0, sources, all,
            out.coefficients.data() + static_cast<std::size_t>(i) * np);
  out.audit.target_pairs[0] = static_cast<long long>(sources.size()) * nt;
  out.audit.center_pairs[0] = static_cast<long long>(sources.size()) * nc;
  return out;
}

}  // namespace qbx
