#include "qbx/quadtree.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <string>

#include "qbx/errors.hpp"

namespace qbx {
namespace {

std::uint64_t key(std::int64_t ix, std::int64_t iy) {
  return (static_cast<std::uint64_t>(ix) << 32) | static_cast<std::uint64_t>(iy);
}

}  // namespace

Tree Tree::build(const std::vector<std::vector<Vec2>>& points_by_category, const TreeOptions& opt) {
  if (points_by_category.empty() || points_by_category.size() > static_cast<std::size_t>(max_categories))
    throw DomainError("tree needs between 1 and 4 point categories");
  if (opt.n_max < 1) throw DomainError("leaf capacity must be at least 1");
  std::size_t total = 0;
  double extent = 0.0;
  for (const auto& c : points_by_category) {
    total += c.size();
    for (const Vec2& p : c) {
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw DomainError("non-finite point in tree input");
      extent = std::max({extent, std::abs(p.x), std::abs(p.y)});
    }
  }
  if (total == 0) throw DomainError("tree needs at least one point");
  for (int c : opt.subdivide_on)
    if (c < 0 || c >= static_cast<int>(points_by_category.size())) throw DomainError("bad subdivision category");

  Tree t;
  t.points_ = points_by_category;
  t.n_max_ = opt.n_max;
  t.depth_cap_ = std::min(opt.depth_cap, 62);
  const int ncat = static_cast<int>(t.points_.size());
  t.perm_.resize(ncat);
  Box root;
  root.radius = (extent > 0.0 ? extent : 1.0) * (1.0 + 1e-9);
  for (int c = 0; c < ncat; ++c) {
    t.perm_[c].resize(t.points_[c].size());
    std::iota(t.perm_[c].begin(), t.perm_[c].end(), 0);
    root.begin[c] = 0;
    root.end[c] = static_cast<int>(t.points_[c].size());
  }
  t.boxes_.push_back(root);

  for (std::size_t i = 0; i < t.boxes_.size(); ++i) {
    int n = 0;
    for (int c : opt.subdivide_on) n += t.boxes_[i].count(c);
    if (n <= opt.n_max) continue;
    if (t.boxes_[i].level >= t.depth_cap_)
      throw ResolutionError("quadtree depth cap " + std::to_string(t.depth_cap_) +
                            " reached (coincident points exceed the leaf capacity)");
    t.split_box(static_cast<int>(i));
  }
  if (opt.level_restrict) {
    t.balance();
    t.level_restricted_ = true;
  }
  t.finalize();
  return t;
}

void Tree::split_box(int b) {
  const int ncat = num_categories();
  const Box parent = boxes_[b];
  std::array<std::array<int, 5>, max_categories> bounds{};
  std::vector<int> tmp;
  for (int c = 0; c < ncat; ++c) {
    std::array<int, 4> cnt{};
    const int lo = parent.begin[c], hi = parent.end[c];
    auto quad = [&](int idx) {
      const Vec2& p = points_[c][idx];
      return (p.x >= parent.center.x ? 1 : 0) + (p.y >= parent.center.y ? 2 : 0);
    };
    for (int i = lo; i < hi; ++i) ++cnt[quad(perm_[c][i])];
    bounds[c][0] = lo;
    for (int q = 0; q < 4; ++q) bounds[c][q + 1] = bounds[c][q] + cnt[q];
    tmp.assign(perm_[c].begin() + lo, perm_[c].begin() + hi);
    std::array<int, 4> pos{bounds[c][0], bounds[c][1], bounds[c][2], bounds[c][3]};
    for (int idx : tmp) perm_[c][pos[quad(idx)]++] = idx;
  }
  for (int q = 0; q < 4; ++q) {
    int n = 0;
    for (int c = 0; c < ncat; ++c) n += bounds[c][q + 1] - bounds[c][q];
    if (n == 0) continue;
    Box ch;
    ch.id = static_cast<int>(boxes_.size());
    ch.level = parent.level + 1;
    ch.ix = 2 * parent.ix + (q & 1);
    ch.iy = 2 * parent.iy + (q >> 1);
    ch.radius = 0.5 * parent.radius;
    ch.center = parent.center + Vec2((q & 1) ? ch.radius : -ch.radius, (q & 2) ? ch.radius : -ch.radius);
    ch.parent = b;
    for (int c = 0; c < ncat; ++c) {
      ch.begin[c] = bounds[c][q];
      ch.end[c] = bounds[c][q + 1];
    }
    boxes_[b].child[q] = ch.id;
    boxes_[b].nchildren++;
    boxes_.push_back(ch);
  }
}

void Tree::balance() {
  for (;;) {
    finalize(false);
    std::vector<int> to_split;
    for (int leaf : leaves_) {
      const Box& L = boxes_[leaf];
      const int l2 = L.level + 2;
      if (l2 >= num_levels()) continue;
      bool violated = false;
      for (std::int64_t i = 4 * L.ix - 1; i <= 4 * L.ix + 4 && !violated; ++i)
        for (std::int64_t j = 4 * L.iy - 1; j <= 4 * L.iy + 4 && !violated; ++j) {
          bool inside = i >= 4 * L.ix && i <= 4 * L.ix + 3 && j >= 4 * L.iy && j <= 4 * L.iy + 3;
          if (!inside && find(l2, i, j) >= 0) violated = true;
        }
      if (violated) to_split.push_back(leaf);
    }
    if (to_split.empty()) return;
    for (int b : to_split) {
      if (boxes_[b].level >= depth_cap_) throw ResolutionError("quadtree depth cap reached while balancing");
      split_box(b);
    }
  }
}

void Tree::finalize(bool with_peers) {
  by_level_.clear();
  leaves_.clear();
  for (const Box& b : boxes_) {
    if (static_cast<int>(by_level_.size()) <= b.level) by_level_.resize(b.level + 1);
    by_level_[b.level].push_back(b.id);
    if (b.is_leaf()) leaves_.push_back(b.id);
  }
  index_.assign(by_level_.size(), {});
  for (const Box& b : boxes_)
    if (b.level <= 32) index_[b.level][key(b.ix, b.iy)] = b.id;
  const int ncat = num_categories();
  leaf_of_.assign(ncat, {});
  for (int c = 0; c < ncat; ++c) {
    leaf_of_[c].assign(points_[c].size(), -1);
    for (int leaf : leaves_)
      for (int i = boxes_[leaf].begin[c]; i < boxes_[leaf].end[c]; ++i) leaf_of_[c][perm_[c][i]] = leaf;
  }
  peers_.assign(boxes_.size(), {});
  if (!with_peers) return;
  for (const Box& b : boxes_) peers_[b.id] = compute_peers(b.id);
}

int Tree::find(int level, std::int64_t ix, std::int64_t iy) const {
  if (level < 0 || level >= num_levels()) return -1;
  const std::int64_t n = std::int64_t{1} << level;
  if (ix < 0 || iy < 0 || ix >= n || iy >= n) return -1;
  if (level <= 32) {
    auto it = index_[level].find(key(ix, iy));
    return it == index_[level].end() ? -1 : it->second;
  }
  for (int b : by_level_[level])
    if (boxes_[b].ix == ix && boxes_[b].iy == iy) return b;
  return -1;
}

bool Tree::touching(int a, int b) const {
  const Box* A = &boxes_[a];
  const Box* B = &boxes_[b];
  if (A->level > B->level) std::swap(A, B);
  const std::int64_t s = std::int64_t{1} << (B->level - A->level);
  return B->ix <= (A->ix + 1) * s && B->ix + 1 >= A->ix * s && B->iy <= (A->iy + 1) * s && B->iy + 1 >= A->iy * s;
}

bool Tree::adjacent(int a, int b) const {
  if (!touching(a, b)) return false;
  const Box* A = &boxes_[a];
  const Box* B = &boxes_[b];
  if (A->level > B->level) std::swap(A, B);
  const std::int64_t s = std::int64_t{1} << (B->level - A->level);
  bool overlap = B->ix < (A->ix + 1) * s && B->ix + 1 > A->ix * s && B->iy < (A->iy + 1) * s && B->iy + 1 > A->iy * s;
  return !overlap;
}

bool Tree::contains(int b, Vec2 p) const {
  const Box& x = boxes_[b];
  return dist_inf(p, x.center) <= x.radius;
}

std::vector<int> Tree::colleagues(int b) const {
  const Box& x = boxes_[b];
  std::vector<int> out;
  for (std::int64_t j = x.iy - 1; j <= x.iy + 1; ++j)
    for (std::int64_t i = x.ix - 1; i <= x.ix + 1; ++i) {
      int c = find(x.level, i, j);
      if (c >= 0) out.push_back(c);
    }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> Tree::compute_peers(int b) const {
  const int lb = boxes_[b].level;
  std::vector<int> out;
  std::vector<int> stack{0};
  while (!stack.empty()) {
    int B = stack.back();
    stack.pop_back();
    bool descended = false;
    for (int c : boxes_[B].child) {
      if (c < 0 || boxes_[c].level > lb || !touching(c, b)) continue;
      stack.push_back(c);
      descended = true;
    }
    if (!descended) out.push_back(B);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> Tree::area_query(Vec2 c, double r, long* visits) const {
  if (!contains(0, c)) throw DomainError("area query center lies outside the root box");
  long v = 1;
  int b = 0;
  while (r <= 0.5 * boxes_[b].radius) {
    int next = -1;
    for (int ch : boxes_[b].child)
      if (ch >= 0 && contains(ch, c)) {
        next = ch;
        break;
      }
    if (next < 0) break;
    b = next;
    ++v;
  }
  std::vector<int> out;
  std::vector<int> stack;
  for (int p : peers_[b]) {
    stack.push_back(p);
    while (!stack.empty()) {
      int x = stack.back();
      stack.pop_back();
      ++v;
      const Box& bx = boxes_[x];
      if (dist_inf(bx.center, c) > bx.radius + r) continue;
      if (bx.is_leaf()) {
        out.push_back(x);
        continue;
      }
      for (int ch : bx.child)
        if (ch >= 0) stack.push_back(ch);
    }
  }
  std::sort(out.begin(), out.end());
  if (visits) *visits = v;
  return out;
}

InteractionLists interaction_lists(const Tree& t) {
  if (!t.level_restricted()) throw PreconditionError("interaction lists require a level-restricted tree");
  const int n = t.num_boxes();
  InteractionLists L;
  L.U.assign(n, {});
  L.V.assign(n, {});
  L.W.assign(n, {});
  L.X.assign(n, {});
  L.colleagues.assign(n, {});
  if (n == 1) return L;
  for (int b = 0; b < n; ++b) L.colleagues[b] = t.colleagues(b);
  for (int b = 1; b < n; ++b) {
    for (int c : L.colleagues[t.box(b).parent])
      for (int d : t.box(c).child)
        if (d >= 0 && !t.touching(d, b)) L.V[b].push_back(d);
    std::sort(L.V[b].begin(), L.V[b].end());
  }
  for (int b : t.leaves()) {
    std::vector<int> stack;
    for (int c : L.colleagues[b]) {
      if (c == b) continue;
      if (t.box(c).is_leaf()) {
        L.U[b].push_back(c);
        continue;
      }
      stack.push_back(c);
      while (!stack.empty()) {
        int d = stack.back();
        stack.pop_back();
        for (int e : t.box(d).child) {
          if (e < 0) continue;
          if (!t.touching(e, b)) {
            L.W[b].push_back(e);
          } else if (t.box(e).is_leaf()) {
            L.U[b].push_back(e);
          } else {
            stack.push_back(e);
          }
        }
      }
    }
    for (int p : t.peers(b))
      if (t.box(p).level < t.box(b).level && t.box(p).is_leaf()) L.U[b].push_back(p);
    std::sort(L.U[b].begin(), L.U[b].end());
    std::sort(L.W[b].begin(), L.W[b].end());
    for (int w : L.W[b]) L.X[w].push_back(b);
  }
  for (auto& x : L.X) std::sort(x.begin(), x.end());
  return L;
}

void write_tree(const Tree& t, std::ostream& out) {
  out.precision(17);
  for (const Box& b : t.boxes()) {
    out << b.id << ' ' << b.level << ' ' << b.center.x << ' ' << b.center.y << ' ' << b.radius << ' ' << b.parent << ' '
        << b.nchildren;
    for (int c = 0; c < t.num_categories(); ++c) out << ' ' << b.count(c);
    out << '\n';
  }
}

}  // namespace qbx
