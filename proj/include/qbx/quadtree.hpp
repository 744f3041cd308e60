#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <unordered_map>
#include <vector>

#include "qbx/types.hpp"

namespace qbx {

inline constexpr int max_categories = 4;

struct Box {
  int id = 0;
  int level = 0;
  std::int64_t ix = 0;  // integer position at its level
  std::int64_t iy = 0;
  Vec2 center;
  double radius = 0.0;  // half side length
  int parent = -1;
  std::array<int, 4> child{-1, -1, -1, -1};
  int nchildren = 0;
  std::array<int, max_categories> begin{};
  std::array<int, max_categories> end{};

  bool is_leaf() const { return nchildren == 0; }
  int count(int cat) const { return end[cat] - begin[cat]; }
};

struct TreeOptions {
  int n_max = 30;
  // Categories whose particles count toward the leaf capacity.
  std::vector<int> subdivide_on = {0};
  bool level_restrict = true;
  int depth_cap = 40;
};

class Tree {
 public:
  Tree() = default;
  static Tree build(const std::vector<std::vector<Vec2>>& points_by_category, const TreeOptions& opt = {});

  int num_boxes() const { return static_cast<int>(boxes_.size()); }
  int num_categories() const { return static_cast<int>(points_.size()); }
  int num_levels() const { return static_cast<int>(by_level_.size()); }
  const Box& box(int b) const { return boxes_[static_cast<std::size_t>(b)]; }
  const std::vector<Box>& boxes() const { return boxes_; }
  const std::vector<int>& level(int l) const { return by_level_[static_cast<std::size_t>(l)]; }
  const std::vector<int>& leaves() const { return leaves_; }
  bool level_restricted() const { return level_restricted_; }
  int n_max() const { return n_max_; }
  double root_radius() const { return boxes_[0].radius; }

  // Original indices of the category-cat points in box b.
  std::span<const int> points_in(int b, int cat) const {
    const Box& x = box(b);
    return {perm_[cat].data() + x.begin[cat], static_cast<std::size_t>(x.count(cat))};
  }
  const std::vector<Vec2>& points(int cat) const { return points_[cat]; }
  int leaf_of(int cat, int i) const { return leaf_of_[cat][static_cast<std::size_t>(i)]; }

  // Closed squares intersect.
  bool touching(int a, int b) const;
  // Closed squares intersect but interiors are disjoint.
  bool adjacent(int a, int b) const;
  bool contains(int b, Vec2 p) const;
  // Box with the given integer position, or -1.
  int find(int level, std::int64_t ix, std::int64_t iy) const;

  // Same-level boxes touching b, b included.
  std::vector<int> colleagues(int b) const;
  // Boxes touching b (or b itself), at b's level or coarser, none of whose
  // children also qualify.
  const std::vector<int>& peers(int b) const { return peers_[static_cast<std::size_t>(b)]; }

  // Leaves whose squares intersect the l-inf square of radius r about c.
  // If visits is non-null it receives the number of boxes touched.
  std::vector<int> area_query(Vec2 c, double r, long* visits = nullptr) const;

 private:
  void split_box(int b);
  void balance();
  void finalize(bool with_peers = true);
  std::vector<int> compute_peers(int b) const;

  std::vector<std::vector<Vec2>> points_;
  std::vector<std::vector<int>> perm_;
  std::vector<std::vector<int>> leaf_of_;
  std::vector<Box> boxes_;
  std::vector<std::vector<int>> by_level_;
  std::vector<int> leaves_;
  std::vector<std::vector<int>> peers_;
  std::vector<std::unordered_map<std::uint64_t, int>> index_;
  int n_max_ = 30;
  int depth_cap_ = 40;
  bool level_restricted_ = false;
};

struct InteractionLists {
  std::vector<std::vector<int>> U;  // for leaf b: adjacent leaves; b itself is not listed
  std::vector<std::vector<int>> V;  // well-separated children of the parent's colleagues
  std::vector<std::vector<int>> W;  // for leaf b: non-adjacent descendants of colleagues whose parents are adjacent
  std::vector<std::vector<int>> X;  // duals of W
  std::vector<std::vector<int>> colleagues;
};

InteractionLists interaction_lists(const Tree& t);

// Peer boxes of b, delegated to the tree.
inline const std::vector<int>& peers(const Tree& t, int b) { return t.peers(b); }

// One line per box: "id level cx cy radius parent nchildren count_0 .. count_k".
void write_tree(const Tree& t, std::ostream& out);

}  // namespace qbx
