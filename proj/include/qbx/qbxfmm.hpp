#pragma once

#include <array>
#include <span>
#include <vector>

#include "qbx/expansions.hpp"
#include "qbx/quadtree.hpp"
#include "qbx/types.hpp"

namespace qbx {

// Smallest p >= 4 with |H_n(3 w R) J_n(sqrt(2) w R)| <= eps for all n > p.
// Throws OverflowError when p would exceed 400.
int estimate_pfmm(double omega, double R, double eps);

// Interaction mechanisms, usable as a mask to run a subset of the FMM.
enum Mechanism : unsigned {
  MechU = 1u,  // own leaf and U list: direct sums
  MechV = 2u,  // V lists of the box and its ancestors: M2L, then L2L
  MechW = 4u,  // W list: outgoing expansions evaluated directly
  MechX = 8u,  // X lists of the box and its ancestors: P2L, then L2L
  MechAll = 15u,
};

struct FmmOptions {
  double eps = 5e-7;
  int p = 4;       // QBX order of the center coefficients
  int p_add = -1;  // negative: tabulated value for p
  int n_max = 30;
  bool point_only = false;  // plain point FMM: p_add = 0 and no centers
  unsigned mechanisms = MechAll;
};

// Tree categories.
inline constexpr int cat_source = 0;
inline constexpr int cat_target = 1;
inline constexpr int cat_center = 2;

struct FmmPlan {
  double omega = 0.0;
  double eps = 0.0;
  int p = 0;
  int p_add = 0;
  unsigned mechanisms = MechAll;
  Tree tree;
  InteractionLists lists;
  // Per level; levels 0 and 1 never carry expansions and hold 0.
  std::vector<int> p_fmm;
  std::vector<int> p_qbx;
  std::vector<double> scale;
  // Offsets of each box's coefficients in the flat expansion buffers.
  std::vector<long> offset;
  long buffer_size = 0;
  // Cached translations: M2M child->parent and L2L parent->child indexed by
  // [level of the child][quadrant], M2L by [level][(dx + 3) * 7 + dy + 3].
  std::vector<std::array<Translation, 4>> m2m;
  std::vector<std::array<Translation, 4>> l2l;
  std::vector<std::vector<Translation>> m2l;

  int num_sources() const { return static_cast<int>(tree.points(cat_source).size()); }
  int num_targets() const { return static_cast<int>(tree.points(cat_target).size()); }
  int num_centers() const { return static_cast<int>(tree.points(cat_center).size()); }
};

FmmPlan make_plan(double omega, std::span<const Vec2> sources, std::span<const Vec2> targets,
                  std::span<const Vec2> centers, const FmmOptions& opt = {});

// Interaction counts per mechanism. pairs_* count (source, target) or
// (source, center) pairs; each pair is handled by exactly one mechanism.
struct FmmAudit {
  std::array<long long, 4> target_pairs{};  // U, V, W, X
  std::array<long long, 4> center_pairs{};
  long long p2m = 0, m2m = 0, m2l = 0, p2l = 0, l2l = 0, m2p = 0, m2qbx = 0, l2qbx = 0;
  long long p2p = 0, p2qbx = 0;
  long long total_target_pairs() const;
  long long total_center_pairs() const;
};

struct FmmOutput {
  int p = 0;
  std::vector<cplx> potentials;    // per target
  std::vector<cplx> coefficients;  // per center, 2 p + 1 values for n = -p..p
  FmmAudit audit;

  std::span<const cplx> center_coefficients(int c) const {
    return {coefficients.data() + static_cast<std::size_t>(c) * static_cast<std::size_t>(2 * p + 1),
            static_cast<std::size_t>(2 * p + 1)};
  }
  Expansion center_expansion(int c, Vec2 location, double omega) const;
};

// Sources must be the plan's source points in order; weights are folded in.
FmmOutput run_fmm(const FmmPlan& plan, const SourceBatch& sources);

// Direct O(n^2) reference: potentials at targets and QBX coefficients at centers.
FmmOutput direct_fmm_reference(double omega, const SourceBatch& sources, std::span<const Vec2> targets,
                               std::span<const Vec2> centers, int p);

}  // namespace qbx
