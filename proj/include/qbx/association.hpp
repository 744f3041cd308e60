#pragma once

#include <span>
#include <vector>

#include "qbx/geometry.hpp"

namespace qbx {

enum class Verdict { Direct, Qbx, Failed };

struct AssociationOptions {
  Side side = Side::Any;
  double eps_assoc = 1e-6;
  // Relaxed radius factor for near targets that fall between expansion disks.
  double eps_gap = 0.5;
  int n_max = 30;
};

struct TargetAssociation {
  std::vector<Verdict> verdict;
  // center_index of the chosen center, or -1.
  std::vector<int> center;
  std::vector<char> needs_qbx;
  // Set when the center was found only with the relaxed radius.
  std::vector<char> gap;
  std::vector<Side> side;

  int size() const { return static_cast<int>(verdict.size()); }
  std::vector<int> failed() const;
  int count(Verdict v) const;
};

// d(t, Gamma_k) <= h_k / 4 for some panel k.
bool gamma_near_test(const Discretization& d, Vec2 t);

// sides, if non-empty, gives a per-target preference overriding opt.side.
TargetAssociation associate_targets(const Discretization& d, std::span<const Vec2> targets,
                                    const AssociationOptions& opt = {}, std::span<const Side> sides = {});

}  // namespace qbx
