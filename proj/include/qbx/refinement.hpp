#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "qbx/geometry.hpp"
#include "qbx/quadtree.hpp"

namespace qbx {

struct ConditionReport {
  // flagged[c - 1] holds the panels flagged by condition c, sorted.
  std::array<std::vector<int>, 4> flagged;
  int iterations = 0;
  int num_panels = 0;
  // Flag counts per condition for every round, final check included.
  std::vector<std::array<int, 4>> history;

  bool passes(int condition) const { return flagged[static_cast<std::size_t>(condition - 1)].empty(); }
  bool all_pass() const;
  std::vector<int> all_flagged() const;
};

struct RefineOptions {
  int max_iters = 50;
  // Centers used by conditions 1 and 3. Any means both sides.
  Side centers = Side::Any;
  int n_max = 10;
};

// Tree over the QBX centers (category 0, in center_index order restricted to
// the chosen sides) and panel centers of mass (category 1).
struct RefinementTree {
  Tree tree;
  std::vector<QbxCenter> centers;
};

RefinementTree build_refinement_tree(const Discretization& d, Side centers = Side::Any, int n_max = 10);

std::vector<int> check_condition1(const Discretization& d, const RefinementTree& rt);
std::vector<int> check_condition2(const Discretization& d);
std::vector<int> check_condition3(const Discretization& d, const RefinementTree& rt);
std::vector<int> check_condition4(const Discretization& d, double omega);

ConditionReport check_conditions(const Discretization& d, double omega, const RefineOptions& opt = {});

// Splits every flagged panel once per round until all four conditions hold.
// Throws ResolutionError if max_iters rounds do not suffice.
std::pair<Discretization, ConditionReport> refine_to_conditions(const Discretization& d, double omega,
                                                                const RefineOptions& opt = {});

}  // namespace qbx
