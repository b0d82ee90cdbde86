#pragma once

#include <string>
#include <vector>

#include "torat/cohomology.hpp"
#include "torat/group.hpp"

namespace torat {

/// Subgroup conjugacy-class representatives that are cyclic or a direct
/// product of two cyclic groups, including the trivial subgroup.
/// Representatives suffice: restriction kernels are conjugation-invariant.
std::vector<SubgroupHandle> bicyclic_subgroups(const FiniteGroup& g);

struct B0Report {
  std::string group_id;
  FinAbGroup b0;
  std::vector<CocycleClass2> generators;  // one cocycle per invariant factor
  std::vector<SubgroupHandle> bicyclic_classes;
  double seconds = 0.0;
  std::string method = "cocycle-restriction-kernel";
};

/// Bogomolov multiplier B0(G) = the intersection over all bicyclic subgroups
/// A of ker(res: H^2(G,Q/Z) -> H^2(A,Q/Z)), computed on the coordinates of
/// the H^2 invariant-factor generators: each A contributes the lattice of
/// coefficient vectors whose combination restricts to a coboundary, the
/// lattices are intersected, and the quotient by the generator orders is the
/// answer.  Generator cocycles are re-verified to vanish on every bicyclic
/// class and the order of B0 is checked to divide |H^2(G,Q/Z)|.
/// Throws OrderBudgetExceeded when |G| exceeds the budget.
B0Report bogomolov_multiplier(GroupPtr g, std::string group_id = "",
                              std::size_t order_budget = 256);

}  // namespace torat
