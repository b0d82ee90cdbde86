#pragma once

#include <cstdint>
#include <vector>

#include "torat/glattice.hpp"
#include "torat/group.hpp"
#include "torat/int_matrix.hpp"

namespace torat {

/// Tate cohomology group H^0(H, M) = M^H / N_H M.
FinAbGroup tate0(const SubgroupHandle& h, const GLattice& m);

/// Tate cohomology group H^-1(H, M) = ker(N_H) / I_H M.  M is flabby iff
/// this vanishes for every subgroup H.
FinAbGroup tate_minus1(const SubgroupHandle& h, const GLattice& m);

/// H^1(H, M), computed by one dimension shift: M embeds into the induced
/// (cohomologically trivial) lattice Z[H] (x) M by m -> sum_h h (x) m, and
/// H^1(H, M) = H^0(H, coker).  M is coflabby iff this vanishes for every
/// subgroup H.
FinAbGroup h1(const SubgroupHandle& h, const GLattice& m);

/// An element of H^2(G, Q/Z): a normalized 2-cocycle with values in
/// (1/modulus)Z/Z, stored as integers mod modulus.
struct CocycleClass2 {
  GroupPtr group;
  std::uint64_t modulus = 1;
  std::vector<std::uint64_t> table;  // f[a * order + b]

  std::uint64_t at(std::size_t a, std::size_t b) const {
    return table[a * group->order() + b];
  }
};

/// Throws InvalidDescriptor unless c is a normalized 2-cocycle.
void validate_cocycle(const CocycleClass2& c);

struct H2Result {
  FinAbGroup structure;                   // H^2(G, Q/Z)
  std::vector<CocycleClass2> generators;  // one per invariant factor
};

/// H^2(G, Q/Z), computed prime by prime with cocycle values in the p-part
/// (1/p^k)Z/Z (k = v_p(|G|)) and coboundaries drawn from (1/p^2k)Z/Z
/// cochains.  Generator tables are canonically reduced, so equal classes get
/// equal tables.  Throws OrderBudgetExceeded when |G| exceeds the budget.
H2Result h2_qz(GroupPtr g, std::size_t order_budget = 4096);

/// Restriction of c to the subgroup A, returned over A's own group object
/// and canonically reduced (the zero class comes back as the zero table).
CocycleClass2 restrict_h2(const CocycleClass2& c, const SubgroupHandle& a);

/// True iff c vanishes in H^2(G, Q/Z), i.e. c = delta g for some cochain
/// g: G -> Q/Z (decided per prime power via solve_mod_prime_power).
bool is_coboundary(const CocycleClass2& c);

/// Lattice of integer coefficient vectors x with sum_i x_i c_i a coboundary,
/// returned as an HNF basis of a finite-index sublattice of Z^t.  All c_i
/// must be normalized cocycles over the same group object with the same
/// modulus.  Solved per prime power, with the cochain unknowns eliminated by
/// the kernel computation; the per-prime lattices are intersected over Z.
IntMatrix coboundary_kernel(const std::vector<CocycleClass2>& cs);

}  // namespace torat
