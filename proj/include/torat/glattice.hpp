#pragma once

#include <memory>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "torat/group.hpp"
#include "torat/int_matrix.hpp"

namespace torat {

struct GroupMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InvalidAction : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InvalidDescriptor : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Groups are shared between the lattices built over them.
using GroupPtr = std::shared_ptr<const FiniteGroup>;

inline GroupPtr share(FiniteGroup g) {
  return std::make_shared<FiniteGroup>(std::move(g));
}

/// True iff a and b are the same group object or have identical element
/// indexing and multiplication tables.
bool same_group(const FiniteGroup& a, const FiniteGroup& b);

/// A lattice Z^rank with a left action of a finite group: coordinates are
/// column vectors and sigma sends v to action(sigma) * v, so
/// action(sigma * tau) == action(sigma) * action(tau).  Construction verifies
/// the homomorphism property and unimodularity; immutable afterwards.
class GLattice {
public:
  /// Action given on the group's generators (in generator_indices() order)
  /// and extended to every element along its generator word.
  GLattice(GroupPtr g, const std::vector<IntMatrix>& generator_actions,
           std::string provenance = {});

  /// Action given directly per element index.
  static GLattice from_element_actions(GroupPtr g,
                                       std::vector<IntMatrix> actions,
                                       std::string provenance = {});

  const FiniteGroup& group() const { return *group_; }
  const GroupPtr& group_ptr() const { return group_; }
  std::size_t rank() const { return rank_; }
  const IntMatrix& action(std::size_t element) const { return act_[element]; }
  const std::string& provenance() const { return provenance_; }

  /// Sum of action(h) over the given elements (norm map of a subgroup).
  IntMatrix norm_matrix(const std::vector<std::size_t>& elements) const;

private:
  GLattice() = default;
  void verify() const;

  GroupPtr group_;
  std::size_t rank_ = 0;
  std::vector<IntMatrix> act_;
  std::string provenance_;
};

/// Rank-n lattice with every element acting as the identity.
GLattice trivial_lattice(GroupPtr g, std::size_t rank);

/// Z[G/H]: G permuting the left cosets gH.  Coset indexing is deterministic
/// (cosets ordered by minimal element representative).
GLattice permutation_lattice(GroupPtr g, const SubgroupHandle& h);

/// J_{G/H} = Z[G/H] / Z*(sum of all cosets), of rank [G:H] - 1, realized on
/// a deterministic basis (unimodular change of coordinates moving the norm
/// vector to the first coordinate, which is then dropped).
GLattice chevalley_module(GroupPtr g, const SubgroupHandle& h);

/// Quotient of m by the invariant saturated sublattice spanned by the
/// columns of embed (rank(m) x d, columns a basis whose span is G-stable and
/// saturated).  The quotient basis is deterministic (SNF change of
/// coordinates moving the sublattice onto the first d coordinates).
GLattice quotient_lattice(const GLattice& m, const IntMatrix& embed);

/// Dual lattice Hom(M, Z): action matrices replaced by inverse transpose.
GLattice dual(const GLattice& m);

GLattice direct_sum(const GLattice& m, const GLattice& n);
GLattice tensor(const GLattice& m, const GLattice& n);

/// M viewed as a lattice over the subgroup H (as its own group; element i of
/// the result group is h.elements[i]).
GLattice restrict_lattice(const GLattice& m, const SubgroupHandle& h);

/// The tautological lattice of a finite matrix group G <= GL_n(Z): the
/// module on which each g acts (as a left module, the matrix of g is the
/// inverse transpose of g, matching the usual convention that the matrix
/// entries of g give the action on the basis rather than on coordinates).
GLattice lattice_from_matrix_group(const std::vector<IntMatrix>& gens,
                                   std::size_t budget = 1000000);

/// Z-basis (as rows) of M^H = { v : action(h) v = v for all h in H }.
IntMatrix fixed_sublattice(const GLattice& m,
                           const std::vector<std::size_t>& elements);
IntMatrix fixed_sublattice(const GLattice& m, const SubgroupHandle& h);

struct ActionKernelResult {
  SubgroupHandle kernel;  // normal subgroup acting trivially
  GLattice faithful;      // induced lattice over the quotient group
  std::vector<std::size_t> coset_of;  // parent element -> quotient index
};

/// Kernel of the action homomorphism and the induced faithful quotient-group
/// lattice.
ActionKernelResult action_kernel(const GLattice& m);

/// A (quasi-)monomial action in dimension <= 3: a finite matrix group (the
/// matrix part, entries giving exponents in sigma(x_i) = c_i(sigma) *
/// prod_j x_j^{a_ij}) together with rational coefficients c_j per element
/// and, for the quasi-monomial case, the square classes defining the
/// extension K/k the group acts through.  Coefficient consistency
/// c_j(st) = c_j(t) * prod_i c_i(s)^{a_ij(t)} is checked eagerly on all
/// element pairs; inconsistent input is rejected.
struct MonomialActionDescriptor {
  GroupPtr group;          // matrix group (exponent matrices per element)
  std::size_t dimension = 0;
  std::vector<std::vector<mpq_class>> coefficients;  // [element][coordinate]
  std::vector<mpq_class> square_classes;             // base-field data

  /// Build from generator matrices and per-generator coefficient vectors,
  /// extending coefficients along generator words.
  static MonomialActionDescriptor build(
      const std::vector<IntMatrix>& gen_matrices,
      const std::vector<std::vector<mpq_class>>& gen_coefficients,
      std::vector<mpq_class> square_classes = {}, std::size_t budget = 1000000);

  /// The lattice of the matrix part (coefficients forgotten).
  GLattice matrix_part_lattice() const;
};

}  // namespace torat
