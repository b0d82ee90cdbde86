#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "torat/int_matrix.hpp"

namespace torat {

struct NonInvertibleMatrix : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct OrderBudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotASubgroup : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A finite group with full element enumeration.  Elements are identified by
/// indices; for permutation and matrix groups the indexing is deterministic
/// (elements sorted by image tuple), so downstream canonical forms are
/// reproducible.  Immutable after construction.
class FiniteGroup {
public:
  enum class Kind { Permutation, Matrix, Table };

  /// Generators as permutations of {0..deg-1} given by image vectors.
  static FiniteGroup from_permutations(
      const std::vector<std::vector<std::uint32_t>>& gens,
      std::size_t budget = 1000000);
  /// Generators as unimodular integer matrices of one dimension.
  static FiniteGroup from_matrices(const std::vector<IntMatrix>& gens,
                                   std::size_t budget = 1000000);
  /// Abstract group from an explicit multiplication table (row-major,
  /// table[a*n+b] = a*b).  Indices are kept as given.  When gen_idx is empty
  /// every element counts as a generator.
  static FiniteGroup from_table(std::vector<std::uint32_t> table,
                                std::size_t order,
                                std::vector<std::size_t> gen_idx = {},
                                bool verify_associativity = false);
  static FiniteGroup trivial();
  static FiniteGroup cyclic(std::size_t n);
  static FiniteGroup symmetric(std::size_t n);

  Kind kind() const { return kind_; }
  std::size_t order() const { return order_; }
  std::size_t identity() const { return identity_; }
  std::size_t degree() const { return degree_; }

  std::size_t mult(std::size_t a, std::size_t b) const {
    return table_[a * order_ + b];
  }
  std::size_t inverse(std::size_t a) const { return inv_[a]; }
  /// g x g^{-1}
  std::size_t conjugate(std::size_t g, std::size_t x) const {
    return mult(mult(g, x), inv_[g]);
  }
  /// x y x^{-1} y^{-1}
  std::size_t commutator(std::size_t x, std::size_t y) const {
    return mult(mult(x, y), mult(inv_[x], inv_[y]));
  }
  std::size_t power(std::size_t a, long long k) const;
  std::size_t element_order(std::size_t a) const;

  const std::vector<std::uint32_t>& permutation(std::size_t a) const;
  const IntMatrix& matrix(std::size_t a) const;

  const std::vector<std::size_t>& generator_indices() const { return gens_; }

  /// Every element as word in the generators: a = word_prev(a) * gen(word_gen(a)),
  /// with the identity linking to itself.  Used to extend maps defined on
  /// generators (lattice actions, homomorphisms).
  struct WordLink {
    std::uint32_t prev;
    std::uint32_t gen;  // position in generator_indices(); UINT32_MAX at identity
  };
  const WordLink& word_link(std::size_t a) const { return words_[a]; }

  bool is_abelian() const;
  std::uint64_t exponent() const;
  /// Conjugacy classes of elements, each sorted, ordered by smallest member.
  std::vector<std::vector<std::size_t>> conjugacy_classes() const;
  /// Invariant factors of the abelianization G/[G,G].
  std::vector<Int> abelian_invariants() const;

private:
  FiniteGroup() = default;
  void finish_construction();  // inv_, words_

  Kind kind_ = Kind::Table;
  std::size_t order_ = 0, identity_ = 0, degree_ = 0;
  std::vector<std::uint32_t> table_;
  std::vector<std::uint32_t> inv_;
  std::vector<std::size_t> gens_;
  std::vector<WordLink> words_;
  std::vector<std::vector<std::uint32_t>> perms_;
  std::vector<IntMatrix> mats_;
};

/// A subgroup as a sorted element-index subset of a parent group, with the
/// structural flags every criterion theorem needs.
struct SubgroupHandle {
  const FiniteGroup* parent = nullptr;
  std::vector<std::size_t> elements;  // sorted, closed
  bool cyclic = false, abelian = false, bicyclic = false, normal = false;
  std::size_t conjugacy_class_size = 1;

  std::size_t order() const { return elements.size(); }
  bool contains(std::size_t e) const;
  bool is_trivial() const { return elements.size() == 1; }
};

/// Closure of a subset (plus identity) under multiplication.
std::vector<std::size_t> close_subset(const FiniteGroup& g,
                                      const std::vector<std::size_t>& seed);

/// Wrap a closed element set as a handle with all flags computed.
SubgroupHandle make_subgroup(const FiniteGroup& g,
                             std::vector<std::size_t> elements);

/// Recompute the cyclic/abelian/bicyclic flags of h from its element data.
/// bicyclic == abelian with at most two invariant factors.
void classify_subgroup(SubgroupHandle& h);

/// All subgroups, or one representative per conjugacy class (with class
/// size) when up_to_conjugacy is set.  Ordered by (order, elements).
std::vector<SubgroupHandle> subgroups(const FiniteGroup& g,
                                      bool up_to_conjugacy);

/// Deterministic Sylow p-subgroup: greedy extension by the lowest-index
/// usable elements.
SubgroupHandle sylow(const FiniteGroup& g, std::uint64_t p);

SubgroupHandle center(const FiniteGroup& g);
SubgroupHandle derived_subgroup(const FiniteGroup& g);
SubgroupHandle trivial_subgroup(const FiniteGroup& g);
SubgroupHandle full_subgroup(const FiniteGroup& g);

bool is_normal_subset(const FiniteGroup& g,
                      const std::vector<std::size_t>& elements);

/// G/N as an abstract group.  Quotient indices are ordered by the smallest
/// element index in each coset.  coset_of, when given, receives the map
/// element index -> quotient index.
FiniteGroup quotient_group(const FiniteGroup& g,
                           const std::vector<std::size_t>& normal_elements,
                           std::vector<std::size_t>* coset_of = nullptr);

/// The subgroup as its own abstract (table-kind) group.  Result index i
/// corresponds to parent element h.elements[i]; generators are a greedy
/// small generating set.
FiniteGroup subgroup_to_group(const SubgroupHandle& h);

/// First isomorphism a -> b found (as image vector over a's element indices),
/// or nullopt.  Exhaustive up to the node budget; throws OrderBudgetExceeded
/// if the budget runs out before the search is complete.
std::optional<std::vector<std::size_t>> find_isomorphism(
    const FiniteGroup& a, const FiniteGroup& b,
    std::uint64_t budget = 50000000);

struct IsoclinicResult {
  enum class Verdict { Yes, No, Unknown };
  Verdict verdict = Verdict::Unknown;
  // witness: theta maps G1/Z1 quotient indices to G2/Z2 quotient indices,
  // phi maps derived-subgroup elements of G1 (parent indices, position in
  // derived1_elements) to parent indices in G2
  std::vector<std::size_t> theta;
  std::vector<std::size_t> derived1_elements;
  std::vector<std::size_t> phi;
};

/// Isoclinism test: isomorphisms G1/Z(G1) -> G2/Z(G2) and [G1,G1] -> [G2,G2]
/// compatible with the commutator maps, verified pointwise on all coset
/// pairs.  "No" means the (pruned) search was exhaustive.
IsoclinicResult isoclinic(const FiniteGroup& g1, const FiniteGroup& g2,
                          std::uint64_t budget = 50000000);

}  // namespace torat
