#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "torat/cohomology.hpp"
#include "torat/glattice.hpp"
#include "torat/group.hpp"
#include "torat/int_matrix.hpp"

namespace torat {

/// A computed fact and a criterion-theorem fact disagree.  Always a hard
/// failure: one of the two channels is wrong.
struct OracleContradiction : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Short exact sequence 0 -> sub -> mid -> quo -> 0 of G-lattices with mid a
/// permutation lattice.  Maps act on column vectors: inject is
/// rank(mid) x rank(sub), project is rank(quo) x rank(mid).
struct Resolution {
  GLattice sub, mid, quo;
  IntMatrix inject, project;
  std::vector<SubgroupHandle> mid_parts;  // mid = (+)_i Z[G/H_i]
};

/// Re-verifies every claimed property: equivariance of both maps, exactness
/// (project * inject == 0, ranks add, project surjective over Z, the image of
/// inject saturated), and that mid is the permutation lattice of mid_parts.
/// Throws InvalidDescriptor on any failure.
void verify_resolution(const Resolution& r);

/// Coflasque resolution 0 -> Q -> P -> M -> 0: P permutation, P^H -> M^H
/// surjective for every subgroup H (checked), Q = ker coflabby (checked).
/// P is built greedily over subgroup classes in decreasing order, adding a
/// Z[G/H] summand per missed fixed-point generator.
Resolution coflasque_resolution(const GLattice& m);

/// Flasque resolution 0 -> M -> P -> F -> 0 with F flabby (checked),
/// obtained by dualizing the coflasque resolution of the dual lattice.
Resolution flasque_resolution(const GLattice& m);

struct FlabbyStatus {
  bool flabby = false;    // H^-1(H, M) = 0 for all H
  bool coflabby = false;  // H^1(H, M) = 0 for all H
  std::optional<SubgroupHandle> flabby_witness, coflabby_witness;
  std::optional<FinAbGroup> flabby_value, coflabby_value;
};

/// Sweeps subgroup conjugacy-class representatives (Tate cohomology is
/// conjugation-invariant); the first failing subgroup becomes the witness.
/// Coflabbiness is evaluated as flabbiness of the dual (the Tate duality
/// |H^1(H, M)| = |H^-1(H, M^dual)|), which avoids the dimension shift.
FlabbyStatus flabby_coflabby_status(const GLattice& m);

struct IsoBudget {
  std::uint64_t seed = 20240501;
  std::size_t iterations = 200000;  // randomized unimodular-search trials
  std::size_t rank_budget = 0;      // certificate search; 0 = 4*rank + |G|
};

struct IsoSearchResult {
  enum class Tag { Found, Impossible, Unknown };
  Tag tag = Tag::Unknown;
  std::optional<IntMatrix> x;      // unimodular intertwiner when Found
  std::optional<Int> obstruction;  // prime dividing every intertwiner det
  std::string note;
};

/// Searches for a G-equivariant unimodular X with X * act_m(g) = act_n(g) * X:
/// Z-basis of the intertwiner lattice, LLL reduction, deterministic small
/// combinations, then seeded randomized combinations (dets prefiltered mod a
/// word-size prime).  Impossible is only returned with a finite certificate:
/// a zero intertwiner lattice, or a prime p such that every intertwiner
/// determinant vanishes mod p (verified exhaustively over F_p^dim).
IsoSearchResult equivariant_isomorphism(const GLattice& m, const GLattice& n,
                                        const IsoBudget& budget = {});

/// Direct sum (+)_i Z[G/H_i]; the empty sum is the rank-0 lattice.
GLattice permutation_sum(const GroupPtr& g,
                         const std::vector<SubgroupHandle>& parts);

/// Isomorphism search from m onto permutation_sum(parts) (+) tail, peeling
/// one coset-lattice summand at a time: a candidate equivariant epimorphism
/// h: m -> Z[G/K] split by an integral section s (h compose s = id, a linear
/// condition decided exactly by solve_integer) rewrites m as
/// Z[G/K] (+) ker h, and the search recurses on ker h.  Far more effective
/// than generic unimodular search when the target decomposition is known.
/// Found results carry the verified unimodular x; peeling failures are
/// Unknown (a failed peel order proves nothing, since summand cancellation
/// can fail for G-lattices), except that a missing first summand type is a
/// proof of impossibility.
IsoSearchResult summand_peel_isomorphism(
    const GLattice& m, const std::vector<SubgroupHandle>& parts,
    const std::optional<GLattice>& tail = std::nullopt,
    const IsoBudget& budget = {});

struct StablyPermutationCertificate {
  std::vector<SubgroupHandle> added;   // P
  std::vector<SubgroupHandle> target;  // P'
  IntMatrix x;  // unimodular intertwiner  M (+) P  ->  P'
};

/// Recomputes the certificate: X equivariant and unimodular for
/// m (+) permutation_sum(added) -> permutation_sum(target).
bool verify_certificate(const GLattice& m,
                        const StablyPermutationCertificate& c);

struct CertificateSearchOutcome {
  std::optional<StablyPermutationCertificate> certificate;
  std::string note;  // obstruction / failure note when absent
};

/// Searches for permutation lattices P, P' with M (+) P isomorphic to P'.
/// Candidate multisets come from matching rational characters (the
/// difference of the multisets is the unique solution of a linear system in
/// the coset-lattice characters, up to the character-relation kernel);
/// surviving candidates go to the integral isomorphism search.
CertificateSearchOutcome stably_permutation_certificate(
    const GLattice& m, const IsoBudget& budget = {});

struct InvertibilityCertificate {
  GLattice complement;                 // F (+) complement isomorphic to perm
  std::vector<SubgroupHandle> target;  // the permutation side
  IntMatrix x;
};

enum class FlabbyTag { Zero, InvertibleNonZero, NotInvertible, Unknown };

/// Partial knowledge supplied by a criterion theorem.
struct TheoremVerdict {
  std::optional<bool> zero;        // [M]^fl = 0 ?
  std::optional<bool> invertible;  // [M]^fl invertible ?
  std::string citation;
};

struct FlabbyVerdict {
  FlabbyTag tag = FlabbyTag::Unknown;
  std::string provenance;  // "computed" or "theorem-oracle"
  std::string detail;
  std::optional<Resolution> resolution;  // the flasque resolution used
  std::optional<StablyPermutationCertificate> zero_certificate;
  std::optional<InvertibilityCertificate> inverse_certificate;
  std::optional<SubgroupHandle> witness;  // failing subgroup (NotInvertible)
  std::optional<FinAbGroup> witness_value;
};

/// Decides the flabby class [M]^fl: (a) compute F; (b) stably-permutation
/// certificate for F -> Zero; (c) F or dual(F) not flabby-and-coflabby ->
/// NotInvertible with witness; (d) split coflasque resolution of F
/// (F (+) Q isomorphic to permutation) -> InvertibleNonZero; (e) supplied
/// criterion verdicts may settle a stage the searches left open (provenance
/// "theorem-oracle"); (f) otherwise Unknown.  A proven computed fact that
/// contradicts an oracle throws OracleContradiction.
FlabbyVerdict flabby_class_verdict(const GLattice& m,
                                   const IsoBudget& budget = {},
                                   const std::vector<TheoremVerdict>& oracles = {});

/// Group-theoretic criteria for the flabby class of the Chevalley module
/// J_G = J_{G/1} (the norm-one torus of a Galois extension).
struct JgCriteria {
  bool invertible = false;  // all Sylow subgroups cyclic (Endo-Miyata)
  bool zero = false;  // G = <s,t | s^m = t^{2^d} = 1, tst^-1 = s^r>, m odd,
                      // r^2 = 1 mod m (Endo-Miyata); includes all cyclic G
  bool jg_coflabby = false;  // Sylows cyclic or generalized quaternion
                             // (Colliot-Thelene-Sansuc)
  bool flabby_coflabby_invertible = false;  // every flabby-and-coflabby
      // G-lattice invertible: odd Sylows cyclic, 2-Sylow cyclic or dihedral
      // (Endo-Miyata)
};

JgCriteria jg_criteria(const FiniteGroup& g);

/// Criteria verdicts for [J_{G/H}]^fl (norm-one torus of a degree-[G:H]
/// separable extension with Galois closure group G).  H is reduced by its
/// normal core first, so the verdict is about the faithful coset action.
struct NormOneOracle {
  std::optional<bool> invertible;  // retract rationality
  std::optional<bool> zero;        // stable rationality
  std::vector<std::string> citations;
};

NormOneOracle norm_one_criteria(const FiniteGroup& g, const SubgroupHandle& h);

}  // namespace torat
