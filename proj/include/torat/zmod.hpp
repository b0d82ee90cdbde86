#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

namespace torat {

/// Arithmetic in Z/p^k for a prime power p^k < 2^31 (products fit in 64 bits).
struct PrimePowerRing {
  std::uint64_t p, k, m;  // m = p^k

  PrimePowerRing(std::uint64_t p_, std::uint64_t k_);

  std::uint64_t reduce(long long x) const {
    long long r = x % static_cast<long long>(m);
    return static_cast<std::uint64_t>(r < 0 ? r + static_cast<long long>(m) : r);
  }
  std::uint64_t add(std::uint64_t a, std::uint64_t b) const {
    std::uint64_t s = a + b;
    return s >= m ? s - m : s;
  }
  std::uint64_t sub(std::uint64_t a, std::uint64_t b) const {
    return a >= b ? a - b : a + m - b;
  }
  std::uint64_t mul(std::uint64_t a, std::uint64_t b) const { return a * b % m; }
  std::uint64_t neg(std::uint64_t a) const { return a == 0 ? 0 : m - a; }

  /// p-adic valuation; returns k for x == 0.
  std::uint64_t val(std::uint64_t x) const;
  /// Inverse of a unit (x not divisible by p).
  std::uint64_t unit_inverse(std::uint64_t x) const;
  bool operator==(const PrimePowerRing& o) const { return p == o.p && k == o.k; }
};

using ZVec = std::vector<std::uint64_t>;

struct SparseEntry {
  std::uint32_t col;
  std::uint64_t val;  // nonzero, in [1, m)
};
/// Sorted by column, no duplicates, no explicit zeros.
using SparseVec = std::vector<SparseEntry>;

SparseVec to_sparse(const ZVec& v);
ZVec to_dense(const SparseVec& v, std::size_t ncols);

/// Row span of vectors over Z/p^k kept in Howell form: one row per pivot
/// column, pivot values p^j with everything left of the pivot zero, and the
/// span closed under the Howell property (every span element whose leading
/// zeros reach column c is a combination of the rows with pivot >= c).
/// Rows are stored sparse, so the same structure serves dense cohomology
/// systems and sparse cocycle systems.
class HowellBasis {
public:
  HowellBasis(PrimePowerRing ring, std::size_t ncols)
      : ring_(ring), ncols_(ncols) {}

  /// Returns true iff the span grew.
  bool insert(SparseVec row);
  bool insert(const ZVec& row) { return insert(to_sparse(row)); }

  /// Reduce a vector modulo the current span (leftmost-pivot elimination).
  /// The result is zero iff the vector lies in the span.
  void reduce(SparseVec& row) const;
  bool contains(const ZVec& row) const;

  /// Canonical coset representative modulo the span: every entry at a pivot
  /// column ends up in [0, pivot value).  Two vectors canonicalize to the
  /// same result iff they differ by a span element.
  void canonicalize(SparseVec& row) const;

  std::size_t size() const { return by_pivot_.size(); }
  std::size_t ncols() const { return ncols_; }
  const PrimePowerRing& ring() const { return ring_; }

  /// Canonical rows: sorted by pivot column, entries above each pivot reduced
  /// modulo the pivot value.  Two subspans are equal iff these agree.
  std::vector<ZVec> canonical_rows() const;
  std::vector<SparseVec> canonical_rows_sparse() const;

private:
  PrimePowerRing ring_;
  std::size_t ncols_;
  std::map<std::uint32_t, SparseVec> by_pivot_;  // pivot column -> row
};

/// Spanning set (canonical Howell rows) of { x in (Z/p^k)^ncols : A x = 0 },
/// rows of A given as sparse vectors.
std::vector<ZVec> kernel_mod(const PrimePowerRing& ring,
                             const std::vector<SparseVec>& rows,
                             std::size_t ncols);

struct ModSolveResult {
  ZVec particular;               // one solution of A x = b
  std::vector<ZVec> homogeneous; // spanning set of { x : A x = 0 }
};

/// Solve A x = b over Z/p^k.  Rows of A are sparse; columns are internally
/// reordered by increasing fill (Markowitz-style static ordering) before
/// elimination.  Empty optional if the system is inconsistent.
std::optional<ModSolveResult> solve_mod_prime_power(
    const PrimePowerRing& ring, const std::vector<SparseVec>& rows,
    std::size_t ncols, const ZVec& b);

}  // namespace torat
