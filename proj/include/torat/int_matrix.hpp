#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace torat {

using Int = mpz_class;

/// Dense matrix over Z with arbitrary-precision entries, row-major.
/// All linear algebra in the project is exact; there is no floating point.
class IntMatrix {
public:
  IntMatrix() : rows_(0), cols_(0) {}
  IntMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), a_(rows * cols) {}
  IntMatrix(std::size_t rows, std::size_t cols, std::vector<Int> entries);

  static IntMatrix identity(std::size_t n);
  static IntMatrix zero(std::size_t rows, std::size_t cols);
  static IntMatrix diagonal(const std::vector<Int>& d);
  static IntMatrix row_vector(const std::vector<Int>& v);
  static IntMatrix column_vector(const std::vector<Int>& v);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  Int& at(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const Int& at(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  bool operator==(const IntMatrix& o) const;
  bool operator!=(const IntMatrix& o) const { return !(*this == o); }

  IntMatrix operator*(const IntMatrix& o) const;
  IntMatrix operator+(const IntMatrix& o) const;
  IntMatrix operator-(const IntMatrix& o) const;
  IntMatrix operator-() const;

  IntMatrix transpose() const;
  Int det() const;           // via fraction-free Gaussian elimination
  bool is_identity() const;
  bool is_zero() const;
  bool is_square() const { return rows_ == cols_; }

  /// Kronecker product, (this ⊗ o).
  IntMatrix kronecker(const IntMatrix& o) const;
  /// Block diagonal sum diag(this, o).
  IntMatrix direct_sum(const IntMatrix& o) const;

  IntMatrix row(std::size_t i) const;
  IntMatrix submatrix(std::size_t r0, std::size_t c0, std::size_t nr,
                      std::size_t nc) const;
  /// Stack o below this.
  IntMatrix vstack(const IntMatrix& o) const;
  /// Concatenate o to the right of this.
  IntMatrix hstack(const IntMatrix& o) const;

  void swap_rows(std::size_t i, std::size_t j);
  void negate_row(std::size_t i);
  /// row[i] += c * row[j]
  void add_row_multiple(std::size_t i, std::size_t j, const Int& c);

  std::string to_string() const;

private:
  std::size_t rows_, cols_;
  std::vector<Int> a_;
};

/// Finite abelian group (optionally with free part), as a divisibility chain
/// d1 | d2 | ... | dk with each di >= 2, plus the rank of the free summand.
/// `generators`, when present, holds one lift per invariant factor (rows) in
/// whatever ambient coordinates the producing computation used.
struct FinAbGroup {
  std::vector<Int> invariant_factors;
  std::size_t free_rank = 0;
  std::optional<IntMatrix> generators;

  bool is_trivial() const { return invariant_factors.empty() && free_rank == 0; }
  /// Order of the torsion part (1 if trivial). Only meaningful as the group
  /// order when free_rank == 0.
  Int torsion_order() const;
  Int exponent() const;  // largest invariant factor, 1 if torsion-free
  bool operator==(const FinAbGroup& o) const {
    return invariant_factors == o.invariant_factors && free_rank == o.free_rank;
  }
  std::string to_string() const;
};

struct HnfResult {
  IntMatrix h;                      // row Hermite normal form
  IntMatrix u;                      // unimodular, u * a == h
  std::vector<std::size_t> pivot_cols;
  std::size_t rank() const { return pivot_cols.size(); }
};

/// Row-style HNF: pivot columns strictly increasing, pivots positive,
/// entries above each pivot reduced into [0, pivot).
HnfResult hnf(const IntMatrix& a);

struct SnfResult {
  IntMatrix d;  // diagonal, d1 | d2 | ..., di >= 0
  IntMatrix u;  // unimodular
  IntMatrix v;  // unimodular, u * a * v == d
};

SnfResult snf(const IntMatrix& a);

/// Invariant factors of a (the nontrivial diagonal of its SNF), without
/// transform tracking.
std::vector<Int> invariant_factors(const IntMatrix& a);

/// Structure of Z^rows / (column span of a): torsion invariant factors and
/// free rank, with generator lifts (rows of `generators` are vectors in
/// Z^rows projecting to generators of the torsion factors).
FinAbGroup cokernel_structure(const IntMatrix& a);

/// Structure of Z^cols(gens) span quotient: rows of `gens` and rows of `rels`
/// are vectors in a common ambient Z^n with row-span(rels) ⊆ row-span(gens);
/// returns span(gens)/span(rels).
FinAbGroup quotient_structure(const IntMatrix& gens, const IntMatrix& rels);

/// Basis of { x in Z^cols : a x = 0 }, returned as rows.
IntMatrix kernel_basis(const IntMatrix& a);

/// HNF basis of the intersection of the row lattices of a and b (which must
/// share the ambient Z^cols).
IntMatrix intersect_row_lattices(const IntMatrix& a, const IntMatrix& b);

struct IntSolveResult {
  std::vector<Int> particular;  // one solution of a x = b
  IntMatrix kernel;             // rows form a Z-basis of ker a
};

/// Solve a x = b over Z. Empty optional if no integral solution exists.
std::optional<IntSolveResult> solve_integer(const IntMatrix& a,
                                            const std::vector<Int>& b);

/// True iff b lies in the row span of `rows` over Z.
bool in_row_span(const IntMatrix& rows, const std::vector<Int>& b);

/// Coordinates of b in terms of the rows of `rows` (x with x * rows = b),
/// when b is in the row span.
std::optional<std::vector<Int>> row_span_coordinates(const IntMatrix& rows,
                                                     const std::vector<Int>& b);

/// Canonical basis of the row lattice of a: the nonzero rows of its HNF.
IntMatrix row_lattice_basis(const IntMatrix& a);

/// True iff the row lattices of a and b coincide.
bool same_row_lattice(const IntMatrix& a, const IntMatrix& b);

/// Saturation of the row lattice of a: the largest sublattice of Z^cols with
/// the same rational span.  Rows of the result form a basis.
IntMatrix saturate_row_lattice(const IntMatrix& a);

/// Inverse of a unimodular matrix.
IntMatrix unimodular_inverse(const IntMatrix& u);

/// LLL reduction (exact rational arithmetic, Lovasz parameter delta = 3/4)
/// of a basis given as linearly independent rows.  The returned rows span
/// the same lattice.
IntMatrix lll_reduce(IntMatrix basis);

}  // namespace torat
