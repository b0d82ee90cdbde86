#include "torat/int_matrix.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace torat {

IntMatrix::IntMatrix(std::size_t rows, std::size_t cols, std::vector<Int> entries)
    : rows_(rows), cols_(cols), a_(std::move(entries)) {
  if (a_.size() != rows_ * cols_)
    throw std::invalid_argument("IntMatrix: entry count mismatch");
}

IntMatrix IntMatrix::identity(std::size_t n) {
  IntMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

IntMatrix IntMatrix::zero(std::size_t rows, std::size_t cols) {
  return IntMatrix(rows, cols);
}

IntMatrix IntMatrix::diagonal(const std::vector<Int>& d) {
  IntMatrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m.at(i, i) = d[i];
  return m;
}

IntMatrix IntMatrix::row_vector(const std::vector<Int>& v) {
  return IntMatrix(1, v.size(), v);
}

IntMatrix IntMatrix::column_vector(const std::vector<Int>& v) {
  return IntMatrix(v.size(), 1, v);
}

bool IntMatrix::operator==(const IntMatrix& o) const {
  return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
}

IntMatrix IntMatrix::operator*(const IntMatrix& o) const {
  if (cols_ != o.rows_) throw std::invalid_argument("IntMatrix*: shape mismatch");
  IntMatrix r(rows_, o.cols_);
  Int t;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      const Int& aik = at(i, k);
      if (aik == 0) continue;
      for (std::size_t j = 0; j < o.cols_; ++j) {
        t = aik * o.at(k, j);
        r.at(i, j) += t;
      }
    }
  return r;
}

IntMatrix IntMatrix::operator+(const IntMatrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_)
    throw std::invalid_argument("IntMatrix+: shape mismatch");
  IntMatrix r(rows_, cols_);
  for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] + o.a_[i];
  return r;
}

IntMatrix IntMatrix::operator-(const IntMatrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_)
    throw std::invalid_argument("IntMatrix-: shape mismatch");
  IntMatrix r(rows_, cols_);
  for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] - o.a_[i];
  return r;
}

IntMatrix IntMatrix::operator-() const {
  IntMatrix r(rows_, cols_);
  for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = -a_[i];
  return r;
}

IntMatrix IntMatrix::transpose() const {
  IntMatrix r(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) r.at(j, i) = at(i, j);
  return r;
}

Int IntMatrix::det() const {
  if (!is_square()) throw std::invalid_argument("det: non-square");
  std::size_t n = rows_;
  if (n == 0) return 1;
  IntMatrix m = *this;
  Int prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m.at(k, k) == 0) {
      std::size_t p = k + 1;
      while (p < n && m.at(p, k) == 0) ++p;
      if (p == n) return 0;
      m.swap_rows(k, p);
      sign = -sign;
    }
    // Bareiss fraction-free step
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) {
        Int t = m.at(i, j) * m.at(k, k) - m.at(i, k) * m.at(k, j);
        mpz_divexact(m.at(i, j).get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
      }
    prev = m.at(k, k);
  }
  Int d = m.at(n - 1, n - 1);
  return sign == 1 ? d : Int(-d);
}

bool IntMatrix::is_identity() const {
  if (!is_square()) return false;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j)
      if (at(i, j) != (i == j ? 1 : 0)) return false;
  return true;
}

bool IntMatrix::is_zero() const {
  for (const Int& x : a_)
    if (x != 0) return false;
  return true;
}

IntMatrix IntMatrix::kronecker(const IntMatrix& o) const {
  IntMatrix r(rows_ * o.rows_, cols_ * o.cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) {
      if (at(i, j) == 0) continue;
      for (std::size_t p = 0; p < o.rows_; ++p)
        for (std::size_t q = 0; q < o.cols_; ++q)
          r.at(i * o.rows_ + p, j * o.cols_ + q) = at(i, j) * o.at(p, q);
    }
  return r;
}

IntMatrix IntMatrix::direct_sum(const IntMatrix& o) const {
  IntMatrix r(rows_ + o.rows_, cols_ + o.cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) r.at(i, j) = at(i, j);
  for (std::size_t i = 0; i < o.rows_; ++i)
    for (std::size_t j = 0; j < o.cols_; ++j) r.at(rows_ + i, cols_ + j) = o.at(i, j);
  return r;
}

IntMatrix IntMatrix::row(std::size_t i) const {
  IntMatrix r(1, cols_);
  for (std::size_t j = 0; j < cols_; ++j) r.at(0, j) = at(i, j);
  return r;
}

IntMatrix IntMatrix::submatrix(std::size_t r0, std::size_t c0, std::size_t nr,
                               std::size_t nc) const {
  IntMatrix r(nr, nc);
  for (std::size_t i = 0; i < nr; ++i)
    for (std::size_t j = 0; j < nc; ++j) r.at(i, j) = at(r0 + i, c0 + j);
  return r;
}

IntMatrix IntMatrix::vstack(const IntMatrix& o) const {
  if (cols_ != o.cols_ && !empty() && !o.empty())
    throw std::invalid_argument("vstack: column mismatch");
  std::size_t c = empty() ? o.cols_ : cols_;
  IntMatrix r(rows_ + o.rows_, c);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) r.at(i, j) = at(i, j);
  for (std::size_t i = 0; i < o.rows_; ++i)
    for (std::size_t j = 0; j < o.cols_; ++j) r.at(rows_ + i, j) = o.at(i, j);
  return r;
}

IntMatrix IntMatrix::hstack(const IntMatrix& o) const {
  if (rows_ != o.rows_) throw std::invalid_argument("hstack: row mismatch");
  IntMatrix r(rows_, cols_ + o.cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) r.at(i, j) = at(i, j);
    for (std::size_t j = 0; j < o.cols_; ++j) r.at(i, cols_ + j) = o.at(i, j);
  }
  return r;
}

void IntMatrix::swap_rows(std::size_t i, std::size_t j) {
  if (i == j) return;
  for (std::size_t c = 0; c < cols_; ++c) std::swap(at(i, c), at(j, c));
}

void IntMatrix::negate_row(std::size_t i) {
  for (std::size_t c = 0; c < cols_; ++c) at(i, c) = -at(i, c);
}

void IntMatrix::add_row_multiple(std::size_t i, std::size_t j, const Int& c) {
  if (c == 0) return;
  for (std::size_t k = 0; k < cols_; ++k) at(i, k) += c * at(j, k);
}

std::string IntMatrix::to_string() const {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < rows_; ++i) {
    os << (i ? ", [" : "[");
    for (std::size_t j = 0; j < cols_; ++j) os << (j ? "," : "") << at(i, j);
    os << "]";
  }
  os << "]";
  return os.str();
}

Int FinAbGroup::torsion_order() const {
  Int o = 1;
  for (const Int& d : invariant_factors) o *= d;
  return o;
}

Int FinAbGroup::exponent() const {
  return invariant_factors.empty() ? Int(1) : invariant_factors.back();
}

std::string FinAbGroup::to_string() const {
  std::ostringstream os;
  if (is_trivial()) return "0";
  bool first = true;
  for (const Int& d : invariant_factors) {
    os << (first ? "" : " x ") << "Z/" << d;
    first = false;
  }
  if (free_rank > 0) os << (first ? "" : " x ") << "Z^" << free_rank;
  return os.str();
}

namespace {

// Combined row operation bringing gcd into row i at column c and zero into
// row j at column c; applied to both m and the transform u.
void gcd_rows(IntMatrix& m, IntMatrix& u, std::size_t i, std::size_t j,
              std::size_t c) {
  const Int a = m.at(i, c), b = m.at(j, c);
  if (b == 0) return;
  if (a == 0) {
    m.swap_rows(i, j);
    u.swap_rows(i, j);
    return;
  }
  Int r;
  mpz_tdiv_r(r.get_mpz_t(), b.get_mpz_t(), a.get_mpz_t());
  if (r == 0) {  // cheap path: b is a multiple of a
    Int q = b / a;
    m.add_row_multiple(j, i, -q);
    u.add_row_multiple(j, i, -q);
    return;
  }
  Int g, x, y;
  mpz_gcdext(g.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t(), a.get_mpz_t(),
             b.get_mpz_t());
  Int ag = a / g, bg = b / g;
  // [x  y; -bg  ag] is unimodular: x*a + y*b = g, -bg*a + ag*b = 0.
  std::size_t n = m.cols();
  for (std::size_t k = 0; k < n; ++k) {
    Int mi = m.at(i, k), mj = m.at(j, k);
    m.at(i, k) = x * mi + y * mj;
    m.at(j, k) = ag * mj - bg * mi;
  }
  for (std::size_t k = 0; k < u.cols(); ++k) {
    Int ui = u.at(i, k), uj = u.at(j, k);
    u.at(i, k) = x * ui + y * uj;
    u.at(j, k) = ag * uj - bg * ui;
  }
}

}  // namespace

HnfResult hnf(const IntMatrix& a) {
  HnfResult res;
  res.h = a;
  res.u = IntMatrix::identity(a.rows());
  IntMatrix& h = res.h;
  IntMatrix& u = res.u;
  std::size_t pr = 0;  // next pivot row
  for (std::size_t c = 0; c < a.cols() && pr < a.rows(); ++c) {
    // pick a row with minimal nonzero |entry| to limit growth
    std::size_t best = a.rows();
    for (std::size_t r = pr; r < a.rows(); ++r) {
      if (h.at(r, c) == 0) continue;
      if (best == a.rows() ||
          cmp(abs(h.at(r, c)), abs(h.at(best, c))) < 0)
        best = r;
    }
    if (best == a.rows()) continue;
    // Euclid-style elimination with repeated minimal-pivot selection: the
    // nearest-quotient subtractions keep off-column entries from the
    // multiplier blow-up an extended-gcd combination would cause.
    while (true) {
      h.swap_rows(pr, best);
      u.swap_rows(pr, best);
      if (h.at(pr, c) < 0) {
        h.negate_row(pr);
        u.negate_row(pr);
      }
      bool done = true;
      for (std::size_t r = pr + 1; r < a.rows(); ++r) {
        if (h.at(r, c) == 0) continue;
        Int q, rem;
        mpz_fdiv_qr(q.get_mpz_t(), rem.get_mpz_t(), h.at(r, c).get_mpz_t(),
                    h.at(pr, c).get_mpz_t());
        if (2 * rem > h.at(pr, c)) q += 1;  // round to nearest
        h.add_row_multiple(r, pr, -q);
        u.add_row_multiple(r, pr, -q);
        if (h.at(r, c) != 0) done = false;
      }
      if (done) break;
      best = pr;
      for (std::size_t r = pr; r < a.rows(); ++r) {
        if (h.at(r, c) == 0) continue;
        if (h.at(best, c) == 0 || cmp(abs(h.at(r, c)), abs(h.at(best, c))) < 0)
          best = r;
      }
    }
    if (h.at(pr, c) < 0) {
      h.negate_row(pr);
      u.negate_row(pr);
    }
    // reduce entries above the pivot into [0, pivot)
    const Int& p = h.at(pr, c);
    for (std::size_t r = 0; r < pr; ++r) {
      Int q;
      mpz_fdiv_q(q.get_mpz_t(), h.at(r, c).get_mpz_t(), p.get_mpz_t());
      if (q != 0) {
        h.add_row_multiple(r, pr, -q);
        u.add_row_multiple(r, pr, -q);
      }
    }
    res.pivot_cols.push_back(c);
    ++pr;
  }
  return res;
}

namespace {

void swap_cols(IntMatrix& d, IntMatrix& v, std::size_t i, std::size_t j) {
  if (i == j) return;
  for (std::size_t k = 0; k < d.rows(); ++k) std::swap(d.at(k, i), d.at(k, j));
  for (std::size_t k = 0; k < v.rows(); ++k) std::swap(v.at(k, i), v.at(k, j));
}

// at most one nonzero per row and per column?
bool is_diagonalish(const IntMatrix& d) {
  std::vector<bool> col_used(d.cols(), false);
  for (std::size_t i = 0; i < d.rows(); ++i) {
    std::size_t cnt = 0;
    for (std::size_t j = 0; j < d.cols(); ++j)
      if (d.at(i, j) != 0) {
        if (col_used[j]) return false;
        col_used[j] = true;
        ++cnt;
      }
    if (cnt > 1) return false;
  }
  return true;
}

}  // namespace

// Iterated row/column Hermite reduction: entries stay reduced throughout,
// which avoids the coefficient blow-up of direct Smith elimination on
// matrices beyond ~30 rows.  Terminates because the product of the pivots
// strictly divides the previous one at each alternation that changes it.
SnfResult snf(const IntMatrix& a) {
  SnfResult res;
  res.d = a;
  res.u = IntMatrix::identity(a.rows());
  res.v = IntMatrix::identity(a.cols());
  IntMatrix& d = res.d;

  while (!is_diagonalish(d)) {
    HnfResult hr = hnf(d);
    d = hr.h;
    res.u = hr.u * res.u;
    if (is_diagonalish(d)) break;
    HnfResult hc = hnf(d.transpose());
    d = hc.h.transpose();
    res.v = res.v * hc.u.transpose();
  }

  // move the pivots onto the diagonal
  std::vector<std::pair<std::size_t, std::size_t>> piv;
  for (std::size_t i = 0; i < d.rows(); ++i)
    for (std::size_t j = 0; j < d.cols(); ++j)
      if (d.at(i, j) != 0) piv.push_back({i, j});
  std::sort(piv.begin(), piv.end());
  for (std::size_t t = 0; t < piv.size(); ++t) {
    auto [pi, pj] = piv[t];
    if (pi != t) {
      d.swap_rows(t, pi);
      res.u.swap_rows(t, pi);
      for (auto& q : piv)
        if (q.first == t) q.first = pi;
      piv[t].first = t;
    }
    if (pj != t) {
      swap_cols(d, res.v, t, pj);
      for (auto& q : piv)
        if (q.second == t) q.second = pj;
      piv[t].second = t;
    }
    if (d.at(t, t) < 0) {
      d.negate_row(t);
      res.u.negate_row(t);
    }
  }

  // enforce the divisibility chain with local 2x2 steps
  std::size_t k = piv.size();
  bool clean = false;
  while (!clean) {
    clean = true;
    for (std::size_t t = 0; t + 1 < k; ++t)
      for (std::size_t s = t + 1; s < k; ++s)
        if (d.at(s, s) % d.at(t, t) != 0) {
          clean = false;
          // col t += col s, then clear the 2x2 block to diag(gcd, lcm)
          for (std::size_t r = 0; r < d.rows(); ++r) d.at(r, t) += d.at(r, s);
          for (std::size_t r = 0; r < res.v.rows(); ++r)
            res.v.at(r, t) += res.v.at(r, s);
          gcd_rows(d, res.u, t, s, t);
          Int q = d.at(t, s) / d.at(t, t);
          for (std::size_t r = 0; r < d.rows(); ++r) d.at(r, s) -= q * d.at(r, t);
          for (std::size_t r = 0; r < res.v.rows(); ++r)
            res.v.at(r, s) -= q * res.v.at(r, t);
          if (d.at(s, s) < 0) {
            d.negate_row(s);
            res.u.negate_row(s);
          }
        }
  }
  return res;
}

std::vector<Int> invariant_factors(const IntMatrix& a) {
  SnfResult s = snf(a);
  std::vector<Int> out;
  std::size_t n = std::min(a.rows(), a.cols());
  for (std::size_t i = 0; i < n; ++i)
    if (s.d.at(i, i) != 0) out.push_back(s.d.at(i, i));
  return out;
}

IntMatrix unimodular_inverse(const IntMatrix& u) {
  HnfResult r = hnf(u);
  if (!r.h.is_identity())
    throw std::invalid_argument("unimodular_inverse: matrix not unimodular");
  return r.u;
}

FinAbGroup cokernel_structure(const IntMatrix& a) {
  SnfResult s = snf(a);
  FinAbGroup g;
  std::size_t n = std::min(a.rows(), a.cols());
  std::size_t rank = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (s.d.at(i, i) != 0) ++rank;
  g.free_rank = a.rows() - rank;
  IntMatrix uinv = unimodular_inverse(s.u);
  std::vector<std::size_t> torsion_idx;
  for (std::size_t i = 0; i < rank; ++i)
    if (s.d.at(i, i) > 1) {
      g.invariant_factors.push_back(s.d.at(i, i));
      torsion_idx.push_back(i);
    }
  IntMatrix gens(torsion_idx.size(), a.rows());
  for (std::size_t k = 0; k < torsion_idx.size(); ++k)
    for (std::size_t r = 0; r < a.rows(); ++r)
      gens.at(k, r) = uinv.at(r, torsion_idx[k]);
  g.generators = std::move(gens);
  return g;
}

IntMatrix kernel_basis(const IntMatrix& a) {
  HnfResult r = hnf(a.transpose());
  std::size_t rank = r.rank();
  std::size_t dim = a.cols();
  IntMatrix out(dim - rank, dim);
  for (std::size_t i = rank; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) out.at(i - rank, j) = r.u.at(i, j);
  return out;
}

IntMatrix intersect_row_lattices(const IntMatrix& a, const IntMatrix& b) {
  if (a.cols() != b.cols())
    throw std::invalid_argument("intersect_row_lattices: column mismatch");
  // x = u a = v b: read (u, v) off the kernel of [a^T | -b^T]
  IntMatrix c(a.cols(), a.rows() + b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c.at(j, i) = a.at(i, j);
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j)
      c.at(j, a.rows() + i) = -b.at(i, j);
  IntMatrix k = kernel_basis(c);
  IntMatrix u = k.submatrix(0, 0, k.rows(), a.rows());
  return row_lattice_basis(u * a);
}

std::optional<IntSolveResult> solve_integer(const IntMatrix& a,
                                            const std::vector<Int>& b) {
  if (b.size() != a.rows()) throw std::invalid_argument("solve_integer: shape");
  SnfResult s = snf(a);
  std::size_t n = std::min(a.rows(), a.cols());
  // d z = u b, x = v z
  std::vector<Int> ub(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.rows(); ++j)
      if (s.u.at(i, j) != 0) ub[i] += s.u.at(i, j) * b[j];
  }
  std::vector<Int> z(a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const Int d = i < n ? s.d.at(i, i) : Int(0);
    if (d == 0) {
      if (ub[i] != 0) return std::nullopt;
    } else {
      if (ub[i] % d != 0) return std::nullopt;
      z[i] = ub[i] / d;
    }
  }
  IntSolveResult out;
  out.particular.assign(a.cols(), Int(0));
  for (std::size_t i = 0; i < a.cols(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (s.v.at(i, j) != 0) out.particular[i] += s.v.at(i, j) * z[j];
  out.kernel = kernel_basis(a);
  return out;
}

std::optional<std::vector<Int>> row_span_coordinates(const IntMatrix& rows,
                                                     const std::vector<Int>& b) {
  if (b.size() != rows.cols())
    throw std::invalid_argument("row_span_coordinates: shape");
  HnfResult r = hnf(rows);
  std::vector<Int> resid = b;
  std::vector<Int> y(rows.rows());  // coords w.r.t. rows of h
  for (std::size_t k = 0; k < r.pivot_cols.size(); ++k) {
    std::size_t c = r.pivot_cols[k];
    const Int& p = r.h.at(k, c);
    if (resid[c] % p != 0) return std::nullopt;
    Int q = resid[c] / p;
    if (q != 0)
      for (std::size_t j = 0; j < rows.cols(); ++j) resid[j] -= q * r.h.at(k, j);
    y[k] = q;
  }
  for (const Int& x : resid)
    if (x != 0) return std::nullopt;
  // b = y * h = y * u * rows
  std::vector<Int> out(rows.rows());
  for (std::size_t j = 0; j < rows.rows(); ++j)
    for (std::size_t k = 0; k < rows.rows(); ++k)
      if (y[k] != 0 && r.u.at(k, j) != 0) out[j] += y[k] * r.u.at(k, j);
  return out;
}

bool in_row_span(const IntMatrix& rows, const std::vector<Int>& b) {
  return row_span_coordinates(rows, b).has_value();
}

IntMatrix row_lattice_basis(const IntMatrix& a) {
  HnfResult r = hnf(a);
  return r.h.submatrix(0, 0, r.rank(), a.cols());
}

bool same_row_lattice(const IntMatrix& a, const IntMatrix& b) {
  return row_lattice_basis(a) == row_lattice_basis(b);
}

namespace {

// full SNF saturation; only used when the pivot product resists factoring
IntMatrix saturate_by_snf(const IntMatrix& a) {
  SnfResult s = snf(a);
  std::size_t n = std::min(a.rows(), a.cols());
  std::size_t rank = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (s.d.at(i, i) != 0) ++rank;
  // a = u^{-1} d v^{-1}; the row space is spanned by d_i * (row i of v^{-1}),
  // so the first `rank` rows of v^{-1} span the saturation
  IntMatrix vinv = unimodular_inverse(s.v);
  IntMatrix first = vinv.submatrix(0, 0, rank, a.cols());
  return row_lattice_basis(first);
}

// saturate the row lattice of h (an HNF basis) at the prime p: repeatedly
// divide left-kernel combinations mod p by p until h has full rank mod p
IntMatrix saturate_at_prime(IntMatrix h, const Int& p) {
  std::size_t d = h.rows(), n = h.cols();
  while (true) {
    // row-reduce h mod p, tracking the left transform
    IntMatrix r = h;
    IntMatrix left = IntMatrix::identity(d);
    std::size_t row = 0;
    for (std::size_t c = 0; c < n && row < d; ++c) {
      std::size_t piv = d;
      for (std::size_t i = row; i < d; ++i)
        if (r.at(i, c) % p != 0) {
          piv = i;
          break;
        }
      if (piv == d) continue;
      r.swap_rows(row, piv);
      left.swap_rows(row, piv);
      Int inv = 0, tmp = 0;  // inverse of the pivot mod p
      mpz_invert(inv.get_mpz_t(), Int(r.at(row, c) % p).get_mpz_t(),
                 p.get_mpz_t());
      for (std::size_t i = row + 1; i < d; ++i) {
        Int f = (r.at(i, c) % p) * inv % p;
        if (f == 0) continue;
        for (std::size_t j = 0; j < n; ++j)
          r.at(i, j) = (r.at(i, j) - f * r.at(row, j)) % p;
        for (std::size_t j = 0; j < d; ++j)
          left.at(i, j) = (left.at(i, j) - f * left.at(row, j)) % p;
        (void)tmp;
      }
      ++row;
    }
    if (row == d) return h;  // full rank mod p: saturated at p
    IntMatrix extra(d - row, n);
    for (std::size_t i = row; i < d; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        Int v = 0;
        for (std::size_t t = 0; t < d; ++t)
          v += left.at(i, t) * h.at(t, j);
        extra.at(i - row, j) = v / p;  // exact: the combination is 0 mod p
      }
    h = row_lattice_basis(h.vstack(extra));
  }
}

}  // namespace

IntMatrix saturate_row_lattice(const IntMatrix& a) {
  IntMatrix h = row_lattice_basis(a);
  std::size_t d = h.rows(), n = h.cols();
  if (d == 0) return h;
  // only primes dividing the product of the HNF pivots can occur in the
  // index of the row lattice inside its saturation
  Int prod = 1;
  {
    std::size_t c = 0;
    for (std::size_t i = 0; i < d; ++i) {
      while (c < n && h.at(i, c) == 0) ++c;
      prod *= h.at(i, c++);
    }
  }
  std::vector<Int> primes;
  Int rest = prod;
  for (unsigned long q = 2; q < 1000000 && Int(q) * Int(q) <= rest; ++q)
    if (rest % q == 0) {
      primes.emplace_back(q);
      while (rest % q == 0) rest /= q;
    }
  if (rest > 1) {
    if (mpz_probab_prime_p(rest.get_mpz_t(), 30) == 0)
      return saturate_by_snf(a);  // unfactored composite cofactor
    primes.push_back(rest);
  }
  for (const Int& p : primes) h = saturate_at_prime(std::move(h), p);
  return h;
}

IntMatrix lll_reduce(IntMatrix basis) {
  using Q = mpq_class;
  std::size_t n = basis.rows(), dim = basis.cols();
  if (n <= 1) return basis;
  auto dot = [&](std::size_t i, std::size_t j) {
    Int s = 0;
    for (std::size_t c = 0; c < dim; ++c) s += basis.at(i, c) * basis.at(j, c);
    return s;
  };
  // Gram-Schmidt data: mu (lower triangular) and squared lengths of b*_i
  std::vector<std::vector<Q>> mu(n, std::vector<Q>(n, 0));
  std::vector<Q> bstar(n, 0);
  auto gs_row = [&](std::size_t i) {
    for (std::size_t j = 0; j < i; ++j) {
      Q s = Q(dot(i, j));
      for (std::size_t k = 0; k < j; ++k) s -= mu[i][k] * mu[j][k] * bstar[k];
      if (bstar[j] == 0)
        throw std::invalid_argument("lll_reduce: dependent rows");
      mu[i][j] = s / bstar[j];
    }
    Q s = Q(dot(i, i));
    for (std::size_t k = 0; k < i; ++k) s -= mu[i][k] * mu[i][k] * bstar[k];
    bstar[i] = s;
  };
  for (std::size_t i = 0; i < n; ++i) gs_row(i);
  for (std::size_t i = 0; i < n; ++i)
    if (bstar[i] == 0) throw std::invalid_argument("lll_reduce: dependent rows");

  auto size_reduce = [&](std::size_t k, std::size_t j) {
    Q m = mu[k][j];
    // nearest integer to m
    Int r, num = 2 * m.get_num() + m.get_den(), den = 2 * m.get_den();
    mpz_fdiv_q(r.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    if (r == 0) return;
    basis.add_row_multiple(k, j, -r);
    mu[k][j] -= Q(r);
    for (std::size_t i = 0; i < j; ++i) mu[k][i] -= Q(r) * mu[j][i];
  };

  const Q delta(3, 4);
  std::size_t k = 1;
  while (k < n) {
    size_reduce(k, k - 1);
    if (bstar[k] >= (delta - mu[k][k - 1] * mu[k][k - 1]) * bstar[k - 1]) {
      for (std::size_t j = k - 1; j-- > 0;) size_reduce(k, j);
      ++k;
    } else {
      // swap rows k-1 and k, updating the Gram-Schmidt data in place
      Q m = mu[k][k - 1];
      Q bk = bstar[k] + m * m * bstar[k - 1];
      mu[k][k - 1] = m * bstar[k - 1] / bk;
      bstar[k] = bstar[k - 1] * bstar[k] / bk;
      bstar[k - 1] = bk;
      basis.swap_rows(k - 1, k);
      for (std::size_t j = 0; j + 1 < k; ++j) std::swap(mu[k - 1][j], mu[k][j]);
      for (std::size_t i = k + 1; i < n; ++i) {
        Q t = mu[i][k];
        mu[i][k] = mu[i][k - 1] - m * t;
        mu[i][k - 1] = t + mu[k][k - 1] * mu[i][k];
      }
      if (k > 1) --k;
    }
  }
  return basis;
}

FinAbGroup quotient_structure(const IntMatrix& gens, const IntMatrix& rels) {
  IntMatrix basis = row_lattice_basis(gens);
  std::size_t r = basis.rows();
  // basis is in HNF: coordinates come from one back-substitution per row
  std::vector<std::size_t> piv(r);
  {
    std::size_t c = 0;
    for (std::size_t i = 0; i < r; ++i) {
      while (c < basis.cols() && basis.at(i, c) == 0) ++c;
      piv[i] = c++;
    }
  }
  IntMatrix coeff(rels.rows(), r);
  for (std::size_t i = 0; i < rels.rows(); ++i) {
    std::vector<Int> resid(rels.cols());
    for (std::size_t j = 0; j < rels.cols(); ++j) resid[j] = rels.at(i, j);
    for (std::size_t k = 0; k < r; ++k) {
      const Int& p = basis.at(k, piv[k]);
      if (resid[piv[k]] % p != 0)
        throw std::invalid_argument("quotient_structure: rels not inside gens");
      Int q = resid[piv[k]] / p;
      if (q != 0)
        for (std::size_t j = piv[k]; j < rels.cols(); ++j)
          resid[j] -= q * basis.at(k, j);
      coeff.at(i, k) = std::move(q);
    }
    for (const Int& x : resid)
      if (x != 0)
        throw std::invalid_argument("quotient_structure: rels not inside gens");
  }
  FinAbGroup q = cokernel_structure(coeff.transpose());
  if (q.generators) {
    // lift generators to ambient coordinates
    IntMatrix amb(q.generators->rows(), gens.cols());
    for (std::size_t i = 0; i < q.generators->rows(); ++i)
      for (std::size_t j = 0; j < gens.cols(); ++j)
        for (std::size_t k = 0; k < r; ++k)
          amb.at(i, j) += q.generators->at(i, k) * basis.at(k, j);
    q.generators = std::move(amb);
  }
  return q;
}

}  // namespace torat
