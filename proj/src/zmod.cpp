#include "torat/zmod.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace torat {

PrimePowerRing::PrimePowerRing(std::uint64_t p_, std::uint64_t k_)
    : p(p_), k(k_), m(1) {
  if (p < 2 || k < 1) throw std::invalid_argument("PrimePowerRing: bad p^k");
  for (std::uint64_t i = 0; i < k; ++i) {
    m *= p;
    if (m >= (std::uint64_t(1) << 31))
      throw std::invalid_argument("PrimePowerRing: modulus too large");
  }
}

std::uint64_t PrimePowerRing::val(std::uint64_t x) const {
  if (x == 0) return k;
  std::uint64_t v = 0;
  while (x % p == 0) {
    x /= p;
    ++v;
  }
  return v;
}

std::uint64_t PrimePowerRing::unit_inverse(std::uint64_t x) const {
  // extended Euclid on (x, m)
  long long a = static_cast<long long>(x % m), b = static_cast<long long>(m);
  long long x0 = 1, x1 = 0;
  while (b != 0) {
    long long q = a / b;
    long long t = a - q * b;
    a = b;
    b = t;
    t = x0 - q * x1;
    x0 = x1;
    x1 = t;
  }
  if (a != 1) throw std::invalid_argument("unit_inverse: not a unit");
  return reduce(x0);
}

SparseVec to_sparse(const ZVec& v) {
  SparseVec s;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] != 0) s.push_back({static_cast<std::uint32_t>(i), v[i]});
  return s;
}

ZVec to_dense(const SparseVec& v, std::size_t ncols) {
  ZVec d(ncols, 0);
  for (const auto& e : v) d[e.col] = e.val;
  return d;
}

namespace {

// v -= c * r, sparse merge.  c reduced mod m; entries becoming zero dropped.
void sub_scaled(const PrimePowerRing& ring, SparseVec& v, std::uint64_t c,
                const SparseVec& r) {
  if (c == 0) return;
  SparseVec out;
  out.reserve(v.size() + r.size());
  std::size_t i = 0, j = 0;
  while (i < v.size() || j < r.size()) {
    if (j == r.size() || (i < v.size() && v[i].col < r[j].col)) {
      out.push_back(v[i++]);
    } else if (i == v.size() || r[j].col < v[i].col) {
      std::uint64_t nv = ring.neg(ring.mul(c, r[j].val));
      if (nv != 0) out.push_back({r[j].col, nv});
      ++j;
    } else {
      std::uint64_t nv = ring.sub(v[i].val, ring.mul(c, r[j].val));
      if (nv != 0) out.push_back({v[i].col, nv});
      ++i;
      ++j;
    }
  }
  v = std::move(out);
}

void scale(const PrimePowerRing& ring, SparseVec& v, std::uint64_t c) {
  SparseVec out;
  out.reserve(v.size());
  for (const auto& e : v) {
    std::uint64_t nv = ring.mul(c, e.val);
    if (nv != 0) out.push_back({e.col, nv});
  }
  v = std::move(out);
}

std::uint64_t pow_u64(std::uint64_t b, std::uint64_t e) {
  std::uint64_t r = 1;
  while (e--) r *= b;
  return r;
}

}  // namespace

bool HowellBasis::insert(SparseVec row) {
  bool grew = false;
  std::vector<SparseVec> work;
  work.push_back(std::move(row));
  while (!work.empty()) {
    SparseVec v = std::move(work.back());
    work.pop_back();
    while (!v.empty()) {
      std::uint32_t c = v[0].col;
      std::uint64_t x = v[0].val;
      std::uint64_t j = ring_.val(x);
      auto it = by_pivot_.find(c);
      if (it != by_pivot_.end()) {
        std::uint64_t piv = it->second[0].val;  // p^i by construction
        if (piv <= pow_u64(ring_.p, j)) {       // i <= j: eliminate
          sub_scaled(ring_, v, x / piv, it->second);
          continue;
        }
        // strictly smaller valuation: new row becomes the pivot row
        std::uint64_t unit = x / pow_u64(ring_.p, j);
        scale(ring_, v, ring_.unit_inverse(unit));
        SparseVec old = std::move(it->second);
        it->second = v;
        grew = true;
        work.push_back(std::move(old));
        if (j > 0) {
          SparseVec ann = it->second;
          scale(ring_, ann, pow_u64(ring_.p, ring_.k - j));
          work.push_back(std::move(ann));
        }
        break;
      }
      // fresh pivot column
      std::uint64_t unit = x / pow_u64(ring_.p, j);
      scale(ring_, v, ring_.unit_inverse(unit));
      auto [pos, ok] = by_pivot_.emplace(c, std::move(v));
      (void)ok;
      grew = true;
      if (j > 0) {
        SparseVec ann = pos->second;
        scale(ring_, ann, pow_u64(ring_.p, ring_.k - j));
        work.push_back(std::move(ann));
      }
      break;
    }
  }
  return grew;
}

void HowellBasis::reduce(SparseVec& row) const {
  while (!row.empty()) {
    std::uint32_t c = row[0].col;
    std::uint64_t x = row[0].val;
    auto it = by_pivot_.find(c);
    if (it == by_pivot_.end()) return;
    std::uint64_t piv = it->second[0].val;
    if (x % piv != 0) return;  // leading coefficient not in the pivot ideal
    sub_scaled(ring_, row, x / piv, it->second);
  }
}

void HowellBasis::canonicalize(SparseVec& row) const {
  std::size_t i = 0;
  while (i < row.size()) {
    std::uint32_t c = row[i].col;
    auto it = by_pivot_.find(c);
    if (it == by_pivot_.end()) {
      ++i;
      continue;
    }
    std::uint64_t q = row[i].val / it->second[0].val;
    if (q == 0) {
      ++i;
      continue;
    }
    sub_scaled(ring_, row, q, it->second);
    // columns left of c are untouched; re-locate the position after c's slot
    i = static_cast<std::size_t>(
        std::lower_bound(row.begin(), row.end(), c,
                         [](const SparseEntry& e, std::uint32_t col) {
                           return e.col < col;
                         }) -
        row.begin());
    if (i < row.size() && row[i].col == c) ++i;
  }
}

bool HowellBasis::contains(const ZVec& row) const {
  SparseVec s = to_sparse(row);
  reduce(s);
  return s.empty();
}

std::vector<SparseVec> HowellBasis::canonical_rows_sparse() const {
  std::vector<SparseVec> rows;
  rows.reserve(by_pivot_.size());
  for (const auto& [c, r] : by_pivot_) rows.push_back(r);
  // reduce entries above each later pivot into [0, pivot value)
  std::vector<std::uint32_t> pcols;
  for (const auto& [c, r] : by_pivot_) pcols.push_back(c);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = i + 1; j < rows.size(); ++j) {
      std::uint32_t c = pcols[j];
      // current value of rows[i] at column c
      auto it = std::lower_bound(
          rows[i].begin(), rows[i].end(), c,
          [](const SparseEntry& e, std::uint32_t col) { return e.col < col; });
      if (it == rows[i].end() || it->col != c) continue;
      std::uint64_t piv = rows[j][0].val;
      std::uint64_t q = it->val / piv;
      if (q != 0) sub_scaled(ring_, rows[i], q, rows[j]);
    }
  return rows;
}

std::vector<ZVec> HowellBasis::canonical_rows() const {
  std::vector<ZVec> out;
  for (const auto& r : canonical_rows_sparse()) out.push_back(to_dense(r, ncols_));
  return out;
}

std::vector<ZVec> kernel_mod(const PrimePowerRing& ring,
                             const std::vector<SparseVec>& rows,
                             std::size_t ncols) {
  HowellBasis h(ring, ncols);
  for (const auto& r : rows) h.insert(r);
  std::vector<SparseVec> hr = h.canonical_rows_sparse();
  std::size_t r = hr.size();
  // x * [H^T | I] = ((H x)^T, x); rows of the Howell form of [H^T | I] whose
  // first r coordinates vanish span the kernel (and only those can).
  HowellBasis b(ring, r + ncols);
  std::vector<ZVec> cols(ncols, ZVec(r, 0));
  for (std::size_t i = 0; i < r; ++i)
    for (const auto& e : hr[i]) cols[e.col][i] = e.val;
  for (std::size_t jcol = 0; jcol < ncols; ++jcol) {
    SparseVec row = to_sparse(cols[jcol]);
    row.push_back({static_cast<std::uint32_t>(r + jcol), 1});
    b.insert(std::move(row));
  }
  std::vector<ZVec> out;
  for (const auto& row : b.canonical_rows_sparse()) {
    if (row[0].col < r) continue;
    ZVec v(ncols, 0);
    for (const auto& e : row) v[e.col - r] = e.val;
    out.push_back(std::move(v));
  }
  return out;
}

std::optional<ModSolveResult> solve_mod_prime_power(
    const PrimePowerRing& ring, const std::vector<SparseVec>& rows,
    std::size_t ncols, const ZVec& b) {
  if (b.size() != rows.size())
    throw std::invalid_argument("solve_mod_prime_power: shape mismatch");
  std::size_t n1 = ncols + 1;
  // augmented rows [-b | A], then a static Markowitz-style column ordering:
  // sparse columns become pivot candidates first, limiting fill-in.
  std::vector<std::size_t> colcount(n1, 0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (b[i] % ring.m != 0) ++colcount[0];
    for (const auto& e : rows[i]) ++colcount[1 + e.col];
  }
  std::vector<std::uint32_t> order(n1);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t x, std::uint32_t y) {
                     return colcount[x] < colcount[y];
                   });
  std::vector<std::uint32_t> newcol(n1);
  for (std::size_t i = 0; i < n1; ++i) newcol[order[i]] = i;

  std::vector<SparseVec> aug;
  aug.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    SparseVec row;
    std::uint64_t bb = ring.reduce(static_cast<long long>(b[i] % ring.m));
    if (bb != 0) row.push_back({newcol[0], ring.neg(bb)});
    for (const auto& e : rows[i]) {
      std::uint64_t v = e.val % ring.m;
      if (v != 0) row.push_back({newcol[1 + e.col], v});
    }
    std::sort(row.begin(), row.end(),
              [](const SparseEntry& a, const SparseEntry& c) {
                return a.col < c.col;
              });
    aug.push_back(std::move(row));
  }
  // insert sparser equations first
  std::stable_sort(aug.begin(), aug.end(),
                   [](const SparseVec& a, const SparseVec& c) {
                     return a.size() < c.size();
                   });
  std::vector<ZVec> ker = kernel_mod(ring, aug, n1);
  // undo the column permutation; coordinate 0 is the homogenizing variable
  std::vector<ZVec> kperm;
  for (const auto& v : ker) {
    ZVec w(n1, 0);
    for (std::size_t i = 0; i < n1; ++i) w[order[i]] = v[i];
    kperm.push_back(std::move(w));
  }
  std::size_t unit_row = kperm.size();
  for (std::size_t i = 0; i < kperm.size(); ++i)
    if (kperm[i][0] % ring.p != 0) {
      unit_row = i;
      break;
    }
  if (unit_row == kperm.size()) return std::nullopt;
  ZVec part = kperm[unit_row];
  std::uint64_t inv = ring.unit_inverse(part[0]);
  for (auto& x : part) x = ring.mul(x, inv);

  ModSolveResult res;
  res.particular.assign(part.begin() + 1, part.end());
  HowellBasis hom(ring, ncols);
  for (const auto& v : kperm) {
    SparseVec s;
    std::uint64_t t = v[0];
    for (std::size_t j = 1; j < n1; ++j) {
      std::uint64_t x = ring.sub(v[j], ring.mul(t, part[j]));
      if (x != 0) s.push_back({static_cast<std::uint32_t>(j - 1), x});
    }
    hom.insert(std::move(s));
  }
  res.homogeneous = hom.canonical_rows();
  return res;
}

}  // namespace torat
