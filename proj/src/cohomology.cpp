#include "torat/cohomology.hpp"

#include <algorithm>
#include <cstdint>
#include <map>

#include "torat/zmod.hpp"

namespace torat {

namespace {

void check_subgroup_of(const FiniteGroup& g, const SubgroupHandle& h) {
  if (!h.parent || !same_group(g, *h.parent))
    throw NotASubgroup("subgroup handle belongs to a different group");
}

std::vector<std::pair<std::uint64_t, std::uint64_t>> prime_powers(
    std::uint64_t n) {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
  for (std::uint64_t p = 2; p * p <= n; ++p)
    if (n % p == 0) {
      std::uint64_t k = 0;
      while (n % p == 0) {
        n /= p;
        ++k;
      }
      out.emplace_back(p, k);
    }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

std::uint64_t valuation(std::uint64_t n, std::uint64_t p) {
  std::uint64_t v = 0;
  while (n % p == 0) {
    n /= p;
    ++v;
  }
  return v;
}

std::uint64_t upow(std::uint64_t p, std::uint64_t k) {
  std::uint64_t r = 1;
  while (k--) r *= p;
  return r;
}

// Leading-generator words: every x != e decomposes as x = gens[genpos[x]] *
// prev[x] with prev earlier in BFS order.
struct Lead {
  std::vector<std::size_t> gens;  // generator element indices
  std::vector<std::uint32_t> genpos, prev;
  std::vector<std::size_t> order;  // BFS order from the identity
};

Lead lead_words(const FiniteGroup& g) {
  Lead lw;
  lw.gens = g.generator_indices();
  std::size_t n = g.order();
  lw.genpos.assign(n, 0);
  lw.prev.assign(n, 0);
  std::vector<char> seen(n, 0);
  seen[g.identity()] = 1;
  lw.order.push_back(g.identity());
  for (std::size_t qi = 0; qi < lw.order.size(); ++qi) {
    std::size_t x = lw.order[qi];
    for (std::size_t s = 0; s < lw.gens.size(); ++s) {
      std::size_t y = g.mult(lw.gens[s], x);
      if (seen[y]) continue;
      seen[y] = 1;
      lw.genpos[y] = static_cast<std::uint32_t>(s);
      lw.prev[y] = static_cast<std::uint32_t>(x);
      lw.order.push_back(y);
    }
  }
  return lw;
}

// Normalized 2-cocycles are parameterized by their generator rows
// u(s, y) = f(gens[s], y); unknown index:
inline std::uint32_t uidx(std::size_t s, std::size_t y, std::size_t n) {
  return static_cast<std::uint32_t>(s * n + y);
}

// integer linear functional of the unknowns u
using Lin = std::vector<std::pair<std::uint32_t, long long>>;

Lin compress(Lin v) {
  std::sort(v.begin(), v.end());
  Lin out;
  for (const auto& e : v) {
    if (!out.empty() && out.back().first == e.first)
      out.back().second += e.second;
    else
      out.push_back(e);
  }
  out.erase(std::remove_if(out.begin(), out.end(),
                           [](const auto& e) { return e.second == 0; }),
            out.end());
  return out;
}

// f(x, y) as a functional of u, via f(s q, y) = f(q, y) + u(s, qy) - u(s, q)
std::vector<Lin> build_cells(const FiniteGroup& g, const Lead& lw) {
  std::size_t n = g.order();
  std::vector<Lin> cells(n * n);
  for (std::size_t x : lw.order) {
    if (x == g.identity()) continue;
    std::size_t s = lw.genpos[x], q = lw.prev[x];
    for (std::size_t y = 0; y < n; ++y) {
      Lin v = cells[q * n + y];
      v.emplace_back(uidx(s, g.mult(q, y), n), 1);
      v.emplace_back(uidx(s, q, n), -1);
      cells[x * n + y] = compress(std::move(v));
    }
  }
  return cells;
}

SparseVec lin_to_sparse(const Lin& v, const PrimePowerRing& ring) {
  SparseVec out;
  for (const auto& e : v) {
    std::uint64_t c = ring.reduce(e.second);
    if (c) out.push_back({e.first, c});
  }
  return out;
}

// rows of the cocycle system: delta f(s, h, k) = 0 for generators s plus the
// normalization u(s, e) = 0
std::vector<SparseVec> cocycle_rows(const FiniteGroup& g, const Lead& lw,
                                    const std::vector<Lin>& cells,
                                    const PrimePowerRing& ring) {
  std::size_t n = g.order();
  std::vector<SparseVec> rows;
  for (std::size_t s = 0; s < lw.gens.size(); ++s) {
    rows.push_back({{uidx(s, g.identity(), n), 1}});
    std::size_t es = lw.gens[s];
    for (std::size_t h = 0; h < n; ++h) {
      std::size_t sh = g.mult(es, h);
      for (std::size_t k = 0; k < n; ++k) {
        Lin v = cells[h * n + k];
        for (const auto& e : cells[sh * n + k]) v.emplace_back(e.first, -e.second);
        v.emplace_back(uidx(s, g.mult(h, k), n), 1);
        v.emplace_back(uidx(s, h, n), -1);
        SparseVec r = lin_to_sparse(compress(std::move(v)), ring);
        if (!r.empty()) rows.push_back(std::move(r));
      }
    }
  }
  return rows;
}

// Generators of the subspace of u-vectors (mod p^a) killed in H^2(G, Q/Z):
// those with p^b * u = delta g on generator cells for some cochain
// g: G -> Z/p^(a+b).
std::vector<ZVec> killer_gens(const FiniteGroup& g, const Lead& lw,
                              std::uint64_t p, std::uint64_t a,
                              std::uint64_t b) {
  std::size_t n = g.order();
  std::size_t U = lw.gens.size() * n;
  PrimePowerRing rab(p, a + b);
  std::uint64_t pb = upow(p, b), pa = upow(p, a);
  auto gcol = [&](std::size_t z) {
    return static_cast<std::uint32_t>(U + (z < g.identity() ? z : z - 1));
  };
  std::vector<SparseVec> rows;
  for (std::size_t s = 0; s < lw.gens.size(); ++s) {
    std::size_t es = lw.gens[s];
    for (std::size_t y = 0; y < n; ++y) {
      std::map<std::uint32_t, long long> acc;
      acc[uidx(s, y, n)] += static_cast<long long>(pb);
      if (y != g.identity()) acc[gcol(y)] -= 1;
      std::size_t sy = g.mult(es, y);
      if (sy != g.identity()) acc[gcol(sy)] += 1;
      acc[gcol(es)] -= 1;
      SparseVec r;
      for (const auto& [c, v] : acc) {
        std::uint64_t rv = rab.reduce(v);
        if (rv) r.push_back({c, rv});
      }
      if (!r.empty()) rows.push_back(std::move(r));
    }
  }
  std::vector<ZVec> out;
  for (const auto& v : kernel_mod(rab, rows, U + n - 1)) {
    ZVec u(U);
    bool nz = false;
    for (std::size_t i = 0; i < U; ++i) {
      u[i] = v[i] % pa;
      nz |= (u[i] != 0);
    }
    if (nz) out.push_back(std::move(u));
  }
  return out;
}

// full normalized table from the generator rows u (values mod q)
std::vector<std::uint64_t> table_from_u(const FiniteGroup& g, const Lead& lw,
                                        const ZVec& u, std::uint64_t q) {
  std::size_t n = g.order();
  std::vector<std::uint64_t> tab(n * n, 0);
  for (std::size_t x : lw.order) {
    if (x == g.identity()) continue;
    std::size_t s = lw.genpos[x], qe = lw.prev[x];
    for (std::size_t y = 0; y < n; ++y)
      tab[x * n + y] = (tab[qe * n + y] + u[uidx(s, g.mult(qe, y), n)] + q -
                        u[uidx(s, qe, n)]) %
                       q;
  }
  return tab;
}

// canonical residue of u modulo the killer space
ZVec reduce_u(const HowellBasis& wh, const ZVec& u) {
  SparseVec s = to_sparse(u);
  wh.canonicalize(s);
  return to_dense(s, u.size());
}

// coordinates of w in the span of canonical Howell rows (sorted by pivot
// column, pivot values p^j); throws if w is outside the span
std::vector<std::uint64_t> howell_coords(const std::vector<ZVec>& rows,
                                         const std::vector<std::uint32_t>& pivcol,
                                         const PrimePowerRing& ring, ZVec w) {
  std::vector<std::uint64_t> out(rows.size(), 0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::uint64_t piv = rows[i][pivcol[i]];
    std::uint64_t v = w[pivcol[i]];
    if (v == 0) continue;
    if (v % piv != 0) throw std::logic_error("howell_coords: not in span");
    std::uint64_t c = v / piv;
    out[i] = c;
    for (std::size_t j = pivcol[i]; j < w.size(); ++j)
      w[j] = ring.sub(w[j], ring.mul(c, rows[i][j]));
  }
  for (auto v : w)
    if (v) throw std::logic_error("howell_coords: remainder outside span");
  return out;
}

// span(zc)/span(kill) inside (Z/p^k)^U as an abelian p-group, with generator
// lifts in the ambient coordinates.  Much faster than the generic integer
// quotient: a Smith form over the local ring Z/p^k in word arithmetic.
FinAbGroup quotient_structure_p(const std::vector<ZVec>& zc,
                                const std::vector<ZVec>& kill, std::size_t U,
                                const PrimePowerRing& ring) {
  HowellBasis hb(ring, U);
  for (const auto& r : zc) hb.insert(r);
  std::vector<ZVec> g = hb.canonical_rows();
  std::size_t z = g.size();
  FinAbGroup out;
  if (z == 0) return out;
  std::vector<std::uint32_t> pivcol(z);
  for (std::size_t i = 0; i < z; ++i) {
    std::uint32_t c = 0;
    while (g[i][c] == 0) ++c;
    pivcol[i] = c;
  }
  // presentation of the quotient on the classes of the Howell rows: each row
  // has order p^(k-j), plus one relation per killer
  std::vector<ZVec> rel;
  for (std::size_t i = 0; i < z; ++i) {
    std::uint64_t ord = ring.m / g[i][pivcol[i]];  // p^(k-j)
    ZVec w(U);
    for (std::size_t j = 0; j < U; ++j) w[j] = ring.mul(ord % ring.m, g[i][j]);
    ZVec r = howell_coords(g, pivcol, ring, std::move(w));
    for (auto& v : r) v = ring.neg(v);
    r[i] = ring.add(r[i], ord % ring.m);
    rel.push_back(std::move(r));
  }
  for (const auto& kr : kill)
    rel.push_back(howell_coords(g, pivcol, ring, kr));
  // Smith form over Z/p^k of the relation matrix, tracking the inverse row
  // transform to lift quotient generators back to combinations of the rows
  std::size_t nrel = rel.size();
  std::vector<ZVec> a(z, ZVec(nrel, 0));
  for (std::size_t r = 0; r < nrel; ++r)
    for (std::size_t i = 0; i < z; ++i) a[i][r] = rel[r][i];
  std::vector<ZVec> uinv(z, ZVec(z, 0));
  for (std::size_t i = 0; i < z; ++i) uinv[i][i] = 1;
  std::vector<std::uint64_t> dval;
  std::size_t t = 0;
  while (t < z && t < nrel) {
    std::uint64_t best = ring.k;
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = t; i < z; ++i)
      for (std::size_t j = t; j < nrel; ++j) {
        if (a[i][j] == 0) continue;
        std::uint64_t v = ring.val(a[i][j]);
        if (v < best) {
          best = v;
          bi = i;
          bj = j;
        }
      }
    if (best >= ring.k) break;
    std::swap(a[t], a[bi]);
    for (std::size_t r = 0; r < z; ++r) std::swap(uinv[r][t], uinv[r][bi]);
    for (std::size_t i = 0; i < z; ++i) std::swap(a[i][t], a[i][bj]);
    std::uint64_t pw = 1;
    for (std::uint64_t e = 0; e < best; ++e) pw *= ring.p;
    std::uint64_t unit = a[t][t] / pw;
    std::uint64_t winv = ring.unit_inverse(unit);
    for (std::size_t j = t; j < nrel; ++j) a[t][j] = ring.mul(a[t][j], winv);
    for (std::size_t r = 0; r < z; ++r) uinv[r][t] = ring.mul(uinv[r][t], unit);
    for (std::size_t i = t + 1; i < z; ++i) {
      if (a[i][t] == 0) continue;
      std::uint64_t c = a[i][t] / pw;
      for (std::size_t j = t; j < nrel; ++j)
        a[i][j] = ring.sub(a[i][j], ring.mul(c, a[t][j]));
      for (std::size_t r = 0; r < z; ++r)
        uinv[r][t] = ring.add(uinv[r][t], ring.mul(c, uinv[r][i]));
    }
    for (std::size_t j = t + 1; j < nrel; ++j) {
      if (a[t][j] == 0) continue;
      std::uint64_t c = a[t][j] / pw;
      for (std::size_t i = t; i < z; ++i)
        a[i][j] = ring.sub(a[i][j], ring.mul(c, a[i][t]));
    }
    dval.push_back(best);
    ++t;
  }
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < z; ++i) {
    std::uint64_t v = i < dval.size() ? dval[i] : ring.k;
    if (v == 0) continue;
    std::uint64_t f = 1;
    for (std::uint64_t e = 0; e < v; ++e) f *= ring.p;
    out.invariant_factors.emplace_back(f);
    keep.push_back(i);
  }
  IntMatrix gens(keep.size(), U);
  for (std::size_t r = 0; r < keep.size(); ++r)
    for (std::size_t j = 0; j < U; ++j) {
      std::uint64_t v = 0;
      for (std::size_t i = 0; i < z; ++i)
        v = ring.add(v, ring.mul(uinv[i][keep[r]], g[i][j]));
      gens.at(r, j) = v;
    }
  out.generators = std::move(gens);
  return out;
}

}  // namespace

FinAbGroup tate0(const SubgroupHandle& h, const GLattice& m) {
  check_subgroup_of(m.group(), h);
  if (m.rank() == 0 || h.order() == 1) return {};
  IntMatrix fixed = fixed_sublattice(m, h.elements);
  IntMatrix norm_rows =
      row_lattice_basis(m.norm_matrix(h.elements).transpose());
  return quotient_structure(fixed, norm_rows);
}

FinAbGroup tate_minus1(const SubgroupHandle& h, const GLattice& m) {
  check_subgroup_of(m.group(), h);
  if (m.rank() == 0 || h.order() == 1) return {};
  IntMatrix ker = kernel_basis(m.norm_matrix(h.elements));
  IntMatrix aug(0, m.rank());
  IntMatrix id = IntMatrix::identity(m.rank());
  for (auto e : h.elements) {
    if (e == m.group().identity()) continue;
    aug = aug.vstack((m.action(e) - id).transpose());
  }
  return quotient_structure(ker, row_lattice_basis(aug));
}

FinAbGroup h1(const SubgroupHandle& h, const GLattice& m) {
  check_subgroup_of(m.group(), h);
  if (m.rank() == 0 || h.order() == 1) return {};
  GLattice r = restrict_lattice(m, h);
  const FiniteGroup& s = r.group();
  std::size_t k = s.order(), rr = r.rank();
  // induced lattice Z[H] (x) M with the diagonal action
  std::vector<IntMatrix> tacts(k);
  for (std::size_t e = 0; e < k; ++e) {
    IntMatrix t(k * rr, k * rr);
    const IntMatrix& a = r.action(e);
    for (std::size_t x = 0; x < k; ++x) {
      std::size_t ex = s.mult(e, x);
      for (std::size_t i = 0; i < rr; ++i)
        for (std::size_t j = 0; j < rr; ++j)
          t.at(ex * rr + i, x * rr + j) = a.at(i, j);
    }
    tacts[e] = std::move(t);
  }
  GLattice ind = GLattice::from_element_actions(r.group_ptr(), std::move(tacts),
                                                "derived");
  // equivariant split embedding m -> sum_x x (x) m
  IntMatrix embed(k * rr, rr);
  for (std::size_t x = 0; x < k; ++x)
    for (std::size_t i = 0; i < rr; ++i) embed.at(x * rr + i, i) = 1;
  GLattice shifted = quotient_lattice(ind, embed);
  return tate0(full_subgroup(s), shifted);
}

void validate_cocycle(const CocycleClass2& c) {
  const FiniteGroup& g = *c.group;
  std::size_t n = g.order();
  if (c.modulus == 0 || c.table.size() != n * n)
    throw InvalidDescriptor("cocycle table of wrong size");
  for (auto v : c.table)
    if (v >= c.modulus) throw InvalidDescriptor("cocycle value out of range");
  for (std::size_t x = 0; x < n; ++x)
    if (c.at(g.identity(), x) != 0 || c.at(x, g.identity()) != 0)
      throw InvalidDescriptor("cocycle not normalized");
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t d = 0; d < n; ++d) {
        // f(b,d) - f(ab,d) + f(a,bd) - f(a,b) = 0
        std::uint64_t lhs =
            (c.at(b, d) + c.at(a, g.mult(b, d)) + 2 * c.modulus -
             c.at(g.mult(a, b), d) - c.at(a, b)) %
            c.modulus;
        if (lhs != 0) throw InvalidDescriptor("cocycle identity fails");
      }
}

H2Result h2_qz(GroupPtr g, std::size_t order_budget) {
  const FiniteGroup& gr = *g;
  std::size_t n = gr.order();
  if (n > order_budget)
    throw OrderBudgetExceeded("h2_qz: group order exceeds budget");
  H2Result res;
  if (n == 1) return res;
  std::uint64_t m = n;
  Lead lw = lead_words(gr);
  std::vector<Lin> cells = build_cells(gr, lw);
  std::size_t U = lw.gens.size() * n;

  // per prime: ascending invariant factors with canonical generator tables
  std::vector<std::vector<std::pair<Int, std::vector<std::uint64_t>>>> parts;
  for (auto [p, k] : prime_powers(m)) {
    std::uint64_t pa = upow(p, k);
    PrimePowerRing ring(p, k);
    std::vector<ZVec> zc = kernel_mod(ring, cocycle_rows(gr, lw, cells, ring), U);
    std::vector<ZVec> kill = killer_gens(gr, lw, p, k, k);
    HowellBasis wh(ring, U);
    for (const auto& w : kill) wh.insert(w);
    FinAbGroup q = quotient_structure_p(zc, kill, U, ring);
    std::vector<std::pair<Int, std::vector<std::uint64_t>>> part;
    for (std::size_t i = 0; i < q.invariant_factors.size(); ++i) {
      ZVec u(U);
      for (std::size_t j = 0; j < U; ++j) {
        Int v = q.generators->at(i, j) % pa;
        if (v < 0) v += pa;
        u[j] = v.get_ui();
      }
      u = reduce_u(wh, u);
      std::vector<std::uint64_t> tab = table_from_u(gr, lw, u, pa);
      for (auto& t : tab) t = t * (m / pa) % m;
      part.emplace_back(q.invariant_factors[i], std::move(tab));
    }
    if (!part.empty()) parts.push_back(std::move(part));
  }

  // CRT-merge the per-prime chains, aligning largest factors
  std::size_t len = 0;
  for (const auto& p : parts) len = std::max(len, p.size());
  for (std::size_t i = 0; i < len; ++i) {
    Int factor = 1;
    std::vector<std::uint64_t> tab(n * n, 0);
    for (const auto& p : parts) {
      if (p.size() + i < len) continue;
      const auto& [f, t] = p[p.size() - (len - i)];
      factor *= f;
      for (std::size_t j = 0; j < tab.size(); ++j) tab[j] = (tab[j] + t[j]) % m;
    }
    res.structure.invariant_factors.push_back(factor);
    res.generators.push_back(CocycleClass2{g, m, std::move(tab)});
  }
  return res;
}

CocycleClass2 restrict_h2(const CocycleClass2& c, const SubgroupHandle& a) {
  const FiniteGroup& g = *c.group;
  check_subgroup_of(g, a);
  GroupPtr sp = share(subgroup_to_group(a));
  std::size_t na = sp->order();
  std::uint64_t m = c.modulus;
  std::vector<std::uint64_t> rt(na * na);
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < na; ++j)
      rt[i * na + j] = c.at(a.elements[i], a.elements[j]);
  if (na == 1) return CocycleClass2{std::move(sp), m, std::move(rt)};

  Lead lw = lead_words(*sp);
  std::size_t U = lw.gens.size() * na;
  std::vector<std::uint64_t> out(na * na, 0);
  for (auto [p, av] : prime_powers(m)) {
    std::uint64_t pa = upow(p, av);
    std::uint64_t bv = valuation(na, p);
    PrimePowerRing ring(p, av);
    // p-component of the restricted table via the CRT idempotent
    std::uint64_t cp = ring.unit_inverse((m / pa) % pa);
    ZVec u(U);
    for (std::size_t s = 0; s < lw.gens.size(); ++s)
      for (std::size_t y = 0; y < na; ++y)
        u[uidx(s, y, na)] = rt[lw.gens[s] * na + y] % pa * cp % pa;
    HowellBasis wh(ring, U);
    for (const auto& w : killer_gens(*sp, lw, p, av, bv)) wh.insert(w);
    u = reduce_u(wh, u);
    std::vector<std::uint64_t> tab = table_from_u(*sp, lw, u, pa);
    for (std::size_t j = 0; j < out.size(); ++j)
      out[j] = (out[j] + tab[j] * (m / pa)) % m;
  }
  return CocycleClass2{std::move(sp), m, std::move(out)};
}

bool is_coboundary(const CocycleClass2& c) {
  const FiniteGroup& g = *c.group;
  std::size_t n = g.order();
  if (n == 1) return true;
  bool allzero = true;
  for (auto v : c.table) allzero &= (v == 0);
  if (allzero) return true;
  for (auto [p, av] : prime_powers(c.modulus)) {
    std::uint64_t pa = upow(p, av);
    std::uint64_t bv = valuation(n, p);
    PrimePowerRing ring(p, av);
    PrimePowerRing rab(p, av + bv);
    std::uint64_t pb = upow(p, bv);
    std::uint64_t cp = ring.unit_inverse((c.modulus / pa) % pa);
    auto gcol = [&](std::size_t z) {
      return static_cast<std::uint32_t>(z < g.identity() ? z : z - 1);
    };
    std::vector<SparseVec> rows;
    ZVec rhs;
    for (std::size_t x = 0; x < n; ++x) {
      if (x == g.identity()) continue;
      for (std::size_t y = 0; y < n; ++y) {
        if (y == g.identity()) continue;
        std::map<std::uint32_t, long long> acc;
        acc[gcol(x)] += 1;
        acc[gcol(y)] += 1;
        std::size_t xy = g.mult(x, y);
        if (xy != g.identity()) acc[gcol(xy)] -= 1;
        SparseVec r;
        for (const auto& [col, v] : acc) {
          std::uint64_t rv = rab.reduce(v);
          if (rv) r.push_back({col, rv});
        }
        rows.push_back(std::move(r));
        rhs.push_back(c.at(x, y) % pa * cp % pa * pb % rab.m);
      }
    }
    if (!solve_mod_prime_power(rab, rows, n - 1, rhs)) return false;
  }
  return true;
}

IntMatrix coboundary_kernel(const std::vector<CocycleClass2>& cs) {
  std::size_t t = cs.size();
  if (t == 0) return IntMatrix(0, 0);
  const FiniteGroup& g = *cs.front().group;
  std::uint64_t m = cs.front().modulus;
  std::size_t n = g.order();
  for (const auto& c : cs) {
    if (c.group.get() != &g || c.modulus != m)
      throw InvalidDescriptor("coboundary_kernel: mixed groups or moduli");
    if (c.table.size() != n * n)
      throw InvalidDescriptor("coboundary_kernel: table of wrong size");
  }
  IntMatrix lat = IntMatrix::identity(t);
  if (n == 1) return lat;
  // columns 0..t-1 carry x, the rest the cochain g (identity cell dropped)
  auto gcol = [&](std::size_t z) {
    return static_cast<std::uint32_t>(t + (z < g.identity() ? z : z - 1));
  };
  for (auto [p, av] : prime_powers(m)) {
    std::uint64_t pa = upow(p, av);
    std::uint64_t bv = valuation(n, p);
    std::uint64_t pb = upow(p, bv);
    PrimePowerRing ring(p, av);
    PrimePowerRing rab(p, av + bv);
    std::uint64_t cp = ring.unit_inverse((m / pa) % pa);
    std::vector<SparseVec> rows;
    for (std::size_t x = 0; x < n; ++x) {
      if (x == g.identity()) continue;
      for (std::size_t y = 0; y < n; ++y) {
        if (y == g.identity()) continue;
        // sum_i x_i * pb * (p-part of c_i(x,y)) - delta g(x,y) = 0
        std::map<std::uint32_t, long long> acc;
        for (std::size_t i = 0; i < t; ++i) {
          std::uint64_t s = cs[i].at(x, y) % pa * cp % pa * pb % rab.m;
          if (s) acc[static_cast<std::uint32_t>(i)] += static_cast<long long>(s);
        }
        acc[gcol(x)] -= 1;
        acc[gcol(y)] -= 1;
        std::size_t xy = g.mult(x, y);
        if (xy != g.identity()) acc[gcol(xy)] += 1;
        SparseVec r;
        for (const auto& [col, v] : acc) {
          std::uint64_t rv = rab.reduce(v);
          if (rv) r.push_back({col, rv});
        }
        if (!r.empty()) rows.push_back(std::move(r));
      }
    }
    std::vector<ZVec> ker = kernel_mod(rab, rows, t + n - 1);
    IntMatrix lp(ker.size() + t, t);
    for (std::size_t r = 0; r < ker.size(); ++r)
      for (std::size_t i = 0; i < t; ++i) lp.at(r, i) = ker[r][i];
    for (std::size_t i = 0; i < t; ++i) lp.at(ker.size() + i, i) = rab.m;
    lat = intersect_row_lattices(lat, row_lattice_basis(lp));
  }
  return lat;
}

}  // namespace torat
