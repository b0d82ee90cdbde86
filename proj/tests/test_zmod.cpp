#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "torat/int_matrix.hpp"
#include "torat/zmod.hpp"

using namespace torat;

namespace {

ZVec apply(const PrimePowerRing& ring, const std::vector<SparseVec>& rows,
           const ZVec& x) {
  ZVec out(rows.size(), 0);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (const auto& e : rows[i])
      out[i] = ring.add(out[i], ring.mul(e.val, x[e.col]));
  return out;
}

// Exhaustive solution set of A x = b, for tiny ncols.
std::set<ZVec> brute_solutions(const PrimePowerRing& ring,
                               const std::vector<SparseVec>& rows,
                               std::size_t ncols, const ZVec& b) {
  std::set<ZVec> out;
  ZVec x(ncols, 0);
  while (true) {
    if (apply(ring, rows, x) == b) out.insert(x);
    std::size_t i = 0;
    while (i < ncols && ++x[i] == ring.m) x[i++] = 0;
    if (i == ncols) break;
  }
  return out;
}

// Exhaustive span of a small spanning set.
std::set<ZVec> brute_span(const PrimePowerRing& ring,
                          const std::vector<ZVec>& gens, std::size_t ncols) {
  std::set<ZVec> out{ZVec(ncols, 0)};
  std::vector<ZVec> queue{ZVec(ncols, 0)};
  while (!queue.empty()) {
    ZVec v = std::move(queue.back());
    queue.pop_back();
    for (const auto& g : gens) {
      ZVec w(ncols);
      for (std::size_t j = 0; j < ncols; ++j) w[j] = ring.add(v[j], g[j]);
      if (out.insert(w).second) queue.push_back(w);
    }
  }
  return out;
}

std::vector<SparseVec> random_sparse(std::mt19937_64& rng,
                                     const PrimePowerRing& ring,
                                     std::size_t nrows, std::size_t ncols,
                                     std::size_t weight) {
  std::vector<SparseVec> rows(nrows);
  for (auto& r : rows) {
    std::set<std::uint32_t> cols;
    while (cols.size() < weight)
      cols.insert(static_cast<std::uint32_t>(rng() % ncols));
    for (auto c : cols) {
      std::uint64_t v = rng() % ring.m;
      if (v != 0) r.push_back({c, v});
    }
  }
  return rows;
}

}  // namespace

TEST_CASE("prime power ring arithmetic") {
  PrimePowerRing r(3, 3);  // Z/27
  CHECK(r.m == 27);
  CHECK(r.add(20, 10) == 3);
  CHECK(r.sub(2, 5) == 24);
  CHECK(r.mul(9, 3) == 0);
  CHECK(r.val(18) == 2);
  CHECK(r.val(0) == 3);
  CHECK(r.reduce(-1) == 26);
  for (std::uint64_t u = 1; u < 27; ++u)
    if (u % 3 != 0) CHECK(r.mul(u, r.unit_inverse(u)) == 1);
  CHECK_THROWS(r.unit_inverse(6));
  CHECK_THROWS(PrimePowerRing(2, 40));
}

TEST_CASE("howell basis membership and canonical form") {
  PrimePowerRing ring(2, 3);  // Z/8
  HowellBasis h(ring, 2);
  CHECK(h.insert(ZVec{4, 1}));
  CHECK(!h.insert(ZVec{4, 1}));
  // Howell closure: 2*(4,1) = (0,2) must be recognized as in the span
  CHECK(h.contains(ZVec{0, 2}));
  CHECK(!h.contains(ZVec{0, 1}));
  CHECK(!h.contains(ZVec{2, 0}));

  // canonical form identical regardless of insertion order / spanning set
  std::mt19937_64 rng(31);
  for (int t = 0; t < 50; ++t) {
    PrimePowerRing rr(t % 2 ? 2 : 3, t % 2 ? 3 : 2);
    std::size_t n = 3;
    std::vector<ZVec> gens;
    for (int i = 0; i < 3; ++i) {
      ZVec v(n);
      for (auto& x : v) x = rng() % rr.m;
      gens.push_back(v);
    }
    HowellBasis a(rr, n), b(rr, n);
    for (const auto& g : gens) a.insert(g);
    for (std::size_t i = gens.size(); i-- > 0;) b.insert(gens[i]);
    // also feed b random combinations of the generators
    for (int i = 0; i < 3; ++i) {
      ZVec v(n, 0);
      for (const auto& g : gens) {
        std::uint64_t c = rng() % rr.m;
        for (std::size_t j = 0; j < n; ++j) v[j] = rr.add(v[j], rr.mul(c, g[j]));
      }
      b.insert(v);
    }
    CHECK(a.canonical_rows() == b.canonical_rows());
    // exhaustive span equality on small instances
    std::set<ZVec> sp = brute_span(rr, gens, n);
    std::set<ZVec> sp2 = brute_span(rr, a.canonical_rows(), n);
    CHECK(sp == sp2);
    for (const auto& v : sp) CHECK(a.contains(v));
  }
}

TEST_CASE("canonicalize picks unique coset representatives") {
  // brute check: v and w canonicalize identically iff v - w is in the span
  std::mt19937_64 rng(53);
  for (int t = 0; t < 30; ++t) {
    PrimePowerRing ring(t % 2 ? 2 : 3, t % 2 ? 3 : 2);
    std::size_t n = 3;
    std::vector<ZVec> gens;
    for (int i = 0; i < 2; ++i) {
      ZVec v(n);
      for (auto& x : v) x = rng() % ring.m;
      gens.push_back(v);
    }
    HowellBasis h(ring, n);
    for (const auto& g : gens) h.insert(g);
    std::set<ZVec> span = brute_span(ring, gens, n);
    std::map<ZVec, ZVec> rep_of;  // canonical rep per starting vector
    ZVec v(n, 0);
    while (true) {
      SparseVec s = to_sparse(v);
      h.canonicalize(s);
      rep_of[v] = to_dense(s, n);
      std::size_t i = 0;
      while (i < n && ++v[i] == ring.m) v[i++] = 0;
      if (i == n) break;
    }
    for (const auto& [a, ra] : rep_of) {
      // the representative is in the same coset
      ZVec d(n);
      for (std::size_t j = 0; j < n; ++j) d[j] = ring.sub(a[j], ra[j]);
      CHECK(span.count(d) == 1);
      // same coset <=> same representative, spot-checked against offsets
      for (const auto& g : gens) {
        ZVec b(n);
        for (std::size_t j = 0; j < n; ++j) b[j] = ring.add(a[j], g[j]);
        CHECK(rep_of.at(b) == ra);
      }
      ZVec off = a;
      off[0] = ring.add(off[0], 1);
      if (span.count(ZVec{1, 0, 0}) == 0) CHECK(rep_of.at(off) != ra);
    }
  }
}

TEST_CASE("kernel_mod vs brute force") {
  std::mt19937_64 rng(37);
  for (int t = 0; t < 40; ++t) {
    PrimePowerRing ring(t % 2 ? 2 : 3, t % 2 ? 4 : 2);
    std::size_t nrows = 1 + t % 3, ncols = 2 + t % 2;
    auto rows = random_sparse(rng, ring, nrows, ncols, ncols);
    auto ker = kernel_mod(ring, rows, ncols);
    for (const auto& v : ker) {
      ZVec img = apply(ring, rows, v);
      CHECK(std::all_of(img.begin(), img.end(),
                        [](std::uint64_t x) { return x == 0; }));
    }
    std::set<ZVec> brute =
        brute_solutions(ring, rows, ncols, ZVec(nrows, 0));
    CHECK(brute == brute_span(ring, ker, ncols));
  }
}

TEST_CASE("solve_mod_prime_power examples") {
  {
    PrimePowerRing ring(2, 2);  // Z/4
    auto s = solve_mod_prime_power(ring, {SparseVec{{0, 2}}}, 1, ZVec{2});
    REQUIRE(s.has_value());
    CHECK((s->particular[0] == 1 || s->particular[0] == 3));
    // solution set {1,3}: homogeneous part spans exactly {0,2}
    std::set<ZVec> hom = brute_span(ring, s->homogeneous, 1);
    CHECK(hom == std::set<ZVec>({{0}, {2}}));
    // inconsistent variant
    CHECK(!solve_mod_prime_power(ring, {SparseVec{{0, 2}}}, 1, ZVec{1}));
  }
  {
    PrimePowerRing ring(2, 3);  // Z/8, identity system
    std::vector<SparseVec> id3 = {{{0, 1}}, {{1, 1}}, {{2, 1}}};
    auto s = solve_mod_prime_power(ring, id3, 3, ZVec{5, 7, 0});
    REQUIRE(s.has_value());
    CHECK(s->particular == ZVec{5, 7, 0});
    CHECK(s->homogeneous.empty());
  }
}

TEST_CASE("solve_mod_prime_power vs brute force on small instances") {
  std::mt19937_64 rng(41);
  int consistent = 0;
  for (int t = 0; t < 60; ++t) {
    PrimePowerRing ring(t % 2 ? 2 : 3, t % 2 ? 3 : 2);
    std::size_t nrows = 1 + t % 4, ncols = 2 + t % 2;
    auto rows = random_sparse(rng, ring, nrows, ncols, 1 + t % ncols);
    ZVec b(nrows);
    for (auto& x : b) x = rng() % ring.m;
    auto brute = brute_solutions(ring, rows, ncols, b);
    auto s = solve_mod_prime_power(ring, rows, ncols, b);
    CHECK(s.has_value() == !brute.empty());
    if (!s) continue;
    ++consistent;
    CHECK(brute.count(s->particular) == 1);
    // particular + span(homogeneous) = full solution set
    std::set<ZVec> rebuilt;
    for (const auto& h : brute_span(ring, s->homogeneous, ncols)) {
      ZVec v(ncols);
      for (std::size_t j = 0; j < ncols; ++j)
        v[j] = ring.add(s->particular[j], h[j]);
      rebuilt.insert(v);
    }
    CHECK(rebuilt == brute);
  }
  CHECK(consistent > 5);  // the suite actually exercised the solver
}

TEST_CASE("solve_mod_prime_power 50x50 sparse over Z/27") {
  PrimePowerRing ring(3, 3);
  std::mt19937_64 rng(43);
  for (int t = 0; t < 5; ++t) {
    std::size_t n = 50;
    auto rows = random_sparse(rng, ring, n, n, 4);
    // manufacture a consistent right-hand side
    ZVec x0(n);
    for (auto& v : x0) v = rng() % ring.m;
    ZVec b = apply(ring, rows, x0);
    auto s = solve_mod_prime_power(ring, rows, n, b);
    REQUIRE(s.has_value());
    CHECK(apply(ring, rows, s->particular) == b);
    for (const auto& h : s->homogeneous) {
      ZVec img = apply(ring, rows, h);
      CHECK(std::all_of(img.begin(), img.end(),
                        [](std::uint64_t v) { return v == 0; }));
    }
    // the known solution x0 lies in particular + span(homogeneous)
    HowellBasis hom(ring, n);
    for (const auto& h : s->homogeneous) hom.insert(h);
    ZVec diff(n);
    for (std::size_t j = 0; j < n; ++j) diff[j] = ring.sub(x0[j], s->particular[j]);
    CHECK(hom.contains(diff));
    // independent dense oracle: solution-module size from the integer SNF of
    // the lifted matrix must match the size read off the Howell pivots
    IntMatrix lift(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (const auto& e : rows[i]) lift.at(i, e.col) = e.val;
    Int expected = 1;
    auto sd = snf(lift);
    for (std::size_t i = 0; i < n; ++i) {
      Int g, di = sd.d.at(i, i), mm = (long)ring.m;
      mpz_gcd(g.get_mpz_t(), di.get_mpz_t(), mm.get_mpz_t());
      expected *= (di == 0) ? mm : g;
    }
    Int howell_size = 1;
    for (const auto& h : s->homogeneous) {
      std::size_t lead = 0;
      while (h[lead] == 0) ++lead;
      howell_size *= (long)(ring.m / h[lead]);  // pivot value is a power of p
    }
    CHECK(expected == howell_size);
  }
}
