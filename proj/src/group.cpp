#include "torat/group.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <queue>

namespace torat {

namespace {

constexpr std::size_t kTableCap = 5000;  // multiplication table memory limit

std::vector<std::uint32_t> compose_perm(const std::vector<std::uint32_t>& a,
                                        const std::vector<std::uint32_t>& b) {
  std::vector<std::uint32_t> c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[b[i]];
  return c;
}

}  // namespace

FiniteGroup FiniteGroup::from_permutations(
    const std::vector<std::vector<std::uint32_t>>& gens, std::size_t budget) {
  std::size_t deg = gens.empty() ? 1 : gens[0].size();
  for (const auto& g : gens) {
    if (g.size() != deg)
      throw std::invalid_argument("from_permutations: mixed degrees");
    std::vector<bool> seen(deg, false);
    for (auto x : g) {
      if (x >= deg || seen[x])
        throw std::invalid_argument("from_permutations: not a permutation");
      seen[x] = true;
    }
  }
  std::vector<std::uint32_t> id(deg);
  std::iota(id.begin(), id.end(), 0);

  std::map<std::vector<std::uint32_t>, std::size_t> index;
  std::vector<std::vector<std::uint32_t>> elems{id};
  index[id] = 0;
  std::queue<std::size_t> q;
  q.push(0);
  while (!q.empty()) {
    std::size_t x = q.front();
    q.pop();
    for (const auto& g : gens) {
      auto y = compose_perm(elems[x], g);
      if (index.emplace(y, elems.size()).second) {
        elems.push_back(y);
        if (elems.size() > budget)
          throw OrderBudgetExceeded("group closure exceeded budget");
        q.push(elems.size() - 1);
      }
    }
  }
  std::size_t n = elems.size();
  if (n > kTableCap)
    throw OrderBudgetExceeded("group too large for multiplication table");
  std::sort(elems.begin(), elems.end());
  index.clear();
  for (std::size_t i = 0; i < n; ++i) index[elems[i]] = i;

  FiniteGroup g;
  g.kind_ = Kind::Permutation;
  g.order_ = n;
  g.degree_ = deg;
  g.perms_ = elems;
  g.identity_ = index.at(id);
  g.table_.resize(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      g.table_[i * n + j] =
          static_cast<std::uint32_t>(index.at(compose_perm(elems[i], elems[j])));
  for (const auto& gen : gens) {
    std::size_t gi = index.at(gen);
    if (std::find(g.gens_.begin(), g.gens_.end(), gi) == g.gens_.end() &&
        gi != g.identity_)
      g.gens_.push_back(gi);
  }
  g.finish_construction();
  return g;
}

FiniteGroup FiniteGroup::from_matrices(const std::vector<IntMatrix>& gens,
                                       std::size_t budget) {
  std::size_t dim = gens.empty() ? 1 : gens[0].rows();
  auto key = [](const IntMatrix& m) { return m.to_string(); };
  for (const auto& m : gens) {
    if (!m.is_square() || m.rows() != dim)
      throw std::invalid_argument("from_matrices: mixed dimensions");
    Int d = m.det();
    if (d != 1 && d != -1)
      throw NonInvertibleMatrix("generator determinant not +-1");
  }
  IntMatrix id = IntMatrix::identity(dim);
  std::map<std::string, std::size_t> index;
  std::vector<IntMatrix> elems{id};
  index[key(id)] = 0;
  std::queue<std::size_t> q;
  q.push(0);
  while (!q.empty()) {
    std::size_t x = q.front();
    q.pop();
    for (const auto& gm : gens) {
      IntMatrix y = elems[x] * gm;
      if (index.emplace(key(y), elems.size()).second) {
        elems.push_back(y);
        if (elems.size() > budget)
          throw OrderBudgetExceeded("group closure exceeded budget");
        q.push(elems.size() - 1);
      }
    }
  }
  std::size_t n = elems.size();
  if (n > kTableCap)
    throw OrderBudgetExceeded("group too large for multiplication table");
  std::sort(elems.begin(), elems.end(), [](const IntMatrix& a, const IntMatrix& b) {
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t j = 0; j < a.cols(); ++j) {
        int c = cmp(a.at(i, j), b.at(i, j));
        if (c != 0) return c < 0;
      }
    return false;
  });
  index.clear();
  for (std::size_t i = 0; i < n; ++i) index[key(elems[i])] = i;

  FiniteGroup g;
  g.kind_ = Kind::Matrix;
  g.order_ = n;
  g.degree_ = dim;
  g.mats_ = elems;
  g.identity_ = index.at(key(id));
  g.table_.resize(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      g.table_[i * n + j] =
          static_cast<std::uint32_t>(index.at(key(elems[i] * elems[j])));
  for (const auto& gm : gens) {
    std::size_t gi = index.at(key(gm));
    if (std::find(g.gens_.begin(), g.gens_.end(), gi) == g.gens_.end() &&
        gi != g.identity_)
      g.gens_.push_back(gi);
  }
  g.finish_construction();
  return g;
}

FiniteGroup FiniteGroup::from_table(std::vector<std::uint32_t> table,
                                    std::size_t order,
                                    std::vector<std::size_t> gen_idx,
                                    bool verify_associativity) {
  if (table.size() != order * order || order == 0)
    throw std::invalid_argument("from_table: bad table size");
  for (auto v : table)
    if (v >= order) throw std::invalid_argument("from_table: entry out of range");
  // locate the identity and check the latin-square property
  std::size_t id = order;
  for (std::size_t e = 0; e < order; ++e) {
    bool ok = true;
    for (std::size_t x = 0; x < order && ok; ++x)
      if (table[e * order + x] != x || table[x * order + e] != x) ok = false;
    if (ok) {
      id = e;
      break;
    }
  }
  if (id == order) throw std::invalid_argument("from_table: no identity");
  for (std::size_t i = 0; i < order; ++i) {
    std::vector<bool> row(order, false), col(order, false);
    for (std::size_t j = 0; j < order; ++j) {
      if (row[table[i * order + j]] || col[table[j * order + i]])
        throw std::invalid_argument("from_table: not a latin square");
      row[table[i * order + j]] = col[table[j * order + i]] = true;
    }
  }
  FiniteGroup g;
  g.kind_ = Kind::Table;
  g.order_ = order;
  g.degree_ = 0;
  g.identity_ = id;
  g.table_ = std::move(table);
  if (gen_idx.empty()) {
    for (std::size_t i = 0; i < order; ++i)
      if (i != id) gen_idx.push_back(i);
  }
  g.gens_ = std::move(gen_idx);
  if (verify_associativity) {
    // Light's test: middle-position triples over a generating set suffice
    for (std::size_t m : g.gens_)
      for (std::size_t a = 0; a < order; ++a)
        for (std::size_t b = 0; b < order; ++b)
          if (g.mult(g.mult(a, m), b) != g.mult(a, g.mult(m, b)))
            throw std::invalid_argument("from_table: not associative");
  }
  g.finish_construction();
  return g;
}

FiniteGroup FiniteGroup::trivial() {
  return from_table({0}, 1);
}

FiniteGroup FiniteGroup::cyclic(std::size_t n) {
  if (n == 1) return trivial();
  std::vector<std::uint32_t> rot(n);
  for (std::size_t i = 0; i < n; ++i) rot[i] = static_cast<std::uint32_t>((i + 1) % n);
  return from_permutations({rot});
}

FiniteGroup FiniteGroup::symmetric(std::size_t n) {
  if (n <= 1) return trivial();
  std::vector<std::uint32_t> swap01(n), rot(n);
  std::iota(swap01.begin(), swap01.end(), 0);
  std::swap(swap01[0], swap01[1]);
  for (std::size_t i = 0; i < n; ++i) rot[i] = static_cast<std::uint32_t>((i + 1) % n);
  return from_permutations({swap01, rot});
}

void FiniteGroup::finish_construction() {
  inv_.assign(order_, 0);
  for (std::size_t i = 0; i < order_; ++i)
    for (std::size_t j = 0; j < order_; ++j)
      if (mult(i, j) == identity_) {
        inv_[i] = static_cast<std::uint32_t>(j);
        break;
      }
  words_.assign(order_, WordLink{0, UINT32_MAX});
  std::vector<bool> seen(order_, false);
  words_[identity_] = {static_cast<std::uint32_t>(identity_), UINT32_MAX};
  seen[identity_] = true;
  std::queue<std::size_t> q;
  q.push(identity_);
  std::size_t reached = 1;
  while (!q.empty()) {
    std::size_t x = q.front();
    q.pop();
    for (std::size_t k = 0; k < gens_.size(); ++k) {
      std::size_t y = mult(x, gens_[k]);
      if (!seen[y]) {
        seen[y] = true;
        ++reached;
        words_[y] = {static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(k)};
        q.push(y);
      }
    }
  }
  if (reached != order_)
    throw std::invalid_argument("generators do not generate the group");
}

std::size_t FiniteGroup::power(std::size_t a, long long k) const {
  if (k < 0) {
    a = inv_[a];
    k = -k;
  }
  std::size_t r = identity_;
  while (k > 0) {
    if (k & 1) r = mult(r, a);
    a = mult(a, a);
    k >>= 1;
  }
  return r;
}

std::size_t FiniteGroup::element_order(std::size_t a) const {
  std::size_t x = a, n = 1;
  while (x != identity_) {
    x = mult(x, a);
    ++n;
  }
  return n;
}

const std::vector<std::uint32_t>& FiniteGroup::permutation(std::size_t a) const {
  if (kind_ != Kind::Permutation)
    throw std::logic_error("permutation(): not a permutation group");
  return perms_[a];
}

const IntMatrix& FiniteGroup::matrix(std::size_t a) const {
  if (kind_ != Kind::Matrix)
    throw std::logic_error("matrix(): not a matrix group");
  return mats_[a];
}

bool FiniteGroup::is_abelian() const {
  for (std::size_t i = 0; i < order_; ++i)
    for (std::size_t j = i + 1; j < order_; ++j)
      if (mult(i, j) != mult(j, i)) return false;
  return true;
}

std::uint64_t FiniteGroup::exponent() const {
  std::uint64_t e = 1;
  for (std::size_t i = 0; i < order_; ++i)
    e = std::lcm(e, static_cast<std::uint64_t>(element_order(i)));
  return e;
}

std::vector<std::vector<std::size_t>> FiniteGroup::conjugacy_classes() const {
  std::vector<bool> seen(order_, false);
  std::vector<std::vector<std::size_t>> classes;
  for (std::size_t x = 0; x < order_; ++x) {
    if (seen[x]) continue;
    std::vector<std::size_t> cls{x};
    seen[x] = true;
    std::queue<std::size_t> q;
    q.push(x);
    while (!q.empty()) {
      std::size_t y = q.front();
      q.pop();
      for (std::size_t g = 0; g < order_; ++g) {
        std::size_t z = conjugate(g, y);
        if (!seen[z]) {
          seen[z] = true;
          cls.push_back(z);
          q.push(z);
        }
      }
    }
    std::sort(cls.begin(), cls.end());
    classes.push_back(std::move(cls));
  }
  return classes;
}

std::vector<Int> FiniteGroup::abelian_invariants() const {
  SubgroupHandle d = derived_subgroup(*this);
  FiniteGroup ab = quotient_group(*this, d.elements);
  // read off the p-part types from the counts of p^j-torsion elements
  std::uint64_t m = ab.order();
  std::vector<std::pair<std::uint64_t, std::vector<std::size_t>>> ptypes;
  for (std::uint64_t p = 2; p <= m; ++p) {
    if (m % p != 0) continue;
    while (m % p == 0) m /= p;
    std::vector<std::size_t> ranks;  // s_j = log_p #{x : x^(p^j) = e}
    std::uint64_t pj = 1;
    std::size_t prev = 0;
    while (true) {
      pj *= p;
      std::size_t cnt = 0;
      for (std::size_t x = 0; x < ab.order(); ++x)
        if (ab.power(x, static_cast<long long>(pj)) == ab.identity()) ++cnt;
      std::size_t s = 0;
      while (cnt > 1) {
        cnt /= p;
        ++s;
      }
      if (s == prev) break;
      ranks.push_back(s - prev);  // number of cyclic factors of order >= p^j
      prev = s;
    }
    ptypes.push_back({p, ranks});
  }
  std::size_t k = 0;
  for (const auto& [p, ranks] : ptypes)
    if (!ranks.empty()) k = std::max(k, ranks[0]);
  std::vector<Int> inv(k, 1);  // inv[0] largest
  for (const auto& [p, ranks] : ptypes) {
    for (std::size_t i = 0; i < k; ++i) {
      std::size_t e = 0;
      for (std::size_t j = 0; j < ranks.size(); ++j)
        if (ranks[j] > i) e = j + 1;  // i-th largest factor has order p^e
      Int pe = 1;
      for (std::size_t t = 0; t < e; ++t) pe *= static_cast<long>(p);
      inv[i] *= pe;
    }
  }
  std::reverse(inv.begin(), inv.end());  // ascending divisibility chain
  while (!inv.empty() && inv.front() == 1) inv.erase(inv.begin());
  return inv;
}

bool SubgroupHandle::contains(std::size_t e) const {
  return std::binary_search(elements.begin(), elements.end(), e);
}

std::vector<std::size_t> close_subset(const FiniteGroup& g,
                                      const std::vector<std::size_t>& seed) {
  std::vector<bool> in(g.order(), false);
  std::vector<std::size_t> elems;
  auto add = [&](std::size_t x) {
    if (!in[x]) {
      in[x] = true;
      elems.push_back(x);
    }
  };
  add(g.identity());
  for (auto s : seed) add(s);
  for (std::size_t i = 0; i < elems.size(); ++i)
    for (auto s : seed) {
      add(g.mult(elems[i], s));
      add(g.mult(s, elems[i]));
    }
  std::sort(elems.begin(), elems.end());
  return elems;
}

void classify_subgroup(SubgroupHandle& h) {
  const FiniteGroup& g = *h.parent;
  h.abelian = true;
  for (std::size_t i = 0; i < h.elements.size() && h.abelian; ++i)
    for (std::size_t j = i + 1; j < h.elements.size() && h.abelian; ++j)
      if (g.mult(h.elements[i], h.elements[j]) !=
          g.mult(h.elements[j], h.elements[i]))
        h.abelian = false;
  h.cyclic = false;
  for (auto e : h.elements)
    if (g.element_order(e) == h.order()) {
      h.cyclic = true;
      break;
    }
  h.bicyclic = false;
  if (h.abelian) {
    // at most two invariant factors <=> every p-torsion subgroup has
    // p-rank <= 2, i.e. #{x : x^p = e} <= p^2
    h.bicyclic = true;
    std::size_t n = h.order();
    for (std::uint64_t p = 2; p <= n; ++p) {
      if (n % p != 0) continue;
      while (n % p == 0) n /= p;
      std::size_t cnt = 0;
      for (auto e : h.elements)
        if (g.power(e, static_cast<long long>(p)) == g.identity()) ++cnt;
      if (cnt > p * p) h.bicyclic = false;
    }
  }
}

bool is_normal_subset(const FiniteGroup& g,
                      const std::vector<std::size_t>& elements) {
  for (std::size_t x = 0; x < g.order(); ++x)
    for (auto e : elements)
      if (!std::binary_search(elements.begin(), elements.end(),
                              g.conjugate(x, e)))
        return false;
  return true;
}

SubgroupHandle make_subgroup(const FiniteGroup& g,
                             std::vector<std::size_t> elements) {
  std::sort(elements.begin(), elements.end());
  SubgroupHandle h;
  h.parent = &g;
  h.elements = std::move(elements);
  for (auto e : h.elements)
    for (auto f : h.elements)
      if (!h.contains(g.mult(e, f)))
        throw NotASubgroup("element set not closed");
  classify_subgroup(h);
  h.normal = is_normal_subset(g, h.elements);
  return h;
}

SubgroupHandle trivial_subgroup(const FiniteGroup& g) {
  return make_subgroup(g, {g.identity()});
}

SubgroupHandle full_subgroup(const FiniteGroup& g) {
  std::vector<std::size_t> all(g.order());
  std::iota(all.begin(), all.end(), 0);
  return make_subgroup(g, std::move(all));
}

std::vector<SubgroupHandle> subgroups(const FiniteGroup& g,
                                      bool up_to_conjugacy) {
  std::size_t n = g.order();
  // distinct cyclic subgroups, each with one generator
  std::map<std::vector<std::size_t>, std::size_t> cyclic_gen;
  for (std::size_t x = 0; x < n; ++x) {
    std::vector<std::size_t> c;
    std::size_t y = x;
    do {
      c.push_back(y);
      y = g.mult(y, x);
    } while (y != x);
    std::sort(c.begin(), c.end());
    cyclic_gen.emplace(std::move(c), x);
  }
  // bottom-up closure: every subgroup is obtained from a smaller one by
  // adjoining one generator, so joins with single elements reach everything
  struct Node {
    std::vector<std::size_t> elements;
    std::vector<std::size_t> gens;
  };
  std::map<std::vector<std::size_t>, std::size_t> seen;
  std::vector<Node> nodes;
  auto add = [&](std::vector<std::size_t> elems, std::vector<std::size_t> gens) {
    auto [it, fresh] = seen.emplace(std::move(elems), nodes.size());
    if (fresh) nodes.push_back({it->first, std::move(gens)});
    return fresh;
  };
  add({g.identity()}, {});
  for (const auto& [c, x] : cyclic_gen)
    if (c.size() > 1) add(c, {x});
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].elements.size() == n) continue;
    for (const auto& [c, x] : cyclic_gen) {
      if (c.size() == 1 ||
          std::binary_search(nodes[i].elements.begin(), nodes[i].elements.end(), x))
        continue;
      std::vector<std::size_t> gens = nodes[i].gens;
      gens.push_back(x);
      std::vector<std::size_t> joined = close_subset(g, gens);
      add(std::move(joined), std::move(gens));
    }
  }

  std::vector<std::vector<std::size_t>> sets;
  sets.reserve(nodes.size());
  for (auto& nd : nodes) sets.push_back(nd.elements);
  std::sort(sets.begin(), sets.end(),
            [](const auto& a, const auto& b) {
              if (a.size() != b.size()) return a.size() < b.size();
              return a < b;
            });

  std::vector<SubgroupHandle> out;
  if (!up_to_conjugacy) {
    for (auto& s : sets) out.push_back(make_subgroup(g, std::move(s)));
    return out;
  }
  std::map<std::vector<std::size_t>, bool> done;
  for (auto& s : sets) done[s] = false;
  for (auto& s : sets) {
    if (done[s]) continue;
    // conjugation orbit of the subgroup
    std::vector<std::vector<std::size_t>> orbit{s};
    std::map<std::vector<std::size_t>, bool> in_orbit{{s, true}};
    for (std::size_t i = 0; i < orbit.size(); ++i)
      for (std::size_t x = 0; x < n; ++x) {
        std::vector<std::size_t> c;
        c.reserve(orbit[i].size());
        for (auto e : orbit[i]) c.push_back(g.conjugate(x, e));
        std::sort(c.begin(), c.end());
        if (in_orbit.emplace(c, true).second) orbit.push_back(std::move(c));
      }
    std::vector<std::size_t> rep = *std::min_element(orbit.begin(), orbit.end());
    SubgroupHandle h = make_subgroup(g, rep);
    h.conjugacy_class_size = orbit.size();
    out.push_back(std::move(h));
    for (auto& o : orbit) done[o] = true;
  }
  return out;
}

SubgroupHandle sylow(const FiniteGroup& g, std::uint64_t p) {
  std::size_t target = 1;
  while ((g.order() / target) % p == 0) target *= p;
  std::vector<std::size_t> gens;
  std::vector<std::size_t> cur{g.identity()};
  while (cur.size() < target) {
    bool extended = false;
    for (std::size_t x = 0; x < g.order() && !extended; ++x) {
      if (std::binary_search(cur.begin(), cur.end(), x)) continue;
      std::size_t o = g.element_order(x);
      while (o % p == 0) o /= p;
      if (o != 1) continue;
      std::vector<std::size_t> trial = gens;
      trial.push_back(x);
      std::vector<std::size_t> j = close_subset(g, trial);
      std::size_t js = j.size();
      while (js % p == 0) js /= p;
      if (js == 1 && j.size() > cur.size()) {
        gens = std::move(trial);
        cur = std::move(j);
        extended = true;
      }
    }
    if (!extended)
      throw std::logic_error("sylow: greedy extension stalled");  // unreachable
  }
  return make_subgroup(g, std::move(cur));
}

SubgroupHandle center(const FiniteGroup& g) {
  std::vector<std::size_t> z;
  for (std::size_t x = 0; x < g.order(); ++x) {
    bool central = true;
    for (std::size_t y = 0; y < g.order() && central; ++y)
      if (g.mult(x, y) != g.mult(y, x)) central = false;
    if (central) z.push_back(x);
  }
  return make_subgroup(g, std::move(z));
}

SubgroupHandle derived_subgroup(const FiniteGroup& g) {
  std::vector<std::size_t> comms;
  std::vector<bool> in(g.order(), false);
  for (std::size_t x = 0; x < g.order(); ++x)
    for (std::size_t y = 0; y < g.order(); ++y) {
      std::size_t c = g.commutator(x, y);
      if (!in[c]) {
        in[c] = true;
        comms.push_back(c);
      }
    }
  return make_subgroup(g, close_subset(g, comms));
}

FiniteGroup quotient_group(const FiniteGroup& g,
                           const std::vector<std::size_t>& normal_elements,
                           std::vector<std::size_t>* coset_of) {
  if (!is_normal_subset(g, normal_elements))
    throw NotASubgroup("quotient by a non-normal subgroup");
  std::size_t n = g.order();
  std::vector<std::size_t> rep_of(n, n);  // element -> minimal coset rep
  std::vector<std::size_t> reps;
  for (std::size_t x = 0; x < n; ++x) {
    if (rep_of[x] != n) continue;
    std::size_t m = x;
    std::vector<std::size_t> coset;
    for (auto e : normal_elements) {
      std::size_t y = g.mult(x, e);
      coset.push_back(y);
      m = std::min(m, y);
    }
    for (auto y : coset) rep_of[y] = m;
    reps.push_back(m);
  }
  std::sort(reps.begin(), reps.end());
  std::vector<std::size_t> qidx(n, 0);
  for (std::size_t i = 0; i < reps.size(); ++i) qidx[reps[i]] = i;
  std::size_t qn = reps.size();
  std::vector<std::uint32_t> table(qn * qn);
  for (std::size_t i = 0; i < qn; ++i)
    for (std::size_t j = 0; j < qn; ++j)
      table[i * qn + j] =
          static_cast<std::uint32_t>(qidx[rep_of[g.mult(reps[i], reps[j])]]);
  std::vector<std::size_t> qgens;
  for (auto gi : g.generator_indices()) {
    std::size_t q = qidx[rep_of[gi]];
    if (q != qidx[rep_of[g.identity()]] &&
        std::find(qgens.begin(), qgens.end(), q) == qgens.end())
      qgens.push_back(q);
  }
  if (coset_of) {
    coset_of->assign(n, 0);
    for (std::size_t x = 0; x < n; ++x) (*coset_of)[x] = qidx[rep_of[x]];
  }
  return FiniteGroup::from_table(std::move(table), qn, std::move(qgens));
}

FiniteGroup subgroup_to_group(const SubgroupHandle& h) {
  const FiniteGroup& g = *h.parent;
  const auto& el = h.elements;
  std::size_t m = el.size();
  std::vector<std::size_t> pos(g.order(), g.order());
  for (std::size_t i = 0; i < m; ++i) pos[el[i]] = i;
  std::vector<std::uint32_t> table(m * m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      std::size_t p = g.mult(el[i], el[j]);
      if (pos[p] == g.order()) throw NotASubgroup("subgroup_to_group: not closed");
      table[i * m + j] = static_cast<std::uint32_t>(pos[p]);
    }
  // greedy small generating set: repeatedly adjoin the smallest missing element
  std::size_t id = pos[g.identity()];
  std::vector<std::size_t> gens;
  std::vector<char> in(m, 0);
  in[id] = 1;
  std::size_t covered = 1;
  while (covered < m) {
    std::size_t pick = m;
    for (std::size_t i = 0; i < m; ++i)
      if (!in[i]) { pick = i; break; }
    gens.push_back(pick);
    // close under the new generator set
    std::vector<std::size_t> queue;
    in[pick] = 1;
    ++covered;
    queue.push_back(pick);
    while (!queue.empty()) {
      std::size_t x = queue.back();
      queue.pop_back();
      for (std::size_t i = 0; i < m; ++i) {
        if (!in[i]) continue;
        for (std::size_t y : {table[x * m + i], table[i * m + x]})
          if (!in[y]) {
            in[y] = 1;
            ++covered;
            queue.push_back(y);
          }
      }
    }
  }
  return FiniteGroup::from_table(std::move(table), m, std::move(gens));
}

namespace {

// Backtracking search over isomorphisms a -> b.  Calls sink with the full
// image vector for every isomorphism found; sink returning true stops the
// search.  Returns false if the budget ran out (search not exhaustive).
class IsoSearch {
public:
  IsoSearch(const FiniteGroup& a, const FiniteGroup& b, std::uint64_t budget)
      : a_(a), b_(b), budget_(budget) {}

  bool run(const std::function<bool(const std::vector<std::size_t>&)>& sink) {
    if (a_.order() != b_.order()) return true;
    sink_ = &sink;
    // invariants for candidate filtering
    ainv_ = invariants(a_);
    binv_ = invariants(b_);
    {
      auto sa = ainv_, sb = binv_;
      std::sort(sa.begin(), sa.end());
      std::sort(sb.begin(), sb.end());
      if (sa != sb) return true;  // cannot be isomorphic
    }
    // small generating sequence of a, high element order first
    std::vector<std::size_t> cl{a_.identity()};
    std::vector<bool> in(a_.order(), false);
    in[a_.identity()] = true;
    std::vector<std::size_t> by_order(a_.order());
    std::iota(by_order.begin(), by_order.end(), 0);
    std::sort(by_order.begin(), by_order.end(), [&](std::size_t x, std::size_t y) {
      return a_.element_order(x) > a_.element_order(y);
    });
    while (cl.size() < a_.order()) {
      for (auto x : by_order)
        if (!in[x]) {
          agens_.push_back(x);
          break;
        }
      std::vector<std::size_t> closed = close_subset(a_, agens_);
      cl = closed;
      in.assign(a_.order(), false);
      for (auto e : cl) in[e] = true;
    }
    img_.assign(a_.order(), a_.order());
    used_.assign(b_.order(), false);
    closure_ = {a_.identity()};
    img_[a_.identity()] = b_.identity();
    used_[b_.identity()] = true;
    stopped_ = false;
    bool complete = extend(0);
    return complete && !out_of_budget_;
  }

private:
  static std::vector<std::pair<std::size_t, std::size_t>> invariants(
      const FiniteGroup& g) {
    std::vector<std::pair<std::size_t, std::size_t>> inv(g.order());
    for (auto& cls : g.conjugacy_classes())
      for (auto e : cls) inv[e] = {g.element_order(e), cls.size()};
    return inv;
  }

  bool charge(std::uint64_t c) {
    if (cost_ + c > budget_) {
      out_of_budget_ = true;
      return false;
    }
    cost_ += c;
    return true;
  }

  // returns true when the search below this node is exhaustive (or stopped_)
  bool extend(std::size_t level) {
    if (level == agens_.size()) {
      if (closure_.size() == a_.order()) {
        std::vector<std::size_t> found(img_);
        if ((*sink_)(found)) stopped_ = true;
      }
      return true;
    }
    std::size_t gen = agens_[level];
    for (std::size_t h = 0; h < b_.order(); ++h) {
      if (used_[h] || binv_[h] != ainv_[gen]) continue;
      if (!charge(1)) return false;
      if (try_assign(gen, h, level)) {
        if (stopped_) return true;
      }
      if (out_of_budget_) return false;
    }
    return true;
  }

  // extend the partial map by gen -> h, recurse, then roll back
  bool try_assign(std::size_t gen, std::size_t h, std::size_t level) {
    std::size_t mark_c = closure_.size();
    std::vector<std::pair<std::size_t, std::size_t>> assigned;
    auto rollback = [&]() {
      for (auto& [x, y] : assigned) {
        img_[x] = a_.order();
        used_[y] = false;
      }
      closure_.resize(mark_c);
    };
    auto assign = [&](std::size_t x, std::size_t y) -> bool {
      if (img_[x] != a_.order()) return img_[x] == y;
      if (used_[y]) return false;
      if (ainv_[x] != binv_[y]) return false;
      img_[x] = y;
      used_[y] = true;
      assigned.push_back({x, y});
      closure_.push_back(x);
      return true;
    };
    if (!assign(gen, h)) {
      rollback();
      return false;
    }
    // close under products with everything already mapped
    for (std::size_t i = mark_c; i < closure_.size(); ++i) {
      std::size_t x = closure_[i];
      for (std::size_t j = 0; j < closure_.size(); ++j) {
        std::size_t y = closure_[j];
        if (!charge(2)) {
          rollback();
          return false;
        }
        if (!assign(a_.mult(x, y), b_.mult(img_[x], img_[y])) ||
            !assign(a_.mult(y, x), b_.mult(img_[y], img_[x]))) {
          rollback();
          return false;
        }
      }
    }
    bool ok = extend(level + 1);
    if (stopped_) return ok;
    rollback();
    return ok;
  }

  const FiniteGroup &a_, &b_;
  std::uint64_t budget_, cost_ = 0;
  bool out_of_budget_ = false, stopped_ = false;
  const std::function<bool(const std::vector<std::size_t>&)>* sink_ = nullptr;
  std::vector<std::size_t> agens_;
  std::vector<std::pair<std::size_t, std::size_t>> ainv_, binv_;
  std::vector<std::size_t> img_;
  std::vector<bool> used_;
  std::vector<std::size_t> closure_;
};

}  // namespace

std::optional<std::vector<std::size_t>> find_isomorphism(const FiniteGroup& a,
                                                         const FiniteGroup& b,
                                                         std::uint64_t budget) {
  if (a.order() != b.order()) return std::nullopt;
  std::optional<std::vector<std::size_t>> result;
  IsoSearch search(a, b, budget);
  bool complete = search.run([&](const std::vector<std::size_t>& iso) {
    result = iso;
    return true;
  });
  if (!result && !complete)
    throw OrderBudgetExceeded("isomorphism search budget exhausted");
  return result;
}

IsoclinicResult isoclinic(const FiniteGroup& g1, const FiniteGroup& g2,
                          std::uint64_t budget) {
  IsoclinicResult res;
  SubgroupHandle z1 = center(g1), z2 = center(g2);
  SubgroupHandle d1 = derived_subgroup(g1), d2 = derived_subgroup(g2);
  if (g1.order() / z1.order() != g2.order() / z2.order() ||
      d1.order() != d2.order()) {
    res.verdict = IsoclinicResult::Verdict::No;
    return res;
  }
  std::vector<std::size_t> cos1, cos2;
  FiniteGroup q1 = quotient_group(g1, z1.elements, &cos1);
  FiniteGroup q2 = quotient_group(g2, z2.elements, &cos2);
  std::vector<std::size_t> rep1(q1.order()), rep2(q2.order());
  for (std::size_t x = g1.order(); x-- > 0;) rep1[cos1[x]] = x;
  for (std::size_t x = g2.order(); x-- > 0;) rep2[cos2[x]] = x;

  res.derived1_elements = d1.elements;
  std::size_t nd = d1.order();
  auto try_theta = [&](const std::vector<std::size_t>& theta) -> bool {
    // commutators depend only on the central cosets, so the pair map is
    // well defined; build phi from it and close multiplicatively
    std::vector<std::size_t> phi(g1.order(), g1.order());
    std::vector<std::size_t> defined;
    auto set = [&](std::size_t c, std::size_t c2) -> bool {
      if (phi[c] != g1.order()) return phi[c] == c2;
      phi[c] = c2;
      defined.push_back(c);
      return true;
    };
    for (std::size_t q = 0; q < q1.order(); ++q)
      for (std::size_t r = 0; r < q1.order(); ++r) {
        std::size_t c = g1.commutator(rep1[q], rep1[r]);
        std::size_t c2 = g2.commutator(rep2[theta[q]], rep2[theta[r]]);
        if (!set(c, c2)) return false;
      }
    for (std::size_t i = 0; i < defined.size(); ++i)
      for (std::size_t j = 0; j <= i; ++j) {
        if (!set(g1.mult(defined[i], defined[j]),
                 g2.mult(phi[defined[i]], phi[defined[j]])) ||
            !set(g1.mult(defined[j], defined[i]),
                 g2.mult(phi[defined[j]], phi[defined[i]])))
          return false;
      }
    if (defined.size() != nd) return false;  // must cover all of [G1,G1]
    // verify bijection onto [G2,G2] and the homomorphism property
    std::vector<std::size_t> image = defined;
    for (auto& x : image) x = phi[x];
    std::sort(image.begin(), image.end());
    if (image != d2.elements) return false;
    for (auto x : d1.elements)
      for (auto y : d1.elements)
        if (phi[g1.mult(x, y)] != g2.mult(phi[x], phi[y])) return false;
    res.theta = theta;
    res.phi.clear();
    for (auto x : d1.elements) res.phi.push_back(phi[x]);
    return true;
  };

  IsoSearch search(q1, q2, budget);
  bool found = false;
  bool complete = search.run([&](const std::vector<std::size_t>& theta) {
    if (try_theta(theta)) {
      found = true;
      return true;
    }
    return false;
  });
  if (found)
    res.verdict = IsoclinicResult::Verdict::Yes;
  else if (complete)
    res.verdict = IsoclinicResult::Verdict::No;
  else
    res.verdict = IsoclinicResult::Verdict::Unknown;
  return res;
}

}  // namespace torat
