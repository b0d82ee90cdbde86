#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>
#include <vector>

#include "torat/glattice.hpp"
#include "torat/group.hpp"

using namespace torat;

namespace {

IntMatrix mat(std::size_t n, std::vector<long> v) {
  IntMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m.at(i, j) = v[i * n + j];
  return m;
}

bool same_lattice(const GLattice& a, const GLattice& b) {
  if (!same_group(a.group(), b.group()) || a.rank() != b.rank()) return false;
  for (std::size_t e = 0; e < a.group().order(); ++e)
    if (a.action(e) != b.action(e)) return false;
  return true;
}

// all subgroups of a given order (full enumeration)
std::vector<SubgroupHandle> subgroups_of_order(const FiniteGroup& g,
                                               std::size_t n) {
  std::vector<SubgroupHandle> out;
  for (auto& h : subgroups(g, false))
    if (h.order() == n) out.push_back(h);
  return out;
}

// independent left-coset enumeration: cosets as element sets, ordered by
// their minimal element
std::vector<std::vector<std::size_t>> brute_cosets(const FiniteGroup& g,
                                                   const SubgroupHandle& h) {
  std::set<std::vector<std::size_t>> seen;
  for (std::size_t x = 0; x < g.order(); ++x) {
    std::vector<std::size_t> c;
    for (auto e : h.elements) c.push_back(g.mult(x, e));
    std::sort(c.begin(), c.end());
    seen.insert(c);
  }
  std::vector<std::vector<std::size_t>> cosets(seen.begin(), seen.end());
  std::sort(cosets.begin(), cosets.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return cosets;
}

// largest normal subgroup of g contained in h, by intersecting conjugates
std::vector<std::size_t> brute_core(const FiniteGroup& g,
                                    const SubgroupHandle& h) {
  std::set<std::size_t> core(h.elements.begin(), h.elements.end());
  for (std::size_t x = 0; x < g.order(); ++x) {
    std::set<std::size_t> conj;
    for (auto e : h.elements) conj.insert(g.conjugate(x, e));
    std::set<std::size_t> inter;
    for (auto e : core)
      if (conj.count(e)) inter.insert(e);
    core = std::move(inter);
  }
  return {core.begin(), core.end()};
}

// orbits of the column index set under a permutation action
std::vector<std::vector<std::size_t>> column_orbits(const GLattice& m) {
  std::size_t r = m.rank();
  std::vector<char> used(r, 0);
  std::vector<std::vector<std::size_t>> orbits;
  for (std::size_t j = 0; j < r; ++j) {
    if (used[j]) continue;
    std::set<std::size_t> orb;
    std::vector<std::size_t> queue{j};
    orb.insert(j);
    while (!queue.empty()) {
      std::size_t c = queue.back();
      queue.pop_back();
      for (std::size_t e = 0; e < m.group().order(); ++e)
        for (std::size_t i = 0; i < r; ++i)
          if (m.action(e).at(i, c) == 1 && !orb.count(i)) {
            orb.insert(i);
            queue.push_back(i);
          }
    }
    for (auto c : orb) used[c] = 1;
    orbits.emplace_back(orb.begin(), orb.end());
  }
  return orbits;
}

bool is_permutation_action(const GLattice& m) {
  for (std::size_t e = 0; e < m.group().order(); ++e) {
    const IntMatrix& a = m.action(e);
    for (std::size_t j = 0; j < m.rank(); ++j) {
      std::size_t ones = 0;
      for (std::size_t i = 0; i < m.rank(); ++i) {
        if (a.at(i, j) == 1)
          ++ones;
        else if (a.at(i, j) != 0)
          return false;
      }
      if (ones != 1) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("permutation lattices") {
  GroupPtr s3 = share(FiniteGroup::symmetric(3));

  GLattice triv = permutation_lattice(s3, full_subgroup(*s3));
  CHECK(triv.rank() == 1);
  for (std::size_t e = 0; e < s3->order(); ++e)
    CHECK(triv.action(e).is_identity());

  GLattice reg = permutation_lattice(s3, trivial_subgroup(*s3));
  CHECK(reg.rank() == 6);
  // regular action: column j maps to row sigma*j
  for (std::size_t s = 0; s < 6; ++s)
    for (std::size_t j = 0; j < 6; ++j)
      CHECK(reg.action(s).at(s3->mult(s, j), j) == 1);

  auto c2s = subgroups_of_order(*s3, 2);
  REQUIRE(c2s.size() == 3);
  GLattice nat = permutation_lattice(s3, c2s[0]);
  CHECK(nat.rank() == 3);
  CHECK(nat.provenance() == "permutation");
  // compare with an independent coset enumeration
  auto cosets = brute_cosets(*s3, c2s[0]);
  REQUIRE(cosets.size() == 3);
  for (std::size_t s = 0; s < 6; ++s)
    for (std::size_t j = 0; j < 3; ++j) {
      std::size_t img = s3->mult(s, cosets[j].front());
      std::size_t i = 0;
      while (!std::binary_search(cosets[i].begin(), cosets[i].end(), img)) ++i;
      CHECK(nat.action(s).at(i, j) == 1);
    }

  // handle from a different group is rejected
  FiniteGroup c2 = FiniteGroup::cyclic(2);
  CHECK_THROWS_AS(permutation_lattice(s3, full_subgroup(c2)), NotASubgroup);
}

TEST_CASE("chevalley modules") {
  GroupPtr c2 = share(FiniteGroup::cyclic(2));
  GLattice sign = chevalley_module(c2, trivial_subgroup(*c2));
  CHECK(sign.rank() == 1);
  CHECK(sign.provenance() == "chevalley");
  std::size_t sigma = c2->identity() == 0 ? 1 : 0;
  CHECK(sign.action(sigma) == mat(1, {-1}));

  GroupPtr s3 = share(FiniteGroup::symmetric(3));
  auto s2 = subgroups_of_order(*s3, 2);
  CHECK(chevalley_module(s3, s2[0]).rank() == 2);
  CHECK(chevalley_module(s3, full_subgroup(*s3)).rank() == 0);

  // rank [G:H]-1 and vanishing total norm on every subgroup of S4
  GroupPtr s4 = share(FiniteGroup::symmetric(4));
  std::vector<std::size_t> all(s4->order());
  for (std::size_t e = 0; e < s4->order(); ++e) all[e] = e;
  for (auto& h : subgroups(*s4, true)) {
    GLattice j = chevalley_module(s4, h);
    CHECK(j.rank() == s4->order() / h.order() - 1);
    CHECK(j.norm_matrix(all).is_zero());
  }
}

TEST_CASE("duals") {
  GroupPtr s3 = share(FiniteGroup::symmetric(3));
  auto c2 = subgroups_of_order(*s3, 2);
  GLattice perm = permutation_lattice(s3, c2[0]);
  GLattice j = chevalley_module(s3, c2[0]);

  // permutation matrices are orthogonal, so Z[G/H] is its own dual on the nose
  CHECK(same_lattice(dual(perm), perm));
  CHECK_FALSE(same_lattice(dual(j), j));
  CHECK(same_lattice(dual(dual(j)), j));

  GroupPtr g2 = share(FiniteGroup::cyclic(2));
  GLattice sign = chevalley_module(g2, trivial_subgroup(*g2));
  CHECK(same_lattice(dual(sign), sign));
}

TEST_CASE("sum tensor restrict") {
  GroupPtr s3 = share(FiniteGroup::symmetric(3));
  auto c2 = subgroups_of_order(*s3, 2);
  auto c3 = subgroups_of_order(*s3, 3);
  GLattice perm = permutation_lattice(s3, c2[0]);
  GLattice j = chevalley_module(s3, c2[0]);
  GLattice one = trivial_lattice(s3, 1);

  CHECK(direct_sum(perm, j).rank() == 5);
  CHECK(tensor(perm, j).rank() == 6);
  CHECK(same_lattice(tensor(perm, one), perm));
  CHECK(same_lattice(tensor(one, perm), perm));

  GroupPtr other = share(FiniteGroup::symmetric(4));
  CHECK_THROWS_AS(direct_sum(perm, trivial_lattice(other, 1)), GroupMismatch);
  CHECK_THROWS_AS(tensor(perm, trivial_lattice(other, 1)), GroupMismatch);

  // Z[G] restricted to H decomposes into [G:H] regular H-orbits
  GLattice reg = permutation_lattice(s3, trivial_subgroup(*s3));
  GLattice res = restrict_lattice(reg, c3[0]);
  CHECK(res.group().order() == 3);
  CHECK(is_permutation_action(res));
  auto orbits = column_orbits(res);
  CHECK(orbits.size() == 2);
  for (auto& orb : orbits) {
    CHECK(orb.size() == 3);
    // free: no non-identity element fixes a column of the orbit
    for (std::size_t e = 0; e < res.group().order(); ++e) {
      if (e == res.group().identity()) continue;
      for (auto col : orb) CHECK(res.action(e).at(col, col) == 0);
    }
  }

  // restrict commutes with direct_sum and tensor
  CHECK(same_lattice(restrict_lattice(direct_sum(perm, j), c3[0]),
                     direct_sum(restrict_lattice(perm, c3[0]),
                                restrict_lattice(j, c3[0]))));
  CHECK(same_lattice(restrict_lattice(tensor(perm, j), c3[0]),
                     tensor(restrict_lattice(perm, c3[0]),
                            restrict_lattice(j, c3[0]))));
}

TEST_CASE("matrix group lattices") {
  GLattice triv3 = lattice_from_matrix_group({IntMatrix::identity(3)});
  CHECK(triv3.group().order() == 1);
  CHECK(triv3.rank() == 3);
  CHECK(triv3.provenance() == "matrix-group");

  GLattice sign = lattice_from_matrix_group({mat(1, {-1})});
  CHECK(sign.group().order() == 2);
  std::size_t sigma = sign.group().identity() == 0 ? 1 : 0;
  CHECK(sign.action(sigma) == mat(1, {-1}));

  // permutation matrices: the lattice action equals the matrices themselves
  GLattice p3 = lattice_from_matrix_group(
      {mat(3, {0, 1, 0, 1, 0, 0, 0, 0, 1}), mat(3, {0, 0, 1, 1, 0, 0, 0, 1, 0})});
  CHECK(p3.group().order() == 6);
  for (std::size_t e = 0; e < 6; ++e)
    CHECK(p3.action(e) == p3.group().matrix(e));

  // non-orthogonal involution: the module matrix is the transpose
  IntMatrix t = mat(2, {1, 1, 0, -1});
  GLattice m = lattice_from_matrix_group({t});
  CHECK(m.group().order() == 2);
  std::size_t tau = 0;
  while (m.group().matrix(tau) != t) ++tau;
  CHECK(m.action(tau) == t.transpose());

  CHECK_THROWS_AS(lattice_from_matrix_group({mat(2, {1, 1, 0, 1})}, 100),
                  OrderBudgetExceeded);
  CHECK_THROWS_AS(lattice_from_matrix_group({mat(1, {2})}), NonInvertibleMatrix);
}

TEST_CASE("fixed sublattices") {
  GroupPtr s3 = share(FiniteGroup::symmetric(3));
  GLattice reg = permutation_lattice(s3, trivial_subgroup(*s3));
  IntMatrix f = fixed_sublattice(reg, full_subgroup(*s3));
  REQUIRE(f.rows() == 1);
  for (std::size_t j = 0; j < 6; ++j) CHECK(f.at(0, j) == 1);

  GroupPtr c2 = share(FiniteGroup::cyclic(2));
  GLattice sign = chevalley_module(c2, trivial_subgroup(*c2));
  CHECK(fixed_sublattice(sign, full_subgroup(*c2)).rows() == 0);

  auto h = subgroups_of_order(*s3, 2)[0];
  GLattice nat = permutation_lattice(s3, h);
  CHECK(fixed_sublattice(nat, full_subgroup(*s3)).rows() == 1);
  CHECK(fixed_sublattice(nat, subgroups_of_order(*s3, 3)[0]).rows() == 1);
  CHECK(fixed_sublattice(chevalley_module(s3, h), full_subgroup(*s3)).rows() ==
        0);
  // the trivial subgroup fixes everything
  CHECK(fixed_sublattice(nat, trivial_subgroup(*s3)) ==
        IntMatrix::identity(3));
}

TEST_CASE("action kernels") {
  GroupPtr s3 = share(FiniteGroup::symmetric(3));
  auto h2 = subgroups_of_order(*s3, 2)[0];
  auto res = action_kernel(permutation_lattice(s3, h2));
  CHECK(res.kernel.is_trivial());
  CHECK(res.faithful.group().order() == 6);

  auto trv = action_kernel(trivial_lattice(s3, 2));
  CHECK(trv.kernel.order() == 6);
  CHECK(trv.faithful.group().order() == 1);

  // kernel of Z[G/H] is the normal core of H
  GroupPtr s4 = share(FiniteGroup::symmetric(4));
  for (auto& h : subgroups(*s4, false)) {
    auto r = action_kernel(permutation_lattice(s4, h));
    CHECK(r.kernel.elements == brute_core(*s4, h));
    CHECK(r.kernel.normal);
    CHECK(r.faithful.group().order() == s4->order() / r.kernel.order());
    CHECK(action_kernel(r.faithful).kernel.is_trivial());
    for (std::size_t e = 0; e < s4->order(); ++e)
      CHECK(r.faithful.action(r.coset_of[e]) ==
            permutation_lattice(s4, h).action(e));
  }
}

TEST_CASE("invalid actions") {
  GroupPtr c3 = share(FiniteGroup::cyclic(3));
  CHECK_THROWS_AS(GLattice(c3, {mat(1, {-1})}), InvalidAction);
  GroupPtr c2 = share(FiniteGroup::cyclic(2));
  CHECK_THROWS_AS(GLattice(c2, {mat(1, {2})}), InvalidAction);
  CHECK_THROWS_AS(GLattice(c2, {mat(1, {-1}), mat(1, {-1})}), InvalidAction);
  // valid generator-based construction extends along words
  GLattice sign(c2, {mat(1, {-1})});
  CHECK(sign.rank() == 1);
  std::size_t sigma = c2->identity() == 0 ? 1 : 0;
  CHECK(sign.action(sigma) == mat(1, {-1}));
}

TEST_CASE("monomial descriptors") {
  // involution with a free coefficient: x -> c/x
  auto d = MonomialActionDescriptor::build({mat(1, {-1})}, {{mpq_class(5)}});
  CHECK(d.dimension == 1);
  std::size_t sigma = d.group->identity() == 0 ? 1 : 0;
  CHECK(d.coefficients[d.group->identity()][0] == 1);
  CHECK(d.coefficients[sigma][0] == 5);

  // coordinate swap needs c1*c2 = 1
  IntMatrix swp = mat(2, {0, 1, 1, 0});
  auto ok = MonomialActionDescriptor::build(
      {swp}, {{mpq_class(2), mpq_class(1, 2)}}, {mpq_class(-1), mpq_class(5)});
  CHECK(ok.square_classes.size() == 2);
  CHECK_THROWS_AS(MonomialActionDescriptor::build(
                      {swp}, {{mpq_class(2), mpq_class(3)}}),
                  InvalidDescriptor);

  // identity matrix part cannot carry a nontrivial coefficient
  CHECK_THROWS_AS(MonomialActionDescriptor::build({IntMatrix::identity(1)},
                                                  {{mpq_class(5)}}),
                  InvalidDescriptor);

  CHECK_THROWS_AS(MonomialActionDescriptor::build({IntMatrix::identity(4)},
                                                  {{1, 1, 1, 1}}),
                  InvalidDescriptor);
  CHECK_THROWS_AS(MonomialActionDescriptor::build({mat(1, {-1})},
                                                  {{mpq_class(0)}}),
                  InvalidDescriptor);

  // order-4 rotation, all coefficients 1
  auto rot = MonomialActionDescriptor::build({mat(2, {0, -1, 1, 0})},
                                             {{mpq_class(1), mpq_class(1)}});
  CHECK(rot.group->order() == 4);
  GLattice m = rot.matrix_part_lattice();
  CHECK(m.rank() == 2);
  CHECK(m.group().order() == 4);
}
