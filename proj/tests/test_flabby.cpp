#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <optional>
#include <vector>

#include "torat/flabby.hpp"
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

GroupPtr quaternion8() {
  return share(FiniteGroup::from_matrices(
      {mat(4, {0, -1, 0, 0, 1, 0, 0, 0, 0, 0, 0, -1, 0, 0, 1, 0}),
       mat(4, {0, 0, -1, 0, 0, 0, 0, 1, 1, 0, 0, 0, 0, -1, 0, 0})}));
}

GroupPtr dihedral4() {
  return share(FiniteGroup::from_permutations({{1, 2, 3, 0}, {1, 0, 3, 2}}));
}

GroupPtr dihedral6() {
  return share(
      FiniteGroup::from_permutations({{1, 2, 3, 4, 5, 0}, {0, 5, 4, 3, 2, 1}}));
}

GroupPtr frobenius20() {
  return share(
      FiniteGroup::from_permutations({{1, 2, 3, 4, 0}, {0, 2, 4, 1, 3}}));
}

SubgroupHandle subgroup_of_order(const FiniteGroup& g, std::size_t order) {
  for (auto& h : subgroups(g, true))
    if (h.order() == order) return h;
  REQUIRE(false);
  return trivial_subgroup(g);
}

GLattice sign_lattice() {
  GroupPtr c2 = share(FiniteGroup::cyclic(2));
  return chevalley_module(c2, trivial_subgroup(*c2));
}

bool intertwines(const IntMatrix& x, const GLattice& m, const GLattice& n) {
  for (auto gi : m.group().generator_indices())
    if (!(x * m.action(gi) == n.action(gi) * x)) return false;
  Int d = x.rows() ? x.det() : Int(1);
  return d == 1 || d == -1;
}

}  // namespace

TEST_CASE("coflasque resolutions of small lattices") {
  GroupPtr c2 = share(FiniteGroup::cyclic(2));

  Resolution tr = coflasque_resolution(trivial_lattice(c2, 1));
  verify_resolution(tr);
  CHECK(tr.mid.rank() == 1);
  CHECK(tr.sub.rank() == 0);

  GLattice sign = sign_lattice();
  Resolution sr = coflasque_resolution(sign);
  verify_resolution(sr);
  CHECK(sr.mid.rank() == 2);  // the regular lattice Z[C2]
  CHECK(sr.sub.rank() == 1);
  CHECK(sr.sub.action(1).is_identity());  // kernel e + sigma is fixed

  // coset lattice: the kernel is stably permutation
  GroupPtr s3 = share(FiniteGroup::symmetric(3));
  GLattice cos = permutation_lattice(s3, subgroup_of_order(*s3, 2));
  Resolution cr = coflasque_resolution(cos);
  verify_resolution(cr);
  CertificateSearchOutcome q = stably_permutation_certificate(cr.sub);
  REQUIRE(q.certificate);
  CHECK(verify_certificate(cr.sub, *q.certificate));
}

TEST_CASE("flasque resolutions of small lattices") {
  GLattice sign = sign_lattice();
  Resolution fr = flasque_resolution(sign);
  verify_resolution(fr);
  CHECK(fr.quo.rank() == 1);
  CHECK(fr.quo.action(1).is_identity());  // F is the trivial lattice

  GroupPtr s3 = share(FiniteGroup::symmetric(3));
  GLattice cos = permutation_lattice(s3, subgroup_of_order(*s3, 2));
  Resolution pr = flasque_resolution(cos);
  verify_resolution(pr);
  CHECK(pr.quo.rank() == 0);  // permutation lattices need no correction

  GroupPtr s4 = share(FiniteGroup::symmetric(4));
  GLattice j43 = chevalley_module(s4, subgroup_of_order(*s4, 6));
  Resolution r43 = flasque_resolution(j43);
  verify_resolution(r43);
  FlabbyStatus st = flabby_coflabby_status(r43.quo);
  CHECK(st.flabby);
  CHECK_FALSE(st.coflabby);  // flabby quotient that is not invertible
}

TEST_CASE("resolution re-verification rejects tampering") {
  Resolution r = coflasque_resolution(sign_lattice());
  verify_resolution(r);
  Resolution bad = r;
  bad.inject.at(0, 0) += 1;
  CHECK_THROWS_AS(verify_resolution(bad), InvalidDescriptor);
  Resolution bad2 = r;
  bad2.project.at(0, 1) += 2;
  CHECK_THROWS_AS(verify_resolution(bad2), InvalidDescriptor);
}

TEST_CASE("flabby and coflabby status") {
  GroupPtr s4 = share(FiniteGroup::symmetric(4));
  FlabbyStatus perm =
      flabby_coflabby_status(permutation_lattice(s4, subgroup_of_order(*s4, 8)));
  CHECK(perm.flabby);
  CHECK(perm.coflabby);

  FlabbyStatus sg = flabby_coflabby_status(sign_lattice());
  CHECK_FALSE(sg.flabby);
  // the sign lattice is self-dual, so H^1 fails on the same subgroup
  CHECK_FALSE(sg.coflabby);
  REQUIRE(sg.coflabby_witness);
  CHECK(sg.coflabby_witness->order() == 2);
  REQUIRE(sg.flabby_witness);
  CHECK(sg.flabby_witness->order() == 2);
  REQUIRE(sg.flabby_value);
  CHECK(sg.flabby_value->invariant_factors == std::vector<Int>{2});

  // flabby and coflabby yet not invertible
  GroupPtr q8 = quaternion8();
  GLattice jq8 = chevalley_module(q8, trivial_subgroup(*q8));
  Resolution rq8 = flasque_resolution(jq8);
  FlabbyStatus fq8 = flabby_coflabby_status(rq8.quo);
  CHECK(fq8.flabby);
  CHECK(fq8.coflabby);
  FlabbyVerdict vq8 = flabby_class_verdict(jq8, IsoBudget{7, 2000, 0});
  CHECK(vq8.tag == FlabbyTag::NotInvertible);
  CHECK(vq8.provenance == "computed");
}

TEST_CASE("equivariant isomorphism search") {
  GroupPtr s3 = share(FiniteGroup::symmetric(3));
  GLattice j = chevalley_module(s3, subgroup_of_order(*s3, 2));
  IsoSearchResult self = equivariant_isomorphism(j, j);
  REQUIRE(self.tag == IsoSearchResult::Tag::Found);
  CHECK(intertwines(*self.x, j, j));

  GroupPtr c2 = share(FiniteGroup::cyclic(2));
  GLattice reg = permutation_lattice(c2, trivial_subgroup(*c2));
  GLattice split = direct_sum(trivial_lattice(c2, 1), sign_lattice());
  IsoSearchResult no = equivariant_isomorphism(reg, split);
  CHECK(no.tag == IsoSearchResult::Tag::Impossible);
  REQUIRE(no.obstruction);
  CHECK(*no.obstruction == 2);  // every intertwiner determinant is even

  IsoSearchResult rank = equivariant_isomorphism(reg, trivial_lattice(c2, 1));
  CHECK(rank.tag == IsoSearchResult::Tag::Impossible);
}

TEST_CASE("permutation lattices over the dihedral group of order 12 violate "
          "Krull-Schmidt yet match as sums") {
  GroupPtr d6 = dihedral6();
  SubgroupHandle triv, c3, v4, c6, whole;
  std::vector<SubgroupHandle> c2s, s3s;
  for (auto& h : subgroups(*d6, true)) {
    switch (h.order()) {
      case 1: triv = h; break;
      case 2: c2s.push_back(h); break;
      case 3: c3 = h; break;
      case 4: v4 = h; break;
      case 6:
        if (h.cyclic) c6 = h;
        else s3s.push_back(h);
        break;
      case 12: whole = h; break;
    }
  }
  REQUIRE(c2s.size() == 3);
  REQUIRE(s3s.size() == 2);
  GLattice lhs = permutation_sum(d6, {triv, v4, v4, c6, s3s[0], s3s[1]});
  std::vector<SubgroupHandle> rhs_parts = {c2s[0], c2s[1], c2s[2],
                                           c3,     whole,  whole};
  REQUIRE(lhs.rank() == 24);
  IsoSearchResult iso = summand_peel_isomorphism(lhs, rhs_parts);
  REQUIRE(iso.tag == IsoSearchResult::Tag::Found);
  CHECK(intertwines(*iso.x, lhs, permutation_sum(d6, rhs_parts)));
}

TEST_CASE("stably permutation certificates") {
  GroupPtr s3 = share(FiniteGroup::symmetric(3));
  GLattice cos = permutation_lattice(s3, subgroup_of_order(*s3, 2));
  CertificateSearchOutcome perm = stably_permutation_certificate(cos);
  REQUIRE(perm.certificate);
  CHECK(verify_certificate(cos, *perm.certificate));

  GLattice j32 = chevalley_module(s3, subgroup_of_order(*s3, 2));
  Resolution r32 = flasque_resolution(j32);
  CertificateSearchOutcome f32 = stably_permutation_certificate(r32.quo);
  REQUIRE(f32.certificate);
  CHECK(verify_certificate(r32.quo, *f32.certificate));

  CertificateSearchOutcome sg = stably_permutation_certificate(sign_lattice());
  CHECK_FALSE(sg.certificate);
  CHECK(sg.note.find("H^-1") != std::string::npos);
}

TEST_CASE("flabby class verdicts") {
  for (std::size_t n : {2, 3, 4, 6, 8}) {
    GroupPtr cn = share(FiniteGroup::cyclic(n));
    FlabbyVerdict v = flabby_class_verdict(chevalley_module(cn, trivial_subgroup(*cn)));
    CHECK(v.tag == FlabbyTag::Zero);
    CHECK(v.provenance == "computed");
    REQUIRE(v.zero_certificate);
    REQUIRE(v.resolution);
    CHECK(verify_certificate(v.resolution->quo, *v.zero_certificate));
  }

  GroupPtr s3 = share(FiniteGroup::symmetric(3));
  FlabbyVerdict v32 =
      flabby_class_verdict(chevalley_module(s3, subgroup_of_order(*s3, 2)));
  CHECK(v32.tag == FlabbyTag::Zero);

  GroupPtr s4 = share(FiniteGroup::symmetric(4));
  FlabbyVerdict v43 = flabby_class_verdict(
      chevalley_module(s4, subgroup_of_order(*s4, 6)), IsoBudget{11, 2000, 0});
  CHECK(v43.tag == FlabbyTag::NotInvertible);
  CHECK(v43.provenance == "computed");
  REQUIRE(v43.witness);
  REQUIRE(v43.witness_value);
  CHECK_FALSE(v43.witness_value->is_trivial());

  GroupPtr f20 = frobenius20();
  FlabbyVerdict vf = flabby_class_verdict(
      chevalley_module(f20, subgroup_of_order(*f20, 4)), IsoBudget{13, 2000, 0});
  CHECK(vf.tag == FlabbyTag::InvertibleNonZero);
  CHECK(vf.provenance == "computed");
  REQUIRE(vf.inverse_certificate);
  GLattice sum =
      direct_sum(vf.resolution->quo, vf.inverse_certificate->complement);
  GLattice tgt = permutation_sum(f20, vf.inverse_certificate->target);
  CHECK(intertwines(vf.inverse_certificate->x, sum, tgt));
}

TEST_CASE("verdicts agree with the group-theoretic criteria") {
  // cyclic: criteria say zero, computation confirms without contradiction
  GroupPtr c12 = share(FiniteGroup::cyclic(12));
  JgCriteria j12 = jg_criteria(*c12);
  CHECK(j12.invertible);
  CHECK(j12.zero);
  TheoremVerdict tv{j12.zero, j12.invertible, "criteria"};
  FlabbyVerdict v12 = flabby_class_verdict(
      chevalley_module(c12, trivial_subgroup(*c12)), IsoBudget{}, {tv});
  CHECK(v12.tag == FlabbyTag::Zero);

  GroupPtr q8 = quaternion8();
  JgCriteria jq = jg_criteria(*q8);
  CHECK_FALSE(jq.invertible);
  CHECK(jq.jg_coflabby);  // generalized quaternion
  CHECK_FALSE(jq.flabby_coflabby_invertible);
  TheoremVerdict tq{std::nullopt, jq.invertible, "criteria"};
  FlabbyVerdict vq = flabby_class_verdict(
      chevalley_module(q8, trivial_subgroup(*q8)), IsoBudget{7, 2000, 0}, {tq});
  CHECK(vq.tag == FlabbyTag::NotInvertible);
  CHECK(vq.provenance == "computed");
}

TEST_CASE("criteria for the Galois case") {
  JgCriteria d4 = jg_criteria(*dihedral4());
  CHECK_FALSE(d4.invertible);
  CHECK_FALSE(d4.zero);
  CHECK_FALSE(d4.jg_coflabby);
  CHECK(d4.flabby_coflabby_invertible);  // dihedral 2-Sylow

  // C3 x| C4 with inversion action, order 12
  FiniteGroup c3c4 = FiniteGroup::from_permutations(
      {{1, 2, 0, 3, 4, 5, 6}, {0, 2, 1, 4, 5, 6, 3}});
  REQUIRE(c3c4.order() == 12);
  JgCriteria jm = jg_criteria(c3c4);
  CHECK(jm.invertible);
  CHECK(jm.zero);

  JgCriteria js3 = jg_criteria(FiniteGroup::symmetric(3));
  CHECK(js3.zero);

  JgCriteria ja4 = jg_criteria(
      *share(FiniteGroup::from_permutations({{1, 0, 3, 2}, {1, 2, 0, 3}})));
  CHECK_FALSE(ja4.invertible);
  CHECK_FALSE(ja4.zero);
}

TEST_CASE("criteria for norm-one tori of non-Galois extensions") {
  GroupPtr s4 = share(FiniteGroup::symmetric(4));
  NormOneOracle n43 = norm_one_criteria(*s4, subgroup_of_order(*s4, 6));
  REQUIRE(n43.invertible);
  CHECK_FALSE(*n43.invertible);  // 4 is not prime
  REQUIRE(n43.zero);
  CHECK_FALSE(*n43.zero);

  GroupPtr s5 = share(FiniteGroup::symmetric(5));
  NormOneOracle n54 = norm_one_criteria(*s5, subgroup_of_order(*s5, 24));
  REQUIRE(n54.invertible);
  CHECK(*n54.invertible);  // 5 is prime: retract rational
  REQUIRE(n54.zero);
  CHECK_FALSE(*n54.zero);  // but not stably (only n = 3)

  GroupPtr a5 = share(
      FiniteGroup::from_permutations({{1, 2, 3, 4, 0}, {1, 2, 0, 3, 4}}));
  REQUIRE(a5->order() == 60);
  NormOneOracle naa = norm_one_criteria(*a5, subgroup_of_order(*a5, 12));
  REQUIRE(naa.zero);
  CHECK(*naa.zero);  // alternating case is stably rational exactly at n = 5

  GroupPtr s3 = share(FiniteGroup::symmetric(3));
  NormOneOracle n32 = norm_one_criteria(*s3, subgroup_of_order(*s3, 2));
  REQUIRE(n32.invertible);
  CHECK(*n32.invertible);
  REQUIRE(n32.zero);
  CHECK(*n32.zero);  // C_3 x| C_2 with r = 3

  // dihedral of order 10 acting on 5 points: stably rational
  GroupPtr d5 = share(
      FiniteGroup::from_permutations({{1, 2, 3, 4, 0}, {0, 4, 3, 2, 1}}));
  NormOneOracle nd5 = norm_one_criteria(*d5, subgroup_of_order(*d5, 2));
  REQUIRE(nd5.zero);
  CHECK(*nd5.zero);

  GroupPtr f20 = frobenius20();
  NormOneOracle nf = norm_one_criteria(*f20, subgroup_of_order(*f20, 4));
  REQUIRE(nf.invertible);
  CHECK(*nf.invertible);
  REQUIRE(nf.zero);
  CHECK_FALSE(*nf.zero);

  // non-core-free subgroup reduces to the faithful coset action first
  GroupPtr c6 = share(FiniteGroup::cyclic(6));
  NormOneOracle nc6 = norm_one_criteria(*c6, subgroup_of_order(*c6, 2));
  REQUIRE(nc6.zero);
  CHECK(*nc6.zero);
}

TEST_CASE("the flabby class does not depend on the chosen resolution") {
  struct Fixture {
    GLattice m;
    SubgroupHandle extra;  // permutation summand added before resolving again
  };
  std::vector<Fixture> fixtures;

  GroupPtr s3 = share(FiniteGroup::symmetric(3));
  fixtures.push_back({chevalley_module(s3, subgroup_of_order(*s3, 2)),
                      subgroup_of_order(*s3, 3)});
  GroupPtr c2 = share(FiniteGroup::cyclic(2));
  fixtures.push_back({chevalley_module(c2, trivial_subgroup(*c2)),
                      trivial_subgroup(*c2)});
  GroupPtr c4 = share(FiniteGroup::cyclic(4));
  fixtures.push_back({chevalley_module(c4, trivial_subgroup(*c4)),
                      subgroup_of_order(*c4, 2)});
  GroupPtr c6 = share(FiniteGroup::cyclic(6));
  fixtures.push_back({chevalley_module(c6, trivial_subgroup(*c6)),
                      trivial_subgroup(*c6)});
  GroupPtr d4 = dihedral4();
  fixtures.push_back({chevalley_module(d4, subgroup_of_order(*d4, 2)),
                      subgroup_of_order(*d4, 8)});

  for (std::size_t i = 0; i < fixtures.size(); ++i) {
    CAPTURE(i);
    const GLattice& m = fixtures[i].m;
    GroupPtr g = m.group_ptr();
    const SubgroupHandle& extra = fixtures[i].extra;
    Resolution r1 = flasque_resolution(m);
    Resolution r2 = flasque_resolution(
        direct_sum(m, permutation_lattice(g, extra)));
    // r1 with the extra summand appended is a second resolution of the same
    // augmented lattice, so the two quotients agree after adding the mids
    GLattice left = direct_sum(r1.quo, permutation_sum(g, r2.mid_parts));
    std::vector<SubgroupHandle> parts = r1.mid_parts;
    parts.push_back(extra);
    IsoSearchResult iso =
        summand_peel_isomorphism(left, parts, r2.quo, IsoBudget{17 + i});
    REQUIRE(iso.tag == IsoSearchResult::Tag::Found);
  }
}
