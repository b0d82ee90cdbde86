#include "torat/glattice.hpp"

#include <algorithm>
#include <cstdint>

namespace torat {

bool same_group(const FiniteGroup& a, const FiniteGroup& b) {
  if (&a == &b) return true;
  if (a.order() != b.order() || a.identity() != b.identity()) return false;
  for (std::size_t i = 0; i < a.order(); ++i)
    for (std::size_t j = 0; j < a.order(); ++j)
      if (a.mult(i, j) != b.mult(i, j)) return false;
  return true;
}

namespace {

void check_parent(const FiniteGroup& g, const SubgroupHandle& h) {
  if (!h.parent || !same_group(g, *h.parent))
    throw NotASubgroup("subgroup handle belongs to a different group");
}

bool is_unimodular(const IntMatrix& a) {
  if (!a.is_square()) return false;
  Int d = a.det();
  return d == 1 || d == -1;
}

}  // namespace

GLattice::GLattice(GroupPtr g, const std::vector<IntMatrix>& generator_actions,
                   std::string provenance) {
  if (!g) throw InvalidAction("null group");
  const auto& gens = g->generator_indices();
  if (generator_actions.size() != gens.size())
    throw InvalidAction("one action matrix per generator required");
  std::size_t r = generator_actions.empty() ? 0 : generator_actions[0].rows();
  if (generator_actions.empty())
    throw InvalidAction("generator-free construction needs from_element_actions");
  std::vector<IntMatrix> acts(g->order());
  std::vector<char> done(g->order(), 0);
  acts[g->identity()] = IntMatrix::identity(r);
  done[g->identity()] = 1;
  for (std::size_t a = 0; a < g->order(); ++a) {
    if (done[a]) continue;
    // walk the generator word back to a computed element, then fill forward
    std::vector<std::size_t> chain;
    std::size_t x = a;
    while (!done[x]) {
      chain.push_back(x);
      x = g->word_link(x).prev;
    }
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
      const auto& wl = g->word_link(*it);
      acts[*it] = acts[wl.prev] * generator_actions[wl.gen];
      done[*it] = 1;
    }
  }
  group_ = std::move(g);
  rank_ = r;
  act_ = std::move(acts);
  provenance_ = std::move(provenance);
  verify();
}

GLattice GLattice::from_element_actions(GroupPtr g,
                                        std::vector<IntMatrix> actions,
                                        std::string provenance) {
  if (!g) throw InvalidAction("null group");
  if (actions.size() != g->order())
    throw InvalidAction("one action matrix per element required");
  GLattice m;
  m.group_ = std::move(g);
  m.rank_ = actions.empty() ? 0 : actions[0].rows();
  m.act_ = std::move(actions);
  m.provenance_ = std::move(provenance);
  m.verify();
  return m;
}

void GLattice::verify() const {
  const FiniteGroup& g = *group_;
  for (const auto& a : act_)
    if (a.rows() != rank_ || a.cols() != rank_)
      throw InvalidAction("action matrices must be square of equal rank");
  if (!act_[g.identity()].is_identity())
    throw InvalidAction("identity must act trivially");
  for (auto gi : g.generator_indices())
    if (!is_unimodular(act_[gi]))
      throw InvalidAction("generator action is not unimodular");
  // A(x*gen) == A(x) * A(gen) for all x and generators suffices by induction
  for (std::size_t x = 0; x < g.order(); ++x)
    for (auto gi : g.generator_indices())
      if (act_[g.mult(x, gi)] != act_[x] * act_[gi])
        throw InvalidAction("action is not a homomorphism");
}

IntMatrix GLattice::norm_matrix(const std::vector<std::size_t>& elements) const {
  IntMatrix n = IntMatrix::zero(rank_, rank_);
  for (auto e : elements) n = n + act_[e];
  return n;
}

GLattice trivial_lattice(GroupPtr g, std::size_t rank) {
  std::vector<IntMatrix> acts(g->order(), IntMatrix::identity(rank));
  return GLattice::from_element_actions(std::move(g), std::move(acts),
                                        "trivial");
}

GLattice permutation_lattice(GroupPtr g, const SubgroupHandle& h) {
  check_parent(*g, h);
  std::size_t n = g->order();
  std::vector<std::size_t> rep_of(n, n);  // element -> minimal coset rep
  std::vector<std::size_t> reps;
  for (std::size_t x = 0; x < n; ++x) {
    if (rep_of[x] != n) continue;
    std::size_t m = x;
    std::vector<std::size_t> coset;
    for (auto e : h.elements) {
      std::size_t y = g->mult(x, e);
      coset.push_back(y);
      m = std::min(m, y);
    }
    for (auto y : coset) rep_of[y] = m;
    reps.push_back(m);
  }
  std::sort(reps.begin(), reps.end());
  std::vector<std::size_t> idx(n, 0);
  for (std::size_t i = 0; i < reps.size(); ++i) idx[reps[i]] = i;
  std::size_t r = reps.size();
  std::vector<IntMatrix> acts(n);
  for (std::size_t s = 0; s < n; ++s) {
    IntMatrix a = IntMatrix::zero(r, r);
    for (std::size_t j = 0; j < r; ++j)
      a.at(idx[rep_of[g->mult(s, reps[j])]], j) = 1;
    acts[s] = std::move(a);
  }
  return GLattice::from_element_actions(std::move(g), std::move(acts),
                                        "permutation");
}

GLattice quotient_lattice(const GLattice& m, const IntMatrix& embed) {
  std::size_t n = m.rank(), d = embed.cols();
  if (embed.rows() != n || d > n)
    throw InvalidAction("quotient_lattice: embedding of wrong shape");
  if (d == 0) return m;
  // unimodular U moving the column span of embed onto the first d coordinates
  SnfResult s = snf(embed);
  for (std::size_t i = 0; i < d; ++i)
    if (s.d.at(i, i) != 1)
      throw InvalidAction("quotient_lattice: not a saturated basis");
  IntMatrix u = s.u;
  IntMatrix uinv = unimodular_inverse(u);
  std::vector<IntMatrix> acts(m.group().order());
  for (std::size_t e = 0; e < m.group().order(); ++e) {
    IntMatrix c = u * m.action(e) * uinv;
    for (std::size_t i = d; i < n; ++i)
      for (std::size_t j = 0; j < d; ++j)
        if (c.at(i, j) != 0)
          throw InvalidAction("quotient_lattice: sublattice not invariant");
    acts[e] = c.submatrix(d, d, n - d, n - d);
  }
  return GLattice::from_element_actions(m.group_ptr(), std::move(acts),
                                        "derived");
}

GLattice chevalley_module(GroupPtr g, const SubgroupHandle& h) {
  GLattice perm = permutation_lattice(g, h);
  std::size_t r = perm.rank();
  IntMatrix ones(r, 1);
  for (std::size_t i = 0; i < r; ++i) ones.at(i, 0) = 1;
  GLattice q = quotient_lattice(perm, ones);
  std::vector<IntMatrix> acts(g->order());
  for (std::size_t e = 0; e < g->order(); ++e) acts[e] = q.action(e);
  return GLattice::from_element_actions(std::move(g), std::move(acts),
                                        "chevalley");
}

GLattice dual(const GLattice& m) {
  std::vector<IntMatrix> acts(m.group().order());
  for (std::size_t e = 0; e < m.group().order(); ++e)
    acts[e] = unimodular_inverse(m.action(e)).transpose();
  return GLattice::from_element_actions(m.group_ptr(), std::move(acts),
                                        "derived");
}

GLattice direct_sum(const GLattice& m, const GLattice& n) {
  if (!same_group(m.group(), n.group()))
    throw GroupMismatch("direct_sum: different groups");
  std::vector<IntMatrix> acts(m.group().order());
  for (std::size_t e = 0; e < m.group().order(); ++e)
    acts[e] = m.action(e).direct_sum(n.action(e));
  return GLattice::from_element_actions(m.group_ptr(), std::move(acts),
                                        "derived");
}

GLattice tensor(const GLattice& m, const GLattice& n) {
  if (!same_group(m.group(), n.group()))
    throw GroupMismatch("tensor: different groups");
  std::vector<IntMatrix> acts(m.group().order());
  for (std::size_t e = 0; e < m.group().order(); ++e)
    acts[e] = m.action(e).kronecker(n.action(e));
  return GLattice::from_element_actions(m.group_ptr(), std::move(acts),
                                        "derived");
}

GLattice restrict_lattice(const GLattice& m, const SubgroupHandle& h) {
  check_parent(m.group(), h);
  FiniteGroup sub = subgroup_to_group(h);
  std::vector<IntMatrix> acts(sub.order());
  for (std::size_t i = 0; i < h.elements.size(); ++i)
    acts[i] = m.action(h.elements[i]);
  return GLattice::from_element_actions(share(std::move(sub)), std::move(acts),
                                        "derived");
}

GLattice lattice_from_matrix_group(const std::vector<IntMatrix>& gens,
                                   std::size_t budget) {
  GroupPtr g = share(FiniteGroup::from_matrices(gens, budget));
  std::vector<IntMatrix> acts(g->order());
  for (std::size_t e = 0; e < g->order(); ++e)
    acts[e] = g->matrix(g->inverse(e)).transpose();
  return GLattice::from_element_actions(std::move(g), std::move(acts),
                                        "matrix-group");
}

IntMatrix fixed_sublattice(const GLattice& m,
                           const std::vector<std::size_t>& elements) {
  IntMatrix stacked(0, m.rank());
  IntMatrix id = IntMatrix::identity(m.rank());
  for (auto e : elements) {
    if (e == m.group().identity()) continue;
    stacked = stacked.vstack(m.action(e) - id);
  }
  if (stacked.rows() == 0) return id;
  return kernel_basis(stacked);
}

IntMatrix fixed_sublattice(const GLattice& m, const SubgroupHandle& h) {
  check_parent(m.group(), h);
  return fixed_sublattice(m, h.elements);
}

ActionKernelResult action_kernel(const GLattice& m) {
  const FiniteGroup& g = m.group();
  std::vector<std::size_t> ker;
  for (std::size_t e = 0; e < g.order(); ++e)
    if (m.action(e).is_identity()) ker.push_back(e);
  SubgroupHandle kernel = make_subgroup(g, ker);
  std::vector<std::size_t> coset_of;
  GroupPtr q = share(quotient_group(g, kernel.elements, &coset_of));
  std::vector<IntMatrix> acts(q->order());
  std::vector<char> done(q->order(), 0);
  for (std::size_t e = 0; e < g.order(); ++e) {
    std::size_t c = coset_of[e];
    if (!done[c]) {
      acts[c] = m.action(e);
      done[c] = 1;
    }
  }
  GLattice faithful =
      GLattice::from_element_actions(std::move(q), std::move(acts), "derived");
  return ActionKernelResult{std::move(kernel), std::move(faithful),
                            std::move(coset_of)};
}

namespace {

mpq_class qpow(const mpq_class& c, long e) {
  mpq_class b = c;
  if (e < 0) {
    b = mpq_class(1) / b;
    e = -e;
  }
  mpq_class r = 1;
  while (e) {
    if (e & 1) r *= b;
    b *= b;
    e >>= 1;
  }
  return r;
}

// c_j(s t) per the composition rule, given c(s), c(t) and the matrix of t.
std::vector<mpq_class> compose_coeffs(const std::vector<mpq_class>& cs,
                                      const std::vector<mpq_class>& ct,
                                      const IntMatrix& at) {
  std::size_t n = cs.size();
  std::vector<mpq_class> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    mpq_class v = ct[j];
    for (std::size_t i = 0; i < n; ++i) {
      const Int& a = at.at(i, j);
      if (a == 0) continue;
      if (!a.fits_slong_p())
        throw InvalidDescriptor("exponent out of range");
      v *= qpow(cs[i], a.get_si());
    }
    out[j] = v;
  }
  return out;
}

}  // namespace

MonomialActionDescriptor MonomialActionDescriptor::build(
    const std::vector<IntMatrix>& gen_matrices,
    const std::vector<std::vector<mpq_class>>& gen_coefficients,
    std::vector<mpq_class> square_classes, std::size_t budget) {
  if (gen_matrices.empty())
    throw InvalidDescriptor("at least one generator required");
  std::size_t n = gen_matrices[0].rows();
  if (n == 0 || n > 3)
    throw InvalidDescriptor("dimension must be 1, 2 or 3");
  if (gen_coefficients.size() != gen_matrices.size())
    throw InvalidDescriptor("one coefficient vector per generator required");
  for (const auto& a : gen_matrices)
    if (a.rows() != n || a.cols() != n)
      throw InvalidDescriptor("generator matrices of mixed dimension");
  for (const auto& c : gen_coefficients) {
    if (c.size() != n)
      throw InvalidDescriptor("coefficient vector of wrong dimension");
    for (const auto& x : c)
      if (x == 0) throw InvalidDescriptor("zero coefficient");
  }
  for (const auto& q : square_classes)
    if (q == 0) throw InvalidDescriptor("zero square class");

  MonomialActionDescriptor d;
  d.group = share(FiniteGroup::from_matrices(gen_matrices, budget));
  d.dimension = n;
  d.square_classes = std::move(square_classes);
  const FiniteGroup& g = *d.group;

  // the group deduplicates generators, so map its generator positions back
  // to input positions
  std::vector<std::size_t> elem_of(gen_matrices.size());
  for (std::size_t k = 0; k < gen_matrices.size(); ++k) {
    std::size_t e = 0;
    while (g.matrix(e) != gen_matrices[k]) ++e;
    elem_of[k] = e;
  }
  const auto& ggens = g.generator_indices();
  std::vector<std::size_t> input_of(ggens.size());
  for (std::size_t p = 0; p < ggens.size(); ++p)
    input_of[p] = static_cast<std::size_t>(
        std::find(elem_of.begin(), elem_of.end(), ggens[p]) - elem_of.begin());

  // extend coefficients along generator words: c(prev * gen)
  d.coefficients.assign(g.order(), {});
  std::vector<char> done(g.order(), 0);
  d.coefficients[g.identity()].assign(n, mpq_class(1));
  done[g.identity()] = 1;
  for (std::size_t a = 0; a < g.order(); ++a) {
    if (done[a]) continue;
    std::vector<std::size_t> chain;
    std::size_t x = a;
    while (!done[x]) {
      chain.push_back(x);
      x = g.word_link(x).prev;
    }
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
      const auto& wl = g.word_link(*it);
      std::size_t k = input_of[wl.gen];
      d.coefficients[*it] = compose_coeffs(
          d.coefficients[wl.prev], gen_coefficients[k], gen_matrices[k]);
      done[*it] = 1;
    }
  }
  // every supplied generator coefficient must agree with the extension
  for (std::size_t k = 0; k < gen_coefficients.size(); ++k)
    if (d.coefficients[elem_of[k]] != gen_coefficients[k])
      throw InvalidDescriptor("generator coefficients are inconsistent");
  // eager consistency check on every pair
  for (std::size_t s = 0; s < g.order(); ++s)
    for (std::size_t t = 0; t < g.order(); ++t) {
      auto expect = compose_coeffs(d.coefficients[s], d.coefficients[t],
                                   g.matrix(t));
      if (expect != d.coefficients[g.mult(s, t)])
        throw InvalidDescriptor("coefficients violate the composition rule");
    }
  return d;
}

GLattice MonomialActionDescriptor::matrix_part_lattice() const {
  std::vector<IntMatrix> acts(group->order());
  for (std::size_t e = 0; e < group->order(); ++e)
    acts[e] = group->matrix(group->inverse(e)).transpose();
  return GLattice::from_element_actions(group, std::move(acts),
                                        "matrix-group");
}

}  // namespace torat
