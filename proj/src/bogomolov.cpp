#include "torat/bogomolov.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

#include "torat/glattice.hpp"
#include "torat/int_matrix.hpp"

namespace torat {

std::vector<SubgroupHandle> bicyclic_subgroups(const FiniteGroup& g) {
  std::vector<SubgroupHandle> out;
  for (auto& h : subgroups(g, true))
    if (h.bicyclic) out.push_back(std::move(h));
  return out;
}

B0Report bogomolov_multiplier(GroupPtr g, std::string group_id,
                              std::size_t order_budget) {
  auto start = std::chrono::steady_clock::now();
  const FiniteGroup& gr = *g;
  if (gr.order() > order_budget)
    throw OrderBudgetExceeded("bogomolov_multiplier: order exceeds budget");
  B0Report rep;
  rep.group_id = std::move(group_id);
  rep.bicyclic_classes = bicyclic_subgroups(gr);

  H2Result h2 = h2_qz(g, order_budget);
  std::size_t t = h2.generators.size();
  std::uint64_t m = gr.order();
  IntMatrix drows(t, t);
  for (std::size_t i = 0; i < t; ++i)
    drows.at(i, i) = h2.structure.invariant_factors[i];

  // intersect restriction kernels, largest subgroups first for early exit
  std::vector<const SubgroupHandle*> order_desc;
  for (const auto& a : rep.bicyclic_classes)
    if (a.order() > 1) order_desc.push_back(&a);
  std::sort(order_desc.begin(), order_desc.end(),
            [](const SubgroupHandle* a, const SubgroupHandle* b) {
              return a->order() > b->order();
            });
  IntMatrix k = IntMatrix::identity(t);
  std::vector<std::pair<GroupPtr, std::vector<std::size_t>>> restricted_to;
  for (const SubgroupHandle* a : order_desc) {
    GroupPtr sp = share(subgroup_to_group(*a));
    std::size_t na = sp->order();
    std::vector<CocycleClass2> rs;
    for (const auto& c : h2.generators) {
      std::vector<std::uint64_t> rt(na * na);
      for (std::size_t i = 0; i < na; ++i)
        for (std::size_t j = 0; j < na; ++j)
          rt[i * na + j] = c.at(a->elements[i], a->elements[j]);
      rs.push_back(CocycleClass2{sp, m, std::move(rt)});
    }
    k = intersect_row_lattices(k, coboundary_kernel(rs));
    restricted_to.emplace_back(std::move(sp), a->elements);
    if (quotient_structure(k, drows).is_trivial()) break;
  }

  rep.b0 = quotient_structure(k, drows);
  if (t > 0 && rep.b0.generators) {
    for (std::size_t i = 0; i < rep.b0.invariant_factors.size(); ++i) {
      std::vector<std::uint64_t> tab(gr.order() * gr.order(), 0);
      for (std::size_t a = 0; a < gr.order(); ++a)
        for (std::size_t b = 0; b < gr.order(); ++b) {
          Int v = 0;
          for (std::size_t j = 0; j < t; ++j)
            v += rep.b0.generators->at(i, j) *
                 Int(h2.generators[j].at(a, b));
          v %= m;
          if (v < 0) v += m;
          tab[a * gr.order() + b] = v.get_ui();
        }
      CocycleClass2 c{g, m, std::move(tab)};
      validate_cocycle(c);
      // independent check: the class dies on every bicyclic subgroup
      for (const auto& [sp, elems] : restricted_to) {
        std::size_t na = sp->order();
        std::vector<std::uint64_t> rt(na * na);
        for (std::size_t x = 0; x < na; ++x)
          for (std::size_t y = 0; y < na; ++y)
            rt[x * na + y] = c.at(elems[x], elems[y]);
        if (!is_coboundary(CocycleClass2{sp, m, std::move(rt)}))
          throw std::logic_error(
              "bogomolov_multiplier: generator survives a bicyclic subgroup");
      }
      rep.generators.push_back(std::move(c));
    }
  }
  if (h2.structure.torsion_order() % rep.b0.torsion_order() != 0)
    throw std::logic_error("bogomolov_multiplier: order does not divide H^2");
  rep.seconds = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - start)
                    .count();
  return rep;
}

}  // namespace torat
