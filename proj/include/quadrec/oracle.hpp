// SPDX-License-Identifier: Apache-2.0
//
// Exhaustive reference enumerator for frequent quadri-concepts on tiny
// relations. Kept deliberately separate from the miner: different traversal
// (subset iteration over users × profiles, tag subsets, derived resources),
// different set machinery, own membership structure. Intended for validating
// the miner, not for real workloads.
#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <bitset>
#include <cstdint>
#include <vector>

#include "quadrec/errors.hpp"
#include "quadrec/miner.hpp"
#include "quadrec/model.hpp"

namespace quadrec {

namespace detail {

constexpr std::uint32_t kOracleDimCap = 12;
constexpr std::size_t kOracleCells = kOracleDimCap * kOracleDimCap;

inline IndexSet mask_to_indices(std::uint32_t mask) {
  IndexSet out;
  while (mask) {
    out.push_back(static_cast<std::uint32_t>(std::countr_zero(mask)));
    mask &= mask - 1;
  }
  return out;
}

}  // namespace detail

// Enumerates every frequent quadri-concept of f by exhaustive subset
// iteration. Rejects relations with more than 12 elements in any dimension.
inline ConceptSet enumerate_bruteforce(const PFolksonomy& f, const SupportThresholds& th) {
  if (!th.valid()) throw UsageError("support thresholds must all be at least 1");
  const std::uint32_t nu = static_cast<std::uint32_t>(f.size(Dimension::User));
  const std::uint32_t nt = static_cast<std::uint32_t>(f.size(Dimension::Tag));
  const std::uint32_t nr = static_cast<std::uint32_t>(f.size(Dimension::Resource));
  const std::uint32_t np = static_cast<std::uint32_t>(f.size(Dimension::Profile));
  for (Dimension d : kAllDimensions)
    if (f.size(d) > detail::kOracleDimCap)
      throw TooLarge("brute-force enumeration handles at most 12 elements per dimension");

  const std::vector<Quadruple> quads = f.quadruples();  // canonical order
  auto member = [&](std::uint32_t u, std::uint32_t t, std::uint32_t r, std::uint32_t p) {
    return std::binary_search(quads.begin(), quads.end(), Quadruple{u, t, r, p});
  };

  // (user, profile) -> tag×resource incidence
  std::vector<std::bitset<detail::kOracleCells>> up(static_cast<std::size_t>(nu) * np);
  for (const Quadruple& q : quads)
    up[static_cast<std::size_t>(q.user) * np + q.profile].set(q.tag * nr + q.resource);

  std::vector<QuadriConcept> found;
  const std::uint32_t umax = nu ? (1u << nu) : 1u;
  const std::uint32_t pmax = np ? (1u << np) : 1u;
  const std::uint32_t tmax = nt ? (1u << nt) : 1u;
  for (std::uint32_t um = 1; um < umax; ++um) {
    if (static_cast<std::uint32_t>(std::popcount(um)) < th.minsupp_u) continue;
    for (std::uint32_t pm = 1; pm < pmax; ++pm) {
      if (static_cast<std::uint32_t>(std::popcount(pm)) < th.minsupp_p) continue;
      std::bitset<detail::kOracleCells> common;
      common.set();
      for (std::uint32_t u = 0; u < nu && common.any(); ++u) {
        if (!(um >> u & 1)) continue;
        for (std::uint32_t p = 0; p < np && common.any(); ++p)
          if (pm >> p & 1) common &= up[static_cast<std::size_t>(u) * np + p];
      }
      if (common.none()) continue;
      for (std::uint32_t tm = 1; tm < tmax; ++tm) {
        if (static_cast<std::uint32_t>(std::popcount(tm)) < th.minsupp_t) continue;
        IndexSet rs;
        for (std::uint32_t r = 0; r < nr; ++r) {
          bool all = true;
          for (std::uint32_t t = 0; t < nt && all; ++t)
            if ((tm >> t & 1) && !common.test(t * nr + r)) all = false;
          if (all) rs.push_back(r);
        }
        if (rs.size() < th.minsupp_r) continue;
        found.push_back({detail::mask_to_indices(um), detail::mask_to_indices(tm), rs,
                         detail::mask_to_indices(pm)});
      }
    }
  }

  // Keep only the boxes no single element can extend.
  ConceptSet out;
  for (QuadriConcept& c : found) {
    bool extendable = false;
    for (Dimension d : kAllDimensions) {
      const IndexSet& members = c.get(d);
      const std::uint32_t n = static_cast<std::uint32_t>(f.size(d));
      for (std::uint32_t e = 0; e < n && !extendable; ++e) {
        if (std::binary_search(members.begin(), members.end(), e)) continue;
        bool fits = true;
        IndexSet ext{e};
        const IndexSet& U = d == Dimension::User ? ext : c.extent;
        const IndexSet& T = d == Dimension::Tag ? ext : c.modus;
        const IndexSet& R = d == Dimension::Resource ? ext : c.intent;
        const IndexSet& P = d == Dimension::Profile ? ext : c.variable;
        for (std::uint32_t u : U)
          for (std::uint32_t t : T)
            for (std::uint32_t r : R)
              for (std::uint32_t p : P)
                if (!member(u, t, r, p)) {
                  fits = false;
                  goto next_element;
                }
      next_element:
        if (fits) extendable = true;
      }
      if (extendable) break;
    }
    if (!extendable) out.concepts.push_back(std::move(c));
  }

  std::sort(out.concepts.begin(), out.concepts.end());
  out.concepts.erase(std::unique(out.concepts.begin(), out.concepts.end()), out.concepts.end());
  return out;
}

}  // namespace quadrec
