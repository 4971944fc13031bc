// SPDX-License-Identifier: Apache-2.0
//
// PersoRec: scan the frequent quadri-concepts whose variable matches the
// query profile and collect proposed users, suggested tags and recommended
// resources, with per-item scores for top-k ranking.
#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "quadrec/errors.hpp"
#include "quadrec/miner.hpp"
#include "quadrec/model.hpp"

namespace quadrec {

enum class ProfileMatchMode {
  Strict,   // concept variable ⊆ query profile
  Overlap,  // concept variable ∩ query profile ≠ ∅
};

enum class RecommendationKind { Users, Tags, Resources };

struct Query {
  std::uint32_t user = 0;
  IndexSet profile;                       // non-empty, sorted ascending
  std::optional<std::uint32_t> resource;  // required only for tag suggestion
};

struct RecommendOptions {
  ProfileMatchMode mode = ProfileMatchMode::Strict;
  // Drop resources the query user already tagged. Off by default (the
  // algorithm recommends them verbatim); the evaluation harness turns it on.
  bool exclude_known_resources = false;
};

struct RecommendationBundle {
  struct Entry {
    std::uint32_t item = 0;
    std::uint64_t global_frequency = 0;   // occurrences of the item in Y
    std::vector<std::uint32_t> concepts;  // provenance: matching concepts that contributed it

    std::uint32_t support() const { return static_cast<std::uint32_t>(concepts.size()); }
  };

  std::vector<Entry> proposed_users;         // ascending by item
  std::vector<Entry> suggested_tags;         // ascending by item
  std::vector<Entry> recommended_resources;  // ascending by item

  const std::vector<Entry>& get(RecommendationKind which) const {
    switch (which) {
      case RecommendationKind::Users: return proposed_users;
      case RecommendationKind::Tags: return suggested_tags;
      case RecommendationKind::Resources: return recommended_resources;
    }
    return proposed_users;
  }

  IndexSet items(RecommendationKind which) const {
    IndexSet out;
    out.reserve(get(which).size());
    for (const Entry& e : get(which)) out.push_back(e.item);
    return out;
  }
};

inline bool profile_matches(const IndexSet& variable, const IndexSet& profile,
                            ProfileMatchMode mode) {
  if (mode == ProfileMatchMode::Strict)
    return std::includes(profile.begin(), profile.end(), variable.begin(), variable.end());
  auto a = variable.begin();
  auto b = profile.begin();
  while (a != variable.end() && b != profile.end()) {
    if (*a == *b) return true;
    if (*a < *b)
      ++a;
    else
      ++b;
  }
  return false;
}

// Runs the concept scan for the query. qc must have been mined from f.
// The query user never appears among the proposed users.
inline RecommendationBundle recommend(const PFolksonomy& f, const ConceptSet& qc,
                                      const Query& q, const RecommendOptions& opt = {}) {
  if (q.user >= f.size(Dimension::User))
    throw InvalidIndex("user", q.user, f.size(Dimension::User));
  if (q.profile.empty()) throw UsageError("query profile must not be empty");
  for (std::uint32_t p : q.profile)
    if (p >= f.size(Dimension::Profile))
      throw InvalidIndex("profile", p, f.size(Dimension::Profile));
  if (q.resource && *q.resource >= f.size(Dimension::Resource))
    throw InvalidIndex("resource", *q.resource, f.size(Dimension::Resource));

  IndexSet known;
  if (opt.exclude_known_resources) known = f.user_resources(q.user);

  std::map<std::uint32_t, std::vector<std::uint32_t>> users, tags, resources;
  for (std::uint32_t ci = 0; ci < qc.concepts.size(); ++ci) {
    const QuadriConcept& c = qc.concepts[ci];
    if (!profile_matches(c.variable, q.profile, opt.mode)) continue;
    for (std::uint32_t u : c.extent)
      if (u != q.user) users[u].push_back(ci);
    if (q.resource && std::binary_search(c.intent.begin(), c.intent.end(), *q.resource))
      for (std::uint32_t t : c.modus) tags[t].push_back(ci);
    for (std::uint32_t r : c.intent)
      if (!std::binary_search(known.begin(), known.end(), r)) resources[r].push_back(ci);
  }

  auto pack = [&](std::map<std::uint32_t, std::vector<std::uint32_t>>& src, Dimension d) {
    std::vector<RecommendationBundle::Entry> out;
    out.reserve(src.size());
    for (auto& [item, provenance] : src)
      out.push_back({item, f.frequency(d, item), std::move(provenance)});
    return out;
  };
  RecommendationBundle b;
  b.proposed_users = pack(users, Dimension::User);
  b.suggested_tags = pack(tags, Dimension::Tag);
  b.recommended_resources = pack(resources, Dimension::Resource);
  return b;
}

// Top-k view of one bundle component: items ordered by contributing-concept
// count (desc), then global frequency in Y (desc), then index (asc).
inline std::vector<std::uint32_t> rank_topk(const RecommendationBundle& b,
                                            RecommendationKind which, std::uint32_t k) {
  if (k < 1) throw UsageError("k must be at least 1");
  std::vector<const RecommendationBundle::Entry*> order;
  order.reserve(b.get(which).size());
  for (const auto& e : b.get(which)) order.push_back(&e);
  std::sort(order.begin(), order.end(),
            [](const RecommendationBundle::Entry* a, const RecommendationBundle::Entry* b) {
              if (a->support() != b->support()) return a->support() > b->support();
              if (a->global_frequency != b->global_frequency)
                return a->global_frequency > b->global_frequency;
              return a->item < b->item;
            });
  if (order.size() > k) order.resize(k);
  std::vector<std::uint32_t> out;
  out.reserve(order.size());
  for (const auto* e : order) out.push_back(e->item);
  return out;
}

}  // namespace quadrec
