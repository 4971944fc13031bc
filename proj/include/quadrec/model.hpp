// SPDX-License-Identifier: Apache-2.0
//
// Profile-extended folksonomy model: a 4-adic relation Y over users, tags,
// resources and profile attributes, plus the quadri-concept structure
// (maximal boxes U×T×R×P contained in Y).
#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "quadrec/bitset.hpp"
#include "quadrec/errors.hpp"

namespace quadrec {

enum class Dimension : std::uint8_t { User = 0, Tag = 1, Resource = 2, Profile = 3 };

inline constexpr std::array<Dimension, 4> kAllDimensions = {
    Dimension::User, Dimension::Tag, Dimension::Resource, Dimension::Profile};

inline const char* dimension_name(Dimension d) {
  switch (d) {
    case Dimension::User: return "user";
    case Dimension::Tag: return "tag";
    case Dimension::Resource: return "resource";
    case Dimension::Profile: return "profile";
  }
  return "?";
}

// Sorted ascending, duplicate-free element indices of one dimension.
using IndexSet = std::vector<std::uint32_t>;

struct ElementId {
  Dimension dimension;
  std::uint32_t index;
  auto operator<=>(const ElementId&) const = default;
};

// One tag assignment: user annotated resource with tag.
struct Tagging {
  std::string user, tag, resource;
};

// user label -> set of atomic profile-attribute labels
using Demographics = std::map<std::string, std::set<std::string>>;

struct Quadruple {
  std::uint32_t user, tag, resource, profile;
  auto operator<=>(const Quadruple&) const = default;
};

// Per-dimension minimum cardinalities for frequent quadri-concepts.
struct SupportThresholds {
  std::uint32_t minsupp_u = 1, minsupp_t = 1, minsupp_r = 1, minsupp_p = 1;

  bool valid() const { return minsupp_u >= 1 && minsupp_t >= 1 && minsupp_r >= 1 && minsupp_p >= 1; }

  std::uint32_t get(Dimension d) const {
    switch (d) {
      case Dimension::User: return minsupp_u;
      case Dimension::Tag: return minsupp_t;
      case Dimension::Resource: return minsupp_r;
      case Dimension::Profile: return minsupp_p;
    }
    return 1;
  }

  friend bool operator==(const SupportThresholds&, const SupportThresholds&) = default;
};

// A maximal box of the relation: extent (users) × modus (tags) × intent
// (resources) × variable (profile attributes). Component sets are kept
// sorted ascending, so set equality is sequence equality.
struct QuadriConcept {
  IndexSet extent;
  IndexSet modus;
  IndexSet intent;
  IndexSet variable;

  const IndexSet& get(Dimension d) const {
    switch (d) {
      case Dimension::User: return extent;
      case Dimension::Tag: return modus;
      case Dimension::Resource: return intent;
      case Dimension::Profile: return variable;
    }
    return extent;
  }
  IndexSet& get(Dimension d) {
    return const_cast<IndexSet&>(static_cast<const QuadriConcept*>(this)->get(d));
  }

  bool meets(const SupportThresholds& th) const {
    return extent.size() >= th.minsupp_u && modus.size() >= th.minsupp_t &&
           intent.size() >= th.minsupp_r && variable.size() >= th.minsupp_p;
  }

  auto operator<=>(const QuadriConcept&) const = default;
};

// Immutable after construction; safe to share across threads.
//
// Element tables are interned in lexicographic label order, so identical
// inputs (as multisets) produce identical models. Each tagging (u,t,r)
// expands to one quadruple (u,t,r,p) per attribute p of u; membership is
// answered from a packed triple set plus per-user attribute bitsets.
class PFolksonomy {
 public:
  // Users and attributes come from demographics plus taggings; tags and
  // resources from taggings. A demographics entry with an empty attribute
  // set is treated as absent. Users that never tag are kept (they can still
  // receive recommendations through their profile).
  static PFolksonomy build(const std::vector<Tagging>& taggings, const Demographics& demographics) {
    if (taggings.empty()) throw EmptyInput();

    std::set<std::string> users, tags, resources, attrs;
    for (const auto& [user, uattrs] : demographics) {
      if (uattrs.empty()) continue;
      users.insert(user);
      attrs.insert(uattrs.begin(), uattrs.end());
    }
    for (const auto& t : taggings) {
      auto it = demographics.find(t.user);
      if (it == demographics.end() || it->second.empty()) throw MissingProfile(t.user);
      tags.insert(t.tag);
      resources.insert(t.resource);
    }

    std::array<std::vector<std::string>, 4> tables;
    tables[0].assign(users.begin(), users.end());
    tables[1].assign(tags.begin(), tags.end());
    tables[2].assign(resources.begin(), resources.end());
    tables[3].assign(attrs.begin(), attrs.end());

    std::array<std::unordered_map<std::string_view, std::uint32_t>, 4> lookup;
    for (int d = 0; d < 4; ++d)
      for (std::uint32_t i = 0; i < tables[d].size(); ++i) lookup[d].emplace(tables[d][i], i);

    std::vector<IndexSet> user_attrs(tables[0].size());
    for (const auto& [user, uattrs] : demographics) {
      if (uattrs.empty()) continue;
      IndexSet& ia = user_attrs[lookup[0].at(user)];
      for (const auto& a : uattrs) ia.push_back(lookup[3].at(a));
      std::sort(ia.begin(), ia.end());
    }

    std::vector<std::array<std::uint32_t, 3>> triples;
    triples.reserve(taggings.size());
    for (const auto& t : taggings)
      triples.push_back({lookup[0].at(t.user), lookup[1].at(t.tag), lookup[2].at(t.resource)});
    std::sort(triples.begin(), triples.end());
    triples.erase(std::unique(triples.begin(), triples.end()), triples.end());

    return assemble(std::move(tables), std::move(user_attrs), std::move(triples));
  }

  // Builds a model from already-interned parts, validating every invariant.
  // Used by deserialization; build() funnels through here as well.
  static PFolksonomy assemble(std::array<std::vector<std::string>, 4> tables,
                              std::vector<IndexSet> user_attrs,
                              std::vector<std::array<std::uint32_t, 3>> triples) {
    PFolksonomy f;
    f.tables_ = std::move(tables);
    f.user_attrs_ = std::move(user_attrs);
    f.triples_ = std::move(triples);
    f.validate_and_index();
    return f;
  }

  const std::vector<std::string>& table(Dimension d) const {
    return tables_[static_cast<int>(d)];
  }
  const std::vector<std::string>& users() const { return tables_[0]; }
  const std::vector<std::string>& tags() const { return tables_[1]; }
  const std::vector<std::string>& resources() const { return tables_[2]; }
  const std::vector<std::string>& profiles() const { return tables_[3]; }

  std::size_t size(Dimension d) const { return tables_[static_cast<int>(d)].size(); }

  const std::string& label(Dimension d, std::uint32_t i) const {
    const auto& t = table(d);
    if (i >= t.size()) throw InvalidIndex(dimension_name(d), i, t.size());
    return t[i];
  }

  bool valid(ElementId id) const { return id.index < size(id.dimension); }
  const std::string& label(ElementId id) const { return label(id.dimension, id.index); }

  std::optional<std::uint32_t> find(Dimension d, std::string_view lbl) const {
    const auto& m = lookup_[static_cast<int>(d)];
    auto it = m.find(lbl);
    if (it == m.end()) return std::nullopt;
    return it->second;
  }

  // Membership test for Y; constant time, out-of-range indices are absent.
  bool contains(std::uint32_t u, std::uint32_t t, std::uint32_t r, std::uint32_t p) const {
    if (u >= size(Dimension::User) || t >= size(Dimension::Tag) ||
        r >= size(Dimension::Resource) || p >= size(Dimension::Profile))
      return false;
    return user_attr_bits_[u].test(p) && triple_set_.count(pack(u, t, r)) != 0;
  }

  std::uint64_t quadruple_count() const { return quad_count_; }

  // Materializes Y in canonical (u,t,r,p) order.
  std::vector<Quadruple> quadruples() const {
    std::vector<Quadruple> out;
    out.reserve(quad_count_);
    for (const auto& tr : triples_)
      for (std::uint32_t p : user_attrs_[tr[0]]) out.push_back({tr[0], tr[1], tr[2], p});
    return out;
  }

  // Distinct tag assignments (u,t,r) in canonical order; Y is their
  // expansion over the tagging user's attributes.
  const std::vector<std::array<std::uint32_t, 3>>& taggings() const { return triples_; }

  const IndexSet& user_attributes(std::uint32_t u) const {
    if (u >= user_attrs_.size()) throw InvalidIndex("user", u, user_attrs_.size());
    return user_attrs_[u];
  }

  const Bitset& user_attribute_bits(std::uint32_t u) const {
    if (u >= user_attr_bits_.size()) throw InvalidIndex("user", u, user_attr_bits_.size());
    return user_attr_bits_[u];
  }

  // Distinct resources the user has tagged.
  IndexSet user_resources(std::uint32_t u) const {
    if (u >= size(Dimension::User)) throw InvalidIndex("user", u, size(Dimension::User));
    IndexSet out;
    for (const auto& tr : triples_)
      if (tr[0] == u) out.push_back(tr[2]);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  // Number of quadruples of Y containing the given element.
  std::uint64_t frequency(Dimension d, std::uint32_t i) const {
    const auto& v = freq_[static_cast<int>(d)];
    if (i >= v.size()) throw InvalidIndex(dimension_name(d), i, v.size());
    return v[i];
  }

  // Label-level views, used to rebuild derived models (e.g. holdout splits).
  std::vector<Tagging> tagging_labels() const {
    std::vector<Tagging> out;
    out.reserve(triples_.size());
    for (const auto& tr : triples_)
      out.push_back({tables_[0][tr[0]], tables_[1][tr[1]], tables_[2][tr[2]]});
    return out;
  }

  Demographics demographic_labels() const {
    Demographics out;
    for (std::uint32_t u = 0; u < tables_[0].size(); ++u) {
      auto& s = out[tables_[0][u]];
      for (std::uint32_t p : user_attrs_[u]) s.insert(tables_[3][p]);
    }
    return out;
  }

 private:
  PFolksonomy() = default;

  // 24 bits of user, 20 of tag, 20 of resource.
  static constexpr std::size_t kMaxUsers = std::size_t{1} << 24;
  static constexpr std::size_t kMaxTags = std::size_t{1} << 20;
  static constexpr std::size_t kMaxResources = std::size_t{1} << 20;

  static std::uint64_t pack(std::uint32_t u, std::uint32_t t, std::uint32_t r) {
    return (static_cast<std::uint64_t>(u) << 40) | (static_cast<std::uint64_t>(t) << 20) | r;
  }

  void validate_and_index() {
    if (tables_[0].size() > kMaxUsers) throw TooLarge("more than 2^24 users");
    if (tables_[1].size() > kMaxTags) throw TooLarge("more than 2^20 tags");
    if (tables_[2].size() > kMaxResources) throw TooLarge("more than 2^20 resources");

    for (int d = 0; d < 4; ++d) {
      const auto& t = tables_[d];
      for (std::size_t i = 1; i < t.size(); ++i)
        if (!(t[i - 1] < t[i]))
          throw DataError(std::string("model: ") + dimension_name(static_cast<Dimension>(d)) +
                          " table is not in strictly increasing label order");
      lookup_[d].clear();
      lookup_[d].reserve(t.size());
      for (std::uint32_t i = 0; i < t.size(); ++i) lookup_[d].emplace(t[i], i);
    }

    if (user_attrs_.size() != tables_[0].size())
      throw DataError("model: attribute list count does not match user table");
    const std::size_t np = tables_[3].size();
    user_attr_bits_.assign(tables_[0].size(), Bitset(np));
    for (std::uint32_t u = 0; u < user_attrs_.size(); ++u) {
      const IndexSet& ia = user_attrs_[u];
      if (ia.empty()) throw DataError("model: user '" + tables_[0][u] + "' has no attributes");
      for (std::size_t i = 0; i < ia.size(); ++i) {
        if (ia[i] >= np) throw InvalidIndex("profile", ia[i], np);
        if (i > 0 && ia[i - 1] >= ia[i])
          throw DataError("model: attribute set of user '" + tables_[0][u] +
                          "' is not sorted and duplicate-free");
        user_attr_bits_[u].set(ia[i]);
      }
    }

    triple_set_.clear();
    triple_set_.reserve(triples_.size() * 2);
    quad_count_ = 0;
    for (int d = 0; d < 4; ++d) freq_[d].assign(tables_[d].size(), 0);
    const std::array<std::uint32_t, 3>* prev = nullptr;
    for (const auto& tr : triples_) {
      if (tr[0] >= tables_[0].size()) throw InvalidIndex("user", tr[0], tables_[0].size());
      if (tr[1] >= tables_[1].size()) throw InvalidIndex("tag", tr[1], tables_[1].size());
      if (tr[2] >= tables_[2].size()) throw InvalidIndex("resource", tr[2], tables_[2].size());
      if (prev && !(*prev < tr)) throw DataError("model: taggings are not sorted and duplicate-free");
      prev = &tr;
      triple_set_.insert(pack(tr[0], tr[1], tr[2]));
      const std::uint64_t expansion = user_attrs_[tr[0]].size();
      quad_count_ += expansion;
      freq_[0][tr[0]] += expansion;
      freq_[1][tr[1]] += expansion;
      freq_[2][tr[2]] += expansion;
      for (std::uint32_t p : user_attrs_[tr[0]]) freq_[3][p] += 1;
    }
  }

  std::array<std::vector<std::string>, 4> tables_;
  std::array<std::unordered_map<std::string_view, std::uint32_t>, 4> lookup_;
  std::vector<std::array<std::uint32_t, 3>> triples_;
  std::unordered_set<std::uint64_t> triple_set_;
  std::vector<IndexSet> user_attrs_;
  std::vector<Bitset> user_attr_bits_;
  std::array<std::vector<std::uint64_t>, 4> freq_;
  std::uint64_t quad_count_ = 0;
};

namespace detail {

inline void check_concept_indices(const QuadriConcept& c, const PFolksonomy& f) {
  for (Dimension d : kAllDimensions) {
    const std::size_t n = f.size(d);
    for (std::uint32_t e : c.get(d))
      if (e >= n) throw InvalidIndex(dimension_name(d), e, n);
  }
}

// Would adding element e on dimension d keep the box inside Y?
inline bool element_extends(const QuadriConcept& c, Dimension d, std::uint32_t e,
                            const PFolksonomy& f) {
  auto all_in = [&](const IndexSet& U, const IndexSet& T, const IndexSet& R, const IndexSet& P) {
    for (std::uint32_t u : U)
      for (std::uint32_t t : T)
        for (std::uint32_t r : R)
          for (std::uint32_t p : P)
            if (!f.contains(u, t, r, p)) return false;
    return true;
  };
  switch (d) {
    case Dimension::User: return all_in({e}, c.modus, c.intent, c.variable);
    case Dimension::Tag: return all_in(c.extent, {e}, c.intent, c.variable);
    case Dimension::Resource: return all_in(c.extent, c.modus, {e}, c.variable);
    case Dimension::Profile: return all_in(c.extent, c.modus, c.intent, {e});
  }
  return false;
}

}  // namespace detail

// Is the full cross product of the concept's components inside Y?
inline bool box_contained(const QuadriConcept& c, const PFolksonomy& f) {
  detail::check_concept_indices(c, f);
  for (std::uint32_t u : c.extent)
    for (std::uint32_t t : c.modus)
      for (std::uint32_t r : c.intent)
        for (std::uint32_t p : c.variable)
          if (!f.contains(u, t, r, p)) return false;
  return true;
}

// True iff no single element of any dimension can be added to the box
// without breaking containment. Expects box containment to already hold.
inline bool is_maximal(const QuadriConcept& c, const PFolksonomy& f) {
  detail::check_concept_indices(c, f);
  for (Dimension d : kAllDimensions) {
    const IndexSet& members = c.get(d);
    const std::uint32_t n = static_cast<std::uint32_t>(f.size(d));
    for (std::uint32_t e = 0; e < n; ++e) {
      if (std::binary_search(members.begin(), members.end(), e)) continue;
      if (detail::element_extends(c, d, e, f)) return false;
    }
  }
  return true;
}

}  // namespace quadrec
