// SPDX-License-Identifier: Apache-2.0
//
// Enumeration of all frequent quadri-concepts of a p-folksonomy.
//
// The search is a divide-and-conquer over elements: every node carries, per
// dimension, the elements fixed in the box (in), the still-undecided ones
// (cand) and the explicitly branched-away ones (out). A node is repeatedly
// tightened: candidates that can no longer extend the fixed box are dropped,
// and candidates whose full cross product with the current upper bound lies
// in Y are pulled into the box (they belong to every maximal box the node
// can still reach). Branches die once in ∪ cand falls below a threshold in
// some dimension. A leaf emits its box unless a branched-away element could
// still extend it, which both guarantees maximality and suppresses
// duplicates without a global seen-set.
//
// The closure checks run on bitset slices: per user a tag×resource
// incidence matrix, per attribute a user set. The profile dimension needs no
// slice of its own because a tagging expands uniformly over its user's
// attributes (model invariant). All per-node working memory lives in a
// reusable Scratch, one per worker thread.
#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdint>
#include <deque>
#include <thread>
#include <utility>
#include <vector>

#include "quadrec/bitset.hpp"
#include "quadrec/errors.hpp"
#include "quadrec/model.hpp"

namespace quadrec {

// Canonically ordered, duplicate-free list of quadri-concepts
// (sorted by extent, then modus, intent, variable).
struct ConceptSet {
  std::vector<QuadriConcept> concepts;

  std::size_t size() const { return concepts.size(); }
  bool empty() const { return concepts.empty(); }
  auto begin() const { return concepts.begin(); }
  auto end() const { return concepts.end(); }

  friend bool operator==(const ConceptSet&, const ConceptSet&) = default;
};

struct MineOptions {
  unsigned parallelism = 1;  // worker threads exploring subtrees
};

namespace detail {

struct SearchNode {
  std::array<Bitset, 4> in, cand, out;
  // Branching rotates over dimensions: a box constrains candidates only
  // through its populated dimensions, so picking all users before any tag or
  // resource would leave the closure checks vacuous and the tree exponential.
  int start_dim = 0;
};

class Miner {
 public:
  // Per-thread working buffers; no allocation on the hot path after warmup.
  struct Scratch {
    Bitset tr_in, tr_ub;      // ∩ user_tr over in / upper-bound users
    Bitset mask_in, mask_ub;  // product masks of (tags × resources)
    std::array<Bitset, 4> ub;
    std::vector<std::uint32_t> tags, resources;  // extracted index lists

    explicit Scratch(const Miner& m) {
      const std::size_t cells = static_cast<std::size_t>(m.n_[1]) * m.n_[2];
      tr_in.resize(cells);
      tr_ub.resize(cells);
      mask_in.resize(cells);
      mask_ub.resize(cells);
      for (int d = 0; d < 4; ++d) ub[d].resize(m.n_[d]);
    }
  };

  Miner(const PFolksonomy& f, const SupportThresholds& th)
      : n_{static_cast<std::uint32_t>(f.size(Dimension::User)),
           static_cast<std::uint32_t>(f.size(Dimension::Tag)),
           static_cast<std::uint32_t>(f.size(Dimension::Resource)),
           static_cast<std::uint32_t>(f.size(Dimension::Profile))},
        th_{th.minsupp_u, th.minsupp_t, th.minsupp_r, th.minsupp_p} {
    user_tr_.assign(n_[0], Bitset(static_cast<std::size_t>(n_[1]) * n_[2]));
    for (const auto& tr : f.taggings())
      user_tr_[tr[0]].set(static_cast<std::size_t>(tr[1]) * n_[2] + tr[2]);
    user_attrs_.reserve(n_[0]);
    for (std::uint32_t u = 0; u < n_[0]; ++u) user_attrs_.push_back(f.user_attribute_bits(u));
    attr_users_.assign(n_[3], Bitset(n_[0]));
    for (std::uint32_t u = 0; u < n_[0]; ++u)
      for (std::uint32_t p : f.user_attributes(u)) attr_users_[p].set(u);
    reduce();
  }

  Scratch scratch() const { return Scratch(*this); }

  SearchNode root() const {
    SearchNode nd;
    for (int d = 0; d < 4; ++d) {
      nd.in[d].resize(n_[d]);
      nd.out[d].resize(n_[d]);
      nd.cand[d] = alive_[d];
    }
    return nd;
  }

  // Shrinks cand / grows in until stable. Returns false when the subtree can
  // no longer contain a frequent concept.
  bool tighten(SearchNode& nd, Scratch& s) const {
    for (bool changed = true; changed;) {
      changed = false;
      prepare_in(nd, s);

      // Drop candidates that no longer extend the fixed box.
      for (std::size_t e = nd.cand[0].find_first(); e != Bitset::npos;
           e = nd.cand[0].find_next(e))
        if (!user_attrs_[e].contains_all(nd.in[3]) || !user_tr_[e].contains_all(s.mask_in)) {
          nd.cand[0].reset(e);
          changed = true;
        }
      for (std::size_t e = nd.cand[1].find_first(); e != Bitset::npos;
           e = nd.cand[1].find_next(e))
        if (!tag_covers(s.tr_in, s.resources, static_cast<std::uint32_t>(e))) {
          nd.cand[1].reset(e);
          changed = true;
        }
      for (std::size_t e = nd.cand[2].find_first(); e != Bitset::npos;
           e = nd.cand[2].find_next(e))
        if (!resource_covers(s.tr_in, s.tags, static_cast<std::uint32_t>(e))) {
          nd.cand[2].reset(e);
          changed = true;
        }
      for (std::size_t e = nd.cand[3].find_first(); e != Bitset::npos;
           e = nd.cand[3].find_next(e))
        if (!attr_users_[e].contains_all(nd.in[0])) {
          nd.cand[3].reset(e);
          changed = true;
        }

      // Pull in candidates that belong to every maximal box in the interval
      // [in, in ∪ cand].
      prepare_ub(nd, s);
      for (std::size_t e = nd.cand[0].find_first(); e != Bitset::npos;
           e = nd.cand[0].find_next(e))
        if (user_attrs_[e].contains_all(s.ub[3]) && user_tr_[e].contains_all(s.mask_ub)) {
          nd.cand[0].reset(e);
          nd.in[0].set(e);
          changed = true;
        }
      for (std::size_t e = nd.cand[1].find_first(); e != Bitset::npos;
           e = nd.cand[1].find_next(e))
        if (tag_covers(s.tr_ub, s.resources, static_cast<std::uint32_t>(e))) {
          nd.cand[1].reset(e);
          nd.in[1].set(e);
          changed = true;
        }
      for (std::size_t e = nd.cand[2].find_first(); e != Bitset::npos;
           e = nd.cand[2].find_next(e))
        if (resource_covers(s.tr_ub, s.tags, static_cast<std::uint32_t>(e))) {
          nd.cand[2].reset(e);
          nd.in[2].set(e);
          changed = true;
        }
      for (std::size_t e = nd.cand[3].find_first(); e != Bitset::npos;
           e = nd.cand[3].find_next(e))
        if (attr_users_[e].contains_all(s.ub[0])) {
          nd.cand[3].reset(e);
          nd.in[3].set(e);
          changed = true;
        }
    }
    for (int d = 0; d < 4; ++d)
      if (nd.in[d].count() + nd.cand[d].count() < th_[d]) return false;
    // A branched-away element that still covers the whole upper bound would
    // extend every box this subtree can reach: nothing here is maximal.
    for (std::size_t e = nd.out[0].find_first(); e != Bitset::npos; e = nd.out[0].find_next(e))
      if (user_attrs_[e].contains_all(s.ub[3]) && user_tr_[e].contains_all(s.mask_ub))
        return false;
    for (std::size_t e = nd.out[1].find_first(); e != Bitset::npos; e = nd.out[1].find_next(e))
      if (tag_covers(s.tr_ub, s.resources, static_cast<std::uint32_t>(e))) return false;
    for (std::size_t e = nd.out[2].find_first(); e != Bitset::npos; e = nd.out[2].find_next(e))
      if (resource_covers(s.tr_ub, s.tags, static_cast<std::uint32_t>(e))) return false;
    for (std::size_t e = nd.out[3].find_first(); e != Bitset::npos; e = nd.out[3].find_next(e))
      if (attr_users_[e].contains_all(s.ub[0])) return false;
    return true;
  }

  bool is_leaf(const SearchNode& nd) const {
    for (int d = 0; d < 4; ++d)
      if (nd.cand[d].any()) return false;
    return true;
  }

  void emit_leaf(const SearchNode& nd, Scratch& s, std::vector<QuadriConcept>& sink) const {
    for (int d = 0; d < 4; ++d)
      if (nd.in[d].count() < th_[d]) return;
    prepare_in(nd, s);
    // Closed-box check against the branched-away elements; dropped
    // candidates cannot extend a superset of the box they failed against.
    for (std::size_t e = nd.out[0].find_first(); e != Bitset::npos; e = nd.out[0].find_next(e))
      if (user_attrs_[e].contains_all(nd.in[3]) && user_tr_[e].contains_all(s.mask_in)) return;
    for (std::size_t e = nd.out[1].find_first(); e != Bitset::npos; e = nd.out[1].find_next(e))
      if (tag_covers(s.tr_in, s.resources, static_cast<std::uint32_t>(e))) return;
    for (std::size_t e = nd.out[2].find_first(); e != Bitset::npos; e = nd.out[2].find_next(e))
      if (resource_covers(s.tr_in, s.tags, static_cast<std::uint32_t>(e))) return;
    for (std::size_t e = nd.out[3].find_first(); e != Bitset::npos; e = nd.out[3].find_next(e))
      if (attr_users_[e].contains_all(nd.in[0])) return;
    sink.push_back({nd.in[0].to_indices(), nd.in[1].to_indices(), nd.in[2].to_indices(),
                    nd.in[3].to_indices()});
  }

  // Expands a tightened node one step; emits instead when it is a leaf.
  bool expand(const SearchNode& nd, Scratch& s, SearchNode& include, SearchNode& exclude,
              std::vector<QuadriConcept>& sink) const {
    if (is_leaf(nd)) {
      emit_leaf(nd, s, sink);
      return false;
    }
    auto [d, e] = pick(nd);
    include = nd;
    include.cand[d].reset(e);
    include.in[d].set(e);
    include.start_dim = (d + 1) % 4;
    exclude = nd;
    exclude.cand[d].reset(e);
    exclude.out[d].set(e);
    exclude.start_dim = (d + 1) % 4;
    return true;
  }

  void dfs(SearchNode nd, Scratch& s, std::vector<QuadriConcept>& sink) const {
    if (is_leaf(nd)) {
      emit_leaf(nd, s, sink);
      return;
    }
    auto [d, e] = pick(nd);
    SearchNode incl = nd;
    incl.cand[d].reset(e);
    incl.in[d].set(e);
    incl.start_dim = (d + 1) % 4;
    if (tighten(incl, s)) dfs(std::move(incl), s, sink);
    nd.cand[d].reset(e);
    nd.out[d].set(e);
    nd.start_dim = (d + 1) % 4;
    if (tighten(nd, s)) dfs(std::move(nd), s, sink);
  }

 private:
  // Threshold core reduction, run once before the search. Iteratively
  // removes elements that provably occur in no frequent concept: a (tag,
  // resource) cell carried by fewer than minsupp_u surviving users supports
  // nothing; a tag (resource) whose surviving row (column) cannot span
  // minsupp_r (minsupp_t) is dead; a user must be able to host a
  // minsupp_t × minsupp_r rectangle of surviving cells and carry minsupp_p
  // surviving attributes; an attribute needs minsupp_u surviving carriers.
  // A removed element can also never extend a frequent box (its closure
  // would be a frequent concept containing it), so dropping it from the
  // root candidates keeps the closedness checks exact.
  void reduce() {
    const std::size_t cells = static_cast<std::size_t>(n_[1]) * n_[2];
    for (int d = 0; d < 4; ++d) {
      alive_[d].resize(n_[d]);
      alive_[d].set_all();
    }
    std::vector<std::uint32_t> cell_users(cells);
    for (bool changed = true; changed;) {
      changed = false;
      std::fill(cell_users.begin(), cell_users.end(), 0);
      for (std::size_t u = alive_[0].find_first(); u != Bitset::npos;
           u = alive_[0].find_next(u))
        for (std::size_t cell = user_tr_[u].find_first(); cell != Bitset::npos;
             cell = user_tr_[u].find_next(cell))
          ++cell_users[cell];

      auto cell_alive = [&](std::size_t cell) {
        return cell_users[cell] >= th_[0] && alive_[1].test(cell / n_[2]) &&
               alive_[2].test(cell % n_[2]);
      };

      std::vector<std::uint32_t> row(n_[1], 0), col(n_[2], 0);
      for (std::size_t cell = 0; cell < cells; ++cell)
        if (cell_alive(cell)) {
          ++row[cell / n_[2]];
          ++col[cell % n_[2]];
        }
      for (std::size_t t = alive_[1].find_first(); t != Bitset::npos;
           t = alive_[1].find_next(t))
        if (row[t] < th_[2]) {
          alive_[1].reset(t);
          changed = true;
        }
      for (std::size_t r = alive_[2].find_first(); r != Bitset::npos;
           r = alive_[2].find_next(r))
        if (col[r] < th_[1]) {
          alive_[2].reset(r);
          changed = true;
        }

      for (std::size_t p = alive_[3].find_first(); p != Bitset::npos;
           p = alive_[3].find_next(p)) {
        Bitset carriers = attr_users_[p];
        carriers &= alive_[0];
        if (carriers.count() < th_[0]) {
          alive_[3].reset(p);
          changed = true;
        }
      }

      std::vector<std::uint32_t> tags_seen(n_[1], 0), res_seen(n_[2], 0);
      for (std::size_t u = alive_[0].find_first(); u != Bitset::npos;
           u = alive_[0].find_next(u)) {
        std::uint32_t distinct_tags = 0, distinct_res = 0, usable = 0;
        std::fill(tags_seen.begin(), tags_seen.end(), 0);
        std::fill(res_seen.begin(), res_seen.end(), 0);
        for (std::size_t cell = user_tr_[u].find_first(); cell != Bitset::npos;
             cell = user_tr_[u].find_next(cell)) {
          if (!cell_alive(cell)) continue;
          ++usable;
          if (!tags_seen[cell / n_[2]]++) ++distinct_tags;
          if (!res_seen[cell % n_[2]]++) ++distinct_res;
        }
        Bitset attrs = user_attrs_[u];
        attrs &= alive_[3];
        if (distinct_tags < th_[1] || distinct_res < th_[2] || usable < th_[1] * th_[2] ||
            attrs.count() < th_[3]) {
          alive_[0].reset(u);
          changed = true;
        }
      }
    }
  }

  // First undecided element of the next undecided dimension, rotating from
  // the node's start dimension. Deterministic.
  std::pair<int, std::uint32_t> pick(const SearchNode& nd) const {
    for (int k = 0; k < 4; ++k) {
      const int d = (nd.start_dim + k) % 4;
      std::size_t e = nd.cand[d].find_first();
      if (e != Bitset::npos) return {d, static_cast<std::uint32_t>(e)};
    }
    return {-1, 0};
  }

  void build_mask(const std::vector<std::uint32_t>& tags,
                  const std::vector<std::uint32_t>& resources, Bitset& out) const {
    out.reset_all();
    for (std::uint32_t t : tags) {
      const std::size_t row = static_cast<std::size_t>(t) * n_[2];
      for (std::uint32_t r : resources) out.set(row + r);
    }
  }

  void prepare_in(const SearchNode& nd, Scratch& s) const {
    s.tags = nd.in[1].to_indices();
    s.resources = nd.in[2].to_indices();
    build_mask(s.tags, s.resources, s.mask_in);
    s.tr_in.set_all();
    for (std::size_t u = nd.in[0].find_first(); u != Bitset::npos; u = nd.in[0].find_next(u))
      s.tr_in &= user_tr_[u];
  }

  void prepare_ub(const SearchNode& nd, Scratch& s) const {
    for (int d = 0; d < 4; ++d) {
      s.ub[d] = nd.in[d];
      s.ub[d] |= nd.cand[d];
    }
    s.tags = s.ub[1].to_indices();
    s.resources = s.ub[2].to_indices();
    build_mask(s.tags, s.resources, s.mask_ub);
    s.tr_ub.set_all();
    for (std::size_t u = s.ub[0].find_first(); u != Bitset::npos; u = s.ub[0].find_next(u))
      s.tr_ub &= user_tr_[u];
  }

  // tag t covers the box iff its row holds every box resource in the
  // intersection slice; symmetric for resources.
  bool tag_covers(const Bitset& tr, const std::vector<std::uint32_t>& resources,
                  std::uint32_t t) const {
    const std::size_t row = static_cast<std::size_t>(t) * n_[2];
    for (std::uint32_t r : resources)
      if (!tr.test(row + r)) return false;
    return true;
  }

  bool resource_covers(const Bitset& tr, const std::vector<std::uint32_t>& tags,
                       std::uint32_t r) const {
    for (std::uint32_t t : tags)
      if (!tr.test(static_cast<std::size_t>(t) * n_[2] + r)) return false;
    return true;
  }

  std::array<std::uint32_t, 4> n_;
  std::array<std::uint32_t, 4> th_;
  std::array<Bitset, 4> alive_;
  std::vector<Bitset> user_tr_;
  std::vector<Bitset> user_attrs_;
  std::vector<Bitset> attr_users_;
};

}  // namespace detail

// Returns exactly the quadri-concepts of f meeting th, canonically ordered.
// Deterministic for any parallelism degree. An empty relation yields an
// empty set.
inline ConceptSet mine(const PFolksonomy& f, const SupportThresholds& th,
                       const MineOptions& opt = {}) {
  if (!th.valid()) throw UsageError("support thresholds must all be at least 1");
  ConceptSet result;
  if (f.taggings().empty()) return result;

  detail::Miner miner(f, th);
  detail::Miner::Scratch scratch = miner.scratch();
  detail::SearchNode root = miner.root();
  if (!miner.tighten(root, scratch)) return result;

  if (opt.parallelism <= 1) {
    miner.dfs(std::move(root), scratch, result.concepts);
  } else {
    // Breadth-first expansion up to a frontier, then one DFS task per node.
    std::deque<detail::SearchNode> frontier;
    frontier.push_back(std::move(root));
    const std::size_t want = static_cast<std::size_t>(opt.parallelism) * 8;
    while (!frontier.empty() && frontier.size() < want) {
      detail::SearchNode nd = std::move(frontier.front());
      frontier.pop_front();
      detail::SearchNode incl, excl;
      if (!miner.expand(nd, scratch, incl, excl, result.concepts)) continue;
      if (miner.tighten(incl, scratch)) frontier.push_back(std::move(incl));
      if (miner.tighten(excl, scratch)) frontier.push_back(std::move(excl));
    }
    std::vector<detail::SearchNode> work(std::make_move_iterator(frontier.begin()),
                                         std::make_move_iterator(frontier.end()));
    std::vector<std::vector<QuadriConcept>> partial(work.size());
    std::atomic<std::size_t> next{0};
    auto run = [&] {
      detail::Miner::Scratch local = miner.scratch();
      for (std::size_t i; (i = next.fetch_add(1)) < work.size();)
        miner.dfs(std::move(work[i]), local, partial[i]);
    };
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < opt.parallelism; ++i) pool.emplace_back(run);
    for (auto& t : pool) t.join();
    for (auto& chunk : partial)
      result.concepts.insert(result.concepts.end(), std::make_move_iterator(chunk.begin()),
                             std::make_move_iterator(chunk.end()));
  }

  std::sort(result.concepts.begin(), result.concepts.end());
  return result;
}

// Keeps the members of cs meeting th, order preserved.
inline ConceptSet filter(const ConceptSet& cs, const SupportThresholds& th) {
  if (!th.valid()) throw UsageError("support thresholds must all be at least 1");
  ConceptSet out;
  for (const QuadriConcept& c : cs.concepts)
    if (c.meets(th)) out.concepts.push_back(c);
  return out;
}

}  // namespace quadrec
