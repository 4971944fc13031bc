// SPDX-License-Identifier: Apache-2.0
//
// Precision and holdout evaluation for the recommender. Precision values
// are kept as exact rationals; reports serialize deterministically.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "quadrec/errors.hpp"
#include "quadrec/miner.hpp"
#include "quadrec/model.hpp"
#include "quadrec/recommend.hpp"

namespace quadrec {

// Exact non-negative rational, always reduced, den > 0.
struct Ratio {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Ratio of(std::int64_t n, std::int64_t d) {
    Ratio r{n, d};
    r.reduce();
    return r;
  }

  Ratio operator+(const Ratio& o) const {
    __int128 n = static_cast<__int128>(num) * o.den + static_cast<__int128>(o.num) * den;
    __int128 d = static_cast<__int128>(den) * o.den;
    return from128(n, d);
  }

  Ratio over(std::int64_t d) const {
    return from128(num, static_cast<__int128>(den) * d);
  }

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }

  friend bool operator==(const Ratio&, const Ratio&) = default;

 private:
  static Ratio from128(__int128 n, __int128 d) {
    if (d == 0) throw UsageError("rational with zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    __int128 a = n < 0 ? -n : n, b = d;
    while (b) {
      __int128 t = a % b;
      a = b;
      b = t;
    }
    if (a > 1) {
      n /= a;
      d /= a;
    }
    constexpr __int128 lim = INT64_MAX;
    if (n > lim || n < -lim || d > lim)
      throw DataError("rational overflow while accumulating precision");
    return Ratio{static_cast<std::int64_t>(n), static_cast<std::int64_t>(d)};
  }

  void reduce() { *this = from128(num, den); }
};

// |recommended ∩ relevant| / |recommended|, exact. recommended is an ordered
// list of distinct items; relevant is sorted.
inline Ratio precision(const std::vector<std::uint32_t>& recommended, const IndexSet& relevant) {
  if (recommended.empty()) throw EmptyRecommendation();
  std::int64_t hits = 0;
  for (std::uint32_t item : recommended)
    if (std::binary_search(relevant.begin(), relevant.end(), item)) ++hits;
  return Ratio::of(hits, static_cast<std::int64_t>(recommended.size()));
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

struct HoldoutSplit {
  PFolksonomy train;
  std::map<std::uint32_t, IndexSet> hidden;  // user index (original model) -> hidden resources
  std::uint64_t seed = 0;
  double fraction = 0.0;
};

// For every user with at least two distinct resources, hides ⌈fraction·n⌉ of
// them and rebuilds the training model from the remaining taggings.
//
// The draw is pinned for reproducibility: per user, seed std::mt19937_64
// with splitmix64(splitmix64(seed) + user_index + 1), Fisher-Yates-shuffle
// the user's ascending resource list using j = rng() % (i + 1), and hide the
// first ⌈fraction·n⌉ entries.
inline HoldoutSplit make_split(const PFolksonomy& f, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0))
    throw UsageError("holdout fraction must lie strictly between 0 and 1");

  std::map<std::uint32_t, IndexSet> hidden;
  const std::uint32_t nu = static_cast<std::uint32_t>(f.size(Dimension::User));
  for (std::uint32_t u = 0; u < nu; ++u) {
    IndexSet res = f.user_resources(u);
    if (res.size() < 2) continue;
    std::size_t n_hide =
        static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(res.size())));
    n_hide = std::min(std::max<std::size_t>(n_hide, 1), res.size());
    std::mt19937_64 rng(splitmix64(splitmix64(seed) + u + 1));
    for (std::size_t i = res.size() - 1; i > 0; --i) {
      std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
      std::swap(res[i], res[j]);
    }
    IndexSet h(res.begin(), res.begin() + n_hide);
    std::sort(h.begin(), h.end());
    hidden.emplace(u, std::move(h));
  }

  std::vector<Tagging> keep;
  for (const auto& tr : f.taggings()) {
    auto it = hidden.find(tr[0]);
    if (it != hidden.end() && std::binary_search(it->second.begin(), it->second.end(), tr[2]))
      continue;
    keep.push_back({f.label(Dimension::User, tr[0]), f.label(Dimension::Tag, tr[1]),
                    f.label(Dimension::Resource, tr[2])});
  }
  return HoldoutSplit{PFolksonomy::build(keep, f.demographic_labels()), std::move(hidden), seed,
                      fraction};
}

struct EvaluationConfig {
  SupportThresholds thresholds;
  std::vector<std::uint32_t> ks;
  double fraction = 0.25;
  std::uint64_t seed = 42;
  ProfileMatchMode mode = ProfileMatchMode::Strict;
  unsigned parallelism = 1;
};

struct EvaluationReport {
  SupportThresholds thresholds;
  ProfileMatchMode mode = ProfileMatchMode::Strict;
  double fraction = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::uint32_t> ks;  // sorted, deduplicated
  std::size_t users_evaluated = 0;
  std::size_t users_skipped = 0;  // no hidden items, or empty recommendation list
  std::vector<std::pair<std::uint32_t, Ratio>> per_k;  // mean precision per k
};

// Holdout evaluation of resource recommendation: mine the training model,
// recommend for every user with hidden resources (known-item filtering on),
// rank once per user, and average precision@k against the hidden sets.
// Users without hidden items or with an empty recommendation list are
// skipped, not counted as zero.
inline EvaluationReport evaluate(const PFolksonomy& f, const EvaluationConfig& cfg) {
  if (cfg.ks.empty()) throw UsageError("at least one k is required");
  for (std::uint32_t k : cfg.ks)
    if (k < 1) throw UsageError("k must be at least 1");

  EvaluationReport report;
  report.thresholds = cfg.thresholds;
  report.mode = cfg.mode;
  report.fraction = cfg.fraction;
  report.seed = cfg.seed;
  report.ks = cfg.ks;
  std::sort(report.ks.begin(), report.ks.end());
  report.ks.erase(std::unique(report.ks.begin(), report.ks.end()), report.ks.end());

  HoldoutSplit split = make_split(f, cfg.fraction, cfg.seed);
  const PFolksonomy& train = split.train;
  ConceptSet concepts = mine(train, cfg.thresholds, {cfg.parallelism});
  const std::uint32_t kmax = report.ks.back();

  // Ranked lists come out in train-model indices; translate via labels.
  std::vector<std::uint32_t> to_original(train.size(Dimension::Resource));
  for (std::uint32_t r = 0; r < to_original.size(); ++r)
    to_original[r] = *f.find(Dimension::Resource, train.label(Dimension::Resource, r));

  std::map<std::uint32_t, Ratio> sums;
  for (std::uint32_t k : report.ks) sums[k] = Ratio{};
  const std::uint32_t nu = static_cast<std::uint32_t>(f.size(Dimension::User));
  for (std::uint32_t u = 0; u < nu; ++u) {
    auto hit = split.hidden.find(u);
    if (hit == split.hidden.end()) {
      ++report.users_skipped;
      continue;
    }
    // Hidden users keep their demographics, so they exist in the train model
    // even when all their taggings were held out.
    std::uint32_t tu = *train.find(Dimension::User, f.label(Dimension::User, u));
    Query q{tu, train.user_attributes(tu), std::nullopt};
    RecommendationBundle bundle =
        recommend(train, concepts, q, {cfg.mode, /*exclude_known_resources=*/true});
    std::vector<std::uint32_t> ranked = rank_topk(bundle, RecommendationKind::Resources, kmax);
    if (ranked.empty()) {
      ++report.users_skipped;
      continue;
    }
    ++report.users_evaluated;
    for (std::uint32_t& r : ranked) r = to_original[r];
    for (std::uint32_t k : report.ks) {
      std::vector<std::uint32_t> prefix(ranked.begin(),
                                        ranked.begin() + std::min<std::size_t>(k, ranked.size()));
      sums[k] = sums[k] + precision(prefix, hit->second);
    }
  }

  for (std::uint32_t k : report.ks)
    report.per_k.emplace_back(
        k, report.users_evaluated
               ? sums[k].over(static_cast<std::int64_t>(report.users_evaluated))
               : Ratio{});
  return report;
}

namespace detail {

inline std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace detail

inline const char* mode_name(ProfileMatchMode mode) {
  return mode == ProfileMatchMode::Strict ? "strict" : "overlap";
}

// Line-oriented report: one tab-separated record per line, one line per k.
inline void write_report(const EvaluationReport& r, std::ostream& os) {
  os << "# quadrec evaluation report\n";
  os << "thresholds\t" << r.thresholds.minsupp_u << '\t' << r.thresholds.minsupp_t << '\t'
     << r.thresholds.minsupp_r << '\t' << r.thresholds.minsupp_p << '\n';
  os << "mode\t" << mode_name(r.mode) << '\n';
  os << "fraction\t" << detail::fixed6(r.fraction) << '\n';
  os << "seed\t" << r.seed << '\n';
  os << "ks";
  for (std::uint32_t k : r.ks) os << '\t' << k;
  os << '\n';
  os << "users_evaluated\t" << r.users_evaluated << '\n';
  os << "users_skipped\t" << r.users_skipped << '\n';
  for (const auto& [k, mean] : r.per_k)
    os << "k\t" << k << "\tmean_precision\t" << detail::fixed6(mean.value()) << '\n';
}

// Plot-ready two-column table: k, mean precision.
inline void write_report_table(const EvaluationReport& r, std::ostream& os) {
  os << "# k\tmean_precision\n";
  for (const auto& [k, mean] : r.per_k) os << k << '\t' << detail::fixed6(mean.value()) << '\n';
}

}  // namespace quadrec
