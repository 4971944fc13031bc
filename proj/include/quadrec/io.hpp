// SPDX-License-Identifier: Apache-2.0
//
// File formats. All of them are tab-separated UTF-8 text with '\n' line
// endings and no quoting; tabs and newlines are forbidden inside labels.
//
//   taggings       one "user<TAB>tag<TAB>resource" record per line
//   demographics   "user<TAB>gender<TAB>age<TAB>occupation"; attributes are
//                  namespaced as gender:<v>, age:<bucket>, occ:<v>
//   concepts       one concept per line: the four component sizes, then the
//                  component labels, everything tab-separated
//   model          full canonical dump of a built p-folksonomy
//
// '#'-prefixed lines and blank lines are ignored in taggings, demographics
// and concepts files. Model files are strict (labels may start with '#').
#pragma once

#include <array>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "quadrec/errors.hpp"
#include "quadrec/miner.hpp"
#include "quadrec/model.hpp"

namespace quadrec {

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

inline bool skippable(std::string_view line) {
  return line.empty() || line.front() == '#';
}

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

inline void check_label_clean(const std::string& label) {
  if (label.find('\t') != std::string::npos || label.find('\n') != std::string::npos)
    throw DataError("label '" + label + "' contains a tab or newline and cannot be serialized");
}

inline std::uint64_t parse_uint(std::string_view s, const std::string& source, std::size_t line,
                                const char* what) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw ParseError(source, line, std::string("invalid ") + what + " '" + std::string(s) + "'");
  return v;
}

}  // namespace detail

struct AgeBucket {
  int min_age;
  int max_age;
  std::string label;
};

// Contiguous, non-overlapping, inclusive age ranges.
class AgeBucketing {
 public:
  static AgeBucketing defaults() {
    return AgeBucketing({{0, 17, "0-17"},
                         {18, 25, "18-25"},
                         {26, 35, "26-35"},
                         {36, 45, "36-45"},
                         {46, 130, "46+"}});
  }

  // "0-17=0-17,18-25=18-25,..." — comma-separated "min-max=label" entries.
  static AgeBucketing parse(const std::string& spec) {
    std::vector<AgeBucket> buckets;
    std::size_t start = 0;
    while (start <= spec.size()) {
      std::size_t comma = spec.find(',', start);
      std::string entry =
          spec.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      std::size_t eq = entry.find('=');
      std::size_t dash = entry.find('-');
      if (eq == std::string::npos || dash == std::string::npos || dash > eq)
        throw UsageError("invalid age bucket entry '" + entry + "' (want min-max=label)");
      try {
        int lo = std::stoi(entry.substr(0, dash));
        int hi = std::stoi(entry.substr(dash + 1, eq - dash - 1));
        buckets.push_back({lo, hi, entry.substr(eq + 1)});
      } catch (const std::exception&) {
        throw UsageError("invalid age bucket entry '" + entry + "'");
      }
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    return AgeBucketing(std::move(buckets));
  }

  const std::string* label_for(int age) const {
    for (const AgeBucket& b : buckets_)
      if (age >= b.min_age && age <= b.max_age) return &b.label;
    return nullptr;
  }

  const std::vector<AgeBucket>& buckets() const { return buckets_; }

 private:
  explicit AgeBucketing(std::vector<AgeBucket> buckets) : buckets_(std::move(buckets)) {
    if (buckets_.empty()) throw UsageError("age bucketing needs at least one bucket");
    for (std::size_t i = 0; i < buckets_.size(); ++i) {
      const AgeBucket& b = buckets_[i];
      if (b.min_age > b.max_age)
        throw UsageError("age bucket '" + b.label + "' has min above max");
      if (b.label.empty()) throw UsageError("age bucket labels must not be empty");
      if (i > 0 && buckets_[i - 1].max_age + 1 != b.min_age)
        throw UsageError("age buckets must be contiguous ('" + buckets_[i - 1].label + "' then '" +
                         b.label + "')");
    }
  }

  std::vector<AgeBucket> buckets_;
};

// One (user, tag, resource) record per non-empty non-comment line. Fields
// are whitespace-trimmed; duplicates are preserved (the model deduplicates).
inline std::vector<Tagging> parse_taggings(std::istream& in, const std::string& source) {
  std::vector<Tagging> out;
  std::string line;
  std::size_t ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    std::string_view sv = line;
    if (!sv.empty() && sv.back() == '\r') sv.remove_suffix(1);
    if (detail::skippable(sv)) continue;
    auto fields = detail::split_tabs(sv);
    if (fields.size() != 3)
      throw ParseError(source, ln,
                       "expected 3 tab-separated fields, got " + std::to_string(fields.size()));
    Tagging t;
    std::string* dst[3] = {&t.user, &t.tag, &t.resource};
    for (int i = 0; i < 3; ++i) {
      std::string_view field = detail::trim(fields[i]);
      if (field.empty()) throw ParseError(source, ln, "empty field");
      *dst[i] = std::string(field);
    }
    out.push_back(std::move(t));
  }
  return out;
}

inline std::vector<Tagging> parse_taggings(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  return parse_taggings(in, path.string());
}

// "user<TAB>gender<TAB>age<TAB>occupation" per line. Attribute families are
// namespaced so equal strings in different families never collide. Repeated
// users merge their attribute sets.
inline Demographics parse_demographics(std::istream& in, const std::string& source,
                                       const AgeBucketing& bucketing) {
  Demographics out;
  std::string line;
  std::size_t ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    std::string_view sv = line;
    if (!sv.empty() && sv.back() == '\r') sv.remove_suffix(1);
    if (detail::skippable(sv)) continue;
    auto fields = detail::split_tabs(sv);
    if (fields.size() != 4)
      throw ParseError(source, ln,
                       "expected 4 tab-separated fields, got " + std::to_string(fields.size()));
    std::string_view user = detail::trim(fields[0]);
    std::string_view gender = detail::trim(fields[1]);
    std::string_view age_text = detail::trim(fields[2]);
    std::string_view occupation = detail::trim(fields[3]);
    if (user.empty() || gender.empty() || age_text.empty() || occupation.empty())
      throw ParseError(source, ln, "empty field");
    int age = 0;
    auto [ptr, ec] = std::from_chars(age_text.data(), age_text.data() + age_text.size(), age);
    if (ec != std::errc{} || ptr != age_text.data() + age_text.size())
      throw ParseError(source, ln, "invalid age '" + std::string(age_text) + "'");
    const std::string* bucket = bucketing.label_for(age);
    if (!bucket) throw UnbucketableAge(std::string(user), age);
    auto& attrs = out[std::string(user)];
    attrs.insert("gender:" + std::string(gender));
    attrs.insert("age:" + *bucket);
    attrs.insert("occ:" + std::string(occupation));
  }
  return out;
}

inline Demographics parse_demographics(const std::filesystem::path& path,
                                       const AgeBucketing& bucketing) {
  auto in = detail::open_input(path);
  return parse_demographics(in, path.string(), bucketing);
}

// One concept per line: |extent| |modus| |intent| |variable| then the labels
// of each component in canonical order, all tab-separated. An empty set
// writes an empty file.
inline void write_concepts(const ConceptSet& cs, const PFolksonomy& f, std::ostream& os) {
  for (const QuadriConcept& c : cs.concepts) {
    os << c.extent.size() << '\t' << c.modus.size() << '\t' << c.intent.size() << '\t'
       << c.variable.size();
    for (Dimension d : kAllDimensions) {
      for (std::uint32_t e : c.get(d)) {
        const std::string& lbl = f.label(d, e);
        detail::check_label_clean(lbl);
        os << '\t' << lbl;
      }
    }
    os << '\n';
  }
}

inline void write_concepts(const ConceptSet& cs, const PFolksonomy& f,
                           const std::filesystem::path& path) {
  auto out = detail::open_output(path);
  write_concepts(cs, f, out);
  if (!out) throw DataError("failed writing " + path.string());
}

inline ConceptSet read_concepts(std::istream& in, const PFolksonomy& f,
                                const std::string& source = "<concepts>") {
  ConceptSet out;
  std::string line;
  std::size_t ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    std::string_view sv = line;
    if (!sv.empty() && sv.back() == '\r') sv.remove_suffix(1);
    if (detail::skippable(sv)) continue;
    auto fields = detail::split_tabs(sv);
    if (fields.size() < 4) throw ParseError(source, ln, "expected four component sizes");
    std::array<std::size_t, 4> sizes;
    for (int d = 0; d < 4; ++d) {
      sizes[d] = detail::parse_uint(fields[d], source, ln, "component size");
      if (sizes[d] == 0) throw ParseError(source, ln, "concept components must be non-empty");
    }
    if (fields.size() != 4 + sizes[0] + sizes[1] + sizes[2] + sizes[3])
      throw ParseError(source, ln, "label count does not match the component sizes");
    QuadriConcept c;
    std::size_t at = 4;
    for (Dimension d : kAllDimensions) {
      IndexSet& set = c.get(d);
      for (std::size_t i = 0; i < sizes[static_cast<int>(d)]; ++i) {
        std::string lbl(fields[at++]);
        auto idx = f.find(d, lbl);
        if (!idx) throw UnknownLabel(dimension_name(d), lbl);
        set.push_back(*idx);
      }
      std::sort(set.begin(), set.end());
      if (std::adjacent_find(set.begin(), set.end()) != set.end())
        throw ParseError(source, ln, "duplicate label in a concept component");
    }
    out.concepts.push_back(std::move(c));
  }
  return out;
}

inline ConceptSet read_concepts(const std::filesystem::path& path, const PFolksonomy& f) {
  auto in = detail::open_input(path);
  return read_concepts(in, f, path.string());
}

// Canonical model dump; identical models serialize to identical bytes.
inline void write_model(const PFolksonomy& f, std::ostream& os) {
  for (Dimension d : kAllDimensions)
    for (const std::string& lbl : f.table(d)) detail::check_label_clean(lbl);

  os << "quadrec-model\t1\n";
  static constexpr const char* kSection[4] = {"users", "tags", "resources", "profiles"};
  for (Dimension d : kAllDimensions) {
    os << kSection[static_cast<int>(d)] << '\t' << f.size(d) << '\n';
    for (const std::string& lbl : f.table(d)) os << lbl << '\n';
  }
  os << "user_attributes\t" << f.size(Dimension::User) << '\n';
  for (std::uint32_t u = 0; u < f.size(Dimension::User); ++u) {
    const IndexSet& attrs = f.user_attributes(u);
    for (std::size_t i = 0; i < attrs.size(); ++i) os << (i ? "\t" : "") << attrs[i];
    os << '\n';
  }
  const auto& triples = f.taggings();
  os << "taggings\t" << triples.size() << '\n';
  for (const auto& tr : triples) os << tr[0] << '\t' << tr[1] << '\t' << tr[2] << '\n';
}

inline void write_model(const PFolksonomy& f, const std::filesystem::path& path) {
  auto out = detail::open_output(path);
  write_model(f, out);
  if (!out) throw DataError("failed writing " + path.string());
}

inline PFolksonomy read_model(std::istream& in, const std::string& source = "<model>") {
  std::size_t ln = 0;
  std::string line;
  auto next_line = [&]() -> std::string& {
    if (!std::getline(in, line)) throw ParseError(source, ln, "unexpected end of file");
    ++ln;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  };
  auto section = [&](const char* name) -> std::uint64_t {
    auto fields = detail::split_tabs(next_line());
    if (fields.size() != 2 || fields[0] != name)
      throw ParseError(source, ln, std::string("expected section '") + name + "'");
    return detail::parse_uint(fields[1], source, ln, "section size");
  };

  auto header = detail::split_tabs(next_line());
  if (header.size() != 2 || header[0] != "quadrec-model" || header[1] != "1")
    throw ParseError(source, ln, "not a quadrec model file (version 1)");

  std::array<std::vector<std::string>, 4> tables;
  static constexpr const char* kSection[4] = {"users", "tags", "resources", "profiles"};
  for (int d = 0; d < 4; ++d) {
    std::uint64_t n = section(kSection[d]);
    tables[d].reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) tables[d].push_back(next_line());
  }

  std::uint64_t nu = section("user_attributes");
  if (nu != tables[0].size())
    throw ParseError(source, ln, "user_attributes count does not match the user table");
  std::vector<IndexSet> user_attrs(nu);
  for (std::uint64_t u = 0; u < nu; ++u) {
    for (std::string_view fv : detail::split_tabs(next_line()))
      user_attrs[u].push_back(
          static_cast<std::uint32_t>(detail::parse_uint(fv, source, ln, "attribute index")));
  }

  std::uint64_t ntr = section("taggings");
  std::vector<std::array<std::uint32_t, 3>> triples;
  triples.reserve(ntr);
  for (std::uint64_t i = 0; i < ntr; ++i) {
    auto fields = detail::split_tabs(next_line());
    if (fields.size() != 3) throw ParseError(source, ln, "expected 3 tagging indices");
    triples.push_back(
        {static_cast<std::uint32_t>(detail::parse_uint(fields[0], source, ln, "user index")),
         static_cast<std::uint32_t>(detail::parse_uint(fields[1], source, ln, "tag index")),
         static_cast<std::uint32_t>(detail::parse_uint(fields[2], source, ln, "resource index"))});
  }
  if (std::getline(in, line)) throw ParseError(source, ln + 1, "trailing content after taggings");

  return PFolksonomy::assemble(std::move(tables), std::move(user_attrs), std::move(triples));
}

inline PFolksonomy read_model(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  return read_model(in, path.string());
}

}  // namespace quadrec
