// SPDX-License-Identifier: Apache-2.0
//
// quadrec command line: mine frequent quadri-concepts from tagging +
// demographics files, produce personalized recommendations, and run the
// holdout precision evaluation.
//
// Every config-file key (flat key=value lines, '#' comments) has a command
// line flag of the same name; flags win over the config file.
//
// Exit status: 0 success, 1 usage error, 2 data error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "quadrec/evaluation.hpp"
#include "quadrec/io.hpp"
#include "quadrec/miner.hpp"
#include "quadrec/model.hpp"
#include "quadrec/recommend.hpp"

namespace {

using namespace quadrec;

struct Options {
  std::string config;
  std::string taggings;
  std::string demographics;
  std::string concepts_out;
  std::string concepts_in;
  std::string report_out;
  std::uint32_t minsupp_u = 2, minsupp_t = 2, minsupp_r = 2, minsupp_p = 2;
  std::string mode = "strict";
  std::string age_buckets;  // empty = built-in defaults
  std::string ks = "5,6,7,8,9,10";
  double fraction = 0.25;
  std::uint64_t seed = 42;
  unsigned threads = 1;

  // recommend-only
  std::string user;
  std::string resource;
  std::string which = "resources";
  std::uint32_t k = 10;
  bool exclude_known = false;
};

const std::vector<std::string> kConfigKeys = {
    "taggings", "demographics", "concepts_out", "concepts_in", "report_out",
    "minsupp_u", "minsupp_t",   "minsupp_r",    "minsupp_p",   "mode",
    "age_buckets", "ks",        "fraction",     "seed",        "threads"};

std::map<std::string, std::string> load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string_view sv = detail::trim(line);
    if (sv.empty() || sv.front() == '#') continue;
    std::size_t eq = sv.find('=');
    if (eq == std::string_view::npos)
      throw ParseError(path, ln, "expected key=value");
    std::string key(detail::trim(sv.substr(0, eq)));
    std::string value(detail::trim(sv.substr(eq + 1)));
    if (std::find(kConfigKeys.begin(), kConfigKeys.end(), key) == kConfigKeys.end())
      throw ParseError(path, ln, "unknown config key '" + key + "'");
    out[key] = value;  // last occurrence wins
  }
  return out;
}

// Registers the shared options on a subcommand and remembers how to backfill
// them from a config file after parsing.
struct OptionBinder {
  CLI::App* cmd;
  std::vector<std::pair<std::string, std::function<void(const std::string&)>>> setters;

  template <typename T>
  void bind(const std::string& key, T& value, const std::string& help) {
    cmd->add_option("--" + key, value, help);
    setters.emplace_back(key, [&value, key](const std::string& raw) {
      std::istringstream is(raw);
      if constexpr (std::is_same_v<T, std::string>) {
        value = raw;
      } else {
        is >> value;
        if (is.fail() || !is.eof())
          throw UsageError("config value for '" + key + "' is not valid: '" + raw + "'");
      }
    });
  }

  void backfill(const std::map<std::string, std::string>& cfg) const {
    for (const auto& [key, setter] : setters) {
      if (cmd->count("--" + key) > 0) continue;  // flag wins
      auto it = cfg.find(key);
      if (it != cfg.end()) setter(it->second);
    }
  }
};

void bind_common(OptionBinder& b, Options& o) {
  b.bind("taggings", o.taggings, "taggings file (user<TAB>tag<TAB>resource)");
  b.bind("demographics", o.demographics, "demographics file (user<TAB>gender<TAB>age<TAB>occupation)");
  b.bind("concepts_out", o.concepts_out, "where to write mined concepts");
  b.bind("concepts_in", o.concepts_in, "concepts file to read");
  b.bind("report_out", o.report_out, "where to write the evaluation report");
  b.bind("minsupp_u", o.minsupp_u, "minimum users per concept");
  b.bind("minsupp_t", o.minsupp_t, "minimum tags per concept");
  b.bind("minsupp_r", o.minsupp_r, "minimum resources per concept");
  b.bind("minsupp_p", o.minsupp_p, "minimum profile attributes per concept");
  b.bind("mode", o.mode, "profile match mode: strict | overlap");
  b.bind("age_buckets", o.age_buckets, "age buckets, e.g. 0-17=0-17,18-25=18-25,...");
  b.bind("ks", o.ks, "comma-separated k values for evaluation");
  b.bind("fraction", o.fraction, "holdout fraction in (0,1)");
  b.bind("seed", o.seed, "seed for the holdout draw");
  b.bind("threads", o.threads, "miner parallelism degree");
}

std::string require(const std::string& value, const char* key) {
  if (value.empty()) throw UsageError(std::string("missing required option --") + key);
  return value;
}

AgeBucketing bucketing_from(const Options& o) {
  return o.age_buckets.empty() ? AgeBucketing::defaults() : AgeBucketing::parse(o.age_buckets);
}

ProfileMatchMode mode_from(const Options& o) {
  if (o.mode == "strict") return ProfileMatchMode::Strict;
  if (o.mode == "overlap") return ProfileMatchMode::Overlap;
  throw UsageError("mode must be 'strict' or 'overlap', got '" + o.mode + "'");
}

SupportThresholds thresholds_from(const Options& o) {
  SupportThresholds th{o.minsupp_u, o.minsupp_t, o.minsupp_r, o.minsupp_p};
  if (!th.valid()) throw UsageError("support thresholds must all be at least 1");
  return th;
}

std::vector<std::uint32_t> ks_from(const Options& o) {
  std::vector<std::uint32_t> ks;
  std::size_t start = 0;
  while (start <= o.ks.size()) {
    std::size_t comma = o.ks.find(',', start);
    std::string part = o.ks.substr(
        start, comma == std::string::npos ? std::string::npos : comma - start);
    try {
      unsigned long v = std::stoul(part);
      if (v < 1) throw std::out_of_range("k");
      ks.push_back(static_cast<std::uint32_t>(v));
    } catch (const std::exception&) {
      throw UsageError("invalid k value '" + part + "'");
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return ks;
}

PFolksonomy load_model(const Options& o) {
  auto taggings = parse_taggings(std::filesystem::path(require(o.taggings, "taggings")));
  auto demographics = parse_demographics(
      std::filesystem::path(require(o.demographics, "demographics")), bucketing_from(o));
  return PFolksonomy::build(taggings, demographics);
}

int cmd_mine(const Options& o) {
  PFolksonomy model = load_model(o);
  ConceptSet concepts = mine(model, thresholds_from(o), {o.threads});
  write_concepts(concepts, model, std::filesystem::path(require(o.concepts_out, "concepts_out")));
  std::cout << "concepts=" << concepts.size() << "\n";
  return 0;
}

int cmd_recommend(const Options& o) {
  RecommendationKind which;
  if (o.which == "users")
    which = RecommendationKind::Users;
  else if (o.which == "tags")
    which = RecommendationKind::Tags;
  else if (o.which == "resources")
    which = RecommendationKind::Resources;
  else
    throw UsageError("--which must be users, tags or resources, got '" + o.which + "'");
  if (which == RecommendationKind::Tags && o.resource.empty()) throw MissingResource();

  PFolksonomy model = load_model(o);
  ConceptSet concepts =
      read_concepts(std::filesystem::path(require(o.concepts_in, "concepts_in")), model);

  auto user = model.find(Dimension::User, require(o.user, "user"));
  if (!user) throw UnknownUser(o.user);
  Query q{*user, model.user_attributes(*user), std::nullopt};
  if (!o.resource.empty()) {
    auto res = model.find(Dimension::Resource, o.resource);
    if (!res) throw UnknownLabel("resource", o.resource);
    q.resource = *res;
  }

  RecommendationBundle bundle =
      recommend(model, concepts, q, {mode_from(o), o.exclude_known});
  Dimension dim = which == RecommendationKind::Users     ? Dimension::User
                  : which == RecommendationKind::Tags    ? Dimension::Tag
                                                         : Dimension::Resource;
  for (std::uint32_t item : rank_topk(bundle, which, o.k)) {
    std::uint32_t support = 0;
    for (const auto& e : bundle.get(which))
      if (e.item == item) support = e.support();
    std::cout << model.label(dim, item) << '\t' << support << '\n';
  }
  return 0;
}

int cmd_evaluate(const Options& o) {
  PFolksonomy model = load_model(o);
  EvaluationConfig cfg{thresholds_from(o), ks_from(o), o.fraction, o.seed, mode_from(o),
                       o.threads};
  EvaluationReport report = evaluate(model, cfg);

  std::filesystem::path report_path(require(o.report_out, "report_out"));
  {
    auto out = detail::open_output(report_path);
    write_report(report, out);
  }
  {
    auto out = detail::open_output(report_path.string() + ".tsv");
    write_report_table(report, out);
  }
  for (const auto& [k, mean] : report.per_k)
    std::cout << "k=" << k << " mean_precision=" << detail::fixed6(mean.value()) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"frequent quadri-concept mining and profile-based recommendation"};
  app.require_subcommand(1);

  Options opt;
  CLI::App* mine_cmd = app.add_subcommand("mine", "extract frequent quadri-concepts");
  CLI::App* rec_cmd = app.add_subcommand("recommend", "top-k users/tags/resources for a user");
  CLI::App* eval_cmd = app.add_subcommand("evaluate", "holdout precision@k evaluation");

  std::vector<OptionBinder> binders;
  for (CLI::App* cmd : {mine_cmd, rec_cmd, eval_cmd}) {
    cmd->add_option("--config", opt.config, "flat key=value config file");
    OptionBinder b{cmd, {}};
    bind_common(b, opt);
    binders.push_back(std::move(b));
  }
  rec_cmd->add_option("--user", opt.user, "query user label");
  rec_cmd->add_option("--resource", opt.resource, "resource label (required for --which tags)");
  rec_cmd->add_option("--which", opt.which, "users | tags | resources");
  rec_cmd->add_option("--k,-k", opt.k, "number of items to print");
  rec_cmd->add_flag("--exclude_known", opt.exclude_known,
                    "drop resources the user already tagged");

  try {
    app.parse(argc, argv);
    if (!opt.config.empty()) {
      auto cfg = load_config(opt.config);
      for (const auto& b : binders)
        if (b.cmd->parsed()) b.backfill(cfg);
    }
    if (mine_cmd->parsed()) return cmd_mine(opt);
    if (rec_cmd->parsed()) return cmd_recommend(opt);
    if (eval_cmd->parsed()) return cmd_evaluate(opt);
    return 1;
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  } catch (const quadrec::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const quadrec::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
