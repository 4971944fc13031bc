// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>
#include <thread>

#include "quadrec/io.hpp"
#include "quadrec/miner.hpp"
#include "quadrec/oracle.hpp"
#include "support/generators.hpp"
#include "support/toy.hpp"

using namespace quadrec;

TEST_CASE("mine: singleton relation") {
  Demographics demo{{"u0", {"a0"}}};
  PFolksonomy f = PFolksonomy::build({{"u0", "t0", "r0"}}, demo);
  ConceptSet cs = mine(f, {1, 1, 1, 1});
  REQUIRE(cs.size() == 1);
  REQUIRE(cs.concepts[0] == QuadriConcept{{0}, {0}, {0}, {0}});
}

TEST_CASE("mine: full product relation yields exactly the full box") {
  std::vector<Tagging> taggings;
  for (const char* u : {"u0", "u1"})
    for (const char* t : {"t0", "t1"})
      for (const char* r : {"r0", "r1"}) taggings.push_back({u, t, r});
  Demographics demo{{"u0", {"a0"}}, {"u1", {"a0"}}};
  PFolksonomy f = PFolksonomy::build(taggings, demo);
  ConceptSet cs = mine(f, {1, 1, 1, 1});
  REQUIRE(cs.size() == 1);
  REQUIRE(cs.concepts[0] == QuadriConcept{{0, 1}, {0, 1}, {0, 1}, {0}});
}

TEST_CASE("mine: one full tagging community is one concept") {
  // Three writers annotating the same three films with the same three tags.
  std::vector<Tagging> taggings;
  for (const char* u : {"rossy", "anlucia", "franela"})
    for (const char* t : {"classic", "oldmovie", "quotes"})
      for (const char* r : {"Rear Window", "Magician of OZ", "Gone with the Wind"})
        taggings.push_back({u, t, r});
  Demographics demo;
  for (const char* u : {"rossy", "anlucia", "franela"})
    demo[u] = {"age:36-45", "gender:M", "occ:writer"};
  PFolksonomy f = PFolksonomy::build(taggings, demo);
  REQUIRE(f.quadruple_count() == 27 * 3);

  ConceptSet cs = mine(f, {2, 2, 2, 2});
  REQUIRE(cs.size() == 1);
  const QuadriConcept& c = cs.concepts[0];
  REQUIRE(testsupport::labels_of(f, Dimension::User, c.extent) ==
          std::set<std::string>{"anlucia", "franela", "rossy"});
  REQUIRE(testsupport::labels_of(f, Dimension::Tag, c.modus) ==
          std::set<std::string>{"classic", "oldmovie", "quotes"});
  REQUIRE(testsupport::labels_of(f, Dimension::Resource, c.intent) ==
          std::set<std::string>{"Gone with the Wind", "Magician of OZ", "Rear Window"});
  REQUIRE(testsupport::labels_of(f, Dimension::Profile, c.variable) ==
          std::set<std::string>{"age:36-45", "gender:M", "occ:writer"});
}

TEST_CASE("mine: golden toy dataset at thresholds (2,2,2,2)") {
  PFolksonomy f = testsupport::load_toy_model();
  ConceptSet cs = mine(f, {2, 2, 2, 2});

  auto expected = testsupport::toy_expected_concepts();
  REQUIRE(cs.size() == expected.size());
  for (const auto& want : expected) {
    bool found = false;
    for (const QuadriConcept& c : cs.concepts) {
      if (testsupport::labels_of(f, Dimension::User, c.extent) == want.users &&
          testsupport::labels_of(f, Dimension::Tag, c.modus) == want.tags &&
          testsupport::labels_of(f, Dimension::Resource, c.intent) == want.resources &&
          testsupport::labels_of(f, Dimension::Profile, c.variable) == want.attributes)
        found = true;
    }
    REQUIRE(found);
  }
}

TEST_CASE("mine agrees with the brute-force oracle on random relations") {
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> dens(0.1, 0.9);
  for (int round = 0; round < 25; ++round) {
    PFolksonomy f = testsupport::random_pfolksonomy(rng, 5, dens(rng));
    for (const SupportThresholds& th : testsupport::threshold_grid()) {
      ConceptSet mined = mine(f, th);
      ConceptSet oracle = enumerate_bruteforce(f, th);
      REQUIRE(mined == oracle);
    }
  }
}

TEST_CASE("mine output satisfies the concept predicate everywhere") {
  std::mt19937_64 rng(555);
  for (int round = 0; round < 15; ++round) {
    PFolksonomy f = testsupport::random_pfolksonomy(rng, 5, 0.5);
    SupportThresholds th{1 + static_cast<std::uint32_t>(rng() % 2),
                         1 + static_cast<std::uint32_t>(rng() % 2),
                         1 + static_cast<std::uint32_t>(rng() % 2),
                         1 + static_cast<std::uint32_t>(rng() % 2)};
    ConceptSet cs = mine(f, th);
    for (std::size_t i = 0; i < cs.size(); ++i) {
      const QuadriConcept& c = cs.concepts[i];
      REQUIRE(!c.extent.empty());
      REQUIRE(!c.modus.empty());
      REQUIRE(!c.intent.empty());
      REQUIRE(!c.variable.empty());
      REQUIRE(box_contained(c, f));
      REQUIRE(is_maximal(c, f));
      REQUIRE(c.meets(th));
      if (i > 0) REQUIRE(cs.concepts[i - 1] < c);  // canonical, duplicate-free
    }
  }
}

TEST_CASE("mine(th) equals filter(mine(1), th)") {
  std::mt19937_64 rng(777);
  for (int round = 0; round < 15; ++round) {
    PFolksonomy f = testsupport::random_pfolksonomy(rng, 5, 0.5);
    ConceptSet all = mine(f, {1, 1, 1, 1});
    for (const SupportThresholds& th : testsupport::threshold_grid())
      REQUIRE(filter(all, th) == mine(f, th));
  }
}

TEST_CASE("filter keeps matching concepts in order") {
  ConceptSet cs;
  cs.concepts.push_back({{0}, {0}, {0}, {0}});
  cs.concepts.push_back({{0, 1}, {0}, {0}, {0}});
  cs.concepts.push_back({{0, 1, 2}, {0}, {0}, {0}});
  ConceptSet out = filter(cs, {2, 1, 1, 1});
  REQUIRE(out.size() == 2);
  REQUIRE(out.concepts[0].extent.size() == 2);
  REQUIRE(out.concepts[1].extent.size() == 3);
  REQUIRE(filter(cs, {1, 1, 1, 1}) == cs);
}

TEST_CASE("mine is deterministic across parallelism degrees") {
  PFolksonomy f = testsupport::load_toy_model();
  std::ostringstream seq, par;
  write_concepts(mine(f, {1, 1, 1, 1}, {1}), f, seq);
  write_concepts(mine(f, {1, 1, 1, 1}, {4}), f, par);
  REQUIRE(seq.str() == par.str());

  std::mt19937_64 rng(31337);
  for (int round = 0; round < 5; ++round) {
    PFolksonomy g = testsupport::random_pfolksonomy(rng, 5, 0.6);
    REQUIRE(mine(g, {1, 1, 1, 1}, {1}) == mine(g, {1, 1, 1, 1}, {4}));
  }
}

TEST_CASE("mine is safe to invoke concurrently on one model") {
  PFolksonomy f = testsupport::load_toy_model();
  ConceptSet expected = mine(f, {1, 1, 1, 1});
  std::vector<ConceptSet> results(4);
  std::vector<std::thread> pool;
  for (int i = 0; i < 4; ++i)
    pool.emplace_back([&, i] { results[i] = mine(f, {1, 1, 1, 1}, {2}); });
  for (auto& t : pool) t.join();
  for (const ConceptSet& cs : results) REQUIRE(cs == expected);
}

TEST_CASE("mine on an empty-but-valid model returns an empty set") {
  std::istringstream model_text(
      "quadrec-model\t1\n"
      "users\t1\nu0\n"
      "tags\t0\n"
      "resources\t0\n"
      "profiles\t1\na0\n"
      "user_attributes\t1\n0\n"
      "taggings\t0\n");
  PFolksonomy f = read_model(model_text);
  REQUIRE(mine(f, {1, 1, 1, 1}).empty());
}

TEST_CASE("mine validates thresholds") {
  PFolksonomy f = testsupport::load_toy_model();
  REQUIRE_THROWS_AS(mine(f, {0, 1, 1, 1}), UsageError);
}
