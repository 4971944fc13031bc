// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "quadrec/bitset.hpp"

using quadrec::Bitset;

TEST_CASE("bitset basic operations") {
  Bitset b(130);
  REQUIRE(b.size() == 130);
  REQUIRE(b.none());
  b.set(0);
  b.set(64);
  b.set(129);
  REQUIRE(b.test(0));
  REQUIRE(b.test(64));
  REQUIRE(b.test(129));
  REQUIRE(!b.test(1));
  REQUIRE(b.count() == 3);
  REQUIRE(b.any());

  b.reset(64);
  REQUIRE(!b.test(64));
  REQUIRE(b.count() == 2);

  REQUIRE(b.find_first() == 0);
  REQUIRE(b.find_next(0) == 129);
  REQUIRE(b.find_next(129) == Bitset::npos);
}

TEST_CASE("bitset set_all masks trailing bits") {
  Bitset b(70);
  b.set_all();
  REQUIRE(b.count() == 70);
  Bitset c(64);
  c.set_all();
  REQUIRE(c.count() == 64);
}

TEST_CASE("bitset set algebra agrees with std::set") {
  std::mt19937_64 rng(7);
  for (int round = 0; round < 50; ++round) {
    const std::size_t n = 1 + rng() % 200;
    Bitset a(n), b(n);
    std::set<std::size_t> sa, sb;
    for (std::size_t i = 0; i < n; ++i) {
      if (rng() % 2) {
        a.set(i);
        sa.insert(i);
      }
      if (rng() % 3 == 0) {
        b.set(i);
        sb.insert(i);
      }
    }
    REQUIRE(a.count() == sa.size());

    bool subset = true;
    for (std::size_t x : sb)
      if (!sa.count(x)) subset = false;
    REQUIRE(a.contains_all(b) == subset);

    bool common = false;
    for (std::size_t x : sb)
      if (sa.count(x)) common = true;
    REQUIRE(a.intersects(b) == common);

    auto indices = a.to_indices();
    REQUIRE(indices.size() == sa.size());
    std::size_t at = 0;
    for (std::size_t x : sa) REQUIRE(indices[at++] == x);

    Bitset u = a;
    u |= b;
    std::set<std::size_t> su = sa;
    su.insert(sb.begin(), sb.end());
    REQUIRE(u.count() == su.size());

    Bitset i = a;
    i &= b;
    std::size_t expect = 0;
    for (std::size_t x : sb)
      if (sa.count(x)) ++expect;
    REQUIRE(i.count() == expect);
  }
}
