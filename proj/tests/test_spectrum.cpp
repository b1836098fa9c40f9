#include <doctest.h>

#include <random>
#include <set>

#include "spectra/errors.hpp"
#include "spectra/spectrum.hpp"

using namespace spectra;

namespace {

// All sums of generators up to bound, by dynamic programming over N.
std::set<std::uint64_t> brute_semigroup(const std::vector<std::uint64_t>& gens, std::uint64_t bound) {
  std::vector<bool> in(bound + 1, false);
  for (std::uint64_t x = 0; x <= bound; ++x)
    for (auto g : gens) {
      if (g > x) continue;
      if (g == x || (x - g > 0 && in[x - g]) || (g == 0 && x == 0)) in[x] = true;
    }
  std::set<std::uint64_t> out;
  for (std::uint64_t x = 0; x <= bound; ++x)
    if (in[x]) out.insert(x);
  return out;
}

SpectrumRep example2() { return SpectrumRep::canonicalize({4}, Tail{6, 1}, true); }

}  // namespace

TEST_CASE("membership on the worked representation") {
  const auto rep = example2();
  CHECK_FALSE(rep.member(5));
  CHECK(rep.member(4));
  CHECK(rep.member(ExtNat::infinity()));
  CHECK(rep.member(6));
  CHECK(rep.member(100));
  CHECK_FALSE(rep.member(0));
  CHECK_FALSE(SpectrumRep::empty().member(0));
  CHECK_FALSE(SpectrumRep::empty().member(ExtNat::infinity()));
  const auto even = SpectrumRep::canonicalize({}, Tail{0, 2}, true);
  CHECK(even.member(10));
  CHECK_FALSE(even.member(7));
}

TEST_CASE("canonicalization") {
  SUBCASE("duplicate of the tail start is absorbed") {
    const auto rep = SpectrumRep::canonicalize({6}, Tail{6, 1}, false);
    CHECK(rep.sporadic().empty());
    CHECK(rep.tail() == Tail{6, 1});
  }
  SUBCASE("sporadic progression merges into the tail") {
    const auto rep = SpectrumRep::canonicalize({0, 2, 4}, Tail{6, 2}, false);
    CHECK(rep.sporadic().empty());
    CHECK(rep.tail() == Tail{0, 2});
    for (std::uint64_t v = 0; v <= 30; ++v) CHECK(rep.member(v) == (v % 2 == 0));
  }
  SUBCASE("already canonical") {
    const auto rep = SpectrumRep::canonicalize({3, 5, 6}, Tail{8, 1}, false);
    CHECK(rep.sporadic() == std::vector<std::uint64_t>{3, 5, 6});
    CHECK(rep.tail() == Tail{8, 1});
  }
  SUBCASE("off-progression values push the start") {
    const auto rep = SpectrumRep::canonicalize({9}, Tail{4, 2}, false);
    CHECK(rep.tail() == Tail{10, 2});
    CHECK(rep.sporadic() == std::vector<std::uint64_t>{4, 6, 8, 9});
  }
  SUBCASE("empty data is the empty set") { CHECK(SpectrumRep::canonicalize({}, std::nullopt, false).is_empty()); }
  SUBCASE("zero alone stays a set") {
    const auto rep = SpectrumRep::canonicalize({0}, std::nullopt, false);
    CHECK_FALSE(rep.is_empty());
    CHECK(rep.member(0));
  }
  SUBCASE("random inputs: idempotent and set preserving") {
    std::mt19937 rng(7);
    for (int iter = 0; iter < 500; ++iter) {
      std::vector<std::uint64_t> sp;
      const int k = static_cast<int>(rng() % 5);
      for (int i = 0; i < k; ++i) sp.push_back(rng() % 20);
      std::optional<Tail> tail;
      if (rng() % 4 != 0) tail = Tail{rng() % 15, 1 + rng() % 4};
      const bool inf = rng() % 2 == 0;
      const auto rep = SpectrumRep::canonicalize(sp, tail, inf);
      const std::uint64_t bound = 3 * (40);
      for (std::uint64_t v = 0; v <= bound; ++v) {
        bool expected = std::find(sp.begin(), sp.end(), v) != sp.end();
        if (tail && v >= tail->start && (v - tail->start) % tail->period == 0) expected = true;
        CHECK(rep.member(v) == expected);
      }
      CHECK(rep.member(ExtNat::infinity()) == inf);
      const auto again = SpectrumRep::canonicalize(rep.sporadic(), rep.tail(), rep.has_infinity());
      CHECK(again == rep);
      if (rep.tail()) {
        // Minimal start: the value one period below is not a member or is
        // separated from the tail by a non-progression member.
        for (auto s : rep.sporadic()) CHECK(s < rep.tail()->start);
      }
    }
  }
}

TEST_CASE("generated semigroups against brute force") {
  SUBCASE("{2,3}") {
    const auto rep = from_generators({2, 3});
    CHECK(rep.sporadic().empty());
    CHECK(rep.tail() == Tail{2, 1});
    const auto brute = brute_semigroup({2, 3}, 12);
    for (std::uint64_t v = 0; v <= 12; ++v) CHECK(rep.member(v) == brute.contains(v));
  }
  SUBCASE("{3,5}") {
    const auto rep = from_generators({3, 5});
    CHECK(rep.sporadic() == std::vector<std::uint64_t>{3, 5, 6});
    CHECK(rep.tail() == Tail{8, 1});
    const auto brute = brute_semigroup({3, 5}, 30);
    for (std::uint64_t v = 0; v <= 30; ++v) CHECK(rep.member(v) == brute.contains(v));
    CHECK_FALSE(rep.member(7));
  }
  SUBCASE("{inf}") {
    const auto rep = from_generators({ExtNat::infinity()});
    CHECK(rep.sporadic().empty());
    CHECK_FALSE(rep.tail().has_value());
    CHECK(rep.has_infinity());
  }
  SUBCASE("no generators") { CHECK(from_generators({}).is_empty()); }
  SUBCASE("gcd scaling") {
    const auto rep = from_generators({4, 6});
    CHECK(rep.tail() == Tail{4, 2});
    CHECK(rep.sporadic().empty());
  }
  SUBCASE("random generator sets") {
    std::mt19937 rng(11);
    for (int iter = 0; iter < 300; ++iter) {
      std::vector<std::uint64_t> gens;
      const int k = 1 + static_cast<int>(rng() % 3);
      for (int i = 0; i < k; ++i) gens.push_back(rng() % 12);
      const bool inf = rng() % 2 == 0;
      std::vector<ExtNat> g(gens.begin(), gens.end());
      if (inf) g.push_back(ExtNat::infinity());
      const auto rep = from_generators(g);
      const auto brute = brute_semigroup(gens, 200);
      for (std::uint64_t v = 0; v <= 200; ++v) CHECK(rep.member(v) == brute.contains(v));
      CHECK(rep.member(ExtNat::infinity()) == inf);
      CHECK(is_closed_under_addition(rep));
      const auto regen = generators(rep);
      CHECK(from_generators(regen) == rep);
      CHECK(generators(from_generators(regen)) == generators(from_generators(generators(rep))));
    }
  }
}

TEST_CASE("generators and closure") {
  CHECK(from_generators(generators(SpectrumRep::canonicalize({}, Tail{2, 1}, false))) ==
        SpectrumRep::canonicalize({}, Tail{2, 1}, false));
  CHECK(generators(SpectrumRep::canonicalize({0}, std::nullopt, false)) == std::vector<ExtNat>{0});
  const auto gens = generators(example2());
  CHECK(std::find(gens.begin(), gens.end(), ExtNat(4)) != gens.end());
  CHECK(std::find(gens.begin(), gens.end(), ExtNat::infinity()) != gens.end());
  CHECK(from_generators(gens) == example2());

  CHECK(is_closed_under_addition(example2()));
  CHECK_FALSE(is_closed_under_addition(SpectrumRep::canonicalize({1}, std::nullopt, false)));
  CHECK(is_closed_under_addition(SpectrumRep::canonicalize({}, Tail{0, 2}, false), 20));
  CHECK_FALSE(is_closed_under_addition(SpectrumRep::canonicalize({}, Tail{3, 2}, false)));
  CHECK_THROWS_AS(generators(SpectrumRep::canonicalize({1}, std::nullopt, false)), NotASemigroup);
}

TEST_CASE("triple form and json") {
  const auto t = example2().to_triple();
  CHECK(t.m == ExtNat(6));
  CHECK(t.alpha == ExtNat(1));
  CHECK(t.s == std::vector<ExtNat>{4, ExtNat::infinity()});
  const auto inf_only = SpectrumRep::canonicalize({}, std::nullopt, true).to_triple();
  CHECK(inf_only.m == ExtNat::infinity());
  CHECK(inf_only.alpha == ExtNat(0));

  const auto j = example2().to_json();
  CHECK(j.dump() == R"({"infinity":true,"sporadic":[4],"status":"ok","tail":{"period":1,"start":6}})");
  CHECK(SpectrumRep::from_json(j) == example2());
  CHECK(SpectrumRep::empty().to_json().dump() == R"({"status":"empty"})");
  CHECK(ExtNat::from_json(ExtNat::infinity().to_json()) == ExtNat::infinity());
  CHECK(example2().to_string() == "{4, [6,inf[, inf}");
}
