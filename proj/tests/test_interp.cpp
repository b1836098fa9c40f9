#include <doctest.h>

#include <random>

#include "spectra/errors.hpp"
#include "spectra/interp.hpp"
#include "spectra/kb.hpp"
#include "spectra/normalize.hpp"

using namespace spectra;

namespace {

const char* kInfinityKB = R"(
[tbox]
C <= exists r
exists r- <= C
top <= func r-
[abox]
r(a,a)
r(a,b)
)";

const char* kZeroInfinityTBox = R"(
[tbox]
C <= exists r
exists r- <= C
top <= func r-
C <= exists s
exists s- <= C
top <= func s-
exists r- & exists s- <= bot
)";

const char* kEvenTBox = R"(
[tbox]
top <= C
A <= exists r. not A
not A <= exists r. A
top <= func r
top <= func r-
)";

Interpretation two_named(const std::string& a, const std::string& b) {
  Interpretation i;
  i.add_named(a);
  i.add_named(b);
  return i;
}

// Independent reference semantics: evaluates a concept at one element by
// direct recursion over the definition.
bool holds(const Interpretation& i, const Concept& c, int x) {
  switch (c.kind()) {
    case Concept::Kind::Top: return true;
    case Concept::Kind::Name: return i.in_concept(c.name(), x);
    case Concept::Kind::Not: return !holds(i, c.child(), x);
    case Concept::Kind::And:
      for (const auto& op : c.operands())
        if (!holds(i, op, x)) return false;
      return true;
    case Concept::Kind::Exists:
      for (int y = 0; y < i.size(); ++y)
        if (i.has_edge(c.role(), x, y) && holds(i, c.child(), y)) return true;
      return false;
  }
  return false;
}

bool reference_model(const Interpretation& i, const KB& kb) {
  for (const auto& ax : kb.tbox)
    for (int x = 0; x < i.size(); ++x) {
      if (!holds(i, ax.lhs, x)) continue;
      if (!ax.is_functionality()) {
        if (!holds(i, ax.rhs, x)) return false;
      } else {
        int n = 0;
        for (int y = 0; y < i.size(); ++y) n += i.has_edge(ax.role, x, y) && holds(i, ax.rhs, y);
        if (n > 1) return false;
      }
    }
  for (const auto& a : kb.concept_assertions)
    if (!i.in_concept(a.concept_name, i.named.at(a.individual))) return false;
  for (const auto& a : kb.role_assertions)
    if (!i.has_edge(Role{a.role_name, false}, i.named.at(a.subject), i.named.at(a.object))) return false;
  return true;
}

}  // namespace

TEST_CASE("model checking") {
  SUBCASE("missing successor is reported") {
    const auto kb = parse_kb(kInfinityKB);
    auto i = two_named("a", "b");
    i.add_concept("C", 0);
    i.add_concept("C", 1);
    i.add_edge("r", 0, 0);
    i.add_edge("r", 0, 1);
    const auto v = check_model(i, kb);
    REQUIRE(v.size() == 1);
    CHECK(v[0].axiom == "C <= exists r");
    CHECK(v[0].elements == std::vector<std::string>{"b"});
  }
  SUBCASE("universal reflexive element satisfies positive KBs") {
    const auto kb = parse_kb("[tbox]\nA <= exists r. (B & exists s-. A)\ntop <= func r. B\nexists r. A <= C\n");
    Interpretation i;
    i.add_element("u");
    for (const auto& c : kb.concept_names()) i.add_concept(c, 0);
    for (const auto& r : kb.role_names()) i.add_edge(r, 0, 0);
    CHECK(check_model(i, kb).empty());
  }
  SUBCASE("empty TBox only checks the ABox") {
    const auto kb = parse_kb("[abox]\nA(a)\nr(a,b)\n");
    auto i = two_named("a", "b");
    i.add_concept("A", 0);
    i.add_edge("r", 0, 1);
    CHECK(check_model(i, kb).empty());
    i.roles["r"].clear();
    CHECK(check_model(i, kb).size() == 1);
  }
  SUBCASE("unknown individuals are a signature mismatch") {
    const auto kb = parse_kb("[abox]\nA(c)\n");
    CHECK_THROWS_AS(check_model(two_named("a", "b"), kb), SignatureMismatch);
  }
  SUBCASE("promised successors count for existentials and functionality") {
    const auto kb = parse_kb("[tbox]\nA <= exists r. B\ntop <= func r. B\n");
    Interpretation i;
    i.add_element("x");
    i.add_concept("A", 0);
    FrontierCertificate cert;
    cert.pending.push_back({0, Role{"r", false}, {"B"}, false});
    cert.satisfies = [](const Obligation& ob, const Concept& c) -> bool {
      Interpretation leaf;
      leaf.add_element("leaf");
      for (const auto& n : ob.type) leaf.add_concept(n, 0);
      return evaluate(leaf, c)[0];
    };
    CHECK_FALSE(check_model(i, kb).empty());
    CHECK(check_model(i, kb, &cert).empty());
    i.add_element("y");
    i.add_concept("B", 1);
    i.add_edge("r", 0, 1);
    CHECK(check_model(i, kb, &cert).size() == 1);
  }
}

TEST_CASE("answer counting") {
  SUBCASE("concept query") {
    auto i = two_named("a", "b");
    i.add_concept("C", 0);
    i.add_concept("C", 1);
    CHECK(count_answers(i, CardinalityQuery::concept_query("C").to_ccq()) == 2);
  }
  SUBCASE("pairs of friends") {
    Interpretation i;
    i.add_named("alice");
    i.add_element("f1");
    i.add_element("f2");
    i.add_edge("friendOf", 1, 0);
    i.add_edge("friendOf", 2, 0);
    CHECK(count_answers(i, parse_ccq("friendOf(!z1, alice) & friendOf(!z2, alice)")) == 4);
    CHECK(count_answers(i, parse_ccq("friendOf(!z1, ?y)")) == 2);
    CHECK(count_answers(i, parse_ccq("friendOf(?x, ?y)")) == 1);
  }
  SUBCASE("role query") {
    auto i = two_named("a", "b");
    i.add_edge("r", 0, 1);
    i.add_edge("r", 1, 0);
    i.add_edge("r", 0, 0);
    CHECK(count_answers(i, CardinalityQuery::role_query("r").to_ccq()) == 3);
  }
  SUBCASE("cardinality queries match extension sizes on random interpretations") {
    std::mt19937 rng(5);
    for (int iter = 0; iter < 200; ++iter) {
      Interpretation i;
      const int n = 1 + static_cast<int>(rng() % 4);
      for (int e = 0; e < n; ++e) i.add_element("e" + std::to_string(e));
      for (int e = 0; e < n; ++e)
        if (rng() % 2) i.add_concept("C", e);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          if (rng() % 3 == 0) i.add_edge("r", a, b);
      CHECK(count_answers(i, CardinalityQuery::concept_query("C").to_ccq()) == i.concept_count("C"));
      CHECK(count_answers(i, CardinalityQuery::role_query("r").to_ccq()) == i.role_count("r"));
    }
  }
}

TEST_CASE("disjoint unions add counts") {
  const auto kb = parse_kb("[tbox]\nC <= exists r. C\n");
  auto model_with = [](int k) {
    Interpretation i;
    for (int e = 0; e < k; ++e) {
      i.add_element("e" + std::to_string(e));
      i.add_concept("C", e);
      i.add_edge("r", e, (e + 1) % k);
    }
    return i;
  };
  const auto u = disjoint_union(model_with(2), model_with(3), kb);
  CHECK(u.concept_count("C") == 5);
  CHECK(is_model(u, kb));
  auto acc = model_with(2);
  const auto q = CardinalityQuery::role_query("r").to_ccq();
  for (int k = 2; k <= 4; ++k) {
    acc = disjoint_union(acc, model_with(2), kb);
    CHECK(count_answers(acc, q) == static_cast<std::uint64_t>(2 * k));
  }
  Interpretation bad;
  bad.add_element("x");
  bad.add_concept("C", 0);
  CHECK_THROWS_AS(disjoint_union(bad, model_with(1), kb), NotAModel);
}

TEST_CASE("bounded enumeration") {
  SUBCASE("single model") {
    const auto kb = parse_kb("[tbox]\ntop <= C\n");
    std::uint64_t n = enumerate_models(kb, {1, 1'000'000}, [](const Interpretation&) { return true; });
    CHECK(n == 1);
  }
  SUBCASE("no finite model with non-empty C") {
    const auto kb = parse_kb(kZeroInfinityTBox);
    int nonempty = 0;
    int total = 0;
    enumerate_models(kb, {3, 5'000'000}, [&](const Interpretation& i) {
      ++total;
      nonempty += i.concept_count("C") > 0;
      return true;
    });
    CHECK(total > 0);
    CHECK(nonempty == 0);
  }
  SUBCASE("even extension sizes only") {
    const auto kb = parse_kb(kEvenTBox);
    int odd = 0;
    int total = 0;
    enumerate_models(kb, {3, 5'000'000}, [&](const Interpretation& i) {
      ++total;
      odd += i.concept_count("C") % 2;
      return true;
    });
    CHECK(total > 0);
    CHECK(odd == 0);
  }
  SUBCASE("every visited interpretation is a model and agrees with reference semantics") {
    const auto kb = parse_kb("[tbox]\nA <= exists r. B\nB & A <= bot\n[abox]\nA(a)\n");
    int total = 0;
    enumerate_models(kb, {3, 5'000'000}, [&](const Interpretation& i) {
      ++total;
      CHECK(is_model(i, kb));
      CHECK(reference_model(i, kb));
      return true;
    });
    CHECK(total > 0);
  }
  SUBCASE("budget is enforced") {
    const auto kb = parse_kb("[tbox]\nA <= exists r. B\n");
    CHECK_THROWS_AS(enumerate_models(kb, {4, 1000}, [](const Interpretation&) { return true; }),
                    BudgetExceeded);
  }
}

TEST_CASE("oracle membership") {
  SUBCASE("empty KB") {
    const auto r = oracle_membership(KB{}, CardinalityQuery::concept_query("C"), 3, {3, 1'000'000});
    REQUIRE(r.found);
    CHECK(r.witness->concept_count("C") == 3);
  }
  SUBCASE("two-cycle witness") {
    const auto kb = parse_kb(kEvenTBox);
    const auto r = oracle_membership(kb, CardinalityQuery::concept_query("C"), 2, {2, 1'000'000});
    REQUIRE(r.found);
    CHECK(is_model(*r.witness, kb));
    CHECK(count_answers(*r.witness, CardinalityQuery::concept_query("C").to_ccq()) == 2);
    CHECK_FALSE(oracle_membership(kb, CardinalityQuery::concept_query("C"), 3, {3, 1'000'000}).found);
  }
  SUBCASE("role witness") {
    const auto kb = parse_kb("[tbox]\ntop <= exists r. A1\ntop <= exists r. A2\nA1 & A2 <= bot\n");
    const auto q = CardinalityQuery::role_query("r");
    CHECK_FALSE(oracle_membership(kb, q, 3, {3, 5'000'000}).found);
    const auto r = oracle_membership(kb, q, 4, {3, 5'000'000});
    REQUIRE(r.found);
    CHECK(r.witness->role_count("r") == 4);
  }
}

TEST_CASE("normal forms are conservative on small models") {
  const std::vector<const char*> tboxes = {
      "[tbox]\nnot C <= forall r. C\n",
      "[tbox]\nA <= exists r. (B & exists s. C)\n",
      "[tbox]\nexists r. (A & not B) <= C | B\n",
      "[tbox]\nA & exists r-. B <= func r. (B | C)\n",
  };
  for (const auto* text : tboxes) {
    CAPTURE(text);
    const auto kb = parse_kb(text);
    const auto nf = normalize(kb.tbox);
    KB nkb;
    nkb.tbox = nf.to_tbox();
    const auto cn = kb.concept_names();
    const auto rn = kb.role_names();
    int models = 0;
    enumerate_models(kb, {2, 20'000'000}, [&](const Interpretation& i) {
      ++models;
      const auto expanded = expand_model(i, nf);
      CHECK(is_model(expanded, nkb));
      const auto back = restrict_model(expanded, cn, rn);
      CHECK(back.concepts == restrict_model(i, cn, rn).concepts);
      return true;
    });
    CHECK(models > 0);
    enumerate_models(nkb, {2, 20'000'000}, [&](const Interpretation& j) {
      CHECK(is_model(restrict_model(j, cn, rn), kb));
      return true;
    });
  }
}

TEST_CASE("model json round trip") {
  auto i = two_named("a", "b");
  i.add_concept("C", 0);
  i.add_edge("r", 0, 1);
  const auto j = i.to_json();
  CHECK(j.dump() == R"({"concepts":{"C":["a"]},"domain":["a","b"],"named":{"a":"a","b":"b"},"roles":{"r":[["a","b"]]}})");
  const auto back = Interpretation::from_json(j);
  CHECK(back.labels == i.labels);
  CHECK(back.concepts == i.concepts);
  CHECK(back.roles == i.roles);
}
