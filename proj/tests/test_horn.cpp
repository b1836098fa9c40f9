#include <doctest.h>

#include <algorithm>

#include "spectra/errors.hpp"
#include "spectra/horn.hpp"
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

const char* kWorkedKB = R"(
[tbox]
top <= C & exists r. A1 & exists r. A2
top <= func s-
exists r. X <= Y
exists r. Y <= X
Y <= exists s. X
X <= exists s. Y
A1 & A2 <= bot
X & Y <= bot
[abox]
A1(x1)
A2(x2)
A1(y1)
A2(y2)
X(x1)
X(x2)
Y(y1)
Y(y2)
s(x1,y1)
s(x2,y2)
s(y1,x1)
s(y2,x2)
r(x1,y1)
r(x1,y2)
r(x2,y1)
r(x2,y2)
r(y1,x1)
r(y1,x2)
r(y2,x1)
r(y2,x2)
)";

const char* kTwoFillersTBox = R"(
[tbox]
top <= exists r. A1
top <= exists r. A2
A1 & A2 <= bot
)";

Mask mask(const NormalTBox& t, std::initializer_list<const char*> names) {
  Mask m = 0;
  for (const char* n : names) m |= bit(t.require_concept(n));
  return m;
}

std::set<std::set<std::string>> type_names(const HornReasoner& r) {
  std::set<std::set<std::string>> out;
  for (const Mask t : r.types()) out.insert(r.tbox().names_of(t));
  return out;
}

// Drops the normal-form names that do not occur in the user signature.
std::set<std::set<std::string>> visible(std::set<std::set<std::string>> types) {
  std::set<std::set<std::string>> out;
  for (auto t : types) {
    std::erase_if(t, [](const std::string& n) { return n.starts_with(kNormalFormPrefix); });
    out.insert(t);
  }
  return out;
}

}  // namespace

TEST_CASE("chase entailments") {
  const auto kb = parse_kb(R"(
[tbox]
A <= exists r. B
exists r. B <= D
B <= E
top <= func r
)");
  const HornReasoner r(prepare_horn(kb).tbox);
  const auto& t = r.tbox();
  CHECK(r.entails_subsumption(mask(t, {"A"}), mask(t, {"D"})));
  CHECK_FALSE(r.entails_subsumption(mask(t, {"D"}), mask(t, {"A"})));
  CHECK(r.entails_exists(mask(t, {"A"}), {t.require_role("r"), false}, mask(t, {"B", "E"})));
  CHECK_FALSE(r.entails_exists(mask(t, {"E"}), {t.require_role("r"), false}, mask(t, {"B"})));
  CHECK(r.entails_functionality(0, {t.require_role("r"), false}, 0));
  CHECK_FALSE(r.entails_functionality(0, {t.require_role("r"), true}, 0));
}

TEST_CASE("functionality merges successors") {
  const auto kb = parse_kb(R"(
[tbox]
A <= exists r. B
A <= exists r. D
top <= func r
B & D <= bot
)");
  const HornReasoner r(prepare_horn(kb).tbox);
  CHECK_FALSE(r.satisfiable(mask(r.tbox(), {"A"})));
  CHECK(r.satisfiable(mask(r.tbox(), {"B"})));
}

TEST_CASE("merging two individuals is a clash") {
  const auto kb = parse_kb(R"(
[tbox]
top <= func r
[abox]
r(a,b)
r(a,c)
)");
  const auto h = prepare_horn(kb);
  CHECK_FALSE(chase(h.tbox, h.abox).satisfiable);
}

TEST_CASE("types are the consistent closed sets") {
  const HornReasoner r1(prepare_horn(parse_kb("[tbox]\nA <= B\n")).tbox);
  CHECK(type_names(r1) == std::set<std::set<std::string>>{{}, {"B"}, {"A", "B"}});
  const HornReasoner r2(prepare_horn(parse_kb("[tbox]\nA & B <= bot\ntop <= A\n")).tbox);
  CHECK(type_names(r2) == std::set<std::set<std::string>>{{"A"}});
  const HornReasoner r3(prepare_horn(parse_kb(kTwoFillersTBox)).tbox);
  CHECK(visible(type_names(r3)) == std::set<std::set<std::string>>{{}, {"A1"}, {"A2"}});
}

TEST_CASE("non-Horn input is rejected") {
  CHECK_THROWS_AS(prepare_horn(parse_kb("[tbox]\ntop <= A | B\n")), UnsupportedLogic);
}

TEST_CASE("type graph relations") {
  const HornReasoner r(prepare_horn(parse_kb(kInfinityKB)).tbox);
  const auto g = build_type_graph(r, {});
  for (const auto& e : g.dep) CHECK(std::find(g.gen.begin(), g.gen.end(), e) != g.gen.end());
  for (const auto& e : g.bidep) {
    CHECK(g.dep.contains(e));
    CHECK(g.bidep.contains({e.to, e.role.inverse(), e.from}));
  }
  for (int p = 0; p < g.num_classes; ++p) CHECK_FALSE(g.precedes[p][p]);
  const auto c_type = g.type_index(r.closure(mask(r.tbox(), {"C"})).value());
  REQUIRE(c_type);
  const IRole role{r.tbox().require_role("r"), false};
  CHECK(g.is_dep(*c_type, role, *c_type));
  CHECK_FALSE(g.bidep.contains({*c_type, role, *c_type}));
}

TEST_CASE("generating cycles certify") {
  SUBCASE("self loop") {
    const HornReasoner r(prepare_horn(parse_kb(kInfinityKB)).tbox);
    const int c = r.tbox().require_concept("C");
    const auto cycles = find_generating_cycles(r, c);
    REQUIRE_FALSE(cycles.empty());
    for (const auto& cyc : cycles) CHECK(certify_cycle(r, cyc, c));
    CHECK_FALSE(is_safe(r, c));
  }
  SUBCASE("two step cycle through s") {
    const HornReasoner r(prepare_horn(parse_kb(kWorkedKB)).tbox);
    const int c = r.tbox().require_concept("C");
    const auto cycles = find_generating_cycles(r, c);
    REQUIRE_FALSE(cycles.empty());
    const int s = r.tbox().require_role("s");
    bool via_s = false;
    for (const auto& cyc : cycles) {
      CHECK(certify_cycle(r, cyc, c));
      via_s = via_s || std::any_of(cyc.roles.begin(), cyc.roles.end(), [s](IRole ro) { return ro.id == s; });
    }
    CHECK(via_s);
  }
  SUBCASE("acyclic TBox") {
    const HornReasoner r(prepare_horn(parse_kb("[tbox]\nA <= exists r. B\n")).tbox);
    for (int c = 0; c < r.tbox().num_concepts(); ++c) {
      CHECK(find_generating_cycles(r, c).empty());
      CHECK(is_safe(r, c));
    }
  }
}

TEST_CASE("cycle reversion") {
  const auto kb = parse_kb(kInfinityKB);
  const auto h = prepare_horn(kb);
  const int c = h.tbox.require_concept("C");
  const auto tc = revert_cycles(h.tbox, c);
  CHECK(tc.size() > h.tbox.size());
  CHECK(is_safe(HornReasoner(tc), c));
  CHECK_FALSE(chase(tc, h.abox).satisfiable);
  CHECK_FALSE(finite_extension_possible(kb, "C"));
  CHECK(finite_extension_possible(parse_kb(kZeroInfinityTBox), "C"));
  CHECK(finite_extension_possible(parse_kb(kWorkedKB), "C"));

  const auto acyclic = prepare_horn(parse_kb("[tbox]\nA <= exists r. B\n"));
  CHECK(revert_cycles(acyclic.tbox, acyclic.tbox.require_concept("B")).size() == acyclic.tbox.size());
}

TEST_CASE("finite models satisfy the reverted TBox") {
  for (const char* text : {kZeroInfinityTBox, kTwoFillersTBox, "[tbox]\nA <= exists r. A\ntop <= func r-\n"}) {
    const auto kb = parse_kb(text);
    const auto h = prepare_horn(kb);
    for (int c = 0; c < h.tbox.num_concepts(); ++c) {
      if (h.tbox.concepts[c].starts_with(kNormalFormPrefix)) continue;
      KB reverted = kb;
      reverted.tbox = revert_cycles(h.tbox, c).to_tbox();
      std::size_t violations = 0;
      enumerate_models(kb, {3, 20'000'000}, [&](const Interpretation& m) {
        const auto full = expand_model(m, h.tbox);
        violations += check_model(full, reverted).size();
        return true;
      });
      CHECK(violations == 0);
    }
  }
}

TEST_CASE("finite models satisfy the role reversion") {
  const auto kb = parse_kb(kTwoFillersTBox);
  const auto h = prepare_horn(kb);
  const auto reversion = revert_role(h.tbox, h.tbox.require_role("r"));
  KB reverted = kb;
  reverted.tbox = reversion.tbox.to_tbox();
  std::size_t violations = 0;
  const auto models = enumerate_models(kb, {3, 20'000'000}, [&](const Interpretation& m) {
    violations += check_model(expand_model(m, reversion.tbox), reverted).size();
    return true;
  });
  CHECK(models > 0);
  CHECK(violations == 0);
}

TEST_CASE("completions are models") {
  SUBCASE("acyclic") {
    const auto kb = parse_kb("[tbox]\nA <= exists r. B\n[abox]\nA(a)\n");
    const auto h = prepare_horn(kb);
    const auto done = build_ils(h);
    const KB ref{h.tbox.to_tbox(), kb.concept_assertions, kb.role_assertions};
    CHECK(check_model(done.model, ref, &done.certificate).empty());
    CHECK(done.safe_counts.size() == static_cast<std::size_t>(h.tbox.num_concepts()));
    CHECK(done.safe_counts.at("B") == done.model.concept_count("B"));
  }
  SUBCASE("worked example after reversion") {
    const auto kb = parse_kb(kWorkedKB);
    auto h = prepare_horn(kb);
    h.tbox = revert_cycles(h.tbox, h.tbox.require_concept("C"));
    const IlsOptions options;
    const auto done = build_ils(h, options);
    const KB ref{h.tbox.to_tbox(), kb.concept_assertions, kb.role_assertions};
    CHECK(check_model(done.model, ref, &done.certificate).empty());
    CHECK(check_model(done.model, kb, &done.certificate).empty());
    const HornReasoner r(h.tbox);
    const IfpGraph ifp(r);
    std::set<int> safe;
    for (int c = 0; c < r.tbox().num_concepts(); ++c)
      if (is_safe(r, ifp, c)) safe.insert(c);
    CHECK(safe.contains(r.tbox().require_concept("C")));
    CHECK(verify_certificate(r, build_type_graph(r, safe), done));
    CHECK(done.safe_counts.at("C") == done.model.concept_count("C"));
  }
  SUBCASE("unsatisfiable") {
    CHECK_THROWS_AS(build_ils(parse_kb("[tbox]\nA <= bot\n[abox]\nA(a)\n")), UnsatisfiableKB);
  }
}

TEST_CASE("concept plus one") {
  SUBCASE("with disjointness") {
    const auto kb = parse_kb(kWorkedKB);
    const auto pair = plus_one_concept(kb, "C");
    CHECK(pair.second.count == pair.first.count + 1);
    CHECK(check_model(pair.first.model, pair.reference, &pair.first.certificate).empty());
    CHECK(check_model(pair.second.model, pair.reference, &pair.second.certificate).empty());
    CHECK(check_model(pair.second.model, kb, &pair.second.certificate).empty());
  }
  SUBCASE("without disjointness") {
    const auto kb = parse_kb("[tbox]\nA <= exists r. C\ntop <= func r-\n[abox]\nA(a)\n");
    const auto pair = plus_one_concept(kb, "C");
    CHECK(pair.second.count == pair.first.count + 1);
    CHECK(check_model(pair.first.model, pair.reference, &pair.first.certificate).empty());
    CHECK(check_model(pair.second.model, pair.reference, &pair.second.certificate).empty());
  }
  SUBCASE("infinite only") {
    CHECK_THROWS_AS(plus_one_concept(parse_kb(kInfinityKB), "C"), NoFiniteExtension);
  }
}

TEST_CASE("role plus one") {
  const auto kb = parse_kb(kTwoFillersTBox);
  const auto pair = role_plus_one(kb, "r");
  CHECK(pair.second.count == pair.first.count + 1);
  CHECK(check_model(pair.first.model, pair.reference, &pair.first.certificate).empty());
  CHECK(check_model(pair.second.model, pair.reference, &pair.second.certificate).empty());
  CHECK(check_model(pair.second.model, kb, &pair.second.certificate).empty());

  CHECK_THROWS_AS(role_plus_one(parse_kb("[tbox]\ntop <= func r\nA <= exists r\n"), "r"), FunctionalRole);
  CHECK_THROWS_AS(role_plus_one(parse_kb("[tbox]\ntop <= func r-\nA <= exists r\n"), "r"), FunctionalRole);
}

TEST_CASE("duplicating a model adds one pair") {
  const auto kb = parse_kb("[tbox]\nA <= exists r\n");
  Interpretation i;
  const int a = i.add_element("a");
  const int b = i.add_element("b");
  i.add_concept("A", a);
  i.add_edge("r", a, a);
  i.add_edge("r", a, b);
  i.add_edge("r", b, a);
  REQUIRE(is_model(i, kb));
  const auto j = duplicate_plus_one(i, "r", kb);
  CHECK(j.role_count("r") == 7);
  CHECK(is_model(j, kb));
  Interpretation empty_role;
  empty_role.add_element("x");
  CHECK_THROWS_AS(duplicate_plus_one(empty_role, "r", kb), DomainError);
}
