#include <doctest.h>

#include <random>

#include "spectra/errors.hpp"
#include "spectra/fragment.hpp"
#include "spectra/kb.hpp"
#include "spectra/normalize.hpp"

using namespace spectra;

namespace {

const char* kInfinityKB = R"(
[tbox]
C <= exists r. top
exists r-. top <= C
top <= func r-. top
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
)";

// Random concepts over a small signature, covering every constructor.
class RandomKB {
 public:
  explicit RandomKB(unsigned seed) : rng_(seed) {}

  Concept concept_of_depth(int depth) {
    const int choice = static_cast<int>(rng_() % (depth > 0 ? 7 : 3));
    switch (choice) {
      case 0: return Concept::top();
      case 1:
      case 2: return Concept::name(pick({"A", "B", "C"}));
      case 3: return Concept::negate(concept_of_depth(depth - 1));
      case 4: return Concept::conj({concept_of_depth(depth - 1), concept_of_depth(depth - 1)});
      case 5: return Concept::exists(role(), concept_of_depth(depth - 1));
      default: return Concept::forall(role(), concept_of_depth(depth - 1));
    }
  }

  KB kb() {
    KB k;
    const int n = static_cast<int>(rng_() % 5);
    for (int i = 0; i < n; ++i) {
      if (rng_() % 5 == 0)
        k.tbox.insert(Axiom::functionality(concept_of_depth(1), role(), concept_of_depth(1)));
      else
        k.tbox.insert(Axiom::inclusion(concept_of_depth(3), concept_of_depth(3)));
    }
    const int m = static_cast<int>(rng_() % 4);
    for (int i = 0; i < m; ++i) {
      if (rng_() % 2 == 0)
        k.concept_assertions.insert({pick({"A", "B", "C"}), pick({"a", "b", "c"})});
      else
        k.role_assertions.insert({pick({"r", "s"}), pick({"a", "b", "c"}), pick({"a", "b", "c"})});
    }
    return k;
  }

 private:
  std::string pick(std::initializer_list<const char*> xs) {
    return *(xs.begin() + static_cast<long>(rng_() % xs.size()));
  }
  Role role() { return Role{pick({"r", "s"}), rng_() % 3 == 0}; }
  std::mt19937 rng_;
};

}  // namespace

TEST_CASE("parsing expands sugar") {
  SUBCASE("empty input") {
    const auto kb = parse_kb("");
    CHECK(kb.tbox.empty());
    CHECK(kb.abox_empty());
    CHECK(parse_kb("[tbox]\n[abox]\n") == kb);
  }
  SUBCASE("three axioms and two assertions") {
    const auto kb = parse_kb(kInfinityKB);
    CHECK(kb.tbox.size() == 3);
    CHECK(kb.role_assertions.size() == 2);
    CHECK(kb.individuals() == std::set<std::string>{"a", "b"});
    CHECK(detect_fragment(kb) == Fragment::DLLiteF);
  }
  SUBCASE("unqualified existential has a top filler") {
    const auto kb = parse_kb("[tbox]\nC <= exists r\n");
    const auto& ax = *kb.tbox.begin();
    CHECK(ax.rhs == Concept::exists(Role{"r", false}, Concept::top()));
  }
  SUBCASE("derived constructors") {
    CHECK(parse_concept("bot") == Concept::negate(Concept::top()));
    CHECK(parse_concept("A | B") ==
          Concept::negate(Concept::conj({Concept::negate(Concept::name("A")), Concept::negate(Concept::name("B"))})));
    CHECK(parse_concept("forall r. A") ==
          Concept::negate(Concept::exists(Role{"r", false}, Concept::negate(Concept::name("A")))));
    CHECK(parse_concept("not not A") == Concept::name("A"));
    CHECK(parse_concept("B & A & B") == parse_concept("A & B"));
    CHECK(parse_concept("exists r. A & B") ==
          Concept::conj({Concept::exists(Role{"r", false}, Concept::name("A")), Concept::name("B")}));
  }
  SUBCASE("errors carry positions") {
    try {
      parse_kb("[tbox]\nA <= \n");
      FAIL("expected a syntax error");
    } catch (const SyntaxError& e) {
      CHECK(e.line() == 2);
      CHECK(e.col() == 6);
    }
    CHECK_THROWS_AS(parse_kb("[tbox]\nA <= exists A. B\n"), NamespaceClash);
    CHECK_THROWS_AS(parse_kb("[abox]\nA(a,b,c)\n"), SyntaxError);
    CHECK_THROWS_AS(parse_kb("[tbox]\nA <= B C\n"), SyntaxError);
  }
  SUBCASE("comments") {
    const auto kb = parse_kb("# header\n[tbox]\nA <= B # trailing\n");
    CHECK(kb.tbox.size() == 1);
  }
}

TEST_CASE("serialization round trip") {
  SUBCASE("empty") { CHECK(serialize_kb(KB{}) == "[tbox]\n[abox]\n"); }
  SUBCASE("seven axiom TBox") {
    const auto kb = parse_kb(kZeroInfinityTBox);
    const auto text = serialize_kb(kb);
    CHECK(std::count(text.begin(), text.end(), '\n') == 7 + 2);
    CHECK(parse_kb(text) == kb);
  }
  SUBCASE("random KBs reach a fixpoint after one round trip") {
    RandomKB gen(2024);
    for (int i = 0; i < 1000; ++i) {
      const auto kb = gen.kb();
      const auto text = serialize_kb(kb);
      const auto back = parse_kb(text);
      CHECK(back == kb);
      CHECK(serialize_kb(back) == text);
    }
  }
}

TEST_CASE("normal form shapes") {
  SUBCASE("nested filler gets one fresh name") {
    const auto kb = parse_kb("[tbox]\nA <= exists r. (B & exists s. C)\n");
    const auto nf = normalize(kb.tbox);
    REQUIRE(nf.num_concepts() == 4);
    const int x = *nf.concept_id("_nf_0");
    const int a = *nf.concept_id("A");
    const int b = *nf.concept_id("B");
    const int c = *nf.concept_id("C");
    CHECK(nf.exists_right.contains(NExistsRight{bit(a), IRole{*nf.role_id("r"), false}, bit(x)}));
    CHECK(nf.exists_right.contains(NExistsRight{bit(x), IRole{*nf.role_id("s"), false}, bit(c)}));
    CHECK(nf.clauses.contains(NClause{bit(x), bit(b)}));
    CHECK(nf.size() == 3);
    CHECK(nf.is_horn());
  }
  SUBCASE("negated value restriction uses one fresh name") {
    const auto nf = normalize(parse_kb("[tbox]\nnot C <= forall r. C\n").tbox);
    CHECK(nf.num_concepts() == 2);
    CHECK(nf.definitions.size() == 1);
    CHECK_FALSE(nf.is_horn());
  }
  SUBCASE("normal TBoxes are fixpoints") {
    const auto kb = parse_kb(kWorkedKB);
    const auto once = normalize(kb.tbox).to_tbox();
    const auto twice = normalize(once).to_tbox();
    CHECK(once == twice);
    CHECK(normalize(kb.tbox).definitions.empty());
  }
  SUBCASE("conjunction on the right splits") {
    const auto nf = normalize(parse_kb("[tbox]\nA <= B & C\n").tbox);
    CHECK(nf.clauses.size() == 2);
  }
  SUBCASE("tautologies are dropped") {
    CHECK(normalize(parse_kb("[tbox]\nA <= top\nA & B <= A\n").tbox).size() == 0);
  }
  SUBCASE("disjointness becomes a clause with empty head") {
    const auto nf = normalize(parse_kb("[tbox]\nA <= not B\n").tbox);
    REQUIRE(nf.clauses.size() == 1);
    CHECK(nf.clauses.begin()->rhs == 0);
    CHECK(popcount(nf.clauses.begin()->lhs) == 2);
  }
}

TEST_CASE("fragment detection") {
  CHECK(detect_fragment(parse_kb("[tbox]\ntop <= C\n")) == Fragment::EL);
  CHECK(detect_fragment(parse_kb(kWorkedKB)) == Fragment::ELIFBot);
  CHECK(detect_fragment(parse_kb(kZeroInfinityTBox)) == Fragment::DLLiteF);
  CHECK(detect_fragment(parse_kb("[tbox]\nA <= B\n")) == Fragment::DLLiteCore);
  CHECK(detect_fragment(parse_kb("[tbox]\nnot C <= forall r. C\n")) == Fragment::ALC);
  CHECK(detect_fragment(parse_kb("[tbox]\nA <= exists r-. B\n")) == Fragment::ELI);
  CHECK(detect_fragment(parse_kb("[tbox]\nA <= func r. B\n")) == Fragment::ELF);
  CHECK(detect_fragment(parse_kb("[tbox]\nnot A <= B\ntop <= func r\n")) == Fragment::ALCFStar);
  CHECK(detect_fragment(parse_kb("[tbox]\nnot A <= B\nA <= func r. B\n")) == Fragment::ALCF);
  CHECK(detect_fragment(parse_kb("[tbox]\nnot A <= B\ntop <= func r-\n")) == Fragment::ALCIF);
  CHECK(fragment_from_string("ELIF_bot") == Fragment::ELIFBot);

  SUBCASE("monotone under adding axioms") {
    RandomKB gen(99);
    for (int i = 0; i < 300; ++i) {
      auto kb = gen.kb();
      const auto before = detect_fragment(kb);
      const auto extra = gen.kb();
      kb.tbox.insert(extra.tbox.begin(), extra.tbox.end());
      const auto after = detect_fragment(kb);
      CHECK(admits(after, kb));
      // The result may move sideways but never strictly below.
      CHECK_FALSE((fragment_leq(after, before) && after != before));
    }
  }
}

TEST_CASE("counting queries") {
  const auto q = parse_ccq("friendOf(!z1, alice) & friendOf(!z2, alice)");
  CHECK(q.atoms.size() == 2);
  CHECK(q.counting_variables() == std::vector<std::string>{"z1", "z2"});
  CHECK_FALSE(q.individual_free());
  CHECK(q.connected());
  CHECK_FALSE(parse_ccq("A(!x), B(!y)").connected());
  CHECK(CardinalityQuery::role_query("r").to_ccq().individual_free());
}
