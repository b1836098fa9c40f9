#include <doctest.h>

#include <random>
#include <sstream>

#include "spectra/errors.hpp"
#include "spectra/interp.hpp"
#include "spectra/kb.hpp"
#include "spectra/solver.hpp"

using namespace spectra;

namespace {

const char* kSporadicKB = R"(
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

const char* kTwoFillersTBox = R"(
[tbox]
top <= exists r. A1
top <= exists r. A2
A1 & A2 <= bot
)";

const char* kEvenTBox = R"(
[tbox]
top <= C
A <= exists r. not A
not A <= exists r. A
top <= func r
top <= func r-
)";

const auto kC = CardinalityQuery::concept_query("C");
const auto kR = CardinalityQuery::role_query("r");

SpectrumRep rep(std::vector<std::uint64_t> sporadic, std::optional<Tail> tail, bool inf) {
  return SpectrumRep::canonicalize(std::move(sporadic), tail, inf);
}

}  // namespace

TEST_CASE("satisfiability") {
  CHECK_FALSE(is_satisfiable(parse_kb("[tbox]\nC <= bot\n[abox]\nC(a)\n")));
  CHECK(is_satisfiable(parse_kb(kZeroInfinityTBox)));
  CHECK(is_satisfiable(parse_kb(kSporadicKB)));
  CHECK(is_satisfiable(parse_kb("[tbox]\nnot C <= forall r. C\n[abox]\nr(a,b)\n")));
  CHECK_FALSE(is_satisfiable(parse_kb("[tbox]\ntop <= A | B\nA <= bot\nB <= bot\n")));
  CHECK_FALSE(is_satisfiable(parse_kb("[tbox]\nA <= forall r. B\nB <= bot\n[abox]\nA(a)\nr(a,b)\n")));
  CHECK_FALSE(is_satisfiable(parse_kb("[tbox]\ntop <= bot\n")));
  CHECK_FALSE(is_satisfiable(parse_kb("[tbox]\ntop <= exists r. B\nB <= bot\n")));
}

TEST_CASE("infinity membership") {
  CHECK(infinity_in_spectrum(parse_kb(kInfinityKB), kC));
  CHECK_FALSE(infinity_in_spectrum(parse_kb("[tbox]\nC <= bot\n"), kC));
  CHECK(infinity_in_spectrum(parse_kb(kTwoFillersTBox), kR));
  CHECK_FALSE(infinity_in_spectrum(parse_kb("[tbox]\nexists r <= bot\n"), kR));
}

TEST_CASE("membership") {
  const auto kb = parse_kb(kSporadicKB);
  CHECK(membership(kb, kC, 4));
  CHECK_FALSE(membership(kb, kC, 5));
  CHECK(membership(kb, kC, 7));
  CHECK(membership(parse_kb(""), kC, 0));

  const auto even = parse_kb(kEvenTBox);
  CHECK(membership(even, kC, 2));
  CHECK(membership(even, kC, 4));
  CHECK_FALSE(membership(even, kC, 3));
  CHECK_FALSE(membership(even, kC, 1));
  // Interpretations are nonempty and every element is in C.
  CHECK_FALSE(membership(even, kC, 0));
  // Exhaustive confirmation of the odd values.
  SearchLimits limits;
  limits.max_domain = 3;
  CHECK_FALSE(oracle_membership(even, kC, 3, limits).found);
  CHECK_FALSE(oracle_membership(even, kC, 1, limits).found);
  CHECK(oracle_membership(even, kC, 2, limits).found);
}

TEST_CASE("membership witnesses are models") {
  const auto kb = parse_kb(kSporadicKB);
  const auto w = membership_witness(kb, kC, 7);
  REQUIRE(w);
  CHECK(is_model(*w, kb));
  CHECK(w->concept_count("C") == 7);

  const auto roles = parse_kb(kTwoFillersTBox);
  const auto wr = membership_witness(roles, kR, 6);
  REQUIRE(wr);
  CHECK(is_model(*wr, roles));
  CHECK(wr->role_count("r") == 6);
}

TEST_CASE("closed probes") {
  const auto zi = parse_kb(kZeroInfinityTBox);
  CHECK(closed_probe({zi, kC, {}, {}, 0}));
  CHECK_FALSE(closed_probe({zi, kC, {"c"}, {}, 0}));
  const auto inf = parse_kb(kInfinityKB);
  CHECK_FALSE(closed_probe({inf, kC, {"a", "b"}, {}, 0}));
  const auto roles = parse_kb(kTwoFillersTBox);
  CHECK(closed_probe({roles, kR, {}, {{"a", "a"}, {"a", "b"}, {"b", "a"}, {"b", "b"}}, 0}));
  CHECK_FALSE(closed_probe({roles, kR, {}, {{"a", "a"}, {"a", "b"}}, 0}));
}

TEST_CASE("minimum") {
  CHECK(min_value(parse_kb(kSporadicKB), kC) == ExtNat(4));
  CHECK(min_value(parse_kb(""), kC) == ExtNat(0));
  CHECK(min_value(parse_kb(kInfinityKB), kC) == ExtNat::infinity());
  CHECK_THROWS_AS(min_value(parse_kb("[tbox]\nC <= bot\n[abox]\nC(a)\n"), kC), UnsatisfiableKB);
}

TEST_CASE("spectra of the fixture knowledge bases") {
  const auto sporadic = compute_spectrum(parse_kb(kSporadicKB), kC);
  CHECK(sporadic.rep == rep({4}, Tail{6, 1}, true));
  CHECK(sporadic.trace["min"] == 4);
  CHECK(sporadic.trace["pair"] == nlohmann::json::array({6, 7}));

  CHECK(compute_spectrum(parse_kb(kInfinityKB), kC).rep == rep({}, std::nullopt, true));
  CHECK(compute_spectrum(parse_kb(kZeroInfinityTBox), kC).rep == rep({0}, std::nullopt, true));
  CHECK(compute_spectrum(parse_kb(""), kC).rep == rep({}, Tail{0, 1}, true));
  CHECK(compute_spectrum(parse_kb("[tbox]\nC <= bot\n"), kC).rep == rep({0}, std::nullopt, false));
  CHECK(compute_spectrum(parse_kb("[tbox]\nC <= bot\n[abox]\nC(a)\n"), kC).rep.is_empty());

  const auto roles = compute_spectrum(parse_kb(kTwoFillersTBox), kR);
  CHECK(roles.rep == rep({4}, Tail{6, 1}, true));
  CHECK(roles.trace["strategy"] == "direct");
}

TEST_CASE("reported spectra agree with membership") {
  const auto kb = parse_kb(kSporadicKB);
  const auto r = compute_spectrum(kb, kC).rep;
  for (std::uint64_t n = 0; n <= r.stable_bound() + 3; ++n) CHECK(r.member(n) == membership(kb, kC, n));
}

TEST_CASE("functional roles reduce to concepts") {
  const auto s = role_strategy(parse_kb(kInfinityKB), "r");
  CHECK(s.kind == RoleStrategy::Kind::ReduceToConcept);
  CHECK(s.via == Role{"r", true});
  CHECK(role_strategy(parse_kb("[tbox]\nA <= exists r\n"), "r").kind == RoleStrategy::Kind::DirectRole);
  CHECK(role_strategy(parse_kb(kTwoFillersTBox), "r").kind == RoleStrategy::Kind::DirectRole);
  CHECK(role_strategy(parse_kb("[tbox]\ntop <= func r\nnot A <= B\n"), "r").via == Role{"r", false});

  // |r| equals the number of r-successors on every small model.
  const auto kb = parse_kb(kInfinityKB);
  SearchLimits limits;
  limits.max_domain = 4;
  std::size_t seen = 0;
  enumerate_models(parse_kb("[tbox]\ntop <= func r-\n[abox]\nr(a,b)\n"), limits, [&](const Interpretation& i) {
    std::set<int> targets;
    for (const auto& [x, y] : i.roles.count("r") ? i.roles.at("r") : std::set<std::pair<int, int>>{})
      targets.insert(y);
    CHECK(i.role_count("r") == targets.size());
    ++seen;
    return true;
  });
  CHECK(seen > 0);
  CHECK(compute_spectrum(kb, kR).rep == rep({}, std::nullopt, true));
}

TEST_CASE("role counts are bounded by domain and range") {
  SearchLimits limits;
  limits.max_domain = 3;
  enumerate_models(parse_kb(kTwoFillersTBox), limits, [&](const Interpretation& i) {
    std::set<int> dom;
    std::set<int> ran;
    for (const auto& [x, y] : i.roles.at("r")) {
      dom.insert(x);
      ran.insert(y);
    }
    const auto n = i.role_count("r");
    CHECK(std::max(dom.size(), ran.size()) <= n);
    CHECK(n <= dom.size() * ran.size());
    return true;
  });
}

TEST_CASE("shape families") {
  const auto el = classify_shape(Fragment::EL, false);
  CHECK(el.exhaustive);
  CHECK(el.admits(rep({}, Tail{3, 1}, true)));
  CHECK_FALSE(el.admits(rep({0}, std::nullopt, true)));
  CHECK_THROWS_AS(el.validate(rep({0}, std::nullopt, true)), ShapeViolation);

  const auto dl = classify_shape(Fragment::DLLiteF, false);
  CHECK(dl.admits(rep({}, std::nullopt, true)));
  CHECK(dl.admits(rep({0}, std::nullopt, true)));
  CHECK(dl.admits(rep({0}, Tail{3, 1}, true)));
  CHECK(dl.admits(rep({}, Tail{3, 1}, true)));
  CHECK_FALSE(dl.admits(rep({4}, Tail{6, 1}, true)));

  const auto alcf = classify_shape(Fragment::ALCF, true);
  CHECK(alcf.exhaustive);
  CHECK(alcf.admits(from_generators({ExtNat(2), ExtNat::infinity()})));
  CHECK_FALSE(alcf.admits(rep({}, std::nullopt, true)));

  // Not exhaustive: sporadic values are allowed.
  const auto elif = classify_shape(Fragment::ELIFBot, false);
  CHECK_FALSE(elif.exhaustive);
  CHECK_NOTHROW(elif.validate(rep({4}, Tail{6, 1}, true)));
  CHECK_THROWS_AS(elif.validate(rep({4}, std::nullopt, true)), ShapeViolation);

  CHECK(shape_of(rep({0}, Tail{1, 1}, true)) == Shape::Interval);
  CHECK(shape_of(rep({0}, Tail{2, 1}, true)) == Shape::ZeroInterval);
  CHECK(shape_of(rep({0}, std::nullopt, false)) == Shape::Zero);
  CHECK_FALSE(shape_of(rep({4}, std::nullopt, true)).has_value());
}

TEST_CASE("ALC independent set reduction on a triangle") {
  const auto kb = parse_kb(R"(
[tbox]
not C <= forall r. C
[abox]
r(v1,v2)
r(v2,v1)
r(v2,v3)
r(v3,v2)
r(v1,v3)
r(v3,v1)
)");
  const auto r = compute_spectrum(kb, kC);
  CHECK(r.rep == rep({}, Tail{2, 1}, true));
  CHECK(r.trace["fragment"] == "ALC");
}

TEST_CASE("full ALCIF spectra are refused but membership works") {
  CHECK_THROWS_AS(compute_spectrum(parse_kb(kEvenTBox), kC), UnsupportedFragment);
  CHECK(infinity_in_spectrum(parse_kb(kEvenTBox), kC));
}

TEST_CASE("results are deterministic and independent of the job count") {
  const auto kb = parse_kb(kSporadicKB);
  SolverOptions parallel;
  parallel.jobs = 4;
  const auto a = compute_spectrum(kb, kC);
  const auto b = compute_spectrum(kb, kC);
  const auto c = compute_spectrum(kb, kC, parallel);
  CHECK(a.rep.to_json().dump() == b.rep.to_json().dump());
  CHECK(a.rep.to_json().dump() == c.rep.to_json().dump());
}

TEST_CASE("oracle agreement on random EL_bot knowledge bases") {
  std::mt19937 rng(20261016);
  const std::vector<std::string> names{"A", "B", "C"};
  const std::vector<std::string> roles{"r", "s"};
  const std::vector<std::string> inds{"a", "b"};
  auto pick = [&](const std::vector<std::string>& v) { return v[rng() % v.size()]; };
  SearchLimits limits;
  limits.max_domain = 4;
  for (int round = 0; round < 25; ++round) {
    std::ostringstream text;
    text << "[tbox]\n";
    const int axioms = 1 + static_cast<int>(rng() % 3);
    for (int k = 0; k < axioms; ++k) {
      switch (rng() % 5) {
        case 0:
          text << pick(names) << " <= " << pick(names) << "\n";
          break;
        case 1:
          text << pick(names) << " & " << pick(names) << " <= " << pick(names) << "\n";
          break;
        case 2:
          text << pick(names) << " <= exists " << pick(roles) << ". " << pick(names) << "\n";
          break;
        case 3:
          text << "exists " << pick(roles) << ". " << pick(names) << " <= " << pick(names) << "\n";
          break;
        default:
          text << pick(names) << " & " << pick(names) << " <= bot\n";
          break;
      }
    }
    text << "[abox]\n";
    const int assertions = static_cast<int>(rng() % 3);
    for (int k = 0; k < assertions; ++k) {
      if (rng() % 2)
        text << pick(names) << "(" << pick(inds) << ")\n";
      else
        text << pick(roles) << "(" << pick(inds) << "," << pick(inds) << ")\n";
    }
    const auto kb = parse_kb(text.str());
    CAPTURE(text.str());
    if (!is_satisfiable(kb)) continue;
    const auto lo = min_value(kb, kC);
    for (std::uint64_t n = 0; n <= 3; ++n) {
      if (!oracle_membership(kb, kC, n, limits).found) continue;
      CHECK(membership(kb, kC, n));
      CHECK(lo <= ExtNat(n));
    }
  }
}
