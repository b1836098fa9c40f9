// Acceptance run: prints one PASS/FAIL line per criterion and exits with
// the number of failed criteria.

#include <chrono>
#include <functional>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "spectra/errors.hpp"
#include "spectra/fragment.hpp"
#include "spectra/horn.hpp"
#include "spectra/interp.hpp"
#include "spectra/kb.hpp"
#include "spectra/realize.hpp"
#include "spectra/solver.hpp"

using namespace spectra;

namespace {

// Pinned limits. Every comparison below is exact; only wall-clock budgets
// carry a tolerance.
constexpr double kGoldenSeconds = 5.0;
constexpr double kOracleSeconds = 120.0;
constexpr double kIlsSecondsPerFixture = 10.0;
constexpr double kReductionSeconds = 120.0;
constexpr int kRandomKBs = 200;
constexpr std::uint32_t kRandomSeed = 20261016;
constexpr int kOracleDomain = 5;
constexpr std::uint64_t kOracleMaxValue = 4;
constexpr std::uint64_t kEvenMaxValue = 6;
constexpr int kEvenScanDomain = 3;
constexpr int kModelScanDomain = 4;
// Node budgets of the brute-force enumerator; a refused search is reported,
// never counted as agreement.
constexpr std::uint64_t kOracleNodes = 2'000'000;
constexpr std::uint64_t kModelScanNodes = 2'000'000;
constexpr std::uint64_t kIntervalMax = 5;
constexpr int kGraphMaxVertices = 5;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Sample {
  std::string name;
  KB kb;
  CardinalityQuery query;
};

std::string query_name(const CardinalityQuery& q) { return (q.is_role() ? "role " : "concept ") + q.name; }

// Random EL_bot and DL-Lite_core knowledge bases over at most three
// concept names, two roles and three individuals.
std::vector<Sample> random_corpus() {
  std::mt19937 rng(kRandomSeed);
  const std::vector<std::string> names{"A", "B", "C"};
  const std::vector<std::string> roles{"r", "s"};
  const std::vector<std::string> inds{"a", "b", "c"};
  auto pick = [&](const std::vector<std::string>& v) { return v[rng() % v.size()]; };
  std::vector<Sample> out;
  for (int k = 0; k < kRandomKBs; ++k) {
    const bool lite = k % 2 == 1;
    std::ostringstream text;
    text << "[tbox]\n";
    const int axioms = 1 + static_cast<int>(rng() % 4);
    for (int i = 0; i < axioms; ++i) {
      if (lite) {
        switch (rng() % 5) {
          case 0: text << pick(names) << " <= " << pick(names) << "\n"; break;
          case 1: text << pick(names) << " <= exists " << pick(roles) << (rng() % 2 ? "-" : "") << "\n"; break;
          case 2: text << "exists " << pick(roles) << (rng() % 2 ? "-" : "") << " <= " << pick(names) << "\n"; break;
          case 3: text << pick(names) << " <= not " << pick(names) << "\n"; break;
          default: text << "exists " << pick(roles) << " <= not " << pick(names) << "\n"; break;
        }
      } else {
        switch (rng() % 6) {
          case 0: text << pick(names) << " <= " << pick(names) << "\n"; break;
          case 1: text << pick(names) << " & " << pick(names) << " <= " << pick(names) << "\n"; break;
          case 2: text << pick(names) << " <= exists " << pick(roles) << ". " << pick(names) << "\n"; break;
          case 3: text << "exists " << pick(roles) << ". " << pick(names) << " <= " << pick(names) << "\n"; break;
          case 4: text << "top <= exists " << pick(roles) << ". " << pick(names) << "\n"; break;
          default: text << pick(names) << " & " << pick(names) << " <= bot\n"; break;
        }
      }
    }
    text << "[abox]\n";
    const int facts = static_cast<int>(rng() % 4);
    for (int i = 0; i < facts; ++i) {
      if (rng() % 2)
        text << pick(names) << "(" << pick(inds) << ")\n";
      else
        text << pick(roles) << "(" << pick(inds) << "," << pick(inds) << ")\n";
    }
    const auto q = rng() % 3 == 0 ? CardinalityQuery::role_query(pick(roles))
                                  : CardinalityQuery::concept_query(pick(names));
    out.push_back({fmt::format("random-{}", k), parse_kb(text.str()), q});
  }
  return out;
}

std::size_t max_independent_set(const Graph& g) {
  const std::vector<std::string> v(g.vertices.begin(), g.vertices.end());
  std::size_t best = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << v.size()); ++mask) {
    bool independent = true;
    for (std::size_t i = 0; i < v.size() && independent; ++i)
      for (std::size_t j = i + 1; j < v.size() && independent; ++j)
        if ((mask >> i & 1U) && (mask >> j & 1U) && g.adjacent(v[i], v[j])) independent = false;
    if (independent) best = std::max<std::size_t>(best, std::popcount(mask));
  }
  return best;
}

bool is_elif_bot(const KB& kb) { return fragment_leq(detect_fragment(kb), Fragment::ELIFBot); }

// Computed spectra shared by the corpus-wide criteria.
struct Solved {
  Sample sample;
  std::optional<SpectrumRep> rep;
  std::string error;
};

Outcome golden_fixtures() {
  const auto start = Clock::now();
  Outcome o;
  int exact = 0;
  int total = 0;
  for (const auto& f : fixtures()) {
    ++total;
    if (detect_fragment(f.kb) == Fragment::ALCIF) {
      std::vector<std::uint64_t> wrong;
      for (std::uint64_t n = 0; n <= kEvenMaxValue; ++n)
        if (membership(f.kb, f.query, n) != f.expected.member(ExtNat(n))) wrong.push_back(n);
      bool odd_found = false;
      enumerate_models(f.kb, {kEvenScanDomain, kModelScanNodes}, [&](const Interpretation& i) {
        odd_found = odd_found || count_answers(i, f.query) % 2 == 1;
        return true;
      });
      if (wrong.empty() && !odd_found) {
        ++exact;
      } else {
        o.pass = false;
        o.detail += fmt::format(" {}: membership differs at {{{}}}, odd count within domain {}: {};", f.name,
                                fmt::join(wrong, ","), kEvenScanDomain, odd_found ? "yes" : "no");
      }
      continue;
    }
    const auto rep = compute_spectrum(f.kb, f.query).rep;
    if (rep == f.expected) {
      ++exact;
    } else {
      o.pass = false;
      o.detail += fmt::format(" {}: got {} expected {};", f.name, rep.to_string(), f.expected.to_string());
    }
  }
  const double t = seconds_since(start);
  if (t >= kGoldenSeconds) o.pass = false;
  o.detail = fmt::format("{}/{} fixtures exact in {:.2f} s (limit {} s);", exact, total, t, kGoldenSeconds) + o.detail;
  return o;
}

Outcome oracle_agreement(const std::vector<Sample>& corpus) {
  const auto start = Clock::now();
  Outcome o;
  int witnessed = 0;
  int skipped = 0;
  int violations = 0;
  const SearchLimits limits{kOracleDomain, kOracleNodes};
  for (const auto& s : corpus) {
    std::optional<ExtNat> least;
    try {
      if (is_satisfiable(s.kb)) least = min_value(s.kb, s.query);
    } catch (const LimitError&) {
    }
    for (std::uint64_t n = 0; n <= kOracleMaxValue; ++n) {
      OracleResult found;
      try {
        found = oracle_membership(s.kb, s.query, n, limits);
      } catch (const BudgetExceeded&) {
        ++skipped;
        continue;
      }
      if (!found.found) continue;
      ++witnessed;
      const bool member = membership(s.kb, s.query, n);
      const bool min_ok = least && *least <= ExtNat(n);
      if (!member || !min_ok) {
        ++violations;
        o.detail += fmt::format(" {} {} n={}: member={} min={};", s.name, query_name(s.query), n, member,
                                least ? least->to_string() : "none");
      }
    }
  }
  const double t = seconds_since(start);
  o.pass = violations == 0 && t < kOracleSeconds;
  o.detail = fmt::format("{} KBs, {} witnessed values, {} violations, {} oracle calls over budget, {:.1f} s;",
                         corpus.size(), witnessed, violations, skipped, t) +
             o.detail;
  return o;
}

Outcome semigroup_invariants(const std::vector<Solved>& solved) {
  Outcome o;
  int checked = 0;
  for (const auto& s : solved) {
    if (!s.rep || s.rep->is_empty()) continue;
    ++checked;
    const bool closed = is_closed_under_addition(*s.rep);
    const bool inf = infinity_in_spectrum(s.sample.kb, s.sample.query);
    if (!closed || inf != s.rep->has_infinity()) {
      o.pass = false;
      o.detail += fmt::format(" {}: closed={} infinity {} vs {};", s.sample.name, closed, s.rep->has_infinity(), inf);
    }
  }
  o.detail = fmt::format("{} nonempty spectra checked;", checked) + o.detail;
  return o;
}

Outcome cycle_reversion() {
  Outcome o;
  int fixtures_checked = 0;
  std::uint64_t models = 0;
  std::size_t violations = 0;
  std::vector<std::string> reduced;
  for (const auto& f : fixtures()) {
    if (!is_elif_bot(f.kb)) continue;
    ++fixtures_checked;
    const auto h = prepare_horn(f.kb);
    const auto reverted_tbox = f.query.is_role() ? revert_role(h.tbox, h.tbox.require_role(f.query.name)).tbox
                                                 : revert_cycles(h.tbox, h.tbox.require_concept(f.query.name));
    KB reverted = f.kb;
    reverted.tbox = reverted_tbox.to_tbox();
    // Largest domain bound whose enumeration fits the node budget.
    int domain = kModelScanDomain;
    for (; domain >= 1; --domain) {
      try {
        enumerate_models(f.kb, {domain, kModelScanNodes}, [](const Interpretation&) { return true; });
        break;
      } catch (const BudgetExceeded&) {
      }
    }
    if (domain < kModelScanDomain) reduced.push_back(fmt::format("{}@{}", f.name, domain));
    if (domain < 1) continue;
    models += enumerate_models(f.kb, {domain, kModelScanNodes}, [&](const Interpretation& m) {
      const auto found = check_model(expand_model(m, reverted_tbox), reverted).size();
      if (found > 0 && violations == 0) o.detail += fmt::format(" first violation in {};", f.name);
      violations += found;
      return true;
    });
  }
  if (violations > 0) o.pass = false;
  o.detail = fmt::format("{} fixtures, {} finite models, {} violations; domain bound {} except {} ({} nodes);",
                         fixtures_checked, models, violations, kModelScanDomain, fmt::join(reduced, ", "),
                         kModelScanNodes) +
             o.detail;
  return o;
}

Outcome completions_and_plus_one() {
  Outcome o;
  int checked = 0;
  int pairs = 0;
  double slowest = 0;
  for (const auto& f : fixtures()) {
    if (!is_elif_bot(f.kb) || !is_satisfiable(f.kb)) continue;
    if (!f.query.is_role() && !finite_extension_possible(f.kb, f.query.name)) continue;
    const auto start = Clock::now();
    ++checked;
    auto h = prepare_horn(f.kb);
    if (!f.query.is_role()) h.tbox = revert_cycles(h.tbox, h.tbox.require_concept(f.query.name));
    const auto done = build_ils(h);
    const KB reference{h.tbox.to_tbox(), f.kb.concept_assertions, f.kb.role_assertions};
    if (!check_model(done.model, reference, &done.certificate).empty() ||
        !check_model(done.model, f.kb, &done.certificate).empty()) {
      o.pass = false;
      o.detail += fmt::format(" {}: completion is not a model;", f.name);
    }
    if (!f.query.is_role() && !done.safe_counts.contains(f.query.name)) {
      o.pass = false;
      o.detail += fmt::format(" {}: no finite count for {};", f.name, f.query.name);
    }
    // Consecutive finite values exist exactly when the spectrum has a tail.
    if (f.expected.tail()) {
      ++pairs;
      const auto pair = f.query.is_role() ? role_plus_one(f.kb, f.query.name) : plus_one_concept(f.kb, f.query.name);
      const auto first = count_answers(pair.first.model, f.query);
      const auto second = count_answers(pair.second.model, f.query);
      const bool models_ok = check_model(pair.first.model, f.kb, &pair.first.certificate).empty() &&
                             check_model(pair.second.model, f.kb, &pair.second.certificate).empty();
      if (second != first + 1 || first != pair.first.count || !models_ok) {
        o.pass = false;
        o.detail += fmt::format(" {}: plus-one counts {} and {}, models ok {};", f.name, first, second, models_ok);
      }
    }
    const double t = seconds_since(start);
    slowest = std::max(slowest, t);
    if (t >= kIlsSecondsPerFixture) {
      o.pass = false;
      o.detail += fmt::format(" {}: {:.1f} s;", f.name, t);
    }
  }
  o.detail = fmt::format("{} completions, {} plus-one pairs, slowest {:.2f} s (limit {} s);", checked, pairs, slowest,
                         kIlsSecondsPerFixture) +
             o.detail;
  return o;
}

Outcome realize_roundtrips(std::vector<Solved>& solved) {
  Outcome o;
  int roundtrips = 0;
  const auto c = CardinalityQuery::concept_query("C");
  for (const auto logic : {Fragment::ELBot, Fragment::DLLiteCore})
    for (std::uint64_t m = 0; m <= kIntervalMax; ++m)
      for (const bool z : {true, false}) {
        const auto kb = realize_interval(m, z, logic);
        const auto target = SpectrumRep::canonicalize(z ? std::vector<std::uint64_t>{0} : std::vector<std::uint64_t>{},
                                                      Tail{m, 1}, true);
        const auto rep = compute_spectrum(kb, c).rep;
        ++roundtrips;
        solved.push_back({{fmt::format("interval-{}-{}-{}", to_string(logic), m, z), kb, c}, rep, {}});
        if (rep != target) {
          o.pass = false;
          o.detail += fmt::format(" {} m={} zero={}: got {};", to_string(logic), m, z, rep.to_string());
        }
      }
  const std::vector<std::pair<std::uint64_t, std::vector<std::uint64_t>>> members{{2, {0, 2, 4}}, {3, {3, 6}}};
  const std::vector<std::pair<std::uint64_t, std::vector<std::uint64_t>>> non_members{{2, {1, 3}}, {3, {1, 2, 4, 5}}};
  int patterns = 0;
  for (std::size_t i = 0; i < members.size(); ++i) {
    const auto kb = realize_semigroup_alcif({ExtNat(members[i].first)});
    for (auto n : members[i].second) {
      ++patterns;
      if (!membership(kb, c, n)) {
        o.pass = false;
        o.detail += fmt::format(" semigroup {{{}}}: {} missing;", members[i].first, n);
      }
    }
    for (auto n : non_members[i].second) {
      ++patterns;
      if (membership(kb, c, n)) {
        o.pass = false;
        o.detail += fmt::format(" semigroup {{{}}}: {} present;", members[i].first, n);
      }
    }
  }
  o.detail = fmt::format("{} interval roundtrips, {} semigroup membership checks;", roundtrips, patterns) + o.detail;
  return o;
}

Outcome reductions(std::vector<Solved>& solved) {
  const auto start = Clock::now();
  Outcome o;
  const auto graphs = enumerate_graphs(kGraphMaxVertices);
  const auto c = CardinalityQuery::concept_query("C");
  const auto r = CardinalityQuery::role_query("r");
  int mismatches = 0;
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    const auto& g = graphs[i];
    const auto v = g.vertices.size();
    const auto k = max_independent_set(g);
    const auto alc = reduce_independent_set(g, ReductionTarget::ALC);
    const auto el = reduce_independent_set(g, ReductionTarget::ELRole);
    const auto alc_min = min_value(alc, c);
    const auto el_min = min_value(el, r);
    if (alc_min != ExtNat(v - k) || el_min != ExtNat(2 * v - k)) {
      ++mismatches;
      o.detail += fmt::format(" {}: ALC {} vs {}, EL-role {} vs {};", g.to_json().dump(), alc_min.to_string(), v - k,
                              el_min.to_string(), 2 * v - k);
    }
    // A sample of reductions joins the corpus for the shape criteria.
    if (i % 4 == 0) {
      solved.push_back({{fmt::format("graph-{}-alc", i), alc, c}, compute_spectrum(alc, c).rep, {}});
      solved.push_back({{fmt::format("graph-{}-el", i), el, r}, compute_spectrum(el, r).rep, {}});
    }
  }
  const double t = seconds_since(start);
  o.pass = mismatches == 0 && t < kReductionSeconds;
  o.detail = fmt::format("{} graphs on at most {} vertices, {} mismatches, {:.1f} s (limit {} s);", graphs.size(),
                         kGraphMaxVertices, mismatches, t, kReductionSeconds) +
             o.detail;
  return o;
}

Outcome shape_validation(const std::vector<Solved>& solved) {
  Outcome o;
  int checked = 0;
  int el = 0;
  for (const auto& s : solved) {
    if (!s.error.empty()) {
      o.pass = false;
      o.detail += fmt::format(" {}: {};", s.sample.name, s.error);
      continue;
    }
    if (!s.rep) continue;
    ++checked;
    const auto fragment = detect_fragment(s.sample.kb);
    try {
      classify_shape(fragment, s.sample.query.is_role()).validate(*s.rep);
    } catch (const ShapeViolation& e) {
      o.pass = false;
      o.detail += fmt::format(" {}: {};", s.sample.name, e.what());
    }
    if (fragment == Fragment::EL) {
      ++el;
      if (shape_of(*s.rep) != Shape::Interval) {
        o.pass = false;
        o.detail += fmt::format(" {}: EL spectrum {} is not an interval;", s.sample.name, s.rep->to_string());
      }
    }
  }
  o.detail = fmt::format("{} spectra validated, {} from EL inputs;", checked, el) + o.detail;
  return o;
}

Solved solve(const Sample& s) {
  Solved out{s, std::nullopt, {}};
  try {
    out.rep = compute_spectrum(s.kb, s.query).rep;
  } catch (const ShapeViolation& e) {
    out.error = std::string("shape violation: ") + e.what();
  } catch (const LimitError&) {
    // Outside the complete-spectrum procedure; not part of the corpus.
  }
  return out;
}

}  // namespace

int main() {
  std::vector<Solved> solved;
  for (const auto& f : fixtures()) solved.push_back(solve({f.name, f.kb, f.query}));
  const auto corpus = random_corpus();
  for (const auto& s : corpus) solved.push_back(solve(s));

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"golden fixtures", golden_fixtures},
      {"oracle agreement", [&] { return oracle_agreement(corpus); }},
      {"semigroup invariants", [&] { return semigroup_invariants(solved); }},
      {"cycle reversion models", cycle_reversion},
      {"completions and plus-one", completions_and_plus_one},
      {"realize roundtrips", [&] { return realize_roundtrips(solved); }},
      {"reduction cross-check", [&] { return reductions(solved); }},
      {"shape validation", [&] { return shape_validation(solved); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("aborted: ") + e.what()};
    }
    if (!o.pass) ++failed;
    fmt::print("criterion {} {} {}: {}\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first, o.detail);
    std::fflush(stdout);
  }
  return failed;
}
