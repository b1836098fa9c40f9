#include "spectra/realize.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <numeric>

#include <fmt/format.h>

#include "spectra/errors.hpp"

namespace spectra {

namespace {

Concept name(const std::string& n) { return Concept::name(n); }
Concept exists(const std::string& r, const Concept& c = Concept::top()) { return Concept::exists(Role{r, false}, c); }
Concept exists_inv(const std::string& r, const Concept& c = Concept::top()) {
  return Concept::exists(Role{r, true}, c);
}
Concept neg(const Concept& c) { return Concept::negate(c); }
Concept conj(std::vector<Concept> cs) { return Concept::conj(std::move(cs)); }
Concept disj(std::vector<Concept> cs) { return Concept::disj(std::move(cs)); }

void sub(KB& kb, const Concept& lhs, const Concept& rhs) { kb.tbox.insert(Axiom::inclusion(lhs, rhs)); }
void equiv(KB& kb, const Concept& a, const Concept& b) {
  sub(kb, a, b);
  sub(kb, b, a);
}

const char* kSporadicConcept = R"(
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

const char* kInfinityOnly = R"(
[tbox]
C <= exists r
exists r- <= C
top <= func r-
[abox]
r(a,a)
r(a,b)
)";

const char* kZeroInfinity = R"(
[tbox]
C <= exists r
exists r- <= C
top <= func r-
C <= exists s
exists s- <= C
top <= func s-
exists r- & exists s- <= bot
)";

const char* kSporadicRole = R"(
[tbox]
top <= exists r. A1
top <= exists r. A2
A1 & A2 <= bot
)";

const char* kEven = R"(
[tbox]
top <= C
A <= exists r. not A
not A <= exists r. A
top <= func r
top <= func r-
)";

std::string indexed(const std::string& base, std::uint64_t k) { return base + std::to_string(k); }

void pairwise_disjoint(KB& kb, const std::vector<Concept>& cs) {
  for (std::size_t i = 0; i < cs.size(); ++i)
    for (std::size_t j = i + 1; j < cs.size(); ++j) sub(kb, conj({cs[i], cs[j]}), Concept::bot());
}

void check_interval_logic(Fragment logic) {
  if (logic != Fragment::ELBot && logic != Fragment::DLLiteCore)
    throw UnsupportedLogic("interval constructions exist for EL_bot and DL-Lite_core, not " + to_string(logic));
}

// Counter on the elements of an r-cycle marked by mark: consecutive
// elements hold consecutive values modulo n, so a finite marked cycle
// has a length divisible by n. Names live in the _ctr_<index>_ namespace.
void add_counter(KB& kb, std::size_t index, std::uint64_t n, const Concept& mark) {
  sub(kb, mark, exists("r", mark));
  sub(kb, mark, exists_inv("r", mark));
  const std::uint64_t last = n - 1;
  const int bits = std::bit_width(last);
  if (bits == 0) return;
  const std::string prefix = fmt::format("_ctr_{}_", index);
  std::vector<Concept> b;
  for (int i = 0; i < bits; ++i) b.push_back(name(prefix + "b" + std::to_string(i)));
  auto literal = [&](int i, bool value) { return value ? b[i] : neg(b[i]); };

  // The end marker holds the value n − 1 and is followed by 0.
  const Concept end = name(prefix + "end");
  std::vector<Concept> pattern{mark};
  for (int i = 0; i < bits; ++i) pattern.push_back(literal(i, (last >> i) & 1U));
  equiv(kb, end, conj(pattern));
  std::vector<Concept> zero;
  for (int i = 0; i < bits; ++i) zero.push_back(neg(b[i]));
  sub(kb, end, exists("r", conj(zero)));

  // Increment: bit i flips iff all lower bits are set.
  for (int i = 0; i < bits; ++i) {
    std::vector<Concept> lower(b.begin(), b.begin() + i);
    const Concept carry = conj(lower);
    for (const bool value : {false, true}) {
      sub(kb, conj({mark, neg(end), carry, literal(i, value)}), exists("r", literal(i, !value)));
      if (i > 0) sub(kb, conj({mark, neg(end), neg(carry), literal(i, value)}), exists("r", literal(i, value)));
    }
  }

  // Values above n − 1 are excluded: some clear bit of n − 1 is set while
  // every higher set bit of n − 1 is set too.
  for (int i = 0; i < bits; ++i) {
    if ((last >> i) & 1U) continue;
    std::vector<Concept> above{mark, b[i]};
    for (int z = i + 1; z < bits; ++z)
      if ((last >> z) & 1U) above.push_back(b[z]);
    sub(kb, conj(above), Concept::bot());
  }
}

std::string vertex_code(const Graph& g, const std::vector<int>& perm, const std::vector<std::string>& names) {
  std::string code;
  for (std::size_t i = 0; i < perm.size(); ++i)
    for (std::size_t j = i + 1; j < perm.size(); ++j)
      code.push_back(g.adjacent(names[perm[i]], names[perm[j]]) ? '1' : '0');
  return code;
}

std::string canonical_code(const Graph& g) {
  std::vector<std::string> names(g.vertices.begin(), g.vertices.end());
  std::vector<int> perm(names.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::string best;
  do {
    auto code = vertex_code(g, perm, names);
    if (best.empty() || code > best) best = std::move(code);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

SpectrumRep interval(std::uint64_t m, bool with_zero) {
  return SpectrumRep::canonicalize(with_zero ? std::vector<std::uint64_t>{0} : std::vector<std::uint64_t>{},
                                   Tail{m, 1}, true);
}

}  // namespace

void Graph::add_edge(const std::string& u, const std::string& v) {
  if (u == v) throw DomainError("self-loop on vertex " + u);
  vertices.insert(u);
  vertices.insert(v);
  edges.insert(u < v ? std::pair{u, v} : std::pair{v, u});
}

bool Graph::adjacent(const std::string& u, const std::string& v) const {
  return edges.contains(u < v ? std::pair{u, v} : std::pair{v, u});
}

void Graph::validate() const {
  for (const auto& [u, v] : edges) {
    if (u >= v) throw DomainError(fmt::format("edge ({}, {}) is a self-loop or not normalized", u, v));
    if (!vertices.contains(u) || !vertices.contains(v))
      throw DomainError(fmt::format("edge ({}, {}) uses an unknown vertex", u, v));
  }
}

nlohmann::json Graph::to_json() const {
  nlohmann::json e = nlohmann::json::array();
  for (const auto& [u, v] : edges) e.push_back({u, v});
  return {{"vertices", vertices}, {"edges", e}};
}

Graph Graph::from_json(const nlohmann::json& j) {
  Graph g;
  for (const auto& v : j.at("vertices")) g.vertices.insert(v.get<std::string>());
  for (const auto& e : j.at("edges")) {
    if (!e.is_array() || e.size() != 2) throw DomainError("an edge is a pair of vertex names");
    const auto u = e[0].get<std::string>();
    const auto v = e[1].get<std::string>();
    if (!g.vertices.contains(u) || !g.vertices.contains(v))
      throw DomainError(fmt::format("edge ({}, {}) uses an unknown vertex", u, v));
    g.add_edge(u, v);
  }
  return g;
}

std::vector<Graph> enumerate_graphs(int max_vertices) {
  std::vector<Graph> out;
  for (int n = 1; n <= max_vertices; ++n) {
    std::vector<std::pair<int, int>> slots;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) slots.emplace_back(i, j);
    std::map<std::string, Graph> classes;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << slots.size()); ++mask) {
      Graph g;
      for (int i = 0; i < n; ++i) g.vertices.insert("v" + std::to_string(i + 1));
      for (std::size_t s = 0; s < slots.size(); ++s)
        if ((mask >> s) & 1U)
          g.add_edge("v" + std::to_string(slots[s].first + 1), "v" + std::to_string(slots[s].second + 1));
      classes.try_emplace(canonical_code(g), std::move(g));
    }
    for (auto& [code, g] : classes) out.push_back(std::move(g));
  }
  return out;
}

KB realize_semigroup_alcif(const std::vector<ExtNat>& generators, bool exclude_zero) {
  std::vector<std::uint64_t> positive;
  bool zero = false;
  bool infinity = false;
  for (const auto& g : generators) {
    if (g.is_infinite())
      infinity = true;
    else if (g.value() == 0)
      zero = true;
    else
      positive.push_back(g.value());
  }
  std::sort(positive.begin(), positive.end());
  positive.erase(std::unique(positive.begin(), positive.end()), positive.end());

  if (positive.empty()) {
    if (zero && infinity) return parse_kb(kZeroInfinity);
    if (infinity) return parse_kb(kInfinityOnly);
    KB kb;
    sub(kb, zero ? name("C") : Concept::top(), Concept::bot());
    return kb;
  }

  KB kb;
  const Concept c = name("C");
  kb.tbox.insert(Axiom::functionality(Concept::top(), Role{"r", false}, Concept::top()));
  kb.tbox.insert(Axiom::functionality(Concept::top(), Role{"r", true}, Concept::top()));
  sub(kb, c, exists("r", c));
  sub(kb, c, exists_inv("r", c));
  std::vector<Concept> marks;
  for (std::size_t j = 0; j < positive.size(); ++j) {
    const Concept mark = name(fmt::format("_ctr_{}_mark", j));
    marks.push_back(mark);
    sub(kb, mark, c);
    add_counter(kb, j, positive[j], mark);
  }
  sub(kb, c, disj(marks));
  if (exclude_zero) kb.concept_assertions.insert({"C", "a"});
  return kb;
}

KB realize_interval(std::uint64_t m, bool with_zero, Fragment logic) {
  check_interval_logic(logic);
  KB kb;
  if (m == 0) return kb;
  std::vector<Concept> a;
  for (std::uint64_t k = 1; k <= m; ++k) {
    a.push_back(name(indexed("A", k)));
    if (logic == Fragment::ELBot) {
      sub(kb, name("C"), exists("r", a.back()));
    } else {
      sub(kb, name("C"), exists(indexed("r", k)));
      sub(kb, exists_inv(indexed("r", k)), a.back());
    }
    sub(kb, a.back(), name("C"));
  }
  pairwise_disjoint(kb, a);
  if (!with_zero) kb.concept_assertions.insert({"C", "a"});
  return kb;
}

KB realize_role_interval(std::uint64_t m, bool with_zero, Fragment logic) {
  check_interval_logic(logic);
  KB kb;
  if (m == 0) return kb;
  std::vector<Concept> a;
  for (std::uint64_t k = 1; k <= m; ++k) {
    a.push_back(name(indexed("A", k)));
    if (logic == Fragment::ELBot) {
      sub(kb, exists("r"), exists(indexed("r", k), a.back()));
    } else {
      sub(kb, exists("r"), exists(indexed("r", k)));
      sub(kb, exists_inv(indexed("r", k)), a.back());
    }
    sub(kb, a.back(), exists("r"));
  }
  pairwise_disjoint(kb, a);
  if (!with_zero) kb.role_assertions.insert({"r", "a", "b"});
  return kb;
}

KB realize_role_semigroup_alcf(const std::vector<std::uint64_t>& generators, bool with_zero) {
  std::vector<std::uint64_t> gens;
  for (const auto g : generators)
    if (g > 0) gens.push_back(g);
  std::sort(gens.begin(), gens.end());
  gens.erase(std::unique(gens.begin(), gens.end()), gens.end());
  if (gens.empty()) throw EmptyGenerators("a role semigroup needs a positive generator");

  KB kb;
  std::vector<Concept> groups;
  std::vector<Concept> slots;
  for (std::size_t i = 0; i < gens.size(); ++i) {
    const Concept group = name(fmt::format("A{}", i + 1));
    groups.push_back(group);
    for (std::uint64_t j = 1; j <= gens[i]; ++j) {
      const Concept slot = name(fmt::format("B{}_{}", i + 1, j));
      slots.push_back(slot);
      sub(kb, group, exists("r", slot));
      kb.tbox.insert(Axiom::functionality(Concept::top(), Role{"r", false}, slot));
      sub(kb, exists("r", slot), group);
    }
  }
  sub(kb, exists("r"), disj(groups));
  pairwise_disjoint(kb, groups);
  sub(kb, Concept::top(), disj(slots));
  pairwise_disjoint(kb, slots);
  if (!with_zero) sub(kb, neg(exists("r")), exists("s", exists("r")));
  return kb;
}

std::string to_string(ReductionTarget t) {
  switch (t) {
    case ReductionTarget::ALC:
      return "ALC";
    case ReductionTarget::ELIF:
      return "ELIF";
    case ReductionTarget::ELRole:
      return "EL-role";
  }
  return "?";
}

ReductionTarget reduction_target_from_string(const std::string& s) {
  for (const auto t : {ReductionTarget::ALC, ReductionTarget::ELIF, ReductionTarget::ELRole})
    if (to_string(t) == s) return t;
  throw DomainError("unknown reduction target '" + s + "' (expected ALC, ELIF or EL-role)");
}

KB reduce_independent_set(const Graph& g, ReductionTarget target) {
  g.validate();
  KB kb;
  std::set<std::string> taken = g.vertices;
  std::map<std::string, std::string> copy;
  for (const auto& v : g.vertices) {
    copy[v] = fresh_name("i_" + v, taken);
    taken.insert(copy[v]);
  }
  switch (target) {
    case ReductionTarget::ALC:
      sub(kb, neg(name("C")), Concept::forall(Role{"r", false}, name("C")));
      for (const auto& [u, v] : g.edges) kb.role_assertions.insert({"r", u, v});
      return kb;
    case ReductionTarget::ELIF: {
      // A vertex whose witness is an independent-set copy, next to another
      // such vertex, turns every vertex into an instance of C.
      const Concept reuses = exists("s", name("Indep"));
      sub(kb, name("Vertex"), exists("s", name("C")));
      kb.tbox.insert(Axiom::functionality(Concept::top(), Role{"s", true}, Concept::top()));
      sub(kb, conj({reuses, exists("edge", reuses)}), name("Clash"));
      sub(kb, exists("t", name("Clash")), name("C"));
      for (const auto& v : g.vertices) {
        kb.concept_assertions.insert({"Vertex", v});
        kb.concept_assertions.insert({"Indep", copy[v]});
        kb.concept_assertions.insert({"C", copy[v]});
        for (const auto& u : g.vertices) kb.role_assertions.insert({"t", u, v});
      }
      for (const auto& [u, v] : g.edges) kb.role_assertions.insert({"edge", u, v});
      return kb;
    }
    case ReductionTarget::ELRole: {
      const Concept chosen = exists("r", conj({name("Chosen"), name("Indep")}));
      sub(kb, name("Vertex"), exists("r", name("Chosen")));
      sub(kb, exists("t", conj({chosen, exists("edge", chosen)})), exists("r"));
      for (const auto& v : g.vertices) {
        kb.concept_assertions.insert({"Vertex", v});
        kb.concept_assertions.insert({"Indep", copy[v]});
        kb.role_assertions.insert({"r", v, copy[v]});
        for (const auto& u : g.vertices) kb.role_assertions.insert({"t", copy[u], v});
      }
      for (const auto& [u, v] : g.edges) kb.role_assertions.insert({"edge", u, v});
      return kb;
    }
  }
  throw DomainError("unknown reduction target");
}

std::vector<Fixture> fixtures() {
  const auto c = CardinalityQuery::concept_query("C");
  const auto r = CardinalityQuery::role_query("r");
  const auto sporadic = SpectrumRep::canonicalize({4}, Tail{6, 1}, true);
  std::vector<Fixture> out{
      {"example-2", "sporadic value 4 below the interval from 6, with inverse functionality and disjointness",
       parse_kb(kSporadicConcept), c, sporadic},
      {"example-3", "only infinite extensions of C", parse_kb(kInfinityOnly), c,
       SpectrumRep::canonicalize({}, std::nullopt, true)},
      {"example-dllitef-zero-infinity", "C is empty or infinite", parse_kb(kZeroInfinity), c,
       SpectrumRep::canonicalize({0}, std::nullopt, true)},
      {"example-role-elbot", "two disjoint r-successors per element", parse_kb(kSporadicRole), r, sporadic},
      {"example-even", "C covers the domain, an alternating r-permutation forces even sizes", parse_kb(kEven), c,
       SpectrumRep::canonicalize({}, Tail{0, 2}, true)},
  };
  for (const auto logic : {Fragment::ELBot, Fragment::DLLiteCore}) {
    const std::string tag = logic == Fragment::ELBot ? "elbot" : "dllite";
    for (std::uint64_t m = 1; m <= 3; ++m)
      for (const bool z : {true, false}) {
        out.push_back({fmt::format("interval-{}-m{}{}", tag, m, z ? "-zero" : ""),
                       fmt::format("{} pairwise disjoint witnesses{}", m, z ? "" : ", seeded instance"),
                       realize_interval(m, z, logic), c, interval(m, z)});
      }
  }
  for (std::uint64_t m = 1; m <= 3; ++m)
    for (const bool z : {true, false})
      out.push_back({fmt::format("role-interval-elbot-m{}{}", m, z ? "-zero" : ""),
                     fmt::format("{} pairwise disjoint witnesses of r{}", m, z ? "" : ", seeded pair"),
                     realize_role_interval(m, z, Fragment::ELBot), r, interval(m, z)});
  return out;
}

}  // namespace spectra
