#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "spectra/kb.hpp"
#include "spectra/normalize.hpp"

namespace spectra {

// Finite interpretation with dense element ids. Named individuals map to
// their own element (standard names).
struct Interpretation {
  std::vector<std::string> labels;  // element id -> label
  std::map<std::string, int> named;
  std::map<std::string, std::set<int>> concepts;
  std::map<std::string, std::set<std::pair<int, int>>> roles;

  int size() const { return static_cast<int>(labels.size()); }
  int add_element(std::string label);
  // Adds a named element, or returns the existing one.
  int add_named(const std::string& individual);
  void add_concept(const std::string& name, int e) { concepts[name].insert(e); }
  void add_edge(const std::string& role, int from, int to) { roles[role].insert({from, to}); }
  bool in_concept(const std::string& name, int e) const;
  bool has_edge(const Role& r, int from, int to) const;
  std::uint64_t concept_count(const std::string& name) const;
  std::uint64_t role_count(const std::string& name) const;
  // Names this element satisfies among the given concept names.
  std::set<std::string> type_of(int e, const std::set<std::string>& concept_names) const;

  nlohmann::json to_json() const;
  static Interpretation from_json(const nlohmann::json& j);
};

// Obligation d -role-> c where c is the root of a tree that is not
// materialized but promised to exist. The role is read from d's side.
struct Obligation {
  int element = 0;
  Role role;
  std::set<std::string> type;
  // Anchored obligations are satisfied by some element of the type that
  // will be linked once the construction is completed.
  bool anchored = false;
};

struct FrontierCertificate {
  std::vector<Obligation> pending;
  // Decides whether the promised successor of an obligation satisfies a
  // concept. Required whenever pending is non-empty.
  std::function<bool(const Obligation&, const Concept&)> satisfies;
};

struct Violation {
  std::string axiom;
  std::vector<std::string> elements;
};

// Extension of a concept, taking promised successors into account.
std::vector<bool> evaluate(const Interpretation& i, const Concept& c, const FrontierCertificate* cert = nullptr);

std::vector<Violation> check_model(const Interpretation& i, const KB& kb,
                                   const FrontierCertificate* cert = nullptr);
bool is_model(const Interpretation& i, const KB& kb, const FrontierCertificate* cert = nullptr);

// Number of distinct counting-variable projections of homomorphisms.
std::uint64_t count_answers(const Interpretation& i, const CCQ& q);
std::uint64_t count_answers(const Interpretation& i, const CardinalityQuery& q);

// Models of kb side by side; individuals resolve into the first copy.
Interpretation disjoint_union(const Interpretation& i1, const Interpretation& i2, const KB& kb);

// Interprets every fresh normal-form name as the concept it abbreviates.
Interpretation expand_model(const Interpretation& i, const NormalTBox& nf);
// Drops concept and role names outside the given signature.
Interpretation restrict_model(const Interpretation& i, const std::set<std::string>& concept_names,
                              const std::set<std::string>& role_names);

struct SearchLimits {
  int max_domain = 4;
  std::uint64_t max_nodes = 20'000'000;
};

// Visits the models of kb with between max(1, |Ind|) and max_domain
// elements. Individuals occupy the low ids; anonymous elements are only
// visited with non-decreasing concept labels, which removes labelings that
// differ by a permutation of anonymous elements. The visitor returns false
// to stop. Returns the number of models visited; throws BudgetExceeded.
std::uint64_t enumerate_models(const KB& kb, const SearchLimits& limits,
                               const std::function<bool(const Interpretation&)>& visit);

struct OracleResult {
  bool found = false;
  std::optional<Interpretation> witness;
};

// Searches for a model with exactly n answers to q. A negative result only
// means that no witness exists within the domain bound.
OracleResult oracle_membership(const KB& kb, const CardinalityQuery& q, std::uint64_t n,
                               const SearchLimits& limits);

}  // namespace spectra
