#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "spectra/fragment.hpp"
#include "spectra/interp.hpp"
#include "spectra/kb.hpp"
#include "spectra/spectrum.hpp"

namespace spectra {

struct SolverOptions {
  // Work budget for chase, completion and entailment probes.
  std::uint64_t max_steps = 1'000'000;
  // Conflict budget per SAT call.
  std::uint64_t max_conflicts = 2'000'000;
  // Anonymous elements offered to a model search on top of the named ones
  // are at least this many.
  int min_extras = 5;
  // Upper bound on the domain of bounded searches for non-Horn inputs.
  int max_extras = 24;
  // Largest value probed while scanning for the minimum or a consecutive
  // pair; exceeding it raises BudgetExceeded.
  std::uint64_t max_value = 200;
  // Values probed by the semigroup scan used for functional ALCF roles.
  std::uint64_t role_scan = 12;
  // Worker threads for membership sweeps.
  int jobs = 1;
  std::optional<Fragment> assume_fragment;
};

enum class Shape {
  Interval,      // ⟦m,∞⟧, including ∞
  Empty,         // ∅
  Zero,          // {0}
  ZeroInterval,  // {0} ∪ ⟦m,∞⟧ with m ≥ 2
  Infinity,      // {∞}
  ZeroInfinity,  // {0,∞}
  General,       // V ∪ {∞} for a subsemigroup V of N
};
std::string to_string(Shape s);
// Most specific shape of rep; nullopt if rep fits none.
std::optional<Shape> shape_of(const SpectrumRep& rep);

// Spectra a fragment can produce for one query kind. Exhaustive families
// reject every other shape; the others only describe known shapes.
struct ShapeFamily {
  Fragment fragment = Fragment::ALCIF;
  bool role = false;
  bool exhaustive = false;
  std::vector<Shape> admitted;

  bool admits(const SpectrumRep& rep) const;
  // Throws ShapeViolation when an exhaustive family does not admit rep or
  // rep is not closed under addition.
  void validate(const SpectrumRep& rep) const;
  nlohmann::json to_json() const;
};
ShapeFamily classify_shape(Fragment fragment, bool role);

// Model existence with the extension of one predicate fixed exactly.
// Names that are not individuals of kb denote fresh elements.
struct ClosedProbe {
  KB kb;
  CardinalityQuery predicate;
  std::set<std::string> concept_extension;
  std::set<std::pair<std::string, std::string>> role_extension;
  // Anonymous elements offered besides the named ones; 0 selects the
  // solver default.
  int search_bound = 0;
};

struct RoleStrategy {
  enum class Kind { DirectRole, ReduceToConcept };
  Kind kind = Kind::DirectRole;
  // For ReduceToConcept: count the elements with an outgoing edge along
  // this role (the role itself or its inverse).
  Role via;
  std::string to_string() const;
};

bool is_satisfiable(const KB& kb, const SolverOptions& options = {});
bool infinity_in_spectrum(const KB& kb, const CardinalityQuery& q, const SolverOptions& options = {});
bool membership(const KB& kb, const CardinalityQuery& q, std::uint64_t n, const SolverOptions& options = {});
bool closed_probe(const ClosedProbe& probe, const SolverOptions& options = {});
// Finite part of a model with exactly n answers, if the search finds one.
// Subtrees delegated to the Horn chase are not materialized.
std::optional<Interpretation> membership_witness(const KB& kb, const CardinalityQuery& q, std::uint64_t n,
                                                 const SolverOptions& options = {});
ExtNat min_value(const KB& kb, const CardinalityQuery& q, const SolverOptions& options = {});
RoleStrategy role_strategy(const KB& kb, const std::string& r, const SolverOptions& options = {});

struct SpectrumResult {
  SpectrumRep rep;
  nlohmann::json trace;
};
SpectrumResult compute_spectrum(const KB& kb, const CardinalityQuery& q, const SolverOptions& options = {});

}  // namespace spectra
