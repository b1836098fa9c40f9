#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "spectra/fragment.hpp"
#include "spectra/kb.hpp"
#include "spectra/spectrum.hpp"

namespace spectra {

// Simple undirected graph; edges are stored with the smaller name first.
struct Graph {
  std::set<std::string> vertices;
  std::set<std::pair<std::string, std::string>> edges;

  // Adds both endpoints. Throws DomainError on a self-loop.
  void add_edge(const std::string& u, const std::string& v);
  bool adjacent(const std::string& u, const std::string& v) const;
  // Throws DomainError unless the graph is simple and edges use known vertices.
  void validate() const;
  nlohmann::json to_json() const;
  static Graph from_json(const nlohmann::json& j);
};

// One graph per isomorphism class with 1 to max_vertices vertices named
// v1, v2, ...; ordered by vertex count, then by canonical edge code.
std::vector<Graph> enumerate_graphs(int max_vertices);

// ALCIF KB whose spectrum for the concept C is the set of finite sums of
// the positive generators (0 included) together with ∞. Elements 0 and ∞
// of generators act as flags when no positive generator is given:
// {} gives ∅, {0} gives {0}, {∞} gives {∞} and {0, ∞} gives {0, ∞}.
// exclude_zero drops 0 from a spectrum with positive generators.
KB realize_semigroup_alcif(const std::vector<ExtNat>& generators, bool exclude_zero = false);

// KB with spectrum {0} ∪ ⟦m,∞⟧ for C (with_zero) or ⟦m,∞⟧. logic is
// EL_bot or DL-Lite_core; anything else raises UnsupportedLogic.
KB realize_interval(std::uint64_t m, bool with_zero, Fragment logic);
// Same shapes for the role r.
KB realize_role_interval(std::uint64_t m, bool with_zero, Fragment logic);

// ALCF KB whose spectrum for the role r is the subsemigroup generated by
// the positive generators, with ∞, and with 0 iff with_zero. Throws
// EmptyGenerators without a positive generator.
KB realize_role_semigroup_alcf(const std::vector<std::uint64_t>& generators, bool with_zero);

enum class ReductionTarget { ALC, ELIF, ELRole };
std::string to_string(ReductionTarget t);
ReductionTarget reduction_target_from_string(const std::string& s);

// KB whose spectrum is ⟦|V| − k, ∞⟧ for C (ALC) or ⟦2|V| − k, ∞⟧ for C
// (ELIF) or for r (ELRole), where k is the size of a maximum independent
// set of g. The query name is returned through the KB: C or r.
KB reduce_independent_set(const Graph& g, ReductionTarget target);

struct Fixture {
  std::string name;
  std::string description;
  KB kb;
  CardinalityQuery query;
  SpectrumRep expected;
};

// Worked examples with their published spectra, and interval examples.
std::vector<Fixture> fixtures();

}  // namespace spectra
