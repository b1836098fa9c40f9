#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "spectra/interp.hpp"
#include "spectra/kb.hpp"
#include "spectra/normalize.hpp"

namespace spectra {

// ABox over normal-form ids. Individuals are pairwise distinct.
struct HornABox {
  std::vector<std::string> individuals;
  std::vector<Mask> labels;
  std::vector<std::tuple<int, IRole, int>> edges;

  int add(const std::string& name, Mask label = 0);
  std::optional<int> find(const std::string& name) const;
};

// Normal TBox and ABox of a Horn KB, sharing one id space.
struct HornKB {
  NormalTBox tbox;
  HornABox abox;
};

// Normalizes kb and rejects non-Horn input with UnsupportedLogic.
HornKB prepare_horn(const KB& kb);

struct ChaseNode {
  Mask label = 0;
  std::string individual;  // empty for anonymous nodes
  int parent = -1;
  IRole via;               // role from the parent to this node
  int blocked_by = -1;
  bool indirectly_blocked = false;  // some ancestor is blocked
  bool alive = true;

  bool active() const { return blocked_by < 0 && !indirectly_blocked; }
};

// Finite, blocked representation of the canonical model.
struct ChaseResult {
  bool satisfiable = true;
  std::vector<ChaseNode> nodes;
  std::vector<std::vector<std::pair<IRole, int>>> adjacency;  // both directions

  std::vector<int> neighbours(int node, IRole r) const;
  std::optional<int> node_of(const std::string& individual) const;
  // Flattens the chase into an interpretation; blocked nodes borrow the
  // successors of their blocker.
  Interpretation to_interpretation(const NormalTBox& tbox) const;
};

// Restricted chase with pairwise anywhere blocking; descendants of blocked
// nodes are frozen. Functionality merges anonymous nodes into older or
// named ones; merging two individuals is a clash. Throws BudgetExceeded
// after max_steps rule applications.
ChaseResult chase(const NormalTBox& tbox, const HornABox& abox, std::uint64_t max_steps = 1'000'000);

// Entailment services over a Horn normal TBox, with memoized closures.
// Not safe for concurrent use.
class HornReasoner {
 public:
  explicit HornReasoner(NormalTBox tbox, std::uint64_t max_steps = 1'000'000);

  const NormalTBox& tbox() const { return tbox_; }
  std::uint64_t max_steps() const { return max_steps_; }

  // Consequences of a conjunction; nullopt when it is unsatisfiable.
  std::optional<Mask> closure(Mask k) const;
  bool satisfiable(Mask k) const { return closure(k).has_value(); }
  bool entails_subsumption(Mask k, Mask k2) const;
  bool entails_exists(Mask k, IRole r, Mask k2) const;
  bool entails_functionality(Mask guard, IRole r, Mask filler) const;
  // Maximal labels of r-successors forced for an instance of t.
  const std::vector<Mask>& successors(Mask t, IRole r) const;
  // All realizable types, in lectic order. Throws BudgetExceeded when there
  // are more than max_types of them.
  const std::vector<Mask>& types(std::size_t max_types = 4096) const;
  std::vector<IRole> all_roles() const;

 private:
  NormalTBox tbox_;
  std::uint64_t max_steps_;
  mutable std::unordered_map<Mask, std::optional<Mask>> closure_cache_;
  mutable std::map<std::pair<Mask, IRole>, std::vector<Mask>> successor_cache_;
  mutable std::map<std::tuple<Mask, IRole, Mask>, bool> funct_cache_;
  mutable std::optional<std::vector<Mask>> types_;
};

// Edge of the type graph: from --role--> to.
struct TypeEdge {
  int from = 0;
  IRole role;
  int to = 0;
  friend auto operator<=>(const TypeEdge&, const TypeEdge&) = default;
};

struct TypeGraph {
  std::vector<Mask> types;
  std::map<Mask, int> index;
  std::vector<TypeEdge> gen;  // maximal forced successors
  std::set<TypeEdge> dep;     // successor is unique among predecessors of this type
  std::set<TypeEdge> bidep;   // dep in both directions
  std::vector<int> class_of;
  int num_classes = 0;
  std::vector<std::vector<bool>> precedes;  // transitive class order
  std::vector<bool> critical;
  std::set<int> safe_concepts;

  bool is_dep(int from, IRole r, int to) const { return dep.contains({from, r, to}); }
  std::optional<int> type_index(Mask t) const;
  nlohmann::json to_json(const NormalTBox& tbox) const;
};

// Inverse functional path edges between types (every type, not only
// maximal successors), with reachability helpers used by cycle analysis.
class IfpGraph {
 public:
  explicit IfpGraph(const HornReasoner& reasoner);

  const std::vector<Mask>& types() const { return types_; }
  const std::vector<TypeEdge>& edges() const { return edges_; }
  // Edges lying on some cycle that generates instances of concept c.
  std::vector<TypeEdge> generating_edges(int c) const;
  // Types from which an inverse functional path reaches a type with c.
  std::vector<bool> reaches_concept(int c) const;
  // Shortest path from a to b, where a step may also move from a type to
  // one of its subsets. Such weakening steps carry role id -1.
  std::optional<std::vector<std::pair<IRole, int>>> path(int from, int to, bool allow_weakening) const;

 private:
  std::vector<Mask> types_;
  std::vector<TypeEdge> edges_;
  std::vector<std::vector<std::pair<IRole, int>>> out_;
  std::vector<int> component_;  // strongly connected components with weakening steps
};

TypeGraph build_type_graph(const HornReasoner& reasoner, const std::set<int>& safe_concepts);

struct IfpStep {
  Mask from = 0;
  IRole role;
  Mask to = 0;
};

// Cycle K0 r1 K1 ... rn Kn with Kn entailing K0, plus an exit path from
// the node at attach into the target concept.
struct GeneratingCycle {
  std::vector<Mask> nodes;
  std::vector<IRole> roles;
  std::vector<Mask> exit_nodes;
  std::vector<IRole> exit_roles;
  int attach = 0;
  nlohmann::json to_json(const NormalTBox& tbox) const;
};

bool certify_ifp(const HornReasoner& reasoner, const std::vector<Mask>& nodes, const std::vector<IRole>& roles);
bool certify_cycle(const HornReasoner& reasoner, const GeneratingCycle& cycle, int c);

// At most max_cycles cycles, one per generating edge.
std::vector<GeneratingCycle> find_generating_cycles(const HornReasoner& reasoner, int c,
                                                    std::size_t max_cycles = 64);

// Axioms reversing the generating cycles of c that are not yet entailed.
struct Reversal {
  std::set<NExistsRight> exists;
  std::set<NFunct> functs;
  bool empty() const { return exists.empty() && functs.empty(); }
};
Reversal reversal_axioms(const HornReasoner& reasoner, const IfpGraph& graph, int c);

// Adds reversal axioms until none is missing.
NormalTBox revert_cycles(const NormalTBox& tbox, int c, std::uint64_t max_steps = 1'000'000);
bool is_safe(const HornReasoner& reasoner, int c);
bool is_safe(const HornReasoner& reasoner, const IfpGraph& graph, int c);

// True iff some model of kb interprets c by a finite set.
bool finite_extension_possible(const KB& kb, const std::string& c, std::uint64_t max_steps = 1'000'000);

// Cycle reversion for a role: fresh names standing for the domain and the
// range of the role are reverted alternately until a fixpoint.
struct RoleReversion {
  NormalTBox tbox;
  int domain_concept = 0;
  int range_concept = 0;
};
RoleReversion revert_role(const NormalTBox& tbox, int role, std::uint64_t max_steps = 1'000'000);

struct IlsOptions {
  std::uint64_t max_steps = 1'000'000;
  std::size_t max_rounds = 10'000;
  int max_depth = 64;
  // Drops connected parts that contain no individual.
  bool prune = false;
};

// Finite portion of a completed model. Element types are tracked over the
// normal-form signature; obligations left pending are certified by trees
// that contain neither safe concepts nor critical types.
struct Completion {
  Interpretation model;
  FrontierCertificate certificate;
  std::vector<Mask> element_types;
  std::map<std::string, std::uint64_t> safe_counts;
  std::size_t rounds = 0;
  std::size_t rule_applications = 0;
};

Completion build_ils(const HornKB& kb, const IlsOptions& options = {});
Completion build_ils(const KB& kb, const IlsOptions& options = {});
// Same rules without the per-type anchor elements and without linking to
// them; obligations that would be linked are left pending and anchored.
Completion build_preils(const HornKB& kb, const IlsOptions& options = {});

// Rechecks every pending obligation: the promised tree must be consistent
// with its parent and free of safe concepts and critical types.
bool verify_certificate(const HornReasoner& reasoner, const TypeGraph& graph, const Completion& completion);

struct CountedModel {
  Interpretation model;
  FrontierCertificate certificate;
  std::uint64_t count = 0;
};

struct ModelPair {
  CountedModel first;
  CountedModel second;
  // The KB both models satisfy (cycle reverted TBox, original ABox).
  KB reference;
};

// Two models of kb with consecutive finite extensions of c.
ModelPair plus_one_concept(const KB& kb, const std::string& c, const IlsOptions& options = {});
// Two models of kb with consecutive finite numbers of r-pairs: the disjoint
// union of three completions, and the same union with one extra pair.
ModelPair role_plus_one(const KB& kb, const std::string& r, const IlsOptions& options = {});
// Two copies of a model with one extra r-pair between them.
Interpretation duplicate_plus_one(const Interpretation& i, const std::string& r, const KB& kb);

}  // namespace spectra
