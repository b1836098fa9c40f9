#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "spectra/kb.hpp"

namespace spectra {

// Set of concept ids; limits normalized TBoxes to 64 concept names.
using Mask = std::uint64_t;
inline constexpr int kMaxConcepts = 64;

inline Mask bit(int id) { return Mask{1} << id; }
inline bool has(Mask m, int id) { return (m >> id) & 1U; }
inline bool subset(Mask a, Mask b) { return (a & ~b) == 0; }
inline int popcount(Mask m) { return std::popcount(m); }

// Role id with direction.
struct IRole {
  int id = 0;
  bool inv = false;
  IRole inverse() const { return {id, !inv}; }
  friend auto operator<=>(const IRole&, const IRole&) = default;
};

// ⊓lhs ⊑ ⊔rhs; an empty rhs stands for ⊥.
struct NClause {
  Mask lhs = 0;
  Mask rhs = 0;
  friend auto operator<=>(const NClause&, const NClause&) = default;
};

// ⊓lhs ⊑ ∃role.⊓filler
struct NExistsRight {
  Mask lhs = 0;
  IRole role;
  Mask filler = 0;
  friend auto operator<=>(const NExistsRight&, const NExistsRight&) = default;
};

// ∃role.⊓filler ⊑ rhs
struct NExistsLeft {
  IRole role;
  Mask filler = 0;
  int rhs = 0;
  friend auto operator<=>(const NExistsLeft&, const NExistsLeft&) = default;
};

// ⊓guard ⊑ ≤1 role.⊓filler
struct NFunct {
  Mask guard = 0;
  IRole role;
  Mask filler = 0;
  friend auto operator<=>(const NFunct&, const NFunct&) = default;
};

// A TBox over conjunctions of concept names in the four Horn shapes plus
// disjunctive clauses. Fresh names introduced by normalization are
// recorded with the concept they abbreviate, so a model of the original
// TBox can be expanded by interpreting each fresh name as its definition.
class NormalTBox {
 public:
  std::vector<std::string> concepts;  // id -> name
  std::vector<std::string> roles;     // id -> name
  std::set<NClause> clauses;
  std::set<NExistsRight> exists_right;
  std::set<NExistsLeft> exists_left;
  std::set<NFunct> functs;
  std::map<int, Concept> definitions;

  int num_concepts() const { return static_cast<int>(concepts.size()); }
  int num_roles() const { return static_cast<int>(roles.size()); }
  Mask all_concepts() const {
    return concepts.size() >= 64 ? ~Mask{0} : (Mask{1} << concepts.size()) - 1;
  }
  std::optional<int> concept_id(const std::string& name) const;
  std::optional<int> role_id(const std::string& name) const;
  // Registers a new concept name and returns its id.
  int add_concept(const std::string& name);
  int add_role(const std::string& name);
  int require_concept(const std::string& name) const;
  int require_role(const std::string& name) const;

  bool is_horn() const;
  std::size_t size() const {
    return clauses.size() + exists_right.size() + exists_left.size() + functs.size();
  }

  Mask mask_of(const std::set<std::string>& names) const;
  std::set<std::string> names_of(Mask m) const;
  std::string mask_to_string(Mask m) const;
  std::string role_to_string(IRole r) const;
  Concept mask_concept(Mask m) const;
  Role role_of(IRole r) const;

  TBox to_tbox() const;
};

// Structural transformation into normal form. extra_concepts and
// extra_roles (typically the ABox signature) are registered so that every
// KB name has an id even when the TBox does not mention it.
NormalTBox normalize(const TBox& tbox, const std::set<std::string>& extra_concepts = {},
                     const std::set<std::string>& extra_roles = {});

}  // namespace spectra
