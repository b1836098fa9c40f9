#pragma once

#include <compare>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace spectra {

// A role name, possibly inverted.
struct Role {
  std::string name;
  bool inverse = false;

  Role inv() const { return Role{name, !inverse}; }
  std::string to_string() const { return inverse ? name + "-" : name; }
  friend auto operator<=>(const Role&, const Role&) = default;
};

// Immutable concept tree over Top, names, negation, conjunction and
// existential restriction. Derived constructors (bot, disjunction, value
// restriction) are expanded on construction. Conjunctions are flattened,
// deduplicated and sorted, so structural equality is canonical.
class Concept {
 public:
  enum class Kind { Top, Name, Not, And, Exists };

  static Concept top();
  static Concept bot();
  static Concept name(std::string n);
  static Concept negate(const Concept& c);
  static Concept conj(std::vector<Concept> cs);
  static Concept disj(std::vector<Concept> cs);
  static Concept exists(Role r, const Concept& filler);
  static Concept forall(Role r, const Concept& filler);

  Kind kind() const { return node_->kind; }
  const std::string& name() const { return node_->name; }
  const Role& role() const { return node_->role; }
  // Operand of Not, filler of Exists.
  const Concept& child() const { return node_->kids.front(); }
  // Conjuncts of And.
  const std::vector<Concept>& operands() const { return node_->kids; }

  bool is_top() const { return kind() == Kind::Top; }
  bool is_bot() const { return kind() == Kind::Not && child().is_top(); }
  bool is_name() const { return kind() == Kind::Name; }
  // Top, a name, or a conjunction of names.
  bool is_name_conjunction() const;
  // Conjunction elements (the operands of an And, or the concept itself).
  std::vector<Concept> conjuncts() const;

  void collect_signature(std::set<std::string>& concept_names, std::set<std::string>& role_names) const;
  bool uses_inverse() const;
  bool uses_negation() const;

  std::string to_string() const;

  friend std::strong_ordering operator<=>(const Concept& a, const Concept& b);
  friend bool operator==(const Concept& a, const Concept& b) { return (a <=> b) == 0; }

 private:
  struct Node {
    Kind kind = Kind::Top;
    std::string name;
    Role role;
    std::vector<Concept> kids;
  };
  explicit Concept(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

// Concept inclusion lhs ⊑ rhs, or qualified functionality
// guard ⊑ ≤1 role.filler.
struct Axiom {
  enum class Kind { Inclusion, Functionality };
  Kind kind = Kind::Inclusion;
  Concept lhs = Concept::top();
  Concept rhs = Concept::top();
  Role role;

  static Axiom inclusion(Concept lhs, Concept rhs);
  static Axiom functionality(Concept guard, Role role, Concept filler);
  bool is_functionality() const { return kind == Kind::Functionality; }
  // For functionality restrictions lhs is the guard and rhs the filler.
  const Concept& guard() const { return lhs; }
  const Concept& filler() const { return rhs; }
  bool unqualified() const { return lhs.is_top() && rhs.is_top(); }

  std::string to_string() const;
  friend auto operator<=>(const Axiom&, const Axiom&) = default;
};

struct ConceptAssertion {
  std::string concept_name;
  std::string individual;
  std::string to_string() const { return concept_name + "(" + individual + ")"; }
  friend auto operator<=>(const ConceptAssertion&, const ConceptAssertion&) = default;
};

struct RoleAssertion {
  std::string role_name;
  std::string subject;
  std::string object;
  std::string to_string() const { return role_name + "(" + subject + "," + object + ")"; }
  friend auto operator<=>(const RoleAssertion&, const RoleAssertion&) = default;
};

using TBox = std::set<Axiom>;

struct KB {
  TBox tbox;
  std::set<ConceptAssertion> concept_assertions;
  std::set<RoleAssertion> role_assertions;

  std::set<std::string> individuals() const;
  std::set<std::string> concept_names() const;
  std::set<std::string> role_names() const;
  bool abox_empty() const { return concept_assertions.empty() && role_assertions.empty(); }

  friend bool operator==(const KB&, const KB&) = default;
};

// Throws NamespaceClash if an identifier is used both as a concept name
// and as a role name.
void check_namespaces(const KB& kb);

// Throws ReservedName if kb uses a name in the normalizer's namespace.
void reject_reserved_names(const KB& kb);
inline constexpr std::string_view kNormalFormPrefix = "_nf_";

// Returns base, or base with a numeric suffix, such that the result is
// not in taken.
std::string fresh_name(const std::string& base, const std::set<std::string>& taken);

KB parse_kb(std::string_view text);
std::string serialize_kb(const KB& kb);
Concept parse_concept(std::string_view text);

// Counting conjunctive queries.
struct Term {
  enum class Kind { Individual, Variable, Counting };
  Kind kind = Kind::Individual;
  std::string name;
  friend auto operator<=>(const Term&, const Term&) = default;
};

struct QueryAtom {
  std::string predicate;
  std::vector<Term> args;  // one argument for concepts, two for roles
  friend auto operator<=>(const QueryAtom&, const QueryAtom&) = default;
};

struct CCQ {
  std::vector<QueryAtom> atoms;

  std::vector<std::string> variables() const;
  std::vector<std::string> counting_variables() const;
  bool individual_free() const;
  // Connected via shared terms in the Gaifman graph of the atoms.
  bool connected() const;
  std::string to_string() const;
};

// Syntax: atoms separated by '&' or ','; terms are `?x` for existential
// variables, `!z` for counting variables and bare names for individuals.
CCQ parse_ccq(std::string_view text);

struct CardinalityQuery {
  enum class Kind { Concept, Role };
  Kind kind = Kind::Concept;
  std::string name;

  static CardinalityQuery concept_query(std::string n) { return {Kind::Concept, std::move(n)}; }
  static CardinalityQuery role_query(std::string n) { return {Kind::Role, std::move(n)}; }
  bool is_role() const { return kind == Kind::Role; }
  CCQ to_ccq() const;
  std::string to_string() const;
};

}  // namespace spectra
