#include "spectra/normalize.hpp"

#include <algorithm>
#include <deque>

#include <fmt/format.h>

#include "spectra/errors.hpp"

namespace spectra {

std::optional<int> NormalTBox::concept_id(const std::string& name) const {
  auto it = std::find(concepts.begin(), concepts.end(), name);
  if (it == concepts.end()) return std::nullopt;
  return static_cast<int>(it - concepts.begin());
}

std::optional<int> NormalTBox::role_id(const std::string& name) const {
  auto it = std::find(roles.begin(), roles.end(), name);
  if (it == roles.end()) return std::nullopt;
  return static_cast<int>(it - roles.begin());
}

int NormalTBox::add_concept(const std::string& name) {
  if (auto id = concept_id(name)) return *id;
  if (num_concepts() >= kMaxConcepts)
    throw BudgetExceeded(fmt::format("normal form needs more than {} concept names", kMaxConcepts));
  concepts.push_back(name);
  return num_concepts() - 1;
}

int NormalTBox::add_role(const std::string& name) {
  if (auto id = role_id(name)) return *id;
  roles.push_back(name);
  return num_roles() - 1;
}

int NormalTBox::require_concept(const std::string& name) const {
  if (auto id = concept_id(name)) return *id;
  throw SignatureMismatch("unknown concept name '" + name + "'");
}

int NormalTBox::require_role(const std::string& name) const {
  if (auto id = role_id(name)) return *id;
  throw SignatureMismatch("unknown role name '" + name + "'");
}

bool NormalTBox::is_horn() const {
  return std::all_of(clauses.begin(), clauses.end(), [](const NClause& c) { return popcount(c.rhs) <= 1; });
}

Mask NormalTBox::mask_of(const std::set<std::string>& names) const {
  Mask m = 0;
  for (const auto& n : names) m |= bit(require_concept(n));
  return m;
}

std::set<std::string> NormalTBox::names_of(Mask m) const {
  std::set<std::string> out;
  for (int i = 0; i < num_concepts(); ++i)
    if (has(m, i)) out.insert(concepts[i]);
  return out;
}

std::string NormalTBox::mask_to_string(Mask m) const {
  if (m == 0) return "top";
  std::vector<std::string> parts;
  for (int i = 0; i < num_concepts(); ++i)
    if (has(m, i)) parts.push_back(concepts[i]);
  return fmt::format("{}", fmt::join(parts, " & "));
}

std::string NormalTBox::role_to_string(IRole r) const { return role_of(r).to_string(); }

Concept NormalTBox::mask_concept(Mask m) const {
  std::vector<Concept> parts;
  for (int i = 0; i < num_concepts(); ++i)
    if (has(m, i)) parts.push_back(Concept::name(concepts[i]));
  return Concept::conj(std::move(parts));
}

Role NormalTBox::role_of(IRole r) const { return Role{roles.at(r.id), r.inv}; }

TBox NormalTBox::to_tbox() const {
  TBox out;
  for (const auto& c : clauses) {
    std::vector<Concept> rhs;
    for (int i = 0; i < num_concepts(); ++i)
      if (has(c.rhs, i)) rhs.push_back(Concept::name(concepts[i]));
    out.insert(Axiom::inclusion(mask_concept(c.lhs), rhs.empty() ? Concept::bot() : Concept::disj(rhs)));
  }
  for (const auto& e : exists_right)
    out.insert(Axiom::inclusion(mask_concept(e.lhs), Concept::exists(role_of(e.role), mask_concept(e.filler))));
  for (const auto& e : exists_left)
    out.insert(Axiom::inclusion(Concept::exists(role_of(e.role), mask_concept(e.filler)),
                                Concept::name(concepts[e.rhs])));
  for (const auto& f : functs)
    out.insert(Axiom::functionality(mask_concept(f.guard), role_of(f.role), mask_concept(f.filler)));
  return out;
}

namespace {

class Normalizer {
 public:
  explicit Normalizer(NormalTBox& out) : out_(out) {}

  void inclusion(const Concept& lhs, const Concept& rhs) {
    if (rhs.kind() == Concept::Kind::And) {
      for (const auto& op : rhs.operands()) inclusion(lhs, op);
      return;
    }
    Items items;
    add_lhs(items, lhs);
    add_rhs(items, rhs);
    emit(items);
  }

  void functionality(const Concept& guard, const Role& role, const Concept& filler) {
    NFunct f;
    f.guard = mask_or_fresh(guard, false);
    f.role = irole(role);
    f.filler = mask_or_fresh(filler, false);
    out_.functs.insert(f);
  }

  void drain() {
    while (!work_.empty()) {
      auto [id, c, positive] = work_.front();
      work_.pop_front();
      const auto x = Concept::name(out_.concepts[id]);
      if (positive)
        inclusion(x, c);
      else
        inclusion(c, x);
    }
  }

 private:
  struct Items {
    Mask lhs = 0;
    Mask rhs = 0;
    std::vector<std::pair<Role, Concept>> lhs_exists;
    std::vector<std::pair<Role, Concept>> rhs_exists;
    bool trivial = false;
  };

  IRole irole(const Role& r) { return {out_.add_role(r.name), r.inverse}; }

  void add_lhs(Items& it, const Concept& c) {
    switch (c.kind()) {
      case Concept::Kind::Top:
        break;
      case Concept::Kind::Name:
        it.lhs |= bit(out_.add_concept(c.name()));
        break;
      case Concept::Kind::And:
        for (const auto& op : c.operands()) add_lhs(it, op);
        break;
      case Concept::Kind::Not:
        add_rhs(it, c.child());
        break;
      case Concept::Kind::Exists:
        it.lhs_exists.emplace_back(c.role(), c.child());
        break;
    }
  }

  void add_rhs(Items& it, const Concept& c) {
    switch (c.kind()) {
      case Concept::Kind::Top:
        it.trivial = true;
        break;
      case Concept::Kind::Name:
        it.rhs |= bit(out_.add_concept(c.name()));
        break;
      case Concept::Kind::And:
        it.rhs |= bit(fresh(c, true));
        break;
      case Concept::Kind::Not:
        add_lhs(it, c.child());
        break;
      case Concept::Kind::Exists:
        it.rhs_exists.emplace_back(c.role(), c.child());
        break;
    }
  }

  // Positive polarity asks for X ⊑ c, negative for c ⊑ X.
  int fresh(const Concept& c, bool positive) {
    auto key = std::make_pair(c, positive);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    std::set<std::string> taken(out_.concepts.begin(), out_.concepts.end());
    std::string name;
    do {
      name = std::string(kNormalFormPrefix) + std::to_string(counter_++);
    } while (taken.contains(name));
    const int id = out_.add_concept(name);
    memo_.emplace(key, id);
    out_.definitions.emplace(id, c);
    work_.push_back({id, c, positive});
    return id;
  }

  Mask mask_or_fresh(const Concept& c, bool positive) {
    if (c.is_name_conjunction()) {
      Mask m = 0;
      for (const auto& op : c.conjuncts()) m |= bit(out_.add_concept(op.name()));
      return m;
    }
    return bit(fresh(c, positive));
  }

  void emit(Items& it) {
    if (it.trivial || (it.lhs & it.rhs) != 0) return;
    const bool single_rhs_exists = it.lhs_exists.empty() && it.rhs_exists.size() == 1 && it.rhs == 0;
    if (single_rhs_exists) {
      const auto& [role, filler] = it.rhs_exists.front();
      out_.exists_right.insert({it.lhs, irole(role), mask_or_fresh(filler, true)});
      return;
    }
    const bool single_lhs_exists = it.lhs_exists.size() == 1 && it.lhs == 0 && it.rhs_exists.empty() &&
                                   popcount(it.rhs) == 1;
    if (single_lhs_exists) {
      const auto& [role, filler] = it.lhs_exists.front();
      out_.exists_left.insert({irole(role), mask_or_fresh(filler, false), std::countr_zero(it.rhs)});
      return;
    }
    Mask lhs = it.lhs;
    Mask rhs = it.rhs;
    for (const auto& [role, filler] : it.lhs_exists) lhs |= bit(fresh(Concept::exists(role, filler), false));
    for (const auto& [role, filler] : it.rhs_exists) rhs |= bit(fresh(Concept::exists(role, filler), true));
    if ((lhs & rhs) != 0) return;
    out_.clauses.insert({lhs, rhs});
  }

  NormalTBox& out_;
  std::map<std::pair<Concept, bool>, int> memo_;
  std::deque<std::tuple<int, Concept, bool>> work_;
  int counter_ = 0;
};

}  // namespace

NormalTBox normalize(const TBox& tbox, const std::set<std::string>& extra_concepts,
                     const std::set<std::string>& extra_roles) {
  NormalTBox out;
  std::set<std::string> cn(extra_concepts.begin(), extra_concepts.end());
  std::set<std::string> rn(extra_roles.begin(), extra_roles.end());
  for (const auto& ax : tbox) {
    ax.lhs.collect_signature(cn, rn);
    ax.rhs.collect_signature(cn, rn);
    if (ax.is_functionality()) rn.insert(ax.role.name);
  }
  for (const auto& n : cn) out.add_concept(n);
  for (const auto& r : rn) out.add_role(r);

  Normalizer norm(out);
  for (const auto& ax : tbox) {
    if (ax.is_functionality())
      norm.functionality(ax.guard(), ax.role, ax.filler());
    else
      norm.inclusion(ax.lhs, ax.rhs);
    norm.drain();
  }
  return out;
}

}  // namespace spectra
