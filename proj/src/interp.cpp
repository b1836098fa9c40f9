#include "spectra/interp.hpp"

#include <algorithm>
#include <unordered_map>

#include <fmt/format.h>

#include "spectra/errors.hpp"

namespace spectra {

// ---------------------------------------------------------------------------
// Interpretation

int Interpretation::add_element(std::string label) {
  labels.push_back(std::move(label));
  return size() - 1;
}

int Interpretation::add_named(const std::string& individual) {
  if (auto it = named.find(individual); it != named.end()) return it->second;
  const int id = add_element(individual);
  named.emplace(individual, id);
  return id;
}

bool Interpretation::in_concept(const std::string& name, int e) const {
  auto it = concepts.find(name);
  return it != concepts.end() && it->second.contains(e);
}

bool Interpretation::has_edge(const Role& r, int from, int to) const {
  auto it = roles.find(r.name);
  if (it == roles.end()) return false;
  return r.inverse ? it->second.contains({to, from}) : it->second.contains({from, to});
}

std::uint64_t Interpretation::concept_count(const std::string& name) const {
  auto it = concepts.find(name);
  return it == concepts.end() ? 0 : it->second.size();
}

std::uint64_t Interpretation::role_count(const std::string& name) const {
  auto it = roles.find(name);
  return it == roles.end() ? 0 : it->second.size();
}

std::set<std::string> Interpretation::type_of(int e, const std::set<std::string>& concept_names) const {
  std::set<std::string> out;
  for (const auto& n : concept_names)
    if (in_concept(n, e)) out.insert(n);
  return out;
}

nlohmann::json Interpretation::to_json() const {
  nlohmann::json j;
  j["domain"] = labels;
  j["named"] = nlohmann::json::object();
  for (const auto& [a, e] : named) j["named"][a] = labels.at(e);
  j["concepts"] = nlohmann::json::object();
  for (const auto& [c, ext] : concepts) {
    auto arr = nlohmann::json::array();
    for (int e : ext) arr.push_back(labels.at(e));
    j["concepts"][c] = arr;
  }
  j["roles"] = nlohmann::json::object();
  for (const auto& [r, ext] : roles) {
    auto arr = nlohmann::json::array();
    for (const auto& [a, b] : ext) arr.push_back({labels.at(a), labels.at(b)});
    j["roles"][r] = arr;
  }
  return j;
}

Interpretation Interpretation::from_json(const nlohmann::json& j) {
  Interpretation i;
  std::map<std::string, int> ids;
  for (const auto& l : j.at("domain")) {
    const auto label = l.get<std::string>();
    if (ids.contains(label)) throw DomainError("duplicate domain element '" + label + "'");
    ids.emplace(label, i.add_element(label));
  }
  auto lookup = [&](const nlohmann::json& l) {
    const auto label = l.get<std::string>();
    auto it = ids.find(label);
    if (it == ids.end()) throw SignatureMismatch("element '" + label + "' is not in the domain");
    return it->second;
  };
  if (j.contains("named"))
    for (const auto& [a, l] : j.at("named").items()) i.named.emplace(a, lookup(l));
  if (j.contains("concepts"))
    for (const auto& [c, ext] : j.at("concepts").items()) {
      auto& set = i.concepts[c];
      for (const auto& l : ext) set.insert(lookup(l));
    }
  if (j.contains("roles"))
    for (const auto& [r, ext] : j.at("roles").items()) {
      auto& set = i.roles[r];
      for (const auto& p : ext) set.insert({lookup(p.at(0)), lookup(p.at(1))});
    }
  return i;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

class Evaluator {
 public:
  Evaluator(const Interpretation& i, const FrontierCertificate* cert) : i_(i), cert_(cert) {
    for (const auto& [r, ext] : i.roles) {
      auto& fwd = out_[r];
      auto& bwd = in_[r];
      fwd.assign(i.size(), {});
      bwd.assign(i.size(), {});
      for (const auto& [a, b] : ext) {
        fwd[a].push_back(b);
        bwd[b].push_back(a);
      }
    }
    if (cert_ != nullptr) {
      if (!cert_->pending.empty() && !cert_->satisfies)
        throw DomainError("frontier certificate without an evaluation callback");
      pending_.assign(i.size(), {});
      for (const auto& ob : cert_->pending) {
        if (ob.element < 0 || ob.element >= i.size())
          throw SignatureMismatch("certificate obligation on an unknown element");
        pending_[ob.element].push_back(&ob);
      }
    }
  }

  const std::vector<int>& neighbours(const Role& r, int x) const {
    static const std::vector<int> none;
    const auto& table = r.inverse ? in_ : out_;
    auto it = table.find(r.name);
    if (it == table.end()) return none;
    return it->second[x];
  }

  std::vector<const Obligation*> obligations(const Role& r, int x) const {
    std::vector<const Obligation*> out;
    if (pending_.empty()) return out;
    for (const auto* ob : pending_[x])
      if (ob->role == r) out.push_back(ob);
    return out;
  }

  const std::vector<bool>& eval(const Concept& c) {
    if (auto it = memo_.find(c); it != memo_.end()) return it->second;
    std::vector<bool> v(i_.size(), false);
    switch (c.kind()) {
      case Concept::Kind::Top:
        v.assign(i_.size(), true);
        break;
      case Concept::Kind::Name:
        if (auto it = i_.concepts.find(c.name()); it != i_.concepts.end())
          for (int e : it->second)
            if (e >= 0 && e < i_.size()) v[e] = true;
        break;
      case Concept::Kind::Not: {
        const auto& k = eval(c.child());
        for (int x = 0; x < i_.size(); ++x) v[x] = !k[x];
        break;
      }
      case Concept::Kind::And: {
        v.assign(i_.size(), true);
        for (const auto& op : c.operands()) {
          const auto& k = eval(op);
          for (int x = 0; x < i_.size(); ++x) v[x] = v[x] && k[x];
        }
        break;
      }
      case Concept::Kind::Exists: {
        const auto k = eval(c.child());
        for (int x = 0; x < i_.size(); ++x) {
          for (int y : neighbours(c.role(), x))
            if (k[y]) {
              v[x] = true;
              break;
            }
          if (!v[x])
            for (const auto* ob : obligations(c.role(), x))
              if (cert_->satisfies(*ob, c.child())) {
                v[x] = true;
                break;
              }
        }
        break;
      }
    }
    return memo_.emplace(c, std::move(v)).first->second;
  }

  // Successors of x along r inside filler, real and promised.
  std::vector<std::string> filler_successors(const Role& r, const Concept& filler, int x) {
    std::vector<std::string> out;
    const auto& f = eval(filler);
    for (int y : neighbours(r, x))
      if (f[y]) out.push_back(i_.labels[y]);
    for (const auto* ob : obligations(r, x))
      if (cert_->satisfies(*ob, filler)) out.push_back(i_.labels[x] + "~" + r.to_string());
    return out;
  }

 private:
  const Interpretation& i_;
  const FrontierCertificate* cert_;
  std::map<std::string, std::vector<std::vector<int>>> out_;
  std::map<std::string, std::vector<std::vector<int>>> in_;
  std::vector<std::vector<const Obligation*>> pending_;
  std::map<Concept, std::vector<bool>> memo_;
};

void check_well_formed(const Interpretation& i) {
  for (const auto& [c, ext] : i.concepts)
    for (int e : ext)
      if (e < 0 || e >= i.size()) throw SignatureMismatch("concept '" + c + "' mentions an unknown element");
  for (const auto& [r, ext] : i.roles)
    for (const auto& [a, b] : ext)
      if (a < 0 || b < 0 || a >= i.size() || b >= i.size())
        throw SignatureMismatch("role '" + r + "' mentions an unknown element");
  std::set<int> used;
  for (const auto& [a, e] : i.named) {
    if (e < 0 || e >= i.size()) throw SignatureMismatch("individual '" + a + "' maps to an unknown element");
    if (!used.insert(e).second) throw SignatureMismatch("two individuals share element of '" + a + "'");
  }
}

}  // namespace

std::vector<bool> evaluate(const Interpretation& i, const Concept& c, const FrontierCertificate* cert) {
  Evaluator ev(i, cert);
  return ev.eval(c);
}

std::vector<Violation> check_model(const Interpretation& i, const KB& kb, const FrontierCertificate* cert) {
  check_well_formed(i);
  for (const auto& a : kb.individuals())
    if (!i.named.contains(a)) throw SignatureMismatch("individual '" + a + "' is not interpreted");
  {
    const auto cn = kb.concept_names();
    for (const auto& [r, _] : i.roles)
      if (cn.contains(r)) throw SignatureMismatch("'" + r + "' is a concept name of the KB");
  }
  if (i.size() == 0) return {{"non-empty domain", {}}};

  std::vector<Violation> out;
  Evaluator ev(i, cert);
  for (const auto& ax : kb.tbox) {
    if (!ax.is_functionality()) {
      const auto& l = ev.eval(ax.lhs);
      const auto& r = ev.eval(ax.rhs);
      Violation v{ax.to_string(), {}};
      for (int x = 0; x < i.size(); ++x)
        if (l[x] && !r[x]) v.elements.push_back(i.labels[x]);
      if (!v.elements.empty()) out.push_back(std::move(v));
    } else {
      const auto& g = ev.eval(ax.guard());
      for (int x = 0; x < i.size(); ++x) {
        if (!g[x]) continue;
        auto succ = ev.filler_successors(ax.role, ax.filler(), x);
        if (succ.size() > 1) {
          succ.insert(succ.begin(), i.labels[x]);
          out.push_back({ax.to_string(), std::move(succ)});
        }
      }
    }
  }
  for (const auto& a : kb.concept_assertions) {
    const int e = i.named.at(a.individual);
    if (!i.in_concept(a.concept_name, e)) out.push_back({a.to_string(), {i.labels[e]}});
  }
  for (const auto& a : kb.role_assertions) {
    const int x = i.named.at(a.subject);
    const int y = i.named.at(a.object);
    if (!i.has_edge(Role{a.role_name, false}, x, y)) out.push_back({a.to_string(), {i.labels[x], i.labels[y]}});
  }
  return out;
}

bool is_model(const Interpretation& i, const KB& kb, const FrontierCertificate* cert) {
  return check_model(i, kb, cert).empty();
}

// ---------------------------------------------------------------------------
// Counting

std::uint64_t count_answers(const Interpretation& i, const CCQ& q) {
  check_well_formed(i);
  // Counting variables first, existential ones after.
  std::vector<std::string> vars = q.counting_variables();
  const std::size_t n_counting = vars.size();
  for (const auto& v : q.variables())
    if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(v);
  std::map<std::string, int> var_index;
  for (std::size_t k = 0; k < vars.size(); ++k) var_index[vars[k]] = static_cast<int>(k);

  struct CAtom {
    std::string pred;
    bool is_role;
    std::vector<int> args;  // >= 0: variable index, < 0: element -(e+1)
  };
  std::vector<CAtom> atoms;
  for (const auto& a : q.atoms) {
    CAtom ca{a.predicate, a.args.size() == 2, {}};
    for (const auto& t : a.args) {
      if (t.kind == Term::Kind::Individual) {
        auto it = i.named.find(t.name);
        if (it == i.named.end()) throw SignatureMismatch("individual '" + t.name + "' is not interpreted");
        ca.args.push_back(-(it->second + 1));
      } else {
        ca.args.push_back(var_index.at(t.name));
      }
    }
    atoms.push_back(std::move(ca));
  }

  std::vector<int> assign(vars.size(), -1);
  auto value = [&](int arg) { return arg < 0 ? -arg - 1 : assign[arg]; };
  auto atom_holds = [&](const CAtom& a) {
    for (int arg : a.args)
      if (value(arg) < 0) return true;  // not yet decidable
    if (!a.is_role) return i.in_concept(a.pred, value(a.args[0]));
    return i.has_edge(Role{a.pred, false}, value(a.args[0]), value(a.args[1]));
  };
  auto consistent = [&] {
    return std::all_of(atoms.begin(), atoms.end(), atom_holds);
  };

  std::function<bool(std::size_t)> extend_existential = [&](std::size_t k) -> bool {
    if (k == vars.size()) return true;
    for (int e = 0; e < i.size(); ++e) {
      assign[k] = e;
      if (consistent() && extend_existential(k + 1)) {
        assign[k] = -1;
        return true;
      }
    }
    assign[k] = -1;
    return false;
  };

  std::uint64_t count = 0;
  std::function<void(std::size_t)> enumerate_counting = [&](std::size_t k) {
    if (k == n_counting) {
      if (extend_existential(k)) ++count;
      return;
    }
    for (int e = 0; e < i.size(); ++e) {
      assign[k] = e;
      if (consistent()) enumerate_counting(k + 1);
    }
    assign[k] = -1;
  };
  if (!consistent()) return 0;
  enumerate_counting(0);
  return count;
}

std::uint64_t count_answers(const Interpretation& i, const CardinalityQuery& q) {
  return q.is_role() ? i.role_count(q.name) : i.concept_count(q.name);
}

// ---------------------------------------------------------------------------
// Surgery

Interpretation disjoint_union(const Interpretation& i1, const Interpretation& i2, const KB& kb) {
  if (!is_model(i1, kb)) throw NotAModel("first interpretation is not a model of the KB");
  if (!is_model(i2, kb)) throw NotAModel("second interpretation is not a model of the KB");
  Interpretation out = i1;
  std::set<std::string> taken(i1.labels.begin(), i1.labels.end());
  const int offset = out.size();
  for (const auto& l : i2.labels) {
    auto label = fresh_name(l + "'", taken);
    taken.insert(label);
    out.add_element(std::move(label));
  }
  for (const auto& [c, ext] : i2.concepts)
    for (int e : ext) out.concepts[c].insert(e + offset);
  for (const auto& [r, ext] : i2.roles)
    for (const auto& [a, b] : ext) out.roles[r].insert({a + offset, b + offset});
  return out;
}

Interpretation expand_model(const Interpretation& i, const NormalTBox& nf) {
  Interpretation out = i;
  Evaluator ev(i, nullptr);
  for (const auto& [id, def] : nf.definitions) {
    auto& ext = out.concepts[nf.concepts[id]];
    ext.clear();
    const auto& v = ev.eval(def);
    for (int x = 0; x < i.size(); ++x)
      if (v[x]) ext.insert(x);
  }
  return out;
}

Interpretation restrict_model(const Interpretation& i, const std::set<std::string>& concept_names,
                              const std::set<std::string>& role_names) {
  Interpretation out;
  out.labels = i.labels;
  out.named = i.named;
  for (const auto& [c, ext] : i.concepts)
    if (concept_names.contains(c)) out.concepts[c] = ext;
  for (const auto& [r, ext] : i.roles)
    if (role_names.contains(r)) out.roles[r] = ext;
  return out;
}

// ---------------------------------------------------------------------------
// Bounded model search

namespace {

// Three-valued truth for partial interpretations.
enum Tri : std::uint8_t { kFalse = 0, kTrue = 1, kUnknown = 2 };

class BoundedSearch {
 public:
  struct CountTarget {
    bool is_role = false;
    int pred = -1;
    std::uint64_t n = 0;
  };

  BoundedSearch(const KB& kb, const SearchLimits& limits, std::optional<CardinalityQuery> query)
      : kb_(kb), limits_(limits) {
    for (const auto& c : kb.concept_names()) concept_names_.push_back(c);
    for (const auto& r : kb.role_names()) role_names_.push_back(r);
    if (query) {
      auto& names = query->is_role() ? role_names_ : concept_names_;
      if (std::find(names.begin(), names.end(), query->name) == names.end()) names.push_back(query->name);
    }
    for (const auto& a : kb.individuals()) individuals_.push_back(a);
    for (const auto& ax : kb.tbox) {
      CompiledAxiom ca;
      ca.functionality = ax.is_functionality();
      ca.lhs = compile(ax.lhs);
      ca.rhs = compile(ax.rhs);
      if (ca.functionality) ca.role = role_ref(ax.role);
      axioms_.push_back(ca);
    }
  }

  // Runs the search for one domain size; the visitor returns false to stop.
  bool run(int d, std::optional<CountTarget> target, const std::function<bool(const Interpretation&)>& visit) {
    d_ = d;
    target_ = target;
    visit_ = &visit;
    const int nc = static_cast<int>(concept_names_.size());
    const int nr = static_cast<int>(role_names_.size());
    conc_.assign(static_cast<std::size_t>(d) * nc, kUnknown);
    edge_.assign(static_cast<std::size_t>(nr) * d * d, kUnknown);
    forced_.clear();
    atoms_.clear();
    for (int e = 0; e < d; ++e) {
      for (int c = 0; c < nc; ++c) atoms_.push_back({false, c, e, e, c == nc - 1 ? 1 : 0});
      for (int j = 0; j <= e; ++j)
        for (int r = 0; r < nr; ++r) {
          atoms_.push_back({true, r, e, j, 0});
          if (j != e) atoms_.push_back({true, r, j, e, 0});
        }
    }
    // Assertions force atoms to true.
    std::map<std::string, int> ind;
    for (std::size_t k = 0; k < individuals_.size(); ++k) ind[individuals_[k]] = static_cast<int>(k);
    for (const auto& a : kb_.concept_assertions) forced_.insert(concept_slot(index_of(concept_names_, a.concept_name), ind[a.individual]));
    for (const auto& a : kb_.role_assertions)
      forced_.insert(conc_.size() + edge_slot(index_of(role_names_, a.role_name), ind[a.subject], ind[a.object]));
    stop_ = false;
    dfs(0);
    return stop_;
  }

  std::uint64_t nodes() const { return nodes_; }
  std::uint64_t found() const { return found_; }

 private:
  struct Node {
    Concept::Kind kind;
    int name = -1;
    int role = -1;
    bool inv = false;
    std::vector<int> kids;
  };
  struct RoleRef {
    int role = -1;
    bool inv = false;
  };
  struct CompiledAxiom {
    bool functionality = false;
    int lhs = -1;
    int rhs = -1;
    RoleRef role;
  };
  struct Atom {
    bool is_edge;
    int pred;
    int a;
    int b;
    int last_concept_of;  // 1 when this completes the concept bits of element a
  };

  static int index_of(const std::vector<std::string>& v, const std::string& s) {
    return static_cast<int>(std::find(v.begin(), v.end(), s) - v.begin());
  }

  RoleRef role_ref(const Role& r) { return {index_of(role_names_, r.name), r.inverse}; }

  int compile(const Concept& c) {
    Node n;
    n.kind = c.kind();
    switch (c.kind()) {
      case Concept::Kind::Top:
        break;
      case Concept::Kind::Name:
        n.name = index_of(concept_names_, c.name());
        break;
      case Concept::Kind::Not:
        n.kids.push_back(compile(c.child()));
        break;
      case Concept::Kind::And:
        for (const auto& op : c.operands()) n.kids.push_back(compile(op));
        break;
      case Concept::Kind::Exists:
        n.role = index_of(role_names_, c.role().name);
        n.inv = c.role().inverse;
        n.kids.push_back(compile(c.child()));
        break;
    }
    nodes_table_.push_back(std::move(n));
    return static_cast<int>(nodes_table_.size()) - 1;
  }

  std::size_t concept_slot(int c, int e) const { return static_cast<std::size_t>(e) * concept_names_.size() + c; }
  std::size_t edge_slot(int r, int a, int b) const {
    return (static_cast<std::size_t>(r) * d_ + a) * d_ + b;
  }
  Tri edge(RoleRef r, int x, int y) const { return r.inv ? Tri(edge_[edge_slot(r.role, y, x)]) : Tri(edge_[edge_slot(r.role, x, y)]); }

  Tri eval(int node, int x) {
    auto& slot = cache_[static_cast<std::size_t>(node) * d_ + x];
    if (slot != 3) return Tri(slot);
    const Node& n = nodes_table_[node];
    Tri v = kFalse;
    switch (n.kind) {
      case Concept::Kind::Top:
        v = kTrue;
        break;
      case Concept::Kind::Name:
        v = Tri(conc_[concept_slot(n.name, x)]);
        break;
      case Concept::Kind::Not: {
        const Tri k = eval(n.kids[0], x);
        v = k == kUnknown ? kUnknown : (k == kTrue ? kFalse : kTrue);
        break;
      }
      case Concept::Kind::And:
        v = kTrue;
        for (int kid : n.kids) {
          const Tri k = eval(kid, x);
          if (k == kFalse) {
            v = kFalse;
            break;
          }
          if (k == kUnknown) v = kUnknown;
        }
        break;
      case Concept::Kind::Exists:
        v = kFalse;
        for (int y = 0; y < d_; ++y) {
          const Tri e = edge({n.role, n.inv}, x, y);
          if (e == kFalse) continue;
          const Tri k = eval(n.kids[0], y);
          if (k == kFalse) continue;
          if (e == kTrue && k == kTrue) {
            v = kTrue;
            break;
          }
          v = kUnknown;
        }
        break;
    }
    slot = v;
    return v;
  }

  bool consistent() {
    cache_.assign(nodes_table_.size() * d_, 3);
    for (const auto& ax : axioms_) {
      for (int x = 0; x < d_; ++x) {
        if (eval(ax.lhs, x) != kTrue) continue;
        if (!ax.functionality) {
          if (eval(ax.rhs, x) == kFalse) return false;
          continue;
        }
        int definite = 0;
        for (int y = 0; y < d_; ++y)
          if (edge(ax.role, x, y) == kTrue && eval(ax.rhs, y) == kTrue) ++definite;
        if (definite > 1) return false;
      }
    }
    if (target_) {
      std::uint64_t sure = 0;
      std::uint64_t possible = 0;
      if (target_->is_role) {
        for (int a = 0; a < d_; ++a)
          for (int b = 0; b < d_; ++b) {
            const auto v = edge_[edge_slot(target_->pred, a, b)];
            sure += v == kTrue;
            possible += v != kFalse;
          }
      } else {
        for (int e = 0; e < d_; ++e) {
          const auto v = conc_[concept_slot(target_->pred, e)];
          sure += v == kTrue;
          possible += v != kFalse;
        }
      }
      if (sure > target_->n || possible < target_->n) return false;
    }
    return true;
  }

  bool anonymous_order_ok(int e) const {
    const int first_anon = static_cast<int>(individuals_.size());
    if (e <= first_anon || e == 0) return true;
    const int nc = static_cast<int>(concept_names_.size());
    for (int c = nc - 1; c >= 0; --c) {
      const auto prev = conc_[concept_slot(c, e - 1)];
      const auto cur = conc_[concept_slot(c, e)];
      if (prev != cur) return cur > prev;
    }
    return true;
  }

  void dfs(std::size_t k) {
    if (stop_) return;
    if (++nodes_ > limits_.max_nodes)
      throw BudgetExceeded(fmt::format("model enumeration exceeded {} search nodes", limits_.max_nodes));
    if (k == atoms_.size()) {
      ++found_;
      if (!(*visit_)(materialize())) stop_ = true;
      return;
    }
    const Atom& atom = atoms_[k];
    auto& cell = atom.is_edge ? edge_[edge_slot(atom.pred, atom.a, atom.b)] : conc_[concept_slot(atom.pred, atom.a)];
    const std::size_t key = atom.is_edge ? conc_.size() + edge_slot(atom.pred, atom.a, atom.b)
                                         : concept_slot(atom.pred, atom.a);
    const bool forced = forced_.contains(key);
    for (Tri v : {kFalse, kTrue}) {
      if (forced && v == kFalse) continue;
      cell = v;
      if (atom.last_concept_of && !anonymous_order_ok(atom.a)) continue;
      if (consistent()) dfs(k + 1);
      if (stop_) break;
    }
    cell = kUnknown;
  }

  Interpretation materialize() const {
    Interpretation i;
    for (int e = 0; e < d_; ++e) {
      if (e < static_cast<int>(individuals_.size()))
        i.add_named(individuals_[e]);
      else
        i.add_element("d" + std::to_string(e));
    }
    for (std::size_t c = 0; c < concept_names_.size(); ++c) {
      auto& ext = i.concepts[concept_names_[c]];
      for (int e = 0; e < d_; ++e)
        if (conc_[concept_slot(static_cast<int>(c), e)] == kTrue) ext.insert(e);
    }
    for (std::size_t r = 0; r < role_names_.size(); ++r) {
      auto& ext = i.roles[role_names_[r]];
      for (int a = 0; a < d_; ++a)
        for (int b = 0; b < d_; ++b)
          if (edge_[edge_slot(static_cast<int>(r), a, b)] == kTrue) ext.insert({a, b});
    }
    return i;
  }

 public:
  int min_domain() const { return std::max<int>(1, static_cast<int>(individuals_.size())); }
  int concept_index(const std::string& n) const { return index_of(concept_names_, n); }
  int role_index(const std::string& n) const { return index_of(role_names_, n); }

 private:
  const KB& kb_;
  SearchLimits limits_;
  std::vector<std::string> concept_names_;
  std::vector<std::string> role_names_;
  std::vector<std::string> individuals_;
  std::vector<Node> nodes_table_;
  std::vector<CompiledAxiom> axioms_;
  std::vector<Atom> atoms_;
  std::set<std::size_t> forced_;
  std::vector<std::uint8_t> conc_;
  std::vector<std::uint8_t> edge_;
  std::vector<std::uint8_t> cache_;
  std::optional<CountTarget> target_;
  const std::function<bool(const Interpretation&)>* visit_ = nullptr;
  int d_ = 0;
  bool stop_ = false;
  std::uint64_t nodes_ = 0;
  std::uint64_t found_ = 0;
};

}  // namespace

std::uint64_t enumerate_models(const KB& kb, const SearchLimits& limits,
                               const std::function<bool(const Interpretation&)>& visit) {
  BoundedSearch search(kb, limits, std::nullopt);
  for (int d = search.min_domain(); d <= limits.max_domain; ++d)
    if (search.run(d, std::nullopt, visit)) break;
  return search.found();
}

OracleResult oracle_membership(const KB& kb, const CardinalityQuery& q, std::uint64_t n,
                               const SearchLimits& limits) {
  BoundedSearch search(kb, limits, q);
  BoundedSearch::CountTarget target;
  target.is_role = q.is_role();
  target.pred = q.is_role() ? search.role_index(q.name) : search.concept_index(q.name);
  target.n = n;
  OracleResult result;
  const std::function<bool(const Interpretation&)> visit = [&](const Interpretation& i) {
    result.found = true;
    result.witness = i;
    return false;
  };
  for (int d = search.min_domain(); d <= limits.max_domain && !result.found; ++d) {
    // A concept count cannot exceed the domain size.
    if (!q.is_role() && n > static_cast<std::uint64_t>(d)) continue;
    if (q.is_role() && n > static_cast<std::uint64_t>(d) * d) continue;
    search.run(d, target, visit);
  }
  return result;
}

}  // namespace spectra
