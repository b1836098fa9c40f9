#include "spectra/solver.hpp"

#include <algorithm>
#include <future>
#include <map>
#include <tuple>

#include <fmt/format.h>

#include "spectra/errors.hpp"
#include "spectra/horn.hpp"
#include "spectra/normalize.hpp"
#include "spectra/sat.hpp"

namespace spectra {

namespace {

constexpr std::size_t kMaxDelegationTypes = 256;
constexpr std::size_t kMaxDescriptors = 4096;

// Promise of an infinite tree below an element of exact type parent that
// is entered along role and whose root has the given label.
struct Descriptor {
  Mask parent = 0;
  IRole role;
  Mask label = 0;
  struct Child {
    int descriptor = 0;
    // The child may instead be an existing element of its exact type.
    bool anchor_ok = false;
  };
  std::vector<Child> children;
  // A functionality axiom would count the parent next to a child.
  bool blocked = false;
};

// Normal TBox, ABox and delegation data of one KB. Immutable once built,
// so concurrent searches can share it.
struct SearchContext {
  NormalTBox tbox;
  HornABox abox;
  bool horn = false;
  std::vector<NExistsRight> exists_right;
  bool delegation = false;
  std::vector<Descriptor> descriptors;
  std::vector<std::vector<int>> roots;  // per exists_right axiom
};

void check_input(const KB& kb) {
  check_namespaces(kb);
  reject_reserved_names(kb);
}

void build_delegation(SearchContext& ctx, const SolverOptions& options) {
  const HornReasoner reasoner(ctx.tbox, options.max_steps);
  std::vector<Mask> types;
  try {
    types = reasoner.types(kMaxDelegationTypes);
  } catch (const BudgetExceeded&) {
    return;
  }
  const auto roles = reasoner.all_roles();
  std::map<std::tuple<Mask, IRole, Mask>, int> index;
  auto intern = [&](Mask parent, IRole role, Mask label) {
    const auto [it, fresh] = index.try_emplace({parent, role, label}, static_cast<int>(ctx.descriptors.size()));
    if (fresh) ctx.descriptors.push_back({parent, role, label, {}, false});
    return it->second;
  };
  ctx.roots.assign(ctx.exists_right.size(), {});
  for (std::size_t i = 0; i < ctx.exists_right.size(); ++i) {
    const auto& ax = ctx.exists_right[i];
    for (const Mask pi : types) {
      if (!subset(ax.lhs, pi)) continue;
      for (const Mask t : reasoner.successors(pi, ax.role))
        if (subset(ax.filler, t)) ctx.roots[i].push_back(intern(pi, ax.role, t));
    }
  }
  for (std::size_t k = 0; k < ctx.descriptors.size(); ++k) {
    if (ctx.descriptors.size() > kMaxDescriptors) {
      ctx.descriptors.clear();
      ctx.roots.clear();
      return;
    }
    const Descriptor d = ctx.descriptors[k];
    std::vector<Descriptor::Child> children;
    bool blocked = false;
    for (const IRole next : roles) {
      for (const Mask target : reasoner.successors(d.label, next)) {
        if (next == d.role.inverse()) {
          if (subset(target, d.parent)) continue;
          for (const auto& f : ctx.tbox.functs)
            if (f.role == next && subset(f.guard, d.label) && subset(f.filler, d.parent) &&
                subset(f.filler, target))
              blocked = true;
        }
        const int child = intern(d.label, next, target);
        children.push_back({child, !reasoner.entails_functionality(target, next.inverse(), d.label)});
      }
    }
    ctx.descriptors[k].children = std::move(children);
    ctx.descriptors[k].blocked = blocked;
  }
  ctx.delegation = true;
}

SearchContext make_context(const KB& kb, const std::optional<CardinalityQuery>& q, const SolverOptions& options,
                           bool delegate = true) {
  check_input(kb);
  SearchContext ctx;
  auto concepts = kb.concept_names();
  auto roles = kb.role_names();
  if (q) (q->is_role() ? roles : concepts).insert(q->name);
  ctx.tbox = normalize(kb.tbox, concepts, roles);
  ctx.horn = ctx.tbox.is_horn();
  for (const auto& i : kb.individuals()) ctx.abox.add(i);
  for (const auto& ca : kb.concept_assertions)
    ctx.abox.labels[*ctx.abox.find(ca.individual)] |= bit(ctx.tbox.require_concept(ca.concept_name));
  for (const auto& ra : kb.role_assertions)
    ctx.abox.edges.emplace_back(*ctx.abox.find(ra.subject), IRole{ctx.tbox.require_role(ra.role_name), false},
                                *ctx.abox.find(ra.object));
  ctx.exists_right.assign(ctx.tbox.exists_right.begin(), ctx.tbox.exists_right.end());
  if (delegate && ctx.horn) build_delegation(ctx, options);
  return ctx;
}

// Constraint on the predicate under study.
struct Closure {
  enum class Kind { None, Count, Extension };
  Kind kind = Kind::None;
  bool role = false;
  int id = 0;
  // Count: between lo and hi instances, inclusive.
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;
  std::set<int> elements;
  std::set<std::pair<int, int>> pairs;
};

// CNF encoding of "a model of the KB whose finite part has at most
// named + extras elements", with anonymous parts that contain no instance
// of the closed predicate delegated to chase trees.
class Encoder {
 public:
  Encoder(const SearchContext& ctx, const HornABox& abox, int extras, const Closure& closure)
      : ctx_(ctx), abox_(abox), closure_(closure) {
    named_ = static_cast<int>(abox.individuals.size());
    n_ = named_ + extras;
    k_ = ctx.tbox.num_concepts();
    encode_domain();
    encode_abox();
    encode_axioms();
    encode_closure();
  }

  bool feasible() const { return feasible_; }

  std::optional<Interpretation> solve(std::uint64_t max_conflicts) {
    if (!feasible_ || !sat_.solve({}, max_conflicts)) return std::nullopt;
    return decode();
  }

 private:
  Lit in(int x, int a) const { return pos(in_[x][a]); }
  Lit edge(IRole r, int x, int y) const {
    return r.inv ? pos(edge_[r.id][y * n_ + x]) : pos(edge_[r.id][x * n_ + y]);
  }
  Lit present(int x) const { return pos(present_[x]); }
  void add(std::vector<Lit> c) {
    if (!sat_.add_clause(std::move(c))) feasible_ = false;
  }

  void encode_domain() {
    for (int x = 0; x < n_; ++x) {
      present_.push_back(sat_.new_var());
      in_.emplace_back();
      for (int a = 0; a < k_; ++a) {
        in_[x].push_back(sat_.new_var());
        add({negate_lit(in(x, a)), present(x)});
      }
    }
    for (int r = 0; r < ctx_.tbox.num_roles(); ++r) {
      edge_.emplace_back();
      for (int x = 0; x < n_; ++x)
        for (int y = 0; y < n_; ++y) {
          edge_[r].push_back(sat_.new_var());
          add({neg(edge_[r].back()), present(x)});
          add({neg(edge_[r].back()), present(y)});
        }
    }
    for (int x = 0; x < named_; ++x) add({present(x)});
    for (int x = named_ + 1; x < n_; ++x) add({negate_lit(present(x)), present(x - 1)});
    if (named_ == 0 && n_ > 0) add({present(0)});
    if (n_ == 0) feasible_ = false;
    // Anonymous instances of a closed concept come first.
    if (closure_.kind == Closure::Kind::Count && !closure_.role)
      for (int x = named_ + 1; x < n_; ++x) add({negate_lit(in(x, closure_.id)), in(x - 1, closure_.id)});
  }

  void encode_abox() {
    for (int x = 0; x < named_; ++x)
      for (int a = 0; a < k_; ++a)
        if (has(abox_.labels[x], a)) add({in(x, a)});
    for (const auto& [x, r, y] : abox_.edges) add({edge(r, x, y)});
  }

  void lhs_guard(std::vector<Lit>& c, int x, Mask lhs) const {
    c.push_back(negate_lit(present(x)));
    for (int a = 0; a < k_; ++a)
      if (has(lhs, a)) c.push_back(negate_lit(in(x, a)));
  }

  // Literal true when y satisfies the conjunction m (implied direction).
  Lit satisfies(int y, Mask m) {
    if (m == 0) return present(y);
    if (popcount(m) == 1) return in(y, std::countr_zero(m));
    const auto key = std::pair{y, m};
    if (auto it = conj_.find(key); it != conj_.end()) return it->second;
    const Lit v = pos(sat_.new_var());
    std::vector<Lit> c{v};
    for (int a = 0; a < k_; ++a)
      if (has(m, a)) {
        c.push_back(negate_lit(in(y, a)));
        add({negate_lit(v), in(y, a)});
      }
    add(std::move(c));
    conj_.emplace(key, v);
    return v;
  }

  Lit exact(int x, Mask t) {
    const auto key = std::pair{x, t};
    if (auto it = exact_.find(key); it != exact_.end()) return it->second;
    const Lit v = pos(sat_.new_var());
    add({negate_lit(v), present(x)});
    for (int a = 0; a < k_; ++a) add({negate_lit(v), has(t, a) ? in(x, a) : negate_lit(in(x, a))});
    exact_.emplace(key, v);
    return v;
  }

  bool delegation_allowed(const Descriptor& d) const {
    if (d.blocked) return false;
    if (closure_.kind == Closure::Kind::None) return true;
    if (closure_.role) return d.role.id != closure_.id;
    return !has(d.label, closure_.id);
  }

  Lit good(int d) {
    if (auto it = good_.find(d); it != good_.end()) return it->second;
    const Lit v = pos(sat_.new_var());
    good_.emplace(d, v);
    const auto& desc = ctx_.descriptors[d];
    if (!delegation_allowed(desc)) {
      add({negate_lit(v)});
      return v;
    }
    for (const auto& child : desc.children) {
      const auto& cd = ctx_.descriptors[child.descriptor];
      if (closure_.kind != Closure::Kind::None && closure_.role && cd.role.id == closure_.id) {
        add({negate_lit(v)});
        return v;
      }
      std::vector<Lit> c{negate_lit(v), good(child.descriptor)};
      if (child.anchor_ok) {
        const Lit anchor = pos(sat_.new_var());
        std::vector<Lit> some{negate_lit(anchor)};
        for (int y = 0; y < n_; ++y) some.push_back(exact(y, cd.label));
        add(std::move(some));
        c.push_back(anchor);
      }
      add(std::move(c));
    }
    return v;
  }

  Lit delegated_child(int x, int d) {
    const auto key = std::pair{x, d};
    if (auto it = dchild_.find(key); it != dchild_.end()) return it->second;
    const Lit v = pos(sat_.new_var());
    dchild_.emplace(key, v);
    add({negate_lit(v), exact(x, ctx_.descriptors[d].parent)});
    add({negate_lit(v), good(d)});
    return v;
  }

  void encode_axioms() {
    const auto& t = ctx_.tbox;
    for (const auto& cl : t.clauses)
      for (int x = 0; x < n_; ++x) {
        std::vector<Lit> c;
        lhs_guard(c, x, cl.lhs);
        for (int a = 0; a < k_; ++a)
          if (has(cl.rhs, a)) c.push_back(in(x, a));
        add(std::move(c));
      }
    std::map<std::tuple<IRole, Mask, int, int>, Lit> witness;
    for (std::size_t i = 0; i < ctx_.exists_right.size(); ++i) {
      const auto& ax = ctx_.exists_right[i];
      for (int x = 0; x < n_; ++x) {
        std::vector<Lit> c;
        lhs_guard(c, x, ax.lhs);
        for (int y = 0; y < n_; ++y) {
          const auto key = std::tuple{ax.role, ax.filler, x, y};
          auto it = witness.find(key);
          if (it == witness.end()) {
            const Lit w = pos(sat_.new_var());
            add({negate_lit(w), edge(ax.role, x, y)});
            add({negate_lit(w), satisfies(y, ax.filler)});
            it = witness.emplace(key, w).first;
          }
          c.push_back(it->second);
        }
        if (ctx_.delegation)
          for (const int d : ctx_.roots[i]) c.push_back(delegated_child(x, d));
        add(std::move(c));
      }
    }
    for (const auto& ax : t.exists_left)
      for (int x = 0; x < n_; ++x)
        for (int y = 0; y < n_; ++y) {
          std::vector<Lit> c{negate_lit(edge(ax.role, x, y))};
          for (int a = 0; a < k_; ++a)
            if (has(ax.filler, a)) c.push_back(negate_lit(in(y, a)));
          c.push_back(in(x, ax.rhs));
          add(std::move(c));
        }
    for (const auto& ax : t.functs)
      for (int x = 0; x < n_; ++x) {
        std::vector<Lit> counted;
        for (int y = 0; y < n_; ++y) {
          if (ax.filler == 0) {
            counted.push_back(edge(ax.role, x, y));
            continue;
          }
          const Lit s = pos(sat_.new_var());
          std::vector<Lit> c{negate_lit(edge(ax.role, x, y)), s};
          for (int a = 0; a < k_; ++a)
            if (has(ax.filler, a)) c.push_back(negate_lit(in(y, a)));
          add(std::move(c));
          counted.push_back(s);
        }
        for (const auto& [key, lit] : dchild_) {
          const auto& d = ctx_.descriptors[key.second];
          if (key.first == x && d.role == ax.role && subset(ax.filler, d.label)) counted.push_back(lit);
        }
        for (std::size_t i = 0; i < counted.size(); ++i)
          for (std::size_t j = i + 1; j < counted.size(); ++j) {
            std::vector<Lit> c;
            lhs_guard(c, x, ax.guard);
            c.push_back(negate_lit(counted[i]));
            c.push_back(negate_lit(counted[j]));
            add(std::move(c));
          }
      }
  }

  std::vector<Lit> closed_literals() const {
    std::vector<Lit> out;
    if (closure_.role) {
      for (int x = 0; x < n_; ++x)
        for (int y = 0; y < n_; ++y) out.push_back(edge({closure_.id, false}, x, y));
    } else {
      for (int x = 0; x < n_; ++x) out.push_back(in(x, closure_.id));
    }
    return out;
  }

  // Sequential counter forcing between lo and hi of the literals.
  void between(const std::vector<Lit>& lits, std::uint64_t lo, std::uint64_t hi) {
    const std::size_t m = lits.size();
    if (lo > m || lo > hi) {
      feasible_ = false;
      return;
    }
    if (hi == 0) {
      for (const Lit l : lits) add({negate_lit(l)});
      return;
    }
    hi = std::min<std::uint64_t>(hi, m);
    const std::size_t width = hi + 1;
    // s[i][j]: at least j+1 of the first i+1 literals hold.
    std::vector<std::vector<Lit>> s(m, std::vector<Lit>(width));
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < width; ++j) s[i][j] = pos(sat_.new_var());
    add({negate_lit(lits[0]), s[0][0]});
    add({negate_lit(s[0][0]), lits[0]});
    for (std::size_t j = 1; j < width; ++j) add({negate_lit(s[0][j])});
    for (std::size_t i = 1; i < m; ++i)
      for (std::size_t j = 0; j < width; ++j) {
        add({negate_lit(s[i - 1][j]), s[i][j]});
        if (j == 0) {
          add({negate_lit(lits[i]), s[i][0]});
          add({negate_lit(s[i][0]), s[i - 1][0], lits[i]});
        } else {
          add({negate_lit(s[i - 1][j - 1]), negate_lit(lits[i]), s[i][j]});
          add({negate_lit(s[i][j]), s[i - 1][j], s[i - 1][j - 1]});
          add({negate_lit(s[i][j]), s[i - 1][j], lits[i]});
        }
      }
    if (lo > 0) add({s[m - 1][lo - 1]});
    if (hi < m) add({negate_lit(s[m - 1][hi])});
  }

  void encode_closure() {
    switch (closure_.kind) {
      case Closure::Kind::None:
        return;
      case Closure::Kind::Count:
        between(closed_literals(), closure_.lo, closure_.hi);
        return;
      case Closure::Kind::Extension:
        if (closure_.role) {
          for (int x = 0; x < n_; ++x)
            for (int y = 0; y < n_; ++y) {
              const Lit l = edge({closure_.id, false}, x, y);
              add({closure_.pairs.contains({x, y}) ? l : negate_lit(l)});
            }
        } else {
          for (int x = 0; x < n_; ++x) add({closure_.elements.contains(x) ? in(x, closure_.id) : negate_lit(in(x, closure_.id))});
        }
        return;
    }
  }

  Interpretation decode() const {
    Interpretation out;
    std::vector<int> id(n_, -1);
    std::set<std::string> taken(abox_.individuals.begin(), abox_.individuals.end());
    for (int x = 0; x < n_; ++x) {
      if (!sat_.value(present_[x])) continue;
      if (x < named_) {
        id[x] = out.add_named(abox_.individuals[x]);
      } else {
        auto label = fresh_name("_e" + std::to_string(x - named_), taken);
        taken.insert(label);
        id[x] = out.add_element(std::move(label));
      }
    }
    for (int x = 0; x < n_; ++x) {
      if (id[x] < 0) continue;
      for (int a = 0; a < k_; ++a)
        if (sat_.value(in_[x][a]) && !ctx_.tbox.definitions.contains(a)) out.add_concept(ctx_.tbox.concepts[a], id[x]);
    }
    for (int r = 0; r < ctx_.tbox.num_roles(); ++r)
      for (int x = 0; x < n_; ++x)
        for (int y = 0; y < n_; ++y)
          if (sat_.value(edge_[r][x * n_ + y])) out.add_edge(ctx_.tbox.roles[r], id[x], id[y]);
    return out;
  }

  const SearchContext& ctx_;
  const HornABox& abox_;
  const Closure& closure_;
  int named_ = 0;
  int n_ = 0;
  int k_ = 0;
  bool feasible_ = true;
  SatSolver sat_;
  std::vector<int> present_;
  std::vector<std::vector<int>> in_;
  std::vector<std::vector<int>> edge_;
  std::map<std::pair<int, Mask>, Lit> conj_;
  std::map<std::pair<int, Mask>, Lit> exact_;
  std::map<int, Lit> good_;
  std::map<std::pair<int, int>, Lit> dchild_;
};

std::optional<Interpretation> search(const SearchContext& ctx, const HornABox& abox, int extras,
                                     const Closure& closure, const SolverOptions& options) {
  Encoder enc(ctx, abox, extras, closure);
  return enc.solve(options.max_conflicts);
}

int extras_for(const CardinalityQuery& q, std::uint64_t n, const SolverOptions& options) {
  const std::uint64_t want = q.is_role() ? 2 * n + 2 : n + 2;
  return static_cast<int>(std::max<std::uint64_t>(want, static_cast<std::uint64_t>(options.min_extras)));
}

Closure count_closure(const SearchContext& ctx, const CardinalityQuery& q, std::uint64_t lo, std::uint64_t hi) {
  Closure c;
  c.kind = Closure::Kind::Count;
  c.role = q.is_role();
  c.id = q.is_role() ? ctx.tbox.require_role(q.name) : ctx.tbox.require_concept(q.name);
  c.lo = lo;
  c.hi = hi;
  return c;
}

std::uint64_t answers(const Interpretation& i, const CardinalityQuery& q) {
  return q.is_role() ? i.role_count(q.name) : i.concept_count(q.name);
}

bool satisfiable(const SearchContext& ctx, const SolverOptions& options) {
  if (ctx.horn) {
    // Domains are nonempty, so a KB without individuals still needs one element.
    if (!ctx.abox.individuals.empty()) return chase(ctx.tbox, ctx.abox, options.max_steps).satisfiable;
    HornABox abox = ctx.abox;
    abox.add("_seed_domain");
    return chase(ctx.tbox, abox, options.max_steps).satisfiable;
  }
  const int k = ctx.tbox.num_concepts();
  const int bound = k >= 30 ? options.max_extras : std::min(options.max_extras, 1 << k);
  for (int extras = 1;; extras = std::min(2 * extras, bound)) {
    if (search(ctx, ctx.abox, extras, {}, options)) return true;
    if (extras >= bound) break;
  }
  if (k < 30 && (1 << k) <= options.max_extras) return false;
  throw BudgetExceeded(fmt::format("no model with at most {} anonymous elements; the filtration bound is larger",
                                   bound));
}

std::string seed_name(const KB& kb, const std::string& base) { return fresh_name(base, kb.individuals()); }

std::vector<KB> seeded(const KB& kb, const CardinalityQuery& q) {
  const auto a = seed_name(kb, "_seed_a");
  if (!q.is_role()) {
    KB out = kb;
    out.concept_assertions.insert({q.name, a});
    return {out};
  }
  auto taken = kb.individuals();
  taken.insert(a);
  const auto b = fresh_name("_seed_b", taken);
  KB two = kb;
  two.role_assertions.insert({q.name, a, b});
  KB loop = kb;
  loop.role_assertions.insert({q.name, a, a});
  return {two, loop};
}

Fragment fragment_of(const KB& kb, const SolverOptions& options) {
  if (!options.assume_fragment) return detect_fragment(kb);
  if (!admits(*options.assume_fragment, kb))
    throw UnsupportedLogic("knowledge base is outside the assumed fragment " + to_string(*options.assume_fragment));
  return *options.assume_fragment;
}

// True iff some model has a finite nonzero number of answers, given that
// some model has a nonzero number.
bool finite_nonzero(const KB& kb, const CardinalityQuery& q, Fragment fragment, const SolverOptions& options) {
  const auto ft = features(fragment);
  if (!(ft.inverse && ft.functionality)) return true;
  if (!is_horn(fragment)) throw UnsupportedFragment("finiteness test needs a Horn knowledge base");
  for (const auto& s : seeded(kb, q)) {
    if (!q.is_role()) {
      if (finite_extension_possible(s, q.name, options.max_steps)) return true;
      continue;
    }
    const auto h = prepare_horn(s);
    const auto rev = revert_role(h.tbox, h.tbox.require_role(q.name), options.max_steps);
    if (chase(rev.tbox, h.abox, options.max_steps).satisfiable) return true;
  }
  return false;
}

KB reduce_to_concept(const KB& kb, const Role& via, std::string& concept_name) {
  auto taken = kb.concept_names();
  const auto roles = kb.role_names();
  taken.insert(roles.begin(), roles.end());
  concept_name = fresh_name("_q_" + via.name, taken);
  KB out = kb;
  const auto q = Concept::name(concept_name);
  const auto ex = Concept::exists(via, Concept::top());
  out.tbox.insert(Axiom::inclusion(q, ex));
  out.tbox.insert(Axiom::inclusion(ex, q));
  return out;
}

// Membership answers of one query with a cache and the closure rule:
// sums of two members are members.
class MemberCache {
 public:
  MemberCache(const KB& kb, const CardinalityQuery& q, const SolverOptions& options)
      : ctx_(make_context(kb, q, options)), q_(q), options_(options) {}

  std::size_t probes() const { return probes_; }

  // Least positive member: doubling the upper end of a count range, then
  // bisecting it. A range probe offers as many anonymous elements as an
  // exact probe for its upper end, so it subsumes the exact probes below.
  std::optional<std::uint64_t> min_positive() {
    std::uint64_t below = 0;  // no member in [1, below]
    for (std::uint64_t hi = 1; hi <= 2 * options_.max_value; hi *= 2) {
      auto w = range_probe(1, hi);
      if (!w) {
        below = hi;
        continue;
      }
      std::uint64_t best = answers(*w, q_);
      while (below + 1 < best) {
        const std::uint64_t mid = below + (best - below) / 2;
        if (auto v = range_probe(1, mid))
          best = answers(*v, q_);
        else
          below = mid;
      }
      record(best, true);
      for (std::uint64_t n = 1; n < best; ++n) cache_[n] = false;
      return best;
    }
    return std::nullopt;
  }

  bool get(std::uint64_t n) {
    if (auto v = known(n)) return *v;
    const bool r = probe(n);
    record(n, r);
    return r;
  }

  // Decides every value of ns, running the undecided ones in parallel.
  void batch(const std::vector<std::uint64_t>& ns) {
    std::vector<std::uint64_t> todo;
    for (const auto n : ns)
      if (auto v = known(n))
        record(n, *v);
      else
        todo.push_back(n);
    if (options_.jobs <= 1 || todo.size() <= 1) {
      for (const auto n : todo) record(n, probe(n));
      return;
    }
    std::vector<std::future<bool>> futures;
    for (const auto n : todo) futures.push_back(std::async(std::launch::async, [this, n] { return probe_pure(n); }));
    for (std::size_t i = 0; i < todo.size(); ++i) {
      ++probes_;
      record(todo[i], futures[i].get());
    }
  }

 private:
  std::optional<bool> known(std::uint64_t n) const {
    if (auto it = cache_.find(n); it != cache_.end()) return it->second;
    for (const auto a : positives_) {
      if (a >= n) break;
      if (auto it = cache_.find(n - a); it != cache_.end() && it->second) return true;
    }
    return std::nullopt;
  }
  void record(std::uint64_t n, bool r) {
    cache_[n] = r;
    if (r && n > 0 && std::find(positives_.begin(), positives_.end(), n) == positives_.end()) {
      positives_.push_back(n);
      std::sort(positives_.begin(), positives_.end());
    }
  }
  bool probe(std::uint64_t n) {
    ++probes_;
    return probe_pure(n);
  }
  std::optional<Interpretation> range_probe(std::uint64_t lo, std::uint64_t hi) {
    ++probes_;
    return search(ctx_, ctx_.abox, extras_for(q_, hi, options_), count_closure(ctx_, q_, lo, hi), options_);
  }
  bool probe_pure(std::uint64_t n) const {
    return search(ctx_, ctx_.abox, extras_for(q_, n, options_), count_closure(ctx_, q_, n, n), options_).has_value();
  }

  SearchContext ctx_;
  CardinalityQuery q_;
  SolverOptions options_;
  std::map<std::uint64_t, bool> cache_;
  std::vector<std::uint64_t> positives_;
  std::size_t probes_ = 0;
};

bool zero_member(const KB& kb, const CardinalityQuery& q, const SolverOptions& options) {
  ClosedProbe p{kb, q, {}, {}, 0};
  return closed_probe(p, options);
}

SpectrumRep run_pipeline(const KB& kb, const CardinalityQuery& q, Fragment fragment, const SolverOptions& options,
                         nlohmann::json& trace) {
  if (!is_satisfiable(kb, options)) {
    trace["satisfiable"] = false;
    return SpectrumRep::empty();
  }
  trace["satisfiable"] = true;
  if (!infinity_in_spectrum(kb, q, options)) {
    trace["infinity"] = false;
    return SpectrumRep::canonicalize({0}, std::nullopt, false);
  }
  trace["infinity"] = true;
  const bool zero = zero_member(kb, q, options);
  trace["zero"] = zero;
  const bool finite = finite_nonzero(kb, q, fragment, options);
  trace["finite_nonzero"] = finite;
  if (!finite) return SpectrumRep::canonicalize(zero ? std::vector<std::uint64_t>{0} : std::vector<std::uint64_t>{},
                                                 std::nullopt, true);

  MemberCache cache(kb, q, options);
  auto check_budget = [&](std::uint64_t n) {
    if (n > options.max_value)
      throw BudgetExceeded(fmt::format("no decision below the value bound {}", options.max_value));
  };
  const auto least = cache.min_positive();
  if (!least) throw BudgetExceeded(fmt::format("no member below the value bound {}", options.max_value));
  const std::uint64_t m = *least;
  trace["min"] = m;
  trace["min_probes"] = cache.probes();
  std::uint64_t a = m;
  while (!(cache.get(a) && cache.get(a + 1))) check_budget(++a);
  trace["pair"] = {a, a + 1};
  const std::uint64_t hard_tail = a * (a + 1);

  // Values from m on, until m consecutive members or the hard tail start.
  std::uint64_t tail = hard_tail;
  std::uint64_t run_start = m;
  std::uint64_t run = 0;
  const auto step = static_cast<std::uint64_t>(std::max(1, options.jobs));
  for (std::uint64_t v = m; v < hard_tail && tail == hard_tail;) {
    std::vector<std::uint64_t> batch;
    for (std::uint64_t w = v; w < std::min(v + step, hard_tail); ++w) batch.push_back(w);
    cache.batch(batch);
    for (const auto w : batch) {
      if (cache.get(w)) {
        if (run == 0) run_start = w;
        if (++run == m) {
          tail = run_start;
          break;
        }
      } else {
        run = 0;
      }
    }
    v += batch.size();
  }
  // Recompute the sporadic members below the tail.
  std::vector<std::uint64_t> members;
  if (zero) members.push_back(0);
  for (std::uint64_t v = m; v < tail; ++v)
    if (cache.get(v)) members.push_back(v);
  trace["tail_start"] = tail;
  trace["membership_probes"] = cache.probes();
  return SpectrumRep::canonicalize(members, Tail{tail, 1}, true);
}

// Finite generators found by scanning small values; used for role
// queries over ALCF, whose spectra need not end in an interval.
SpectrumRep run_semigroup_scan(const KB& kb, const CardinalityQuery& q, const SolverOptions& options,
                               nlohmann::json& trace) {
  trace["heuristic"] = true;
  if (!is_satisfiable(kb, options)) {
    trace["satisfiable"] = false;
    return SpectrumRep::empty();
  }
  trace["satisfiable"] = true;
  if (!infinity_in_spectrum(kb, q, options)) return SpectrumRep::canonicalize({0}, std::nullopt, false);
  const bool zero = zero_member(kb, q, options);
  trace["zero"] = zero;
  MemberCache cache(kb, q, options);
  std::vector<std::uint64_t> values;
  for (std::uint64_t v = 1; v <= options.role_scan; ++v) values.push_back(v);
  cache.batch(values);
  std::vector<ExtNat> gens{ExtNat::infinity()};
  for (const auto v : values)
    if (cache.get(v)) gens.emplace_back(v);
  trace["scanned_up_to"] = options.role_scan;
  trace["membership_probes"] = cache.probes();
  auto rep = from_generators(gens);
  if (!zero) return rep;
  auto sp = rep.sporadic();
  sp.push_back(0);
  return SpectrumRep::canonicalize(sp, rep.tail(), rep.has_infinity());
}

}  // namespace

std::string to_string(Shape s) {
  switch (s) {
    case Shape::Interval:
      return "interval";
    case Shape::Empty:
      return "empty";
    case Shape::Zero:
      return "zero";
    case Shape::ZeroInterval:
      return "zero+interval";
    case Shape::Infinity:
      return "infinity";
    case Shape::ZeroInfinity:
      return "zero+infinity";
    case Shape::General:
      return "semigroup+infinity";
  }
  return "?";
}

std::optional<Shape> shape_of(const SpectrumRep& rep) {
  if (rep.is_empty()) return Shape::Empty;
  const auto& sp = rep.sporadic();
  const bool only_zero = sp.size() == 1 && sp.front() == 0;
  const auto& tail = rep.tail();
  if (!tail) {
    if (rep.has_infinity() && sp.empty()) return Shape::Infinity;
    if (rep.has_infinity() && only_zero) return Shape::ZeroInfinity;
    if (!rep.has_infinity() && only_zero) return Shape::Zero;
  }
  if (rep.has_infinity() && tail && tail->period == 1) {
    if (sp.empty()) return Shape::Interval;
    if (only_zero) return Shape::ZeroInterval;
  }
  if (rep.has_infinity() && is_closed_under_addition(rep)) return Shape::General;
  return std::nullopt;
}

bool ShapeFamily::admits(const SpectrumRep& rep) const {
  const auto s = shape_of(rep);
  return s && std::find(admitted.begin(), admitted.end(), *s) != admitted.end();
}

void ShapeFamily::validate(const SpectrumRep& rep) const {
  if (!rep.is_empty() && !is_closed_under_addition(rep))
    throw ShapeViolation("spectrum " + rep.to_string() + " is not closed under addition");
  if (exhaustive && !admits(rep))
    throw ShapeViolation(fmt::format("spectrum {} is not a {} {} spectrum", rep.to_string(), spectra::to_string(fragment),
                                     role ? "role" : "concept"));
}

nlohmann::json ShapeFamily::to_json() const {
  nlohmann::json shapes = nlohmann::json::array();
  for (const auto s : admitted) shapes.push_back(spectra::to_string(s));
  return {{"fragment", spectra::to_string(fragment)},
          {"kind", role ? "role" : "concept"},
          {"exhaustive", exhaustive},
          {"shapes", shapes}};
}

ShapeFamily classify_shape(Fragment fragment, bool role) {
  using enum Shape;
  const std::vector<Shape> all{Interval, Empty, Zero, ZeroInterval, Infinity, ZeroInfinity, General};
  const std::vector<Shape> six{Interval, Empty, Zero, ZeroInterval, Infinity, ZeroInfinity};
  const std::vector<Shape> four{Interval, Empty, Zero, ZeroInterval};
  ShapeFamily f{fragment, role, true, {}};
  switch (fragment) {
    case Fragment::ALCIF:
      f.admitted = all;
      break;
    case Fragment::ELIFBot:
      f.admitted = six;
      f.exhaustive = false;
      break;
    case Fragment::DLLiteF:
      f.admitted = six;
      break;
    case Fragment::ELIF:
      f.admitted = {Interval, Empty, Infinity};
      break;
    case Fragment::ELF:
      f.admitted = {Interval, Empty};
      break;
    case Fragment::EL:
    case Fragment::ELI:
      f.admitted = {Interval};
      break;
    case Fragment::ALCF:
      f.admitted = role ? std::vector<Shape>{Interval, Empty, Zero, ZeroInterval, General} : four;
      break;
    case Fragment::DLLiteCore:
      f.admitted = four;
      break;
    case Fragment::ELBot:
    case Fragment::ELIBot:
    case Fragment::ELFBot:
    case Fragment::ALC:
    case Fragment::ALCI:
    case Fragment::ALCFStar:
      f.admitted = four;
      f.exhaustive = !role;
      break;
  }
  return f;
}

std::string RoleStrategy::to_string() const {
  if (kind == Kind::DirectRole) return "direct";
  return "concept(exists " + via.to_string() + ")";
}

bool is_satisfiable(const KB& kb, const SolverOptions& options) {
  return satisfiable(make_context(kb, std::nullopt, options, false), options);
}

bool infinity_in_spectrum(const KB& kb, const CardinalityQuery& q, const SolverOptions& options) {
  for (const auto& s : seeded(kb, q))
    if (is_satisfiable(s, options)) return true;
  return false;
}

bool membership(const KB& kb, const CardinalityQuery& q, std::uint64_t n, const SolverOptions& options) {
  return membership_witness(kb, q, n, options).has_value();
}

std::optional<Interpretation> membership_witness(const KB& kb, const CardinalityQuery& q, std::uint64_t n,
                                                 const SolverOptions& options) {
  const auto ctx = make_context(kb, q, options);
  return search(ctx, ctx.abox, extras_for(q, n, options), count_closure(ctx, q, n, n), options);
}

bool closed_probe(const ClosedProbe& p, const SolverOptions& options) {
  const auto ctx = make_context(p.kb, p.predicate, options);
  HornABox abox = ctx.abox;
  auto element = [&](const std::string& name) {
    if (auto id = abox.find(name)) return *id;
    return abox.add(name);
  };
  Closure c;
  c.kind = Closure::Kind::Extension;
  c.role = p.predicate.is_role();
  c.id = c.role ? ctx.tbox.require_role(p.predicate.name) : ctx.tbox.require_concept(p.predicate.name);
  for (const auto& e : p.concept_extension) c.elements.insert(element(e));
  for (const auto& [x, y] : p.role_extension) c.pairs.insert({element(x), element(y)});
  const std::uint64_t size = c.role ? c.pairs.size() : c.elements.size();
  const int extras = p.search_bound > 0 ? p.search_bound : extras_for(p.predicate, size, options);
  return search(ctx, abox, extras, c, options).has_value();
}

RoleStrategy role_strategy(const KB& kb, const std::string& r, const SolverOptions& options) {
  const auto ctx = make_context(kb, CardinalityQuery::role_query(r), options, false);
  const int id = ctx.tbox.require_role(r);
  auto functional = [&](bool inverse) {
    if (ctx.horn) return HornReasoner(ctx.tbox, options.max_steps).entails_functionality(0, {id, inverse}, 0);
    // Two distinct successors of a fresh element contradict the TBox.
    KB probe;
    probe.tbox = kb.tbox;
    const std::string x = "_seed_a";
    if (!inverse) {
      probe.role_assertions = {{r, x, "_seed_b"}, {r, x, "_seed_c"}};
    } else {
      probe.role_assertions = {{r, "_seed_b", x}, {r, "_seed_c", x}};
    }
    try {
      return !is_satisfiable(probe, options);
    } catch (const BudgetExceeded&) {
      return false;
    }
  };
  if (functional(false)) return {RoleStrategy::Kind::ReduceToConcept, Role{r, false}};
  if (functional(true)) return {RoleStrategy::Kind::ReduceToConcept, Role{r, true}};
  return {RoleStrategy::Kind::DirectRole, Role{r, false}};
}

ExtNat min_value(const KB& kb, const CardinalityQuery& q, const SolverOptions& options) {
  if (!is_satisfiable(kb, options)) throw UnsatisfiableKB("the spectrum of an unsatisfiable knowledge base is empty");
  if (!infinity_in_spectrum(kb, q, options)) return 0;
  if (zero_member(kb, q, options)) return 0;
  if (!finite_nonzero(kb, q, fragment_of(kb, options), options)) return ExtNat::infinity();
  MemberCache cache(kb, q, options);
  if (const auto m = cache.min_positive()) return *m;
  throw BudgetExceeded(fmt::format("no member below the value bound {}", options.max_value));
}

SpectrumResult compute_spectrum(const KB& kb, const CardinalityQuery& q, const SolverOptions& options) {
  check_input(kb);
  const Fragment fragment = fragment_of(kb, options);
  if (fragment == Fragment::ALCIF)
    throw UnsupportedFragment("complete spectra are not computed for ALCIF; membership queries are available");
  SpectrumResult out;
  out.trace["fragment"] = to_string(fragment);
  out.trace["query"] = {{"kind", q.is_role() ? "role" : "concept"}, {"name", q.name}};
  const auto family = classify_shape(fragment, q.is_role());
  if (!q.is_role()) {
    out.rep = run_pipeline(kb, q, fragment, options, out.trace);
  } else {
    const auto strategy = role_strategy(kb, q.name, options);
    out.trace["strategy"] = strategy.to_string();
    if (strategy.kind == RoleStrategy::Kind::ReduceToConcept) {
      std::string concept_name;
      const KB reduced = reduce_to_concept(kb, strategy.via, concept_name);
      out.rep = run_pipeline(reduced, CardinalityQuery::concept_query(concept_name), fragment, options, out.trace);
    } else if (fragment == Fragment::ALCF) {
      out.rep = run_semigroup_scan(kb, q, options, out.trace);
    } else {
      out.rep = run_pipeline(kb, q, fragment, options, out.trace);
    }
  }
  if (const auto s = shape_of(out.rep)) out.trace["shape"] = to_string(*s);
  family.validate(out.rep);
  return out;
}

}  // namespace spectra
