#include "spectra/horn.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <numeric>

#include "spectra/errors.hpp"

namespace spectra {

namespace {

// Weakening steps in IfpGraph::path carry this role id.
constexpr int kWeakening = -1;

std::vector<Mask> maximal_masks(std::vector<Mask> masks) {
  std::sort(masks.begin(), masks.end());
  masks.erase(std::unique(masks.begin(), masks.end()), masks.end());
  std::vector<Mask> out;
  for (const Mask m : masks) {
    const bool dominated = std::any_of(masks.begin(), masks.end(),
                                       [m](Mask o) { return o != m && subset(m, o); });
    if (!dominated) out.push_back(m);
  }
  return out;
}

// Iterative Tarjan; returns a component id per node.
std::vector<int> strongly_connected(const std::vector<std::vector<int>>& succ) {
  const int n = static_cast<int>(succ.size());
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1), stack;
  std::vector<bool> on_stack(n, false);
  int counter = 0;
  int components = 0;
  for (int root = 0; root < n; ++root) {
    if (index[root] >= 0) continue;
    std::vector<std::pair<int, std::size_t>> frames{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!frames.empty()) {
      auto& [v, k] = frames.back();
      if (k < succ[v].size()) {
        const int w = succ[v][k++];
        if (index[w] < 0) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          frames.push_back({w, 0});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        while (true) {
          const int w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp[w] = components;
          if (w == v) break;
        }
        ++components;
      }
      const int finished = v;
      frames.pop_back();
      if (!frames.empty()) low[frames.back().first] = std::min(low[frames.back().first], low[finished]);
    }
  }
  return comp;
}

nlohmann::json names_json(const NormalTBox& tbox, Mask m) { return tbox.names_of(m); }

class Chaser {
 public:
  Chaser(const NormalTBox& tbox, std::uint64_t max_steps) : t_(tbox), max_steps_(max_steps) {
    for (const auto& ax : t_.exists_left) left_[ax.role].push_back(ax);
  }

  ChaseResult run(const HornABox& abox) {
    for (std::size_t k = 0; k < abox.individuals.size(); ++k)
      add_node(abox.labels[k], abox.individuals[k], -1, IRole{});
    for (const auto& [x, r, y] : abox.edges) add_edge(x, r, y);
    while (true) {
      if (!saturate()) {
        res_.satisfiable = false;
        return std::move(res_);
      }
      if (!expand()) break;
    }
    return std::move(res_);
  }

 private:
  void tick() {
    if (++steps_ > max_steps_) throw BudgetExceeded("chase step budget exhausted");
  }

  int add_node(Mask label, std::string name, int parent, IRole via) {
    ChaseNode n;
    n.label = label;
    n.individual = std::move(name);
    n.parent = parent;
    n.via = via;
    res_.nodes.push_back(std::move(n));
    res_.adjacency.emplace_back();
    return static_cast<int>(res_.nodes.size()) - 1;
  }

  bool has_edge(int x, IRole r, int y) const {
    const auto& adj = res_.adjacency[x];
    return std::find(adj.begin(), adj.end(), std::pair{r, y}) != adj.end();
  }

  void add_edge(int x, IRole r, int y) {
    if (has_edge(x, r, y)) return;
    res_.adjacency[x].push_back({r, y});
    if (x == y && r.inverse() == r) return;
    res_.adjacency[y].push_back({r.inverse(), x});
  }

  bool merge(int a, int b) {
    const bool a_named = !res_.nodes[a].individual.empty();
    const bool b_named = !res_.nodes[b].individual.empty();
    if (a_named && b_named) return false;
    int keep = std::min(a, b);
    int drop = std::max(a, b);
    if (a_named) keep = a, drop = b;
    if (b_named) keep = b, drop = a;
    res_.nodes[keep].label |= res_.nodes[drop].label;
    auto edges = std::move(res_.adjacency[drop]);
    res_.adjacency[drop].clear();
    for (const auto& [r, z] : edges) {
      if (z == drop) {
        add_edge(keep, r, keep);
        continue;
      }
      auto& back = res_.adjacency[z];
      back.erase(std::remove(back.begin(), back.end(), std::pair{r.inverse(), drop}), back.end());
      add_edge(keep, r, z);
    }
    auto& dropped = res_.nodes[drop];
    dropped.alive = false;
    for (auto& n : res_.nodes)
      if (n.parent == drop) n.parent = keep;
    auto& kept = res_.nodes[keep];
    if (kept.parent == keep) {
      kept.parent = dropped.parent == keep ? -1 : dropped.parent;
      kept.via = dropped.via;
    }
    return true;
  }

  bool saturate() {
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t x = 0; x < res_.nodes.size(); ++x) {
        if (!res_.nodes[x].alive) continue;
        for (const auto& c : t_.clauses) {
          const Mask l = res_.nodes[x].label;
          if (!subset(c.lhs, l)) continue;
          if (c.rhs == 0) return false;
          if (subset(c.rhs, l)) continue;
          res_.nodes[x].label |= c.rhs;
          changed = true;
          tick();
        }
        for (const auto& [r, y] : res_.adjacency[x]) {
          const auto it = left_.find(r);
          if (it == left_.end()) continue;
          for (const auto& ax : it->second) {
            if (!subset(ax.filler, res_.nodes[y].label) || has(res_.nodes[x].label, ax.rhs)) continue;
            res_.nodes[x].label |= bit(ax.rhs);
            changed = true;
            tick();
          }
        }
        for (const auto& f : t_.functs) {
          if (!subset(f.guard, res_.nodes[x].label)) continue;
          std::vector<int> ys;
          for (const auto& [r, y] : res_.adjacency[x])
            if (r == f.role && subset(f.filler, res_.nodes[y].label) &&
                std::find(ys.begin(), ys.end(), y) == ys.end())
              ys.push_back(y);
          if (ys.size() < 2) continue;
          if (!merge(ys[0], ys[1])) return false;
          changed = true;
          tick();
          break;
        }
      }
    }
    return true;
  }

  void compute_blocking() {
    std::map<std::tuple<Mask, Mask, IRole>, int> seen;
    for (std::size_t x = 0; x < res_.nodes.size(); ++x) {
      auto& n = res_.nodes[x];
      n.blocked_by = -1;
      n.indirectly_blocked = false;
      if (!n.alive || !n.individual.empty() || n.parent < 0) continue;
      const auto& parent = res_.nodes[n.parent];
      if (parent.blocked_by >= 0 || parent.indirectly_blocked) {
        n.indirectly_blocked = true;
        continue;
      }
      const auto key = std::tuple{n.label, res_.nodes[n.parent].label, n.via};
      const auto [it, inserted] = seen.try_emplace(key, static_cast<int>(x));
      if (!inserted) n.blocked_by = it->second;
    }
  }

  bool expand() {
    compute_blocking();
    bool created = false;
    const std::size_t n = res_.nodes.size();
    for (std::size_t x = 0; x < n; ++x) {
      if (!res_.nodes[x].alive || !res_.nodes[x].active()) continue;
      for (const auto& ax : t_.exists_right) {
        if (!subset(ax.lhs, res_.nodes[x].label)) continue;
        const auto& adj = res_.adjacency[x];
        const bool ok = std::any_of(adj.begin(), adj.end(), [&](const auto& e) {
          return e.first == ax.role && subset(ax.filler, res_.nodes[e.second].label);
        });
        if (ok) continue;
        const int y = add_node(ax.filler, "", static_cast<int>(x), ax.role);
        add_edge(static_cast<int>(x), ax.role, y);
        created = true;
        tick();
      }
    }
    return created;
  }

  const NormalTBox& t_;
  std::map<IRole, std::vector<NExistsLeft>> left_;
  ChaseResult res_;
  std::uint64_t steps_ = 0;
  std::uint64_t max_steps_;
};

ChaseResult chase_descriptor(const NormalTBox& tbox, Mask parent, IRole r, Mask child, std::uint64_t max_steps) {
  HornABox a;
  const int p = a.add("p", parent);
  const int c = a.add("c", child);
  a.edges.emplace_back(p, r, c);
  return chase(tbox, a, max_steps);
}

std::vector<int> safe_concept_ids(const HornReasoner& reasoner, const IfpGraph& graph) {
  std::vector<int> out;
  for (int c = 0; c < reasoner.tbox().num_concepts(); ++c)
    if (is_safe(reasoner, graph, c)) out.push_back(c);
  return out;
}

// A pending obligation is clean when the tree the chase would grow below it
// contains no safe concept and no critical type.
class CleanChecker {
 public:
  CleanChecker(const HornReasoner& reasoner, const TypeGraph& graph) : r_(reasoner), g_(graph) {}

  bool clean(int parent, IRole role, int child) {
    const auto key = std::tuple{parent, role, child};
    if (const auto it = memo_.find(key); it != memo_.end()) return it->second;
    Mask safe = 0;
    for (const int c : g_.safe_concepts) safe |= bit(c);
    std::set<std::tuple<int, IRole, int>> visited{key};
    std::deque<std::tuple<int, IRole, int>> queue{key};
    bool ok = true;
    while (!queue.empty() && ok) {
      const auto [p, ro, u] = queue.front();
      queue.pop_front();
      if (g_.critical[u] || (g_.types[u] & safe) != 0) {
        ok = false;
        break;
      }
      for (const IRole next : r_.all_roles()) {
        for (const Mask target : r_.successors(g_.types[u], next)) {
          if (next == ro.inverse() && subset(target, g_.types[p])) continue;
          const auto j = g_.type_index(target);
          if (!j) throw InternalError("successor label is not a type");
          const auto item = std::tuple{u, next, *j};
          if (visited.insert(item).second) queue.push_back(item);
        }
      }
    }
    memo_[key] = ok;
    return ok;
  }

 private:
  const HornReasoner& r_;
  const TypeGraph& g_;
  std::map<std::tuple<int, IRole, int>, bool> memo_;
};

struct PendingOb {
  int element = 0;
  IRole role;
  Mask type = 0;
  bool anchored = false;
};

struct RawCompletion {
  Interpretation model;
  std::vector<Mask> types;
  std::vector<PendingOb> pending;
  std::size_t rounds = 0;
  std::size_t rule_applications = 0;
};

struct CertificateData {
  NormalTBox tbox;
  std::vector<Mask> types;
  std::uint64_t max_steps = 0;
  std::map<std::tuple<Mask, IRole, Mask>, std::pair<Interpretation, int>> cache;

  bool satisfies(const Obligation& ob, const Concept& c) {
    const Mask parent = types.at(ob.element);
    const IRole r{tbox.require_role(ob.role.name), ob.role.inverse};
    const Mask child = tbox.mask_of(ob.type);
    const auto key = std::tuple{parent, r, child};
    auto it = cache.find(key);
    if (it == cache.end()) {
      const auto res = chase_descriptor(tbox, parent, r, child, max_steps);
      if (!res.satisfiable) throw InternalError("pending obligation is inconsistent with its parent");
      auto model = res.to_interpretation(tbox);
      const int at = model.named.at("c");
      it = cache.emplace(key, std::pair{std::move(model), at}).first;
    }
    return evaluate(it->second.first, c)[it->second.second];
  }
};

FrontierCertificate make_certificate(const NormalTBox& tbox, const RawCompletion& raw, std::uint64_t max_steps) {
  FrontierCertificate cert;
  for (const auto& p : raw.pending)
    cert.pending.push_back({p.element, tbox.role_of(p.role), tbox.names_of(p.type), p.anchored});
  auto data = std::make_shared<CertificateData>();
  data->tbox = tbox;
  data->types = raw.types;
  data->max_steps = max_steps;
  cert.satisfies = [data](const Obligation& ob, const Concept& c) { return data->satisfies(ob, c); };
  return cert;
}

class CompletionBuilder {
 public:
  CompletionBuilder(const HornKB& kb, const IlsOptions& options, bool pre)
      : kb_(kb), options_(options), pre_(pre), reasoner_(kb.tbox, options.max_steps) {
    const IfpGraph ifp(reasoner_);
    const auto safe = safe_concept_ids(reasoner_, ifp);
    graph_ = build_type_graph(reasoner_, {safe.begin(), safe.end()});
    clean_.emplace(reasoner_, graph_);
    roles_ = reasoner_.all_roles();
    for (const auto& i : kb.abox.individuals) taken_.insert(i);
  }

  const HornReasoner& reasoner() const { return reasoner_; }
  const TypeGraph& graph() const { return graph_; }

  RawCompletion run() {
    init();
    while (true) {
      if (++raw_.rounds > options_.max_rounds) throw BudgetExceeded("completion round limit reached");
      bool changed = apply_r1();
      changed = apply_r2() || changed;
      if (!pre_) changed = apply_r3() || changed;
      if (!changed) break;
    }
    if (options_.prune) prune();
    materialize();
    return std::move(raw_);
  }

 private:
  struct Elem {
    int type = 0;  // index into graph_.types
    int depth = 0;
    std::string label;
  };

  Mask type_mask(int e) const { return graph_.types[elems_[e].type]; }

  int index_of(Mask t) const {
    const auto i = graph_.type_index(t);
    if (!i) throw InternalError("label is not a type: " + kb_.tbox.mask_to_string(t));
    return *i;
  }

  int add_element(int type, int depth, std::string label = {}) {
    if (label.empty()) {
      label = fresh_name("_e" + std::to_string(elems_.size()), taken_);
      taken_.insert(label);
    }
    elems_.push_back({type, depth, std::move(label)});
    adjacency_.emplace_back();
    return static_cast<int>(elems_.size()) - 1;
  }

  void add_edge(int x, IRole r, int y) {
    const auto& adj = adjacency_[x];
    if (std::find(adj.begin(), adj.end(), std::pair{r, y}) != adj.end()) return;
    adjacency_[x].push_back({r, y});
    if (x != y || r.inverse() != r) adjacency_[y].push_back({r.inverse(), x});
    ++raw_.rule_applications;
  }

  bool has_successor(int d, IRole r, Mask t) const {
    for (const auto& [ro, y] : adjacency_[d])
      if (ro == r && subset(t, type_mask(y))) return true;
    return std::any_of(pending_.begin(), pending_.end(), [&](const PendingOb& p) {
      return p.element == d && p.role == r && subset(t, p.type);
    });
  }

  void init() {
    const auto res = chase(kb_.tbox, kb_.abox, options_.max_steps);
    if (!res.satisfiable) throw UnsatisfiableKB("knowledge base is unsatisfiable");
    std::map<int, int> element_of_node;
    for (const auto& name : kb_.abox.individuals) {
      const int node = *res.node_of(name);
      element_of_node[node] = add_element(index_of(res.nodes[node].label), 0, name);
    }
    for (const auto& [node, x] : element_of_node)
      for (const auto& [r, other] : res.adjacency[node])
        if (const auto it = element_of_node.find(other); it != element_of_node.end()) add_edge(x, r, it->second);
    named_ = static_cast<int>(elems_.size());
    if (!pre_)
      for (std::size_t t = 0; t < graph_.types.size(); ++t) anchors_[static_cast<int>(t)] = add_element(static_cast<int>(t), 0);
    raw_.rule_applications = 0;
  }

  bool apply_r1() {
    bool any = false;
    for (std::size_t d = 0; d < elems_.size(); ++d) {
      const int s = elems_[d].type;
      for (const IRole r : roles_) {
        for (const Mask target : reasoner_.successors(graph_.types[s], r)) {
          const int t = index_of(target);
          if (!graph_.is_dep(s, r, t) || has_successor(static_cast<int>(d), r, target)) continue;
          if (graph_.is_dep(t, r.inverse(), s) && graph_.critical[t]) continue;
          any = true;
          ++raw_.rule_applications;
          if (clean_->clean(s, r, t)) {
            pending_.push_back({static_cast<int>(d), r, target, false});
            continue;
          }
          const int depth = elems_[d].depth + 1;
          if (depth > options_.max_depth) throw BudgetExceeded("completion depth limit reached");
          const int e = add_element(t, depth);
          add_edge(static_cast<int>(d), r, e);
        }
      }
    }
    return any;
  }

  bool lacking(int d, const TypeEdge& lambda) const {
    return elems_[d].type == lambda.from && !has_successor(d, lambda.role, graph_.types[lambda.to]);
  }

  bool apply_r2() {
    std::set<int> applicable;
    for (const auto& lambda : graph_.bidep)
      for (std::size_t d = 0; d < elems_.size(); ++d)
        if (lacking(static_cast<int>(d), lambda)) {
          applicable.insert(graph_.class_of[lambda.from]);
          break;
        }
    if (applicable.empty()) return false;
    std::optional<int> chosen;
    int chosen_min = 0;
    for (const int p : applicable) {
      const bool minimal = std::none_of(applicable.begin(), applicable.end(),
                                        [&](int q) { return graph_.precedes[q][p]; });
      if (!minimal) continue;
      int lowest = static_cast<int>(graph_.types.size());
      for (std::size_t t = 0; t < graph_.types.size(); ++t)
        if (graph_.class_of[t] == p) lowest = std::min(lowest, static_cast<int>(t));
      if (!chosen || lowest < chosen_min) chosen = p, chosen_min = lowest;
    }
    if (!chosen) throw PartialOrderViolation("no minimal type class");

    struct Lambda {
      TypeEdge edge;
      std::vector<int> x1, x2;
    };
    std::vector<Lambda> lambdas;
    for (const auto& e : graph_.bidep) {
      if (e.role.inv || graph_.class_of[e.from] != *chosen) continue;
      Lambda l{e, {}, {}};
      const TypeEdge back{e.to, e.role.inverse(), e.from};
      for (std::size_t d = 0; d < elems_.size(); ++d) {
        if (lacking(static_cast<int>(d), e)) l.x1.push_back(static_cast<int>(d));
        if (lacking(static_cast<int>(d), back)) l.x2.push_back(static_cast<int>(d));
      }
      lambdas.push_back(std::move(l));
    }

    // delta[to] - delta[from] = |X1| - |X2| for every lambda; solved by
    // propagation over the constraint graph and shifted to be nonnegative.
    std::map<int, std::vector<std::pair<int, long long>>> constraints;
    for (const auto& l : lambdas) {
      const long long diff = static_cast<long long>(l.x1.size()) - static_cast<long long>(l.x2.size());
      constraints[l.edge.from].push_back({l.edge.to, diff});
      constraints[l.edge.to].push_back({l.edge.from, -diff});
    }
    std::map<int, long long> delta;
    for (const auto& [start, unused] : constraints) {
      if (delta.contains(start)) continue;
      std::vector<int> component{start};
      delta[start] = 0;
      for (std::size_t k = 0; k < component.size(); ++k) {
        const int u = component[k];
        for (const auto& [v, diff] : constraints[u]) {
          const long long want = delta[u] + diff;
          if (const auto it = delta.find(v); it != delta.end()) {
            if (it->second != want) throw InternalError("inconsistent element balance in a type class");
            continue;
          }
          delta[v] = want;
          component.push_back(v);
        }
      }
      long long lowest = 0;
      for (const int u : component) lowest = std::min(lowest, delta[u]);
      for (const int u : component) delta[u] -= lowest;
    }
    std::map<int, std::vector<int>> fresh;
    for (const auto& [t, count] : delta)
      for (long long k = 0; k < count; ++k) fresh[t].push_back(add_element(t, 0));
    for (const auto& l : lambdas) {
      auto dom = l.x1;
      auto cod = l.x2;
      dom.insert(dom.end(), fresh[l.edge.from].begin(), fresh[l.edge.from].end());
      cod.insert(cod.end(), fresh[l.edge.to].begin(), fresh[l.edge.to].end());
      if (dom.size() != cod.size()) throw InternalError("unbalanced type class completion");
      std::sort(dom.begin(), dom.end());
      std::sort(cod.begin(), cod.end());
      for (std::size_t k = 0; k < dom.size(); ++k) add_edge(dom[k], l.edge.role, cod[k]);
    }
    return true;
  }

  bool apply_r3() {
    bool any = false;
    for (std::size_t d = 0; d < elems_.size(); ++d) {
      const int s = elems_[d].type;
      for (const IRole r : roles_) {
        for (const Mask target : reasoner_.successors(graph_.types[s], r)) {
          const int t = index_of(target);
          if (graph_.is_dep(s, r, t) || has_successor(static_cast<int>(d), r, target)) continue;
          int link = anchors_.at(t);
          for (std::size_t e = 0; e < elems_.size(); ++e)
            if (elems_[e].type == t) {
              link = static_cast<int>(e);
              break;
            }
          add_edge(static_cast<int>(d), r, link);
          any = true;
        }
      }
    }
    return any;
  }

  // In a pre-completion, obligations that the full construction would link
  // to an existing element stay pending and anchored.
  void anchor_remaining() {
    for (std::size_t d = 0; d < elems_.size(); ++d) {
      const int s = elems_[d].type;
      for (const IRole r : roles_)
        for (const Mask target : reasoner_.successors(graph_.types[s], r)) {
          const int t = index_of(target);
          if (graph_.is_dep(s, r, t) || has_successor(static_cast<int>(d), r, target)) continue;
          pending_.push_back({static_cast<int>(d), r, target, true});
        }
    }
  }

  void prune() {
    int seed = -1;
    if (named_ == 0) {
      if (graph_.types.empty()) return;
      const auto root = reasoner_.closure(0);
      if (root) {
        if (const auto it = anchors_.find(index_of(*root)); it != anchors_.end()) seed = it->second;
      }
      if (seed < 0 && !elems_.empty()) seed = 0;
    }
    std::vector<bool> keep(elems_.size(), false);
    std::vector<int> queue;
    for (int x = 0; x < named_; ++x) queue.push_back(x);
    if (seed >= 0) queue.push_back(seed);
    for (const int x : queue) keep[x] = true;
    for (std::size_t k = 0; k < queue.size(); ++k)
      for (const auto& [r, y] : adjacency_[queue[k]])
        if (!keep[y]) {
          keep[y] = true;
          queue.push_back(y);
        }
    std::vector<int> remap(elems_.size(), -1);
    std::vector<Elem> elems;
    std::vector<std::vector<std::pair<IRole, int>>> adjacency;
    for (std::size_t x = 0; x < elems_.size(); ++x)
      if (keep[x]) {
        remap[x] = static_cast<int>(elems.size());
        elems.push_back(elems_[x]);
      }
    for (std::size_t x = 0; x < elems_.size(); ++x) {
      if (!keep[x]) continue;
      adjacency.emplace_back();
      for (const auto& [r, y] : adjacency_[x]) adjacency.back().push_back({r, remap[y]});
    }
    std::vector<PendingOb> pending;
    for (auto p : pending_)
      if (keep[p.element]) {
        p.element = remap[p.element];
        pending.push_back(p);
      }
    elems_ = std::move(elems);
    adjacency_ = std::move(adjacency);
    pending_ = std::move(pending);
    anchors_.clear();
  }

  void materialize() {
    if (pre_) anchor_remaining();
    auto& m = raw_.model;
    for (std::size_t x = 0; x < elems_.size(); ++x) {
      if (static_cast<int>(x) < named_)
        m.add_named(elems_[x].label);
      else
        m.add_element(elems_[x].label);
      raw_.types.push_back(type_mask(static_cast<int>(x)));
      for (const auto& name : kb_.tbox.names_of(type_mask(static_cast<int>(x))))
        m.add_concept(name, static_cast<int>(x));
    }
    for (std::size_t x = 0; x < elems_.size(); ++x)
      for (const auto& [r, y] : adjacency_[x])
        if (!r.inv) m.add_edge(kb_.tbox.roles[r.id], static_cast<int>(x), y);
    for (const auto& name : kb_.tbox.concepts) m.concepts.try_emplace(name);
    for (const auto& name : kb_.tbox.roles) m.roles.try_emplace(name);
    raw_.pending = pending_;
  }

  const HornKB& kb_;
  IlsOptions options_;
  bool pre_;
  HornReasoner reasoner_;
  TypeGraph graph_;
  std::optional<CleanChecker> clean_;
  std::vector<IRole> roles_;
  std::vector<Elem> elems_;
  std::vector<std::vector<std::pair<IRole, int>>> adjacency_;
  std::vector<PendingOb> pending_;
  std::map<int, int> anchors_;
  std::set<std::string> taken_;
  int named_ = 0;
  RawCompletion raw_;
};

Completion finish(const NormalTBox& tbox, RawCompletion raw, const TypeGraph& graph, std::uint64_t max_steps) {
  Completion out;
  out.certificate = make_certificate(tbox, raw, max_steps);
  for (const int c : graph.safe_concepts) {
    std::uint64_t n = 0;
    for (const Mask t : raw.types) n += has(t, c) ? 1 : 0;
    out.safe_counts[tbox.concepts[c]] = n;
  }
  out.element_types = raw.types;
  out.rounds = raw.rounds;
  out.rule_applications = raw.rule_applications;
  out.model = std::move(raw.model);
  return out;
}

// Appends b to a; b's individuals become anonymous elements of the result.
// Returns the offset of b's elements.
int append(RawCompletion& a, const RawCompletion& b) {
  std::set<std::string> taken(a.model.labels.begin(), a.model.labels.end());
  const int offset = a.model.size();
  for (const auto& l : b.model.labels) {
    auto label = fresh_name(l, taken);
    taken.insert(label);
    a.model.add_element(std::move(label));
  }
  for (const auto& [c, ext] : b.model.concepts)
    for (const int e : ext) a.model.concepts[c].insert(e + offset);
  for (const auto& [r, ext] : b.model.roles)
    for (const auto& [x, y] : ext) a.model.roles[r].insert({x + offset, y + offset});
  a.types.insert(a.types.end(), b.types.begin(), b.types.end());
  for (auto p : b.pending) {
    p.element += offset;
    a.pending.push_back(p);
  }
  return offset;
}

KB reference_kb(const NormalTBox& tbox, const KB& kb) {
  KB out = kb;
  out.tbox = tbox.to_tbox();
  return out;
}

CountedModel counted(const NormalTBox& tbox, const RawCompletion& raw, std::uint64_t count, std::uint64_t max_steps) {
  return {raw.model, make_certificate(tbox, raw, max_steps), count};
}

}  // namespace

int HornABox::add(const std::string& name, Mask label) {
  individuals.push_back(name);
  labels.push_back(label);
  return static_cast<int>(individuals.size()) - 1;
}

std::optional<int> HornABox::find(const std::string& name) const {
  const auto it = std::find(individuals.begin(), individuals.end(), name);
  if (it == individuals.end()) return std::nullopt;
  return static_cast<int>(it - individuals.begin());
}

HornKB prepare_horn(const KB& kb) {
  HornKB out;
  out.tbox = normalize(kb.tbox, kb.concept_names(), kb.role_names());
  if (!out.tbox.is_horn()) throw UnsupportedLogic("knowledge base is not Horn");
  for (const auto& i : kb.individuals()) out.abox.add(i);
  for (const auto& ca : kb.concept_assertions)
    out.abox.labels[*out.abox.find(ca.individual)] |= bit(out.tbox.require_concept(ca.concept_name));
  for (const auto& ra : kb.role_assertions)
    out.abox.edges.emplace_back(*out.abox.find(ra.subject), IRole{out.tbox.require_role(ra.role_name), false},
                                *out.abox.find(ra.object));
  return out;
}

std::vector<int> ChaseResult::neighbours(int node, IRole r) const {
  std::vector<int> out;
  for (const auto& [ro, y] : adjacency[node])
    if (ro == r) out.push_back(y);
  return out;
}

std::optional<int> ChaseResult::node_of(const std::string& individual) const {
  for (std::size_t k = 0; k < nodes.size(); ++k)
    if (nodes[k].alive && nodes[k].individual == individual) return static_cast<int>(k);
  return std::nullopt;
}

Interpretation ChaseResult::to_interpretation(const NormalTBox& tbox) const {
  Interpretation out;
  std::vector<int> id(nodes.size(), -1);
  std::set<std::string> taken;
  for (const auto& n : nodes)
    if (n.alive && !n.individual.empty()) taken.insert(n.individual);
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    if (!nodes[k].alive || nodes[k].indirectly_blocked) continue;
    if (!nodes[k].individual.empty()) {
      id[k] = out.add_named(nodes[k].individual);
    } else {
      auto label = fresh_name("_c" + std::to_string(k), taken);
      taken.insert(label);
      id[k] = out.add_element(std::move(label));
    }
    for (const auto& name : tbox.names_of(nodes[k].label)) out.add_concept(name, id[k]);
  }
  const auto add = [&](int x, IRole r, int y) {
    if (r.inv)
      out.add_edge(tbox.roles[r.id], id[y], id[x]);
    else
      out.add_edge(tbox.roles[r.id], id[x], id[y]);
  };
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    if (id[k] < 0) continue;
    const int blocker = nodes[k].blocked_by;
    for (const auto& [r, y] : adjacency[k])
      if (id[y] >= 0 && (blocker < 0 || y == nodes[k].parent)) add(static_cast<int>(k), r, y);
    if (blocker < 0) continue;
    const auto& b = nodes[blocker];
    for (const auto& [r, y] : adjacency[blocker]) {
      if (y == b.parent && r == b.via.inverse()) continue;
      add(static_cast<int>(k), r, y == blocker ? static_cast<int>(k) : y);
    }
  }
  for (const auto& name : tbox.concepts) out.concepts.try_emplace(name);
  for (const auto& name : tbox.roles) out.roles.try_emplace(name);
  return out;
}

ChaseResult chase(const NormalTBox& tbox, const HornABox& abox, std::uint64_t max_steps) {
  return Chaser(tbox, max_steps).run(abox);
}

HornReasoner::HornReasoner(NormalTBox tbox, std::uint64_t max_steps)
    : tbox_(std::move(tbox)), max_steps_(max_steps) {
  if (!tbox_.is_horn()) throw UnsupportedLogic("TBox is not Horn");
}

std::optional<Mask> HornReasoner::closure(Mask k) const {
  if (const auto it = closure_cache_.find(k); it != closure_cache_.end()) return it->second;
  HornABox a;
  a.add("a", k);
  const auto res = chase(tbox_, a, max_steps_);
  std::optional<Mask> out;
  if (res.satisfiable) out = res.nodes[0].label;
  closure_cache_[k] = out;
  return out;
}

bool HornReasoner::entails_subsumption(Mask k, Mask k2) const {
  const auto c = closure(k);
  return !c || subset(k2, *c);
}

bool HornReasoner::entails_exists(Mask k, IRole r, Mask k2) const {
  if (!satisfiable(k)) return true;
  const auto& succ = successors(k, r);
  return std::any_of(succ.begin(), succ.end(), [k2](Mask m) { return subset(k2, m); });
}

bool HornReasoner::entails_functionality(Mask guard, IRole r, Mask filler) const {
  if (!satisfiable(guard) || !satisfiable(filler)) return true;
  const bool relevant = std::any_of(tbox_.functs.begin(), tbox_.functs.end(),
                                    [r](const NFunct& f) { return f.role == r; });
  if (!relevant) return false;
  const auto key = std::tuple{guard, r, filler};
  if (const auto it = funct_cache_.find(key); it != funct_cache_.end()) return it->second;
  HornABox a;
  const int x = a.add("a", guard);
  const int y1 = a.add("b1", filler);
  const int y2 = a.add("b2", filler);
  a.edges.emplace_back(x, r, y1);
  a.edges.emplace_back(x, r, y2);
  const bool out = !chase(tbox_, a, max_steps_).satisfiable;
  funct_cache_[key] = out;
  return out;
}

const std::vector<Mask>& HornReasoner::successors(Mask t, IRole r) const {
  const auto key = std::pair{t, r};
  if (const auto it = successor_cache_.find(key); it != successor_cache_.end()) return it->second;
  HornABox a;
  a.add("a", t);
  const auto res = chase(tbox_, a, max_steps_);
  std::vector<Mask> labels;
  if (res.satisfiable)
    for (const int y : res.neighbours(0, r)) labels.push_back(res.nodes[y].label);
  return successor_cache_[key] = maximal_masks(std::move(labels));
}

const std::vector<Mask>& HornReasoner::types(std::size_t max_types) const {
  if (types_) return *types_;
  const Mask all = tbox_.all_concepts();
  const int n = tbox_.num_concepts();
  const auto close = [&](Mask k) { return closure(k).value_or(all); };
  std::vector<Mask> out;
  Mask current = close(0);
  while (true) {
    if (satisfiable(current)) {
      out.push_back(current);
      if (out.size() > max_types) throw BudgetExceeded("too many types");
    }
    bool found = false;
    for (int i = n - 1; i >= 0 && !found; --i) {
      if (has(current, i)) continue;
      const Mask lower_mask = bit(i) - 1;
      const Mask lower = current & lower_mask;
      const Mask next = close(lower | bit(i));
      if ((next & lower_mask) == lower) {
        current = next;
        found = true;
      }
    }
    if (!found) break;
  }
  types_ = std::move(out);
  return *types_;
}

std::vector<IRole> HornReasoner::all_roles() const {
  std::vector<IRole> out;
  for (int r = 0; r < tbox_.num_roles(); ++r) {
    out.push_back({r, false});
    out.push_back({r, true});
  }
  return out;
}

std::optional<int> TypeGraph::type_index(Mask t) const {
  const auto it = index.find(t);
  if (it == index.end()) return std::nullopt;
  return it->second;
}

nlohmann::json TypeGraph::to_json(const NormalTBox& tbox) const {
  nlohmann::json j;
  j["types"] = nlohmann::json::array();
  for (const Mask t : types) j["types"].push_back(names_json(tbox, t));
  const auto edges = [&](const auto& list) {
    auto arr = nlohmann::json::array();
    for (const auto& e : list) arr.push_back({{"from", e.from}, {"role", tbox.role_to_string(e.role)}, {"to", e.to}});
    return arr;
  };
  j["gen"] = edges(gen);
  j["dep"] = edges(dep);
  j["bidep"] = edges(bidep);
  j["class_of"] = class_of;
  auto crit = nlohmann::json::array();
  for (std::size_t t = 0; t < critical.size(); ++t)
    if (critical[t]) crit.push_back(t);
  j["critical"] = crit;
  auto safe = nlohmann::json::array();
  for (const int c : safe_concepts) safe.push_back(tbox.concepts[c]);
  j["safe_concepts"] = safe;
  return j;
}

IfpGraph::IfpGraph(const HornReasoner& reasoner) : types_(reasoner.types()) {
  constexpr std::size_t kMaxIfpTypes = 1024;
  if (types_.size() > kMaxIfpTypes) throw BudgetExceeded("too many types for path analysis");
  const int n = static_cast<int>(types_.size());
  out_.assign(n, {});
  for (int i = 0; i < n; ++i)
    for (const IRole r : reasoner.all_roles()) {
      const auto& targets = reasoner.successors(types_[i], r);
      for (int j = 0; j < n; ++j) {
        const bool forced = std::any_of(targets.begin(), targets.end(), [&](Mask g) { return subset(types_[j], g); });
        if (!forced || !reasoner.entails_functionality(types_[j], r.inverse(), types_[i])) continue;
        edges_.push_back({i, r, j});
        out_[i].push_back({r, j});
      }
    }
  std::vector<std::vector<int>> succ(n);
  for (int i = 0; i < n; ++i) {
    for (const auto& [r, j] : out_[i]) succ[i].push_back(j);
    for (int j = 0; j < n; ++j)
      if (j != i && subset(types_[j], types_[i])) succ[i].push_back(j);
  }
  component_ = strongly_connected(succ);
}

std::vector<bool> IfpGraph::reaches_concept(int c) const {
  const int n = static_cast<int>(types_.size());
  std::vector<std::vector<int>> pred(n);
  for (const auto& e : edges_) pred[e.to].push_back(e.from);
  std::vector<bool> good(n, false);
  std::vector<int> queue;
  for (int i = 0; i < n; ++i)
    if (has(types_[i], c)) {
      good[i] = true;
      queue.push_back(i);
    }
  for (std::size_t k = 0; k < queue.size(); ++k)
    for (const int p : pred[queue[k]])
      if (!good[p]) {
        good[p] = true;
        queue.push_back(p);
      }
  return good;
}

std::vector<TypeEdge> IfpGraph::generating_edges(int c) const {
  const auto good = reaches_concept(c);
  std::set<int> good_components;
  for (std::size_t i = 0; i < types_.size(); ++i)
    if (good[i]) good_components.insert(component_[i]);
  std::vector<TypeEdge> out;
  for (const auto& e : edges_)
    if (component_[e.from] == component_[e.to] && good_components.contains(component_[e.from])) out.push_back(e);
  return out;
}

std::optional<std::vector<std::pair<IRole, int>>> IfpGraph::path(int from, int to, bool allow_weakening) const {
  const int n = static_cast<int>(types_.size());
  std::vector<std::optional<std::pair<IRole, int>>> via(n);  // step used to reach, with predecessor
  std::vector<bool> seen(n, false);
  seen[from] = true;
  std::deque<int> queue{from};
  while (!queue.empty() && !seen[to]) {
    const int u = queue.front();
    queue.pop_front();
    const auto visit = [&](IRole r, int v) {
      if (seen[v]) return;
      seen[v] = true;
      via[v] = std::pair{r, u};
      queue.push_back(v);
    };
    for (const auto& [r, v] : out_[u]) visit(r, v);
    if (allow_weakening)
      for (int v = 0; v < n; ++v)
        if (v != u && subset(types_[v], types_[u])) visit(IRole{kWeakening, false}, v);
  }
  if (!seen[to]) return std::nullopt;
  std::vector<std::pair<IRole, int>> steps;
  for (int v = to; v != from; v = via[v]->second) steps.push_back({via[v]->first, v});
  std::reverse(steps.begin(), steps.end());
  return steps;
}

TypeGraph build_type_graph(const HornReasoner& reasoner, const std::set<int>& safe_concepts) {
  TypeGraph g;
  g.types = reasoner.types();
  for (std::size_t i = 0; i < g.types.size(); ++i) g.index[g.types[i]] = static_cast<int>(i);
  g.safe_concepts = safe_concepts;
  const int n = static_cast<int>(g.types.size());
  for (int i = 0; i < n; ++i)
    for (const IRole r : reasoner.all_roles())
      for (const Mask target : reasoner.successors(g.types[i], r)) {
        const auto j = g.type_index(target);
        if (!j) throw InternalError("successor label is not a type");
        const TypeEdge e{i, r, *j};
        g.gen.push_back(e);
        if (reasoner.entails_functionality(target, r.inverse(), g.types[i])) g.dep.insert(e);
      }
  for (const auto& e : g.dep)
    if (g.dep.contains({e.to, e.role.inverse(), e.from})) g.bidep.insert(e);

  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  const std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  for (const auto& e : g.bidep) parent[find(e.from)] = find(e.to);
  std::map<int, int> class_id;
  g.class_of.assign(n, 0);
  for (int i = 0; i < n; ++i) {
    const auto [it, inserted] = class_id.try_emplace(find(i), static_cast<int>(class_id.size()));
    g.class_of[i] = it->second;
  }
  g.num_classes = static_cast<int>(class_id.size());
  auto& prec = g.precedes;
  prec.assign(g.num_classes, std::vector<bool>(g.num_classes, false));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && subset(g.types[j], g.types[i])) prec[g.class_of[i]][g.class_of[j]] = true;
  for (int k = 0; k < g.num_classes; ++k)
    for (int a = 0; a < g.num_classes; ++a)
      if (prec[a][k])
        for (int b = 0; b < g.num_classes; ++b)
          if (prec[k][b]) prec[a][b] = true;
  for (int p = 0; p < g.num_classes; ++p)
    if (prec[p][p]) throw PartialOrderViolation("type class order is not strict");

  g.critical.assign(n, false);
  if (!safe_concepts.empty()) {
    const IfpGraph ifp(reasoner);
    for (const int c : safe_concepts)
      for (const auto& e : ifp.generating_edges(c)) {
        g.critical[e.from] = true;
        g.critical[e.to] = true;
      }
  }
  return g;
}

nlohmann::json GeneratingCycle::to_json(const NormalTBox& tbox) const {
  nlohmann::json j;
  const auto masks = [&](const std::vector<Mask>& ms) {
    auto arr = nlohmann::json::array();
    for (const Mask m : ms) arr.push_back(names_json(tbox, m));
    return arr;
  };
  const auto roles_json = [&](const std::vector<IRole>& rs) {
    auto arr = nlohmann::json::array();
    for (const IRole r : rs) arr.push_back(tbox.role_to_string(r));
    return arr;
  };
  j["nodes"] = masks(nodes);
  j["roles"] = roles_json(roles);
  j["exit_nodes"] = masks(exit_nodes);
  j["exit_roles"] = roles_json(exit_roles);
  j["attach"] = attach;
  return j;
}

bool certify_ifp(const HornReasoner& reasoner, const std::vector<Mask>& nodes, const std::vector<IRole>& roles) {
  if (nodes.size() != roles.size() + 1) return false;
  for (std::size_t i = 0; i < roles.size(); ++i) {
    if (!reasoner.entails_exists(nodes[i], roles[i], nodes[i + 1])) return false;
    if (!reasoner.entails_functionality(nodes[i + 1], roles[i].inverse(), nodes[i])) return false;
  }
  return true;
}

bool certify_cycle(const HornReasoner& reasoner, const GeneratingCycle& cycle, int c) {
  if (cycle.nodes.size() < 2 || cycle.exit_nodes.empty()) return false;
  if (cycle.attach < 0 || cycle.attach >= static_cast<int>(cycle.nodes.size())) return false;
  return certify_ifp(reasoner, cycle.nodes, cycle.roles) &&
         reasoner.entails_subsumption(cycle.nodes.back(), cycle.nodes.front()) &&
         certify_ifp(reasoner, cycle.exit_nodes, cycle.exit_roles) &&
         reasoner.entails_subsumption(cycle.nodes[cycle.attach], cycle.exit_nodes.front()) &&
         reasoner.entails_subsumption(cycle.exit_nodes.back(), bit(c));
}

std::vector<GeneratingCycle> find_generating_cycles(const HornReasoner& reasoner, int c, std::size_t max_cycles) {
  const IfpGraph graph(reasoner);
  const auto& types = graph.types();
  const auto good = graph.reaches_concept(c);
  std::vector<GeneratingCycle> out;
  for (const auto& e : graph.generating_edges(c)) {
    if (out.size() >= max_cycles) break;
    std::optional<int> g;
    if (good[e.to]) g = e.to;
    for (std::size_t k = 0; k < types.size() && !g; ++k)
      if (good[k] && graph.path(e.to, static_cast<int>(k), true) && graph.path(static_cast<int>(k), e.from, true))
        g = static_cast<int>(k);
    if (!g) continue;
    std::vector<std::pair<IRole, int>> steps{{e.role, e.to}};
    const auto p1 = graph.path(e.to, *g, true);
    const auto p2 = graph.path(*g, e.from, true);
    steps.insert(steps.end(), p1->begin(), p1->end());
    const std::size_t attach_step = steps.size();  // step arriving at g (0 means e.to)
    steps.insert(steps.end(), p2->begin(), p2->end());

    // A weakening followed by a path step is itself a path step from the
    // stronger type; a final weakening closes the cycle.
    GeneratingCycle cyc;
    cyc.nodes.push_back(types[e.from]);
    cyc.attach = -1;
    for (std::size_t k = 0; k < steps.size(); ++k) {
      const auto& [r, v] = steps[k];
      if (r.id != kWeakening) {
        cyc.nodes.push_back(types[v]);
        cyc.roles.push_back(r);
      }
      if (k + 1 == attach_step) cyc.attach = static_cast<int>(cyc.nodes.size()) - 1;
    }
    if (cyc.attach < 0) cyc.attach = 1;
    const Mask anchor = cyc.nodes[cyc.attach];
    const auto anchor_index = std::find(types.begin(), types.end(), anchor) - types.begin();
    if (has(anchor, c)) {
      cyc.exit_nodes = {anchor};
    } else {
      std::optional<std::vector<std::pair<IRole, int>>> exit;
      for (std::size_t k = 0; k < types.size() && !exit; ++k)
        if (has(types[k], c)) exit = graph.path(static_cast<int>(anchor_index), static_cast<int>(k), false);
      if (!exit) continue;
      cyc.exit_nodes = {anchor};
      for (const auto& [r, v] : *exit) {
        cyc.exit_nodes.push_back(types[v]);
        cyc.exit_roles.push_back(r);
      }
    }
    if (!certify_cycle(reasoner, cyc, c)) throw InternalError("generating cycle failed certification");
    out.push_back(std::move(cyc));
  }
  return out;
}

Reversal reversal_axioms(const HornReasoner& reasoner, const IfpGraph& graph, int c) {
  Reversal out;
  const auto& types = graph.types();
  for (const auto& e : graph.generating_edges(c)) {
    const Mask from = types[e.from];
    const Mask to = types[e.to];
    if (!reasoner.entails_exists(to, e.role.inverse(), from)) out.exists.insert({to, e.role.inverse(), from});
    if (!reasoner.entails_functionality(from, e.role, to)) out.functs.insert({from, e.role, to});
  }
  return out;
}

NormalTBox revert_cycles(const NormalTBox& tbox, int c, std::uint64_t max_steps) {
  NormalTBox current = tbox;
  while (true) {
    const HornReasoner reasoner(current, max_steps);
    const IfpGraph graph(reasoner);
    const auto rev = reversal_axioms(reasoner, graph, c);
    if (rev.empty()) return current;
    current.exists_right.insert(rev.exists.begin(), rev.exists.end());
    current.functs.insert(rev.functs.begin(), rev.functs.end());
  }
}

bool is_safe(const HornReasoner& reasoner, const IfpGraph& graph, int c) {
  return reversal_axioms(reasoner, graph, c).empty();
}

bool is_safe(const HornReasoner& reasoner, int c) { return is_safe(reasoner, IfpGraph(reasoner), c); }

bool finite_extension_possible(const KB& kb, const std::string& c, std::uint64_t max_steps) {
  const HornKB h = prepare_horn(kb);
  const auto id = h.tbox.concept_id(c);
  if (!id) return chase(h.tbox, h.abox, max_steps).satisfiable;
  return chase(revert_cycles(h.tbox, *id, max_steps), h.abox, max_steps).satisfiable;
}

RoleReversion revert_role(const NormalTBox& tbox, int role, std::uint64_t max_steps) {
  RoleReversion out{tbox, 0, 0};
  std::set<std::string> taken(tbox.concepts.begin(), tbox.concepts.end());
  taken.insert(tbox.roles.begin(), tbox.roles.end());
  const std::string base = "_q_" + tbox.roles.at(role);
  const auto domain_name = fresh_name(base + "_dom", taken);
  taken.insert(domain_name);
  const auto range_name = fresh_name(base + "_ran", taken);
  out.domain_concept = out.tbox.add_concept(domain_name);
  out.range_concept = out.tbox.add_concept(range_name);
  const Role named{tbox.roles.at(role), false};
  out.tbox.definitions.emplace(out.domain_concept, Concept::exists(named, Concept::top()));
  out.tbox.definitions.emplace(out.range_concept, Concept::exists(named.inv(), Concept::top()));
  const IRole r{role, false};
  out.tbox.exists_right.insert({bit(out.domain_concept), r, 0});
  out.tbox.exists_left.insert({r, 0, out.domain_concept});
  out.tbox.exists_right.insert({bit(out.range_concept), r.inverse(), 0});
  out.tbox.exists_left.insert({r.inverse(), 0, out.range_concept});
  while (true) {
    const std::size_t before = out.tbox.size();
    out.tbox = revert_cycles(out.tbox, out.domain_concept, max_steps);
    out.tbox = revert_cycles(out.tbox, out.range_concept, max_steps);
    if (out.tbox.size() == before) return out;
  }
}

Completion build_ils(const HornKB& kb, const IlsOptions& options) {
  CompletionBuilder builder(kb, options, false);
  auto raw = builder.run();
  return finish(kb.tbox, std::move(raw), builder.graph(), options.max_steps);
}

Completion build_ils(const KB& kb, const IlsOptions& options) { return build_ils(prepare_horn(kb), options); }

Completion build_preils(const HornKB& kb, const IlsOptions& options) {
  CompletionBuilder builder(kb, options, true);
  auto raw = builder.run();
  return finish(kb.tbox, std::move(raw), builder.graph(), options.max_steps);
}

bool verify_certificate(const HornReasoner& reasoner, const TypeGraph& graph, const Completion& completion) {
  CleanChecker checker(reasoner, graph);
  const auto& tbox = reasoner.tbox();
  for (const auto& ob : completion.certificate.pending) {
    if (ob.element < 0 || ob.element >= static_cast<int>(completion.element_types.size())) return false;
    const Mask parent = completion.element_types[ob.element];
    const auto role = tbox.role_id(ob.role.name);
    if (!role) return false;
    const IRole r{*role, ob.role.inverse};
    const Mask child = tbox.mask_of(ob.type);
    const auto res = chase_descriptor(tbox, parent, r, child, reasoner.max_steps());
    if (!res.satisfiable) return false;
    if (res.nodes[*res.node_of("p")].label != parent || res.nodes[*res.node_of("c")].label != child) return false;
    const auto pi = graph.type_index(parent);
    const auto ci = graph.type_index(child);
    if (!pi || !ci) return false;
    if (!ob.anchored && !checker.clean(*pi, r, *ci)) return false;
  }
  return true;
}

namespace {

// Runs the builder and keeps the raw data needed for gluing completions.
RawCompletion raw_completion(const HornKB& kb, const IlsOptions& options, bool pre) {
  CompletionBuilder builder(kb, options, pre);
  return builder.run();
}

}  // namespace

ModelPair plus_one_concept(const KB& kb, const std::string& c, const IlsOptions& options) {
  HornKB h = prepare_horn(kb);
  int cid = 0;
  if (const auto id = h.tbox.concept_id(c))
    cid = *id;
  else
    cid = h.tbox.add_concept(c);
  const NormalTBox tc = revert_cycles(h.tbox, cid, options.max_steps);
  const HornKB hc{tc, h.abox};
  if (!chase(h.tbox, h.abox, options.max_steps).satisfiable) throw UnsatisfiableKB("knowledge base is unsatisfiable");
  if (!chase(tc, h.abox, options.max_steps).satisfiable)
    throw NoFiniteExtension("the concept has no finite extension in any model");
  HornABox seeded = h.abox;
  std::set<std::string> taken(h.abox.individuals.begin(), h.abox.individuals.end());
  const auto seed_name = fresh_name("_seed_a", taken);
  seeded.add(seed_name, bit(cid));
  if (!chase(tc, seeded, options.max_steps).satisfiable)
    throw NoFiniteExtension("no model extends the concept by one more element");

  ModelPair out;
  out.reference = reference_kb(tc, kb);
  const bool has_bottom = std::any_of(tc.clauses.begin(), tc.clauses.end(), [](const NClause& cl) { return cl.rhs == 0; });
  if (!has_bottom) {
    IlsOptions pruned = options;
    pruned.prune = true;
    RawCompletion first = raw_completion(hc, pruned, false);
    RawCompletion second = first;
    std::set<std::string> labels(first.model.labels.begin(), first.model.labels.end());
    const int u = second.model.add_element(fresh_name("_u", labels));
    for (const auto& name : tc.concepts) second.model.add_concept(name, u);
    for (const auto& name : tc.roles) second.model.add_edge(name, u, u);
    second.types.push_back(tc.all_concepts());
    out.first = counted(tc, first, first.model.concept_count(c), options.max_steps);
    out.second = counted(tc, second, second.model.concept_count(c), options.max_steps);
    return out;
  }

  RawCompletion first = raw_completion(hc, options, false);
  HornKB seed_kb{tc, {}};
  seed_kb.abox.add(seed_name, bit(cid));
  const RawCompletion pre = raw_completion(seed_kb, options, true);
  RawCompletion joined = first;
  append(joined, pre);
  std::vector<PendingOb> pending;
  for (const auto& p : joined.pending) {
    if (!p.anchored) {
      pending.push_back(p);
      continue;
    }
    int link = -1;
    for (int e = 0; e < first.model.size() && link < 0; ++e)
      if (first.types[e] == p.type) link = e;
    if (link < 0) throw InternalError("no element of the anchored type");
    const std::string& role = tc.roles[p.role.id];
    if (p.role.inv)
      joined.model.add_edge(role, link, p.element);
    else
      joined.model.add_edge(role, p.element, link);
  }
  joined.pending = std::move(pending);
  out.first = counted(tc, first, first.model.concept_count(c), options.max_steps);
  out.second = counted(tc, joined, joined.model.concept_count(c), options.max_steps);
  return out;
}

ModelPair role_plus_one(const KB& kb, const std::string& r, const IlsOptions& options) {
  HornKB h = prepare_horn(kb);
  int rid = 0;
  if (const auto id = h.tbox.role_id(r))
    rid = *id;
  else
    rid = h.tbox.add_role(r);
  {
    const HornReasoner base(h.tbox, options.max_steps);
    if (base.entails_functionality(0, {rid, false}, 0) || base.entails_functionality(0, {rid, true}, 0))
      throw FunctionalRole("role is functional or inverse functional");
  }
  const auto rev = revert_role(h.tbox, rid, options.max_steps);
  const NormalTBox& tr = rev.tbox;
  IlsOptions pruned = options;
  pruned.prune = true;
  RawCompletion first = raw_completion({tr, h.abox}, pruned, false);

  std::set<std::string> taken(h.abox.individuals.begin(), h.abox.individuals.end());
  HornKB with_domain{tr, {}};
  with_domain.abox.add(fresh_name("_seed_a", taken), bit(rev.domain_concept));
  HornKB with_range{tr, {}};
  with_range.abox.add(fresh_name("_seed_b", taken), bit(rev.range_concept));
  if (!chase(tr, with_domain.abox, options.max_steps).satisfiable ||
      !chase(tr, with_range.abox, options.max_steps).satisfiable)
    throw NoFiniteExtension("role cannot be extended by one more pair");
  const RawCompletion left = raw_completion(with_domain, pruned, false);
  const RawCompletion right = raw_completion(with_range, pruned, false);
  RawCompletion joined = first;
  const int left_offset = append(joined, left);
  const int right_offset = append(joined, right);

  ModelPair out;
  out.reference = reference_kb(tr, kb);
  out.first = counted(tr, joined, joined.model.role_count(r), options.max_steps);
  const auto cert = make_certificate(tr, joined, options.max_steps);
  for (int x = left_offset; x < right_offset; ++x) {
    if (!has(joined.types[x], rev.domain_concept)) continue;
    for (int y = right_offset; y < joined.model.size(); ++y) {
      if (!has(joined.types[y], rev.range_concept)) continue;
      Interpretation candidate = joined.model;
      candidate.add_edge(r, x, y);
      if (!is_model(candidate, out.reference, &cert)) continue;
      out.second = {std::move(candidate), cert, 0};
      out.second.count = out.second.model.role_count(r);
      return out;
    }
  }
  throw InternalError("no pair extends the role by one");
}

Interpretation duplicate_plus_one(const Interpretation& i, const std::string& r, const KB& kb) {
  const auto it = i.roles.find(r);
  if (it == i.roles.end() || it->second.empty()) throw DomainError("role has no pair to duplicate");
  Interpretation out = disjoint_union(i, i, kb);
  const auto [u, v] = *it->second.begin();
  out.add_edge(r, u, v + i.size());
  return out;
}

}  // namespace spectra
