#include "spectra/sat.hpp"

#include <algorithm>

#include "spectra/errors.hpp"

namespace spectra {

namespace {

// Luby sequence 1,1,2,1,1,2,4,... (1-based index).
std::uint64_t luby(std::uint64_t i) {
  std::uint64_t k = 1;
  while ((std::uint64_t{1} << k) - 1 < i) ++k;
  while (true) {
    if (i == (std::uint64_t{1} << k) - 1) return std::uint64_t{1} << (k - 1);
    i -= (std::uint64_t{1} << (k - 1)) - 1;
    k = 1;
    while ((std::uint64_t{1} << k) - 1 < i) ++k;
  }
}

}  // namespace

int SatSolver::new_var() {
  const int v = num_vars();
  assign_.push_back(kUnset);
  level_.push_back(0);
  reason_.push_back(-1);
  phase_.push_back(false);
  activity_.push_back(0.0);
  seen_.push_back(false);
  heap_pos_.push_back(-1);
  watches_.emplace_back();
  watches_.emplace_back();
  heap_insert(v);
  return v;
}

int SatSolver::attach(std::vector<Lit> lits, bool learnt) {
  const int id = static_cast<int>(clauses_.size());
  watches_[lits[0]].push_back(id);
  watches_[lits[1]].push_back(id);
  clauses_.push_back({std::move(lits), learnt});
  return id;
}

bool SatSolver::add_clause(std::vector<Lit> lits) {
  if (unsat_) return false;
  backtrack(0);
  std::sort(lits.begin(), lits.end());
  lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
  std::vector<Lit> kept;
  for (std::size_t k = 0; k < lits.size(); ++k) {
    if (k + 1 < lits.size() && lits[k + 1] == negate_lit(lits[k])) return true;
    const auto v = lit_value(lits[k]);
    if (v == kTrue) return true;
    if (v == kUnset) kept.push_back(lits[k]);
  }
  if (kept.empty()) {
    unsat_ = true;
    return false;
  }
  if (kept.size() == 1) {
    enqueue(kept[0], -1);
    if (propagate() >= 0) unsat_ = true;
    return !unsat_;
  }
  attach(std::move(kept), false);
  return true;
}

void SatSolver::enqueue(Lit l, int reason) {
  const int v = var_of(l);
  assign_[v] = static_cast<std::int8_t>((l & 1) ? kFalse : kTrue);
  level_[v] = level();
  reason_[v] = reason;
  trail_.push_back(l);
}

int SatSolver::propagate() {
  while (qhead_ < trail_.size()) {
    const Lit p = trail_[qhead_++];
    const Lit false_lit = negate_lit(p);
    auto& ws = watches_[false_lit];
    std::size_t keep = 0;
    for (std::size_t k = 0; k < ws.size(); ++k) {
      const int cid = ws[k];
      auto& lits = clauses_[cid].lits;
      if (lits[0] == false_lit) std::swap(lits[0], lits[1]);
      if (lit_value(lits[0]) == kTrue) {
        ws[keep++] = cid;
        continue;
      }
      bool moved = false;
      for (std::size_t j = 2; j < lits.size(); ++j)
        if (lit_value(lits[j]) != kFalse) {
          std::swap(lits[1], lits[j]);
          watches_[lits[1]].push_back(cid);
          moved = true;
          break;
        }
      if (moved) continue;
      ws[keep++] = cid;
      if (lit_value(lits[0]) == kFalse) {
        for (std::size_t j = k + 1; j < ws.size(); ++j) ws[keep++] = ws[j];
        ws.resize(keep);
        qhead_ = trail_.size();
        return cid;
      }
      enqueue(lits[0], cid);
    }
    ws.resize(keep);
  }
  return -1;
}

void SatSolver::analyze(int conflict, std::vector<Lit>& learnt, int& backtrack_level) {
  learnt.assign(1, 0);
  int pending = 0;
  Lit p = -1;
  std::size_t index = trail_.size();
  int cid = conflict;
  do {
    const auto& lits = clauses_[cid].lits;
    for (std::size_t j = (p == -1 ? 0 : 1); j < lits.size(); ++j) {
      const int v = var_of(lits[j]);
      if (seen_[v] || level_[v] == 0) continue;
      seen_[v] = true;
      bump(v);
      if (level_[v] == level())
        ++pending;
      else
        learnt.push_back(lits[j]);
    }
    while (!seen_[var_of(trail_[--index])]) {
    }
    p = trail_[index];
    cid = reason_[var_of(p)];
    seen_[var_of(p)] = false;
    --pending;
    if (pending > 0 && cid >= 0) {
      // Make sure the implied literal sits in front of its reason clause.
      auto& rl = clauses_[cid].lits;
      if (rl[0] != p) std::swap(*std::find(rl.begin(), rl.end(), p), rl[0]);
    }
  } while (pending > 0);
  learnt[0] = negate_lit(p);

  backtrack_level = 0;
  std::size_t max_k = 1;
  for (std::size_t k = 1; k < learnt.size(); ++k) {
    if (level_[var_of(learnt[k])] > backtrack_level) {
      backtrack_level = level_[var_of(learnt[k])];
      max_k = k;
    }
  }
  if (learnt.size() > 1) std::swap(learnt[1], learnt[max_k]);
  for (const Lit l : learnt) seen_[var_of(l)] = false;
}

void SatSolver::backtrack(int lvl) {
  if (level() <= lvl) return;
  for (std::size_t k = trail_.size(); k-- > static_cast<std::size_t>(trail_lim_[lvl]);) {
    const int v = var_of(trail_[k]);
    phase_[v] = assign_[v] == kTrue;
    assign_[v] = kUnset;
    reason_[v] = -1;
    if (heap_pos_[v] < 0) heap_insert(v);
  }
  trail_.resize(trail_lim_[lvl]);
  trail_lim_.resize(lvl);
  qhead_ = trail_.size();
}

void SatSolver::bump(int v) {
  activity_[v] += activity_inc_;
  if (activity_[v] > 1e100) {
    for (auto& a : activity_) a *= 1e-100;
    activity_inc_ *= 1e-100;
  }
  if (heap_pos_[v] >= 0) heap_up(heap_pos_[v]);
}

void SatSolver::heap_insert(int v) {
  heap_pos_[v] = static_cast<int>(heap_.size());
  heap_.push_back(v);
  heap_up(heap_pos_[v]);
}

void SatSolver::heap_up(int i) {
  const int v = heap_[i];
  while (i > 0) {
    const int parent = (i - 1) / 2;
    if (activity_[heap_[parent]] >= activity_[v]) break;
    heap_[i] = heap_[parent];
    heap_pos_[heap_[i]] = i;
    i = parent;
  }
  heap_[i] = v;
  heap_pos_[v] = i;
}

void SatSolver::heap_down(int i) {
  const int v = heap_[i];
  const int n = static_cast<int>(heap_.size());
  while (true) {
    int child = 2 * i + 1;
    if (child >= n) break;
    if (child + 1 < n && activity_[heap_[child + 1]] > activity_[heap_[child]]) ++child;
    if (activity_[heap_[child]] <= activity_[v]) break;
    heap_[i] = heap_[child];
    heap_pos_[heap_[i]] = i;
    i = child;
  }
  heap_[i] = v;
  heap_pos_[v] = i;
}

int SatSolver::heap_pop() {
  const int top = heap_.front();
  heap_pos_[top] = -1;
  const int last = heap_.back();
  heap_.pop_back();
  if (!heap_.empty()) {
    heap_[0] = last;
    heap_pos_[last] = 0;
    heap_down(0);
  }
  return top;
}

int SatSolver::pick_branch() {
  while (!heap_.empty()) {
    const int v = heap_pop();
    if (assign_[v] == kUnset) return v;
  }
  return -1;
}

bool SatSolver::solve(const std::vector<Lit>& assumptions, std::uint64_t max_conflicts) {
  if (unsat_) return false;
  backtrack(0);
  if (propagate() >= 0) {
    unsat_ = true;
    return false;
  }
  std::uint64_t restart_index = 1;
  std::uint64_t until_restart = 100 * luby(restart_index);
  const std::uint64_t start = conflicts_;
  std::vector<Lit> learnt;
  while (true) {
    const int conflict = propagate();
    if (conflict >= 0) {
      ++conflicts_;
      if (conflicts_ - start > max_conflicts) {
        backtrack(0);
        throw BudgetExceeded("SAT conflict budget exhausted");
      }
      if (level() == 0) {
        unsat_ = true;
        return false;
      }
      int bt = 0;
      analyze(conflict, learnt, bt);
      backtrack(bt);
      if (learnt.size() == 1) {
        enqueue(learnt[0], -1);
      } else {
        const int cid = attach(learnt, true);
        enqueue(learnt[0], cid);
      }
      decay();
      if (--until_restart == 0) {
        until_restart = 100 * luby(++restart_index);
        backtrack(0);
      }
      continue;
    }
    // Re-establish assumptions first, one decision level each.
    if (level() < static_cast<int>(assumptions.size())) {
      const Lit a = assumptions[level()];
      const auto v = lit_value(a);
      if (v == kFalse) {
        backtrack(0);
        return false;
      }
      trail_lim_.push_back(static_cast<int>(trail_.size()));
      if (v == kUnset) enqueue(a, -1);
      continue;
    }
    const int v = pick_branch();
    if (v < 0) {
      model_.assign(assign_.size(), false);
      for (std::size_t k = 0; k < assign_.size(); ++k) model_[k] = assign_[k] == kTrue;
      backtrack(0);
      return true;
    }
    trail_lim_.push_back(static_cast<int>(trail_.size()));
    enqueue(phase_[v] ? pos(v) : neg(v), -1);
  }
}

}  // namespace spectra
