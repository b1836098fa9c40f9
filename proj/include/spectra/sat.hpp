#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace spectra {

// Literal encoding: variable v positive is 2v, negative is 2v+1.
using Lit = int;
inline Lit pos(int v) { return 2 * v; }
inline Lit neg(int v) { return 2 * v + 1; }
inline Lit negate_lit(Lit l) { return l ^ 1; }
inline int var_of(Lit l) { return l >> 1; }

// Conflict-driven clause learning solver with two watched literals, first
// UIP learning, VSIDS branching, phase saving and Luby restarts.
class SatSolver {
 public:
  int new_var();
  int num_vars() const { return static_cast<int>(assign_.size()); }
  std::size_t num_clauses() const { return clauses_.size(); }
  // Returns false if the clause set became trivially unsatisfiable.
  bool add_clause(std::vector<Lit> lits);

  // Decides satisfiability under the given assumptions. Throws
  // BudgetExceeded once more than max_conflicts conflicts were analysed.
  bool solve(const std::vector<Lit>& assumptions = {}, std::uint64_t max_conflicts = 10'000'000);
  // Value of a variable in the last model.
  bool value(int v) const { return model_.at(v); }
  std::uint64_t conflicts() const { return conflicts_; }

 private:
  struct Clause {
    std::vector<Lit> lits;
    bool learnt = false;
  };
  static constexpr std::int8_t kUnset = -1;
  static constexpr std::int8_t kFalse = 0;
  static constexpr std::int8_t kTrue = 1;

  std::int8_t lit_value(Lit l) const {
    const auto a = assign_[var_of(l)];
    return a == kUnset ? kUnset : static_cast<std::int8_t>(a ^ (l & 1));
  }
  void enqueue(Lit l, int reason);
  int propagate();
  void analyze(int conflict, std::vector<Lit>& learnt, int& backtrack_level);
  void backtrack(int level);
  int pick_branch();
  void bump(int v);
  void decay() { activity_inc_ *= 1.0 / 0.95; }
  void heap_insert(int v);
  void heap_up(int i);
  void heap_down(int i);
  int heap_pop();
  int attach(std::vector<Lit> lits, bool learnt);
  int level() const { return static_cast<int>(trail_lim_.size()); }

  std::vector<Clause> clauses_;
  std::vector<std::vector<int>> watches_;  // literal -> clause ids watching its negation
  std::vector<std::int8_t> assign_;
  std::vector<int> level_;
  std::vector<int> reason_;
  std::vector<bool> phase_;
  std::vector<double> activity_;
  std::vector<int> heap_;
  std::vector<int> heap_pos_;
  std::vector<Lit> trail_;
  std::vector<int> trail_lim_;
  std::vector<bool> seen_;
  std::vector<bool> model_;
  std::size_t qhead_ = 0;
  double activity_inc_ = 1.0;
  std::uint64_t conflicts_ = 0;
  bool unsat_ = false;
};

}  // namespace spectra
