#include <doctest.h>

#include <random>

#include "spectra/errors.hpp"
#include "spectra/sat.hpp"

using namespace spectra;

namespace {

using Cnf = std::vector<std::vector<Lit>>;

bool brute_force(int vars, const Cnf& cnf) {
  for (std::uint32_t m = 0; m < (1U << vars); ++m) {
    bool all = true;
    for (const auto& c : cnf) {
      bool any = false;
      for (const Lit l : c) any = any || (((m >> var_of(l)) & 1U) != static_cast<unsigned>(l & 1));
      if (!any) {
        all = false;
        break;
      }
    }
    if (all) return true;
  }
  return false;
}

bool satisfies(const SatSolver& s, const Cnf& cnf) {
  for (const auto& c : cnf) {
    bool any = false;
    for (const Lit l : c) any = any || (s.value(var_of(l)) != static_cast<bool>(l & 1));
    if (!any) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("random formulas agree with truth tables") {
  std::mt19937 rng(11);
  int sat_count = 0;
  for (int iter = 0; iter < 400; ++iter) {
    const int vars = 3 + static_cast<int>(rng() % 10);
    const int clauses = static_cast<int>(vars * (3 + rng() % 3));
    Cnf cnf;
    SatSolver s;
    for (int v = 0; v < vars; ++v) s.new_var();
    for (int c = 0; c < clauses; ++c) {
      std::vector<Lit> lits;
      const int width = 1 + static_cast<int>(rng() % 3);
      for (int k = 0; k < width; ++k) {
        const int v = static_cast<int>(rng() % vars);
        lits.push_back(rng() % 2 ? pos(v) : neg(v));
      }
      cnf.push_back(lits);
      s.add_clause(lits);
    }
    const bool expected = brute_force(vars, cnf);
    const bool got = s.solve();
    CHECK(got == expected);
    if (got) {
      ++sat_count;
      CHECK(satisfies(s, cnf));
    }
  }
  CHECK(sat_count > 0);
  CHECK(sat_count < 400);
}

TEST_CASE("pigeonhole formulas are refuted") {
  for (int holes = 1; holes <= 6; ++holes) {
    const int pigeons = holes + 1;
    SatSolver s;
    std::vector<std::vector<int>> x(pigeons, std::vector<int>(holes));
    for (auto& row : x)
      for (auto& v : row) v = s.new_var();
    for (int p = 0; p < pigeons; ++p) {
      std::vector<Lit> c;
      for (int h = 0; h < holes; ++h) c.push_back(pos(x[p][h]));
      s.add_clause(c);
    }
    for (int h = 0; h < holes; ++h)
      for (int p = 0; p < pigeons; ++p)
        for (int q = p + 1; q < pigeons; ++q) s.add_clause({neg(x[p][h]), neg(x[q][h])});
    CHECK_FALSE(s.solve());
  }
}

TEST_CASE("assumptions are temporary") {
  SatSolver s;
  const int a = s.new_var();
  const int b = s.new_var();
  s.add_clause({neg(a), pos(b)});
  CHECK(s.solve({pos(a), neg(b)}) == false);
  CHECK(s.solve({pos(a)}));
  CHECK(s.value(b));
  CHECK(s.solve({neg(b)}));
  CHECK_FALSE(s.value(a));
}

TEST_CASE("conflict budget") {
  SatSolver s;
  const int holes = 9;
  std::vector<std::vector<int>> x(holes + 1, std::vector<int>(holes));
  for (auto& row : x)
    for (auto& v : row) v = s.new_var();
  for (int p = 0; p <= holes; ++p) {
    std::vector<Lit> c;
    for (int h = 0; h < holes; ++h) c.push_back(pos(x[p][h]));
    s.add_clause(c);
  }
  for (int h = 0; h < holes; ++h)
    for (int p = 0; p <= holes; ++p)
      for (int q = p + 1; q <= holes; ++q) s.add_clause({neg(x[p][h]), neg(x[q][h])});
  CHECK_THROWS_AS(s.solve({}, 50), BudgetExceeded);
}
