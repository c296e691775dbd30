#pragma once

#include <vector>

#include "derham/linalg.hpp"

namespace derham {

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  double value = 0.0;
  Vector x;
};

// min c'x  s.t.  a_eq x = b_eq,  a_ub x <= b_ub,  x_i >= 0 for flagged i.
// Empty nonneg means all variables free. Desk-scale dense solver.
struct LpProblem {
  Vector c;
  Matrix a_eq;
  Vector b_eq;
  Matrix a_ub;
  Vector b_ub;
  std::vector<bool> nonneg;
};

LpResult solve_lp(const LpProblem& p);

inline bool lp_feasible(LpProblem p) {
  p.c = Vector::Zero(p.c.size());
  return solve_lp(p).status == LpStatus::optimal;
}

}  // namespace derham
