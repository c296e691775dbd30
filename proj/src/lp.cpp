#include "derham/lp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace derham {

namespace {

constexpr double kCostEps = 1e-9;
constexpr double kPivotEps = 1e-11;
constexpr double kFeasEps = 1e-7;

// Dense tableau simplex on  min c'x, Ax = b, x >= 0  with Bland's rule.
class Simplex {
 public:
  Simplex(const Matrix& a, const Vector& b, const Vector& c)
      : m_(static_cast<int>(a.rows())), n_(static_cast<int>(a.cols())), cost_(c) {
    tab_.setZero(m_, n_ + m_ + 1);
    tab_.leftCols(n_) = a;
    tab_.col(n_ + m_) = b;
    for (int i = 0; i < m_; ++i) {
      if (tab_(i, n_ + m_) < 0) tab_.row(i) = -tab_.row(i);
    }
    tab_.middleCols(n_, m_) = Matrix::Identity(m_, m_);
    basis_.resize(m_);
    for (int i = 0; i < m_; ++i) basis_[i] = n_ + i;
  }

  LpResult run() {
    // phase 1: minimize the artificial sum
    Eigen::RowVectorXd z = Eigen::RowVectorXd::Zero(n_ + m_ + 1);
    for (int i = 0; i < m_; ++i) z -= tab_.row(i);
    z.segment(n_, m_).setZero();
    iterate(z, n_ + m_, true);
    if (-z(n_ + m_) > kFeasEps) return {LpStatus::infeasible, 0.0, Vector()};
    drive_out_artificials();

    // phase 2 on the original columns
    z.setZero();
    z.head(n_) = cost_.transpose();
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < n_) z -= cost_[basis_[i]] * tab_.row(i);
    }
    z.segment(n_, m_).setZero();  // artificials stay out
    if (!iterate(z, n_, false)) return {LpStatus::unbounded, 0.0, Vector()};

    Vector x = Vector::Zero(n_);
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < n_) x[basis_[i]] = tab_(i, n_ + m_);
    }
    return {LpStatus::optimal, cost_.dot(x), x};
  }

 private:
  // Bland pivoting until optimal (true) or unbounded (false); columns >= limit
  // excluded. Phase 1 is bounded below by zero, so a column without a pivot
  // row there is roundoff noise in the reduced cost and is skipped.
  bool iterate(Eigen::RowVectorXd& z, int limit, bool phase1) {
    const long cap = 2000L + 200L * (m_ + n_);
    for (long it = 0; it < cap; ++it) {
      int enter = -1, leave = -1;
      for (int j = 0; j < limit; ++j) {
        if (z(j) >= -kCostEps) continue;
        int row = -1;
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < m_; ++i) {
          const double a = tab_(i, j);
          if (a > kPivotEps) {
            const double ratio = tab_(i, n_ + m_) / a;
            if (ratio < best - kPivotEps ||
                (ratio < best + kPivotEps && (row < 0 || basis_[i] < basis_[row]))) {
              best = ratio;
              row = i;
            }
          }
        }
        if (row >= 0) {
          enter = j;
          leave = row;
          break;
        }
        if (!phase1) return false;
      }
      if (enter < 0) return true;
      pivot(leave, enter, z);
    }
    throw std::runtime_error("simplex: iteration cap hit");
  }

  void pivot(int row, int col, Eigen::RowVectorXd& z) {
    tab_.row(row) /= tab_(row, col);
    for (int i = 0; i < m_; ++i) {
      if (i != row && std::abs(tab_(i, col)) > 0) {
        tab_.row(i) -= tab_(i, col) * tab_.row(row);
      }
    }
    z -= z(col) * tab_.row(row);
    basis_[row] = col;
  }

  // basic artificials sit at value 0 after a feasible phase 1; swap them for a
  // real column when possible, otherwise the row is redundant and is zeroed
  void drive_out_artificials() {
    Eigen::RowVectorXd dummy = Eigen::RowVectorXd::Zero(n_ + m_ + 1);
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < n_) continue;
      int col = -1;
      for (int j = 0; j < n_; ++j) {
        if (std::abs(tab_(i, j)) > 1e-8) { col = j; break; }
      }
      if (col >= 0) {
        pivot(i, col, dummy);
      } else {
        tab_.row(i).setZero();  // redundant constraint
      }
    }
  }

  int m_, n_;
  Vector cost_;
  Matrix tab_;
  std::vector<int> basis_;
};

}  // namespace

LpResult solve_lp(const LpProblem& p) {
  const int n = static_cast<int>(p.c.size());
  const int me = static_cast<int>(p.b_eq.size());
  const int mu = static_cast<int>(p.b_ub.size());
  std::vector<bool> nonneg = p.nonneg;
  if (nonneg.empty()) nonneg.assign(static_cast<std::size_t>(n), false);

  // standard form: split free variables, add slacks
  std::vector<int> pos(static_cast<std::size_t>(n)), neg(static_cast<std::size_t>(n), -1);
  int cols = 0;
  for (int j = 0; j < n; ++j) {
    pos[static_cast<std::size_t>(j)] = cols++;
    if (!nonneg[static_cast<std::size_t>(j)]) neg[static_cast<std::size_t>(j)] = cols++;
  }
  const int slack0 = cols;
  cols += mu;

  Matrix a = Matrix::Zero(me + mu, cols);
  Vector b(me + mu);
  Vector c = Vector::Zero(cols);
  for (int j = 0; j < n; ++j) {
    c[pos[static_cast<std::size_t>(j)]] = p.c[j];
    if (neg[static_cast<std::size_t>(j)] >= 0) c[neg[static_cast<std::size_t>(j)]] = -p.c[j];
  }
  for (int i = 0; i < me; ++i) {
    for (int j = 0; j < n; ++j) {
      a(i, pos[static_cast<std::size_t>(j)]) = p.a_eq(i, j);
      if (neg[static_cast<std::size_t>(j)] >= 0) a(i, neg[static_cast<std::size_t>(j)]) = -p.a_eq(i, j);
    }
    b[i] = p.b_eq[i];
  }
  for (int i = 0; i < mu; ++i) {
    for (int j = 0; j < n; ++j) {
      a(me + i, pos[static_cast<std::size_t>(j)]) = p.a_ub(i, j);
      if (neg[static_cast<std::size_t>(j)] >= 0) a(me + i, neg[static_cast<std::size_t>(j)]) = -p.a_ub(i, j);
    }
    a(me + i, slack0 + i) = 1.0;
    b[me + i] = p.b_ub[i];
  }

  LpResult r = Simplex(a, b, c).run();
  if (r.status != LpStatus::optimal) return r;
  Vector x(n);
  for (int j = 0; j < n; ++j) {
    x[j] = r.x[pos[static_cast<std::size_t>(j)]];
    if (neg[static_cast<std::size_t>(j)] >= 0) x[j] -= r.x[neg[static_cast<std::size_t>(j)]];
  }
  return {LpStatus::optimal, p.c.dot(x), x};
}

}  // namespace derham
