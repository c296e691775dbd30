#include "derham/polyhedra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "derham/lp.hpp"

namespace derham {

namespace {

Matrix drop_duplicate_columns(const Matrix& m, double tol) {
  std::vector<int> keep;
  for (int i = 0; i < m.cols(); ++i) {
    bool dup = false;
    for (int j : keep) {
      if ((m.col(i) - m.col(j)).norm() <= tol) { dup = true; break; }
    }
    if (!dup) keep.push_back(i);
  }
  Matrix out(m.rows(), static_cast<int>(keep.size()));
  for (int k = 0; k < static_cast<int>(keep.size()); ++k) out.col(k) = m.col(keep[static_cast<std::size_t>(k)]);
  return out;
}

// iterates over all index subsets of size k from {0..n-1}
class SubsetIter {
 public:
  SubsetIter(int n, int k) : n_(n), idx_(static_cast<std::size_t>(k)) {
    for (int i = 0; i < k; ++i) idx_[static_cast<std::size_t>(i)] = i;
    done_ = k > n;
  }
  bool done() const { return done_; }
  const std::vector<int>& get() const { return idx_; }
  void next() {
    const int k = static_cast<int>(idx_.size());
    int i = k - 1;
    while (i >= 0 && idx_[static_cast<std::size_t>(i)] == n_ - k + i) --i;
    if (i < 0) { done_ = true; return; }
    ++idx_[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) idx_[static_cast<std::size_t>(j)] = idx_[static_cast<std::size_t>(j - 1)] + 1;
  }

 private:
  int n_;
  std::vector<int> idx_;
  bool done_ = false;
};

double binomial_guard(int n, int k, std::size_t cap) {
  double c = 1.0;
  for (int i = 0; i < k; ++i) {
    c *= static_cast<double>(n - i) / static_cast<double>(i + 1);
    if (c > static_cast<double>(cap) * 4) return c;
  }
  return c;
}

}  // namespace

Matrix extreme_points(const Matrix& points, double tol) {
  Matrix pts = drop_duplicate_columns(points, tol);
  const int n = static_cast<int>(pts.cols());
  const int d = static_cast<int>(pts.rows());
  if (n <= 1) return pts;
  std::vector<int> keep;
  for (int i = 0; i < n; ++i) {
    // feasibility of pts_i in conv(others)
    LpProblem lp;
    lp.c = Vector::Zero(n - 1);
    lp.a_eq = Matrix::Zero(d + 1, n - 1);
    lp.b_eq = Vector::Zero(d + 1);
    int col = 0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      lp.a_eq.block(0, col, d, 1) = pts.col(j);
      lp.a_eq(d, col) = 1.0;
      ++col;
    }
    lp.b_eq.head(d) = pts.col(i);
    lp.b_eq[d] = 1.0;
    lp.nonneg.assign(static_cast<std::size_t>(n - 1), true);
    if (solve_lp(lp).status != LpStatus::optimal) keep.push_back(i);
  }
  Matrix out(d, static_cast<int>(keep.size()));
  for (int k = 0; k < static_cast<int>(keep.size()); ++k) out.col(k) = pts.col(keep[static_cast<std::size_t>(k)]);
  return out;
}

bool in_hull(const Matrix& points, const Matrix& lineality, const Vector& p, double tol) {
  const int n = static_cast<int>(points.cols());
  const int l = static_cast<int>(lineality.cols());
  const int d = static_cast<int>(p.size());
  if (n == 0) return false;
  LpProblem lp;
  lp.c = Vector::Zero(n + l);
  lp.a_eq = Matrix::Zero(d + 1, n + l);
  lp.a_eq.block(0, 0, d, n) = points;
  if (l > 0) lp.a_eq.block(0, n, d, l) = lineality;
  lp.a_eq.block(d, 0, 1, n).setOnes();
  lp.b_eq = Vector::Zero(d + 1);
  lp.b_eq.head(d) = p;
  lp.b_eq[d] = 1.0;
  lp.nonneg.assign(static_cast<std::size_t>(n + l), true);
  for (int j = 0; j < l; ++j) lp.nonneg[static_cast<std::size_t>(n + j)] = false;
  auto r = solve_lp(lp);
  if (r.status == LpStatus::optimal) {
    // simplex feasibility tolerance is coarser than tol; re-verify the residual
    Vector rec = points * r.x.head(n);
    if (l > 0) rec += lineality * r.x.tail(l);
    const double scale = std::max(1.0, p.norm());
    return (rec - p).norm() <= std::max(tol, 1e-7) * scale;
  }
  return false;
}

std::vector<std::pair<int, int>> polytope_edges(const Matrix& vertices, double tol) {
  const int n = static_cast<int>(vertices.cols());
  const int d = static_cast<int>(vertices.rows());
  std::vector<std::pair<int, int>> edges;
  if (n == 2) { edges.emplace_back(0, 1); return edges; }
  const double scale = std::max(1.0, vertices.cwiseAbs().maxCoeff());
  const double margin = std::max(tol, 1e-6) * scale;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      // maximize s over (a, b, s): a.v_i = a.v_j = b, a.v_k <= b - s elsewhere,
      // |a|_inf <= 1. The box keeps the problem bounded, so a positive optimal
      // margin is a scale-honest edge certificate.
      LpProblem lp;
      lp.c = Vector::Zero(d + 2);
      lp.c[d + 1] = -1.0;
      lp.a_eq = Matrix::Zero(2, d + 2);
      lp.a_eq.block(0, 0, 1, d) = vertices.col(i).transpose();
      lp.a_eq(0, d) = -1.0;
      lp.a_eq.block(1, 0, 1, d) = vertices.col(j).transpose();
      lp.a_eq(1, d) = -1.0;
      lp.b_eq = Vector::Zero(2);
      lp.a_ub = Matrix::Zero(n - 2 + 2 * d, d + 2);
      lp.b_ub = Vector::Zero(n - 2 + 2 * d);
      int row = 0;
      for (int k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        lp.a_ub.block(row, 0, 1, d) = vertices.col(k).transpose();
        lp.a_ub(row, d) = -1.0;
        lp.a_ub(row, d + 1) = 1.0;
        ++row;
      }
      for (int l = 0; l < d; ++l) {
        lp.a_ub(row, l) = 1.0;
        lp.b_ub[row++] = 1.0;
        lp.a_ub(row, l) = -1.0;
        lp.b_ub[row++] = 1.0;
      }
      lp.nonneg.assign(static_cast<std::size_t>(d + 2), false);
      lp.nonneg[static_cast<std::size_t>(d + 1)] = true;
      LpResult r = solve_lp(lp);
      if (r.status != LpStatus::optimal) continue;
      // trust only a re-verified certificate: polish the functional onto the
      // equality constraints and recompute the separation margin directly
      Vector a = r.x.head(d);
      Vector g = vertices.col(i) - vertices.col(j);
      const double gg = g.squaredNorm();
      if (gg > 0) a -= (a.dot(g) / gg) * g;
      const double amax = a.cwiseAbs().maxCoeff();
      if (amax > 1.0) a /= amax;
      const double b = 0.5 * (a.dot(vertices.col(i)) + a.dot(vertices.col(j)));
      double true_margin = std::numeric_limits<double>::infinity();
      for (int k = 0; k < n; ++k) {
        if (k != i && k != j) true_margin = std::min(true_margin, b - a.dot(vertices.col(k)));
      }
      if (true_margin > margin) edges.emplace_back(i, j);
    }
  }
  return edges;
}

Matrix edge_directions(const Matrix& vertices, const std::vector<std::pair<int, int>>& edges) {
  const int d = static_cast<int>(vertices.rows());
  Matrix dirs(d, static_cast<int>(edges.size()));
  int count = 0;
  for (const auto& [i, j] : edges) {
    Vector dir = vertices.col(j) - vertices.col(i);
    dir.normalize();
    for (int k = 0; k < d; ++k) {
      if (std::abs(dir[k]) > 1e-9) {
        if (dir[k] < 0) dir = -dir;
        break;
      }
    }
    bool dup = false;
    for (int c = 0; c < count; ++c) {
      if ((dirs.col(c) - dir).norm() <= 1e-7) { dup = true; break; }
    }
    if (!dup) dirs.col(count++) = dir;
  }
  return dirs.leftCols(count);
}

Matrix vertices_to_facets(const Matrix& vertices, double tol, std::size_t max_subsets) {
  const int n = static_cast<int>(vertices.cols());
  const int d = static_cast<int>(vertices.rows());
  if (d == 1) {
    double hi = vertices.row(0).maxCoeff();
    double lo = vertices.row(0).minCoeff();
    if (hi <= tol || lo >= -tol) throw std::runtime_error("origin is not interior to the polytope");
    Matrix f(2, 1);
    f << 1.0 / hi, 1.0 / lo;
    return f;
  }
  if (binomial_guard(n, d, max_subsets) > static_cast<double>(max_subsets)) {
    throw std::runtime_error("facet enumeration too large");
  }
  std::vector<Vector> facets;
  for (SubsetIter it(n, d); !it.done(); it.next()) {
    Matrix m(d, d);
    for (int r = 0; r < d; ++r) m.row(r) = vertices.col(it.get()[static_cast<std::size_t>(r)]).transpose();
    Eigen::FullPivLU<Matrix> lu(m);
    lu.setThreshold(kRankPivotTol);
    if (lu.rank() < d) continue;
    Vector a = lu.solve(Vector::Ones(d));
    if ((m * a - Vector::Ones(d)).norm() > 1e-8) continue;
    if ((vertices.transpose() * a).maxCoeff() > 1.0 + tol) continue;
    bool dup = false;
    for (const Vector& f : facets) {
      if ((f - a).norm() <= 1e-7 * std::max(1.0, a.norm())) { dup = true; break; }
    }
    if (!dup) facets.push_back(a);
  }
  if (facets.empty()) throw std::runtime_error("no facets found; polytope degenerate");
  Matrix out(static_cast<int>(facets.size()), d);
  for (int i = 0; i < static_cast<int>(facets.size()); ++i) out.row(i) = facets[static_cast<std::size_t>(i)].transpose();
  return out;
}

Matrix facets_to_vertices(const Matrix& facets, double tol, std::size_t max_subsets) {
  const int m = static_cast<int>(facets.rows());
  const int d = static_cast<int>(facets.cols());
  if (d == 1) {
    double hi = std::numeric_limits<double>::infinity();
    double lo = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      const double a = facets(i, 0);
      if (a > tol) hi = std::min(hi, 1.0 / a);
      if (a < -tol) lo = std::max(lo, 1.0 / a);
    }
    if (!std::isfinite(hi) || !std::isfinite(lo)) throw std::runtime_error("unbounded polytope");
    Matrix v(1, 2);
    v << hi, lo;
    return v;
  }
  if (binomial_guard(m, d, max_subsets) > static_cast<double>(max_subsets)) {
    throw std::runtime_error("vertex enumeration too large");
  }
  std::vector<Vector> verts;
  for (SubsetIter it(m, d); !it.done(); it.next()) {
    Matrix a(d, d);
    for (int r = 0; r < d; ++r) a.row(r) = facets.row(it.get()[static_cast<std::size_t>(r)]);
    Eigen::FullPivLU<Matrix> lu(a);
    lu.setThreshold(kRankPivotTol);
    if (lu.rank() < d) continue;
    Vector x = lu.solve(Vector::Ones(d));
    if ((a * x - Vector::Ones(d)).norm() > 1e-8) continue;
    if ((facets * x).maxCoeff() > 1.0 + std::max(tol, 1e-8) * std::max(1.0, x.norm())) continue;
    bool dup = false;
    for (const Vector& v : verts) {
      if ((v - x).norm() <= 1e-7 * std::max(1.0, x.norm())) { dup = true; break; }
    }
    if (!dup) verts.push_back(x);
  }
  if (verts.empty()) throw std::runtime_error("no vertices found; polytope degenerate or unbounded");
  Matrix out(d, static_cast<int>(verts.size()));
  for (int i = 0; i < static_cast<int>(verts.size()); ++i) out.col(i) = verts[static_cast<std::size_t>(i)];
  return out;
}

Matrix polytope_section(const Matrix& facets, const Subspace& s, double tol) {
  if (s.dim() == 0) return Matrix::Zero(static_cast<int>(facets.cols()), 1);
  Matrix restricted = facets * s.basis;
  // rows that vanish on the subspace impose no constraint
  std::vector<int> rows;
  for (int i = 0; i < restricted.rows(); ++i) {
    if (restricted.row(i).norm() > 1e-12) rows.push_back(i);
  }
  Matrix active(static_cast<int>(rows.size()), s.dim());
  for (int i = 0; i < static_cast<int>(rows.size()); ++i) active.row(i) = restricted.row(rows[static_cast<std::size_t>(i)]);
  Matrix coords = facets_to_vertices(active, tol);
  return s.basis * coords;
}

double support_value(const Matrix& vertices, const Vector& theta) {
  return (vertices.transpose() * theta).maxCoeff();
}

Matrix minkowski_sum(const Matrix& v1, const Matrix& v2, double tol) {
  Matrix sums(v1.rows(), v1.cols() * v2.cols());
  int c = 0;
  for (int i = 0; i < v1.cols(); ++i) {
    for (int j = 0; j < v2.cols(); ++j) sums.col(c++) = v1.col(i) + v2.col(j);
  }
  return extreme_points(sums, tol);
}

}  // namespace derham
