#pragma once

#include <optional>
#include <stdexcept>

#include <Eigen/Dense>

namespace derham {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// pivot tolerance for all rank decisions
inline constexpr double kRankPivotTol = 1e-10;

int rank_of(const Matrix& m, double tol = kRankPivotTol);

// orthonormal basis of the null space of m (as a map on column vectors)
Matrix kernel_of(const Matrix& m, double tol = kRankPivotTol);

// Linear subspace of R^d held as an orthonormal column basis (d x k, k may be 0).
struct Subspace {
  Matrix basis;

  int dim() const { return static_cast<int>(basis.cols()); }
  int ambient() const { return static_cast<int>(basis.rows()); }

  static Subspace zero(int d) { return Subspace{Matrix::Zero(d, 0)}; }
  static Subspace full(int d) { return Subspace{Matrix::Identity(d, d)}; }
  // span of arbitrary columns, rank-revealed
  static Subspace span_of(const Matrix& cols, double tol = kRankPivotTol);

  bool contains(const Vector& v, double tol = 1e-9) const;
  bool contains(const Subspace& other, double tol = 1e-9) const;
  // orthogonal projection onto the subspace
  Vector project(const Vector& v) const { return basis * (basis.transpose() * v); }
  // coordinates w.r.t. the stored basis (least squares; exact for members)
  Vector coords(const Vector& v) const { return basis.transpose() * v; }
};

Subspace intersect(const Subspace& a, const Subspace& b, double tol = kRankPivotTol);
Subspace subspace_sum(const Subspace& a, const Subspace& b, double tol = kRankPivotTol);

// complement w.r.t. the inner product <u,v> = u' G v; G = identity when null
Subspace orthogonal_complement(const Subspace& s, const Matrix* gram = nullptr,
                               double tol = kRankPivotTol);

// projector with image span(onto) and kernel span(along); throws std::invalid_argument
// unless the two bases jointly span the ambient space
Matrix projector_onto_along(const Subspace& onto, const Subspace& along);

// true when dim a + dim b == ambient and a + b spans; the transversality primitive
bool complementary(const Subspace& a, const Subspace& b, double tol = kRankPivotTol);

}  // namespace derham
