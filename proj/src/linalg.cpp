#include "derham/linalg.hpp"

#include <Eigen/SVD>

namespace derham {

namespace {

Eigen::JacobiSVD<Matrix> svd_of(const Matrix& m) {
  return Eigen::JacobiSVD<Matrix>(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
}

int svd_rank(const Eigen::JacobiSVD<Matrix>& svd, double tol) {
  if (svd.singularValues().size() == 0) return 0;
  const double s0 = svd.singularValues()[0];
  if (s0 <= tol) return 0;
  int r = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i) {
    if (svd.singularValues()[i] > tol * s0) ++r;
  }
  return r;
}

}  // namespace

int rank_of(const Matrix& m, double tol) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  return svd_rank(svd_of(m), tol);
}

Matrix kernel_of(const Matrix& m, double tol) {
  if (m.cols() == 0) return Matrix::Zero(0, 0);
  if (m.rows() == 0) return Matrix::Identity(m.cols(), m.cols());
  auto svd = svd_of(m);
  const int r = svd_rank(svd, tol);
  return svd.matrixV().rightCols(m.cols() - r);
}

Subspace Subspace::span_of(const Matrix& cols, double tol) {
  if (cols.cols() == 0) return Subspace{Matrix::Zero(cols.rows(), 0)};
  auto svd = svd_of(cols);
  const int r = svd_rank(svd, tol);
  return Subspace{svd.matrixU().leftCols(r)};
}

bool Subspace::contains(const Vector& v, double tol) const {
  const double scale = std::max(1.0, v.norm());
  return (v - project(v)).norm() <= tol * scale;
}

bool Subspace::contains(const Subspace& other, double tol) const {
  for (int j = 0; j < other.dim(); ++j) {
    if (!contains(other.basis.col(j), tol)) return false;
  }
  return true;
}

Subspace intersect(const Subspace& a, const Subspace& b, double tol) {
  if (a.dim() == 0 || b.dim() == 0) return Subspace::zero(a.ambient());
  Matrix m(a.ambient(), a.dim() + b.dim());
  m << a.basis, -b.basis;
  Matrix ker = kernel_of(m, tol);
  if (ker.cols() == 0) return Subspace::zero(a.ambient());
  Matrix gens = a.basis * ker.topRows(a.dim());
  return Subspace::span_of(gens, tol);
}

Subspace subspace_sum(const Subspace& a, const Subspace& b, double tol) {
  Matrix m(a.ambient(), a.dim() + b.dim());
  m << a.basis, b.basis;
  return Subspace::span_of(m, tol);
}

Subspace orthogonal_complement(const Subspace& s, const Matrix* gram, double tol) {
  const int d = s.ambient();
  if (s.dim() == 0) return Subspace::full(d);
  Matrix m = gram ? Matrix(s.basis.transpose() * (*gram)) : Matrix(s.basis.transpose());
  return Subspace{kernel_of(m, tol)};
}

Matrix projector_onto_along(const Subspace& onto, const Subspace& along) {
  const int d = onto.ambient();
  if (onto.dim() + along.dim() != d) {
    throw std::invalid_argument("projector: subspaces do not split the ambient space");
  }
  Matrix joint(d, d);
  joint << onto.basis, along.basis;
  Eigen::FullPivLU<Matrix> lu(joint);
  lu.setThreshold(kRankPivotTol);
  if (!lu.isInvertible()) {
    throw std::invalid_argument("projector: subspaces are not complementary");
  }
  Matrix inv = lu.inverse();
  return onto.basis * inv.topRows(onto.dim());
}

bool complementary(const Subspace& a, const Subspace& b, double tol) {
  if (a.dim() + b.dim() != a.ambient()) return false;
  return subspace_sum(a, b, tol).dim() == a.ambient();
}

}  // namespace derham
