#pragma once

#include <optional>
#include <string>
#include <vector>

#include "derham/linalg.hpp"

namespace derham {

// Numeric slack; factory defaults tie it to the data scale.
struct Tolerance {
  double metric = 0.0;  // on distances
  double sq = 0.0;      // on squared distances
};

class FiniteMetricSpace {
 public:
  // Structural errors (shape mismatch, duplicate labels, empty) throw
  // std::invalid_argument; semantic metric violations are validate()'s job.
  FiniteMetricSpace(std::vector<std::string> labels, Matrix dist);

  int size() const { return static_cast<int>(labels_.size()); }
  const std::string& label(int i) const { return labels_[static_cast<std::size_t>(i)]; }
  const std::vector<std::string>& labels() const { return labels_; }
  const Matrix& dist() const { return dist_; }
  double operator()(int i, int j) const { return dist_(i, j); }

  double max_dist() const;
  Matrix squared() const { return dist_.array().square(); }
  // 1e-9 of the largest distance resp. squared distance
  Tolerance default_tolerance() const;

  FiniteMetricSpace restricted(const std::vector<int>& points) const;

 private:
  std::vector<std::string> labels_;
  Matrix dist_;
};

enum class MetricDefect { asymmetry, nonzero_diagonal, nonpositive, triangle };

struct MetricViolation {
  MetricDefect kind;
  int i = -1, j = -1, k = -1;  // k used by triangle entries only
  double amount = 0.0;
};

struct ValidationReport {
  bool ok = true;
  std::vector<MetricViolation> violations;  // capped; total_violations is exact
  long total_violations = 0;
};

ValidationReport validate(const FiniteMetricSpace& s, const Tolerance& tol);
ValidationReport validate(const FiniteMetricSpace& s);

// l2 direct product; labels are "(a,b)", row-major in the second factor
FiniteMetricSpace product(const FiniteMetricSpace& y, const FiniteMetricSpace& z);

// backtracking search for a distance-preserving bijection a -> b
std::optional<std::vector<int>> find_isometry(const FiniteMetricSpace& a,
                                              const FiniteMetricSpace& b,
                                              const Tolerance& tol);

}  // namespace derham
