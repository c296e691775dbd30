#include "derham/metric_space.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace derham {

namespace {
constexpr long kMaxReportedViolations = 1000;
}

FiniteMetricSpace::FiniteMetricSpace(std::vector<std::string> labels, Matrix dist)
    : labels_(std::move(labels)), dist_(std::move(dist)) {
  const auto n = static_cast<Eigen::Index>(labels_.size());
  if (n == 0) throw std::invalid_argument("metric space: no points");
  if (dist_.rows() != n || dist_.cols() != n) {
    throw std::invalid_argument("metric space: matrix shape does not match label count");
  }
  std::unordered_set<std::string> seen;
  for (const auto& l : labels_) {
    if (!seen.insert(l).second) throw std::invalid_argument("metric space: duplicate label " + l);
  }
}

double FiniteMetricSpace::max_dist() const { return dist_.size() ? dist_.maxCoeff() : 0.0; }

Tolerance FiniteMetricSpace::default_tolerance() const {
  const double m = max_dist();
  return Tolerance{1e-9 * m, 1e-9 * m * m};
}

FiniteMetricSpace FiniteMetricSpace::restricted(const std::vector<int>& points) const {
  const int m = static_cast<int>(points.size());
  std::vector<std::string> labels(static_cast<std::size_t>(m));
  Matrix d(m, m);
  for (int a = 0; a < m; ++a) {
    labels[static_cast<std::size_t>(a)] = label(points[static_cast<std::size_t>(a)]);
    for (int b = 0; b < m; ++b) {
      d(a, b) = dist_(points[static_cast<std::size_t>(a)], points[static_cast<std::size_t>(b)]);
    }
  }
  return FiniteMetricSpace(std::move(labels), std::move(d));
}

ValidationReport validate(const FiniteMetricSpace& s, const Tolerance& tol) {
  ValidationReport rep;
  const int n = s.size();
  auto add = [&rep](MetricViolation v) {
    rep.ok = false;
    ++rep.total_violations;
    if (rep.total_violations <= kMaxReportedViolations) rep.violations.push_back(v);
  };

  for (int i = 0; i < n; ++i) {
    if (std::abs(s(i, i)) > tol.metric) {
      add({MetricDefect::nonzero_diagonal, i, i, -1, s(i, i)});
    }
    for (int j = i + 1; j < n; ++j) {
      const double gap = std::abs(s(i, j) - s(j, i));
      if (gap > tol.metric) add({MetricDefect::asymmetry, i, j, -1, gap});
      if (s(i, j) <= tol.metric) {
        add({MetricDefect::nonpositive, i, j, -1, s(i, j)});
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      for (int k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        const double deficit = s(i, k) - s(i, j) - s(j, k);
        if (deficit > tol.metric) add({MetricDefect::triangle, i, j, k, deficit});
      }
    }
  }
  return rep;
}

ValidationReport validate(const FiniteMetricSpace& s) {
  return validate(s, s.default_tolerance());
}

namespace {

bool extend_isometry(const FiniteMetricSpace& a, const FiniteMetricSpace& b,
                     std::vector<int>& map, std::vector<bool>& used, int t, double tol) {
  const int n = a.size();
  if (t == n) return true;
  for (int c = 0; c < n; ++c) {
    if (used[static_cast<std::size_t>(c)]) continue;
    bool fits = true;
    for (int j = 0; j < t; ++j) {
      if (std::abs(a(t, j) - b(c, map[static_cast<std::size_t>(j)])) > tol) {
        fits = false;
        break;
      }
    }
    if (!fits) continue;
    map[static_cast<std::size_t>(t)] = c;
    used[static_cast<std::size_t>(c)] = true;
    if (extend_isometry(a, b, map, used, t + 1, tol)) return true;
    used[static_cast<std::size_t>(c)] = false;
  }
  return false;
}

}  // namespace

std::optional<std::vector<int>> find_isometry(const FiniteMetricSpace& a,
                                              const FiniteMetricSpace& b,
                                              const Tolerance& tol) {
  if (a.size() != b.size()) return std::nullopt;
  std::vector<int> map(static_cast<std::size_t>(a.size()), -1);
  std::vector<bool> used(static_cast<std::size_t>(a.size()), false);
  if (extend_isometry(a, b, map, used, 0, tol.metric)) return map;
  return std::nullopt;
}

FiniteMetricSpace product(const FiniteMetricSpace& y, const FiniteMetricSpace& z) {
  const int ny = y.size(), nz = z.size();
  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(ny) * static_cast<std::size_t>(nz));
  for (int i = 0; i < ny; ++i) {
    for (int j = 0; j < nz; ++j) {
      labels.push_back("(" + y.label(i) + "," + z.label(j) + ")");
    }
  }
  Matrix d(ny * nz, ny * nz);
  for (int i = 0; i < ny; ++i) {
    for (int j = 0; j < nz; ++j) {
      for (int k = 0; k < ny; ++k) {
        for (int l = 0; l < nz; ++l) {
          d(i * nz + j, k * nz + l) = std::hypot(y(i, k), z(j, l));
        }
      }
    }
  }
  return FiniteMetricSpace(std::move(labels), std::move(d));
}

}  // namespace derham
