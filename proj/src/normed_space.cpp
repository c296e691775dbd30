#include "derham/normed_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "derham/lp.hpp"
#include "derham/polyhedra.hpp"
#include "derham/rng.hpp"

namespace derham {

namespace {

constexpr double kSymTol = 1e-9;

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

// vertex columns / facet rows of a symmetric body must be closed under negation
bool closed_under_negation(const Matrix& cols, double tol) {
  for (int i = 0; i < cols.cols(); ++i) {
    bool found = false;
    for (int j = 0; j < cols.cols(); ++j) {
      if ((cols.col(i) + cols.col(j)).norm() <= tol * std::max(1.0, cols.col(i).norm())) {
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

double gauge_lp(const Matrix& vertices, const Vector& v) {
  const int n = static_cast<int>(vertices.cols());
  const int d = static_cast<int>(v.size());
  if (v.norm() == 0.0) return 0.0;
  LpProblem lp;
  lp.c = Vector::Ones(n);
  lp.a_eq = vertices;
  lp.b_eq = v;
  lp.nonneg.assign(static_cast<std::size_t>(n), true);
  (void)d;
  auto r = solve_lp(lp);
  if (r.status != LpStatus::optimal) throw std::runtime_error("gauge evaluation failed: point outside the ball's span");
  return r.value;
}

// gram matrix when the norm is a quadratic form (gram, p==2, products thereof)
bool quadratic_gram(const NormedSpace& s, Matrix& out) {
  switch (s.form) {
    case NormForm::gram:
      out = s.gram;
      return true;
    case NormForm::p_norm:
      if (s.p == 2.0) {
        out = Matrix::Identity(s.dim, s.dim);
        return true;
      }
      return false;
    case NormForm::product: {
      Matrix d = Matrix::Zero(s.dim, s.dim);
      int off = 0;
      for (const auto& c : s.components) {
        Matrix g;
        if (!quadratic_gram(c, g)) return false;
        d.block(off, off, c.dim, c.dim) = g;
        off += c.dim;
      }
      out = s.product_inverse.transpose() * d * s.product_inverse;
      return true;
    }
    default:
      return false;
  }
}

}  // namespace

std::string form_name(NormForm f) {
  switch (f) {
    case NormForm::polyhedral_vertices: return "polyhedral_vertices";
    case NormForm::polyhedral_facets: return "polyhedral_facets";
    case NormForm::p_norm: return "p_norm";
    case NormForm::gram: return "gram";
    case NormForm::product: return "product";
  }
  return "unknown";
}

NormedSpace vertices_space(const Matrix& vertices) {
  require(vertices.rows() >= 1 && vertices.cols() >= 2, "vertex list must contain at least a segment");
  NormedSpace s;
  s.dim = static_cast<int>(vertices.rows());
  s.form = NormForm::polyhedral_vertices;
  s.vertices = extreme_points(vertices, kSymTol);
  require(closed_under_negation(s.vertices, kSymTol), "vertex list is not centrally symmetric");
  require(rank_of(s.vertices) == s.dim, "unit ball has empty interior");
  // facet cache makes norm evaluation cheap; skipped when combinatorially large
  if (s.dim <= 5) {
    try {
      s.facets = vertices_to_facets(s.vertices);
    } catch (const std::runtime_error&) {
      s.facets.resize(0, 0);
    }
  }
  return s;
}

NormedSpace facets_space(const Matrix& facets) {
  require(facets.rows() >= 2 && facets.cols() >= 1, "facet list must bound the ball");
  NormedSpace s;
  s.dim = static_cast<int>(facets.cols());
  s.form = NormForm::polyhedral_facets;
  s.facets = facets;
  require(closed_under_negation(facets.transpose(), kSymTol), "facet list is not centrally symmetric");
  require(rank_of(facets.transpose()) == s.dim, "facet functionals do not bound a finite ball");
  return s;
}

NormedSpace pnorm_space(int dim, double p) {
  require(dim >= 1, "dimension must be positive");
  require(p >= 1.0, "p must be at least 1");
  NormedSpace s;
  s.dim = dim;
  s.form = NormForm::p_norm;
  s.p = p;
  return s;
}

NormedSpace gram_space(const Matrix& gram) {
  require(gram.rows() == gram.cols() && gram.rows() >= 1, "gram matrix must be square");
  require((gram - gram.transpose()).norm() <= 1e-9 * std::max(1.0, gram.norm()), "gram matrix must be symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
  require(es.eigenvalues().minCoeff() > 1e-12 * std::max(1.0, es.eigenvalues().maxCoeff()),
          "gram matrix must be positive-definite");
  NormedSpace s;
  s.dim = static_cast<int>(gram.rows());
  s.form = NormForm::gram;
  s.gram = 0.5 * (gram + gram.transpose());
  return s;
}

NormedSpace euclidean_space(int dim) { return gram_space(Matrix::Identity(dim, dim)); }

NormedSpace linf_space(int dim) { return pnorm_space(dim, std::numeric_limits<double>::infinity()); }

NormedSpace l1_space(int dim) { return pnorm_space(dim, 1.0); }

NormedSpace product_space(std::vector<NormedSpace> components) {
  int total = 0;
  for (const auto& c : components) total += c.dim;
  std::vector<Matrix> bases;
  int off = 0;
  for (const auto& c : components) {
    Matrix b = Matrix::Zero(total, c.dim);
    b.block(off, 0, c.dim, c.dim).setIdentity();
    bases.push_back(b);
    off += c.dim;
  }
  return product_space(std::move(components), std::move(bases));
}

NormedSpace product_space(std::vector<NormedSpace> components, std::vector<Matrix> bases) {
  require(!components.empty(), "product needs at least one component");
  require(components.size() == bases.size(), "one embedding basis per component");
  int total = 0;
  for (const auto& c : components) total += c.dim;
  Matrix joint(total, total);
  int off = 0;
  for (std::size_t i = 0; i < components.size(); ++i) {
    require(static_cast<int>(bases[i].rows()) == total && static_cast<int>(bases[i].cols()) == components[i].dim,
            "embedding basis has wrong shape");
    joint.middleCols(off, components[i].dim) = bases[i];
    off += components[i].dim;
  }
  Eigen::FullPivLU<Matrix> lu(joint);
  lu.setThreshold(kRankPivotTol);
  require(lu.isInvertible(), "embedding bases do not span the product space");
  NormedSpace s;
  s.dim = total;
  s.form = NormForm::product;
  s.components = std::move(components);
  s.bases = std::move(bases);
  s.product_inverse = lu.inverse();
  return s;
}

NormedSpace transformed_space(const NormedSpace& s, const Matrix& t) {
  require(t.rows() == s.dim && t.cols() == s.dim, "transform has wrong shape");
  Eigen::FullPivLU<Matrix> lu(t);
  lu.setThreshold(kRankPivotTol);
  require(lu.isInvertible(), "transform must be invertible");
  switch (s.form) {
    case NormForm::polyhedral_vertices:
      return vertices_space(t * s.vertices);
    case NormForm::polyhedral_facets:
      return facets_space(s.facets * lu.inverse());
    case NormForm::gram: {
      Matrix ti = lu.inverse();
      return gram_space(ti.transpose() * s.gram * ti);
    }
    case NormForm::p_norm:
      return product_space({s}, {t});
    case NormForm::product: {
      std::vector<Matrix> bases = s.bases;
      for (auto& b : bases) b = t * b;
      return product_space(s.components, std::move(bases));
    }
  }
  throw std::logic_error("unreachable");
}

double norm(const NormedSpace& s, const Vector& v) {
  require(static_cast<int>(v.size()) == s.dim, "vector dimension mismatch");
  switch (s.form) {
    case NormForm::polyhedral_facets:
      return (s.facets * v).cwiseAbs().maxCoeff();
    case NormForm::polyhedral_vertices:
      if (s.facets.size() > 0) return (s.facets * v).cwiseAbs().maxCoeff();
      return gauge_lp(s.vertices, v);
    case NormForm::gram:
      return std::sqrt(std::max(0.0, v.dot(s.gram * v)));
    case NormForm::p_norm: {
      if (std::isinf(s.p)) return v.cwiseAbs().maxCoeff();
      const double m = v.cwiseAbs().maxCoeff();
      if (m == 0.0) return 0.0;
      double acc = 0.0;
      for (int i = 0; i < s.dim; ++i) acc += std::pow(std::abs(v[i]) / m, s.p);
      return m * std::pow(acc, 1.0 / s.p);
    }
    case NormForm::product: {
      Vector c = s.product_inverse * v;
      double acc = 0.0;
      int off = 0;
      for (const auto& comp : s.components) {
        const double n = norm(comp, c.segment(off, comp.dim));
        acc += n * n;
        off += comp.dim;
      }
      return std::sqrt(acc);
    }
  }
  throw std::logic_error("unreachable");
}

Vector norm_subgradient(const NormedSpace& s, const Vector& v) {
  require(static_cast<int>(v.size()) == s.dim, "vector dimension mismatch");
  if (v.norm() == 0.0) return Vector::Zero(s.dim);
  switch (s.form) {
    case NormForm::polyhedral_facets:
    case NormForm::polyhedral_vertices: {
      if (s.facets.size() > 0) {
        Vector vals = s.facets * v;
        int best = 0;
        vals.cwiseAbs().maxCoeff(&best);
        Vector g = s.facets.row(best).transpose();
        return vals[best] >= 0 ? g : Vector(-g);
      }
      // LP-backed norm: central-difference subgradient (kinks are measure zero)
      Vector g(s.dim);
      const double h = 1e-6 * std::max(1.0, v.norm());
      for (int i = 0; i < s.dim; ++i) {
        Vector e = Vector::Zero(s.dim);
        e[i] = h;
        g[i] = (norm(s, v + e) - norm(s, v - e)) / (2 * h);
      }
      return g;
    }
    case NormForm::gram: {
      Vector gv = s.gram * v;
      return gv / std::sqrt(v.dot(gv));
    }
    case NormForm::p_norm: {
      if (std::isinf(s.p)) {
        int best = 0;
        v.cwiseAbs().maxCoeff(&best);
        Vector g = Vector::Zero(s.dim);
        g[best] = v[best] >= 0 ? 1.0 : -1.0;
        return g;
      }
      const double n = norm(s, v);
      Vector g(s.dim);
      for (int i = 0; i < s.dim; ++i) {
        g[i] = (v[i] >= 0 ? 1.0 : -1.0) * std::pow(std::abs(v[i]) / n, s.p - 1.0);
      }
      return g;
    }
    case NormForm::product: {
      Vector c = s.product_inverse * v;
      const double total = norm(s, v);
      Vector gc(s.dim);
      int off = 0;
      for (const auto& comp : s.components) {
        const Vector ci = c.segment(off, comp.dim);
        const double ni = norm(comp, ci);
        if (ni > 0) {
          gc.segment(off, comp.dim) = (ni / total) * norm_subgradient(comp, ci);
        } else {
          gc.segment(off, comp.dim).setZero();
        }
        off += comp.dim;
      }
      return s.product_inverse.transpose() * gc;
    }
  }
  throw std::logic_error("unreachable");
}

std::function<double(const Vector&)> norm_functor(const NormedSpace& s) {
  return [s](const Vector& v) { return norm(s, v); };
}

std::function<double(const Vector&)> restricted_functor(const NormedSpace& s, const Subspace& sub) {
  Matrix b = sub.basis;
  return [s, b](const Vector& c) { return norm(s, Vector(b * c)); };
}

RestrictedForm restricted_space(const NormedSpace& s, const Subspace& sub) {
  RestrictedForm r;
  Matrix g;
  if (quadratic_gram(s, g)) {
    r.exact = true;
    r.space = gram_space(sub.basis.transpose() * g * sub.basis);
    return r;
  }
  Matrix facets = ball_facets(s);
  if (facets.size() > 0) {
    Matrix restricted = facets * sub.basis;
    std::vector<int> rows;
    for (int i = 0; i < restricted.rows(); ++i) {
      if (restricted.row(i).norm() > 1e-12) rows.push_back(i);
    }
    Matrix active(static_cast<int>(rows.size()), sub.dim());
    for (int i = 0; i < static_cast<int>(rows.size()); ++i) active.row(i) = restricted.row(rows[static_cast<std::size_t>(i)]);
    if (active.rows() >= 2 && rank_of(active.transpose()) == sub.dim()) {
      r.exact = true;
      r.space = facets_space(active);
      return r;
    }
  }
  return r;
}

Matrix ball_vertices(const NormedSpace& s) {
  switch (s.form) {
    case NormForm::polyhedral_vertices:
      return s.vertices;
    case NormForm::polyhedral_facets:
      if (s.dim <= 5) {
        try {
          return facets_to_vertices(s.facets);
        } catch (const std::runtime_error&) {
          return Matrix();
        }
      }
      return Matrix();
    case NormForm::p_norm: {
      if (std::isinf(s.p) && s.dim <= 6) {
        Matrix v(s.dim, 1 << s.dim);
        for (int mask = 0; mask < (1 << s.dim); ++mask) {
          for (int i = 0; i < s.dim; ++i) v(i, mask) = (mask >> i) & 1 ? 1.0 : -1.0;
        }
        return v;
      }
      if (s.p == 1.0) {
        Matrix v = Matrix::Zero(s.dim, 2 * s.dim);
        for (int i = 0; i < s.dim; ++i) {
          v(i, 2 * i) = 1.0;
          v(i, 2 * i + 1) = -1.0;
        }
        return v;
      }
      return Matrix();
    }
    default:
      return Matrix();
  }
}

Matrix ball_facets(const NormedSpace& s) {
  switch (s.form) {
    case NormForm::polyhedral_facets:
      return s.facets;
    case NormForm::polyhedral_vertices:
      return s.facets;  // cache; empty when conversion was skipped
    case NormForm::p_norm: {
      if (std::isinf(s.p)) {
        Matrix f = Matrix::Zero(2 * s.dim, s.dim);
        for (int i = 0; i < s.dim; ++i) {
          f(2 * i, i) = 1.0;
          f(2 * i + 1, i) = -1.0;
        }
        return f;
      }
      if (s.p == 1.0 && s.dim <= 6) {
        Matrix f(1 << s.dim, s.dim);
        for (int mask = 0; mask < (1 << s.dim); ++mask) {
          for (int i = 0; i < s.dim; ++i) f(mask, i) = (mask >> i) & 1 ? 1.0 : -1.0;
        }
        return f;
      }
      return Matrix();
    }
    default:
      return Matrix();
  }
}

Matrix critical_vectors(const NormedSpace& s) {
  switch (s.form) {
    case NormForm::polyhedral_vertices:
    case NormForm::polyhedral_facets:
      return ball_vertices(s);
    case NormForm::p_norm: {
      Matrix v = ball_vertices(s);
      if (v.size() > 0) return v;
      Matrix axes = Matrix::Zero(s.dim, 2 * s.dim);
      for (int i = 0; i < s.dim; ++i) {
        axes(i, 2 * i) = 1.0;
        axes(i, 2 * i + 1) = -1.0;
      }
      return axes;
    }
    case NormForm::gram: {
      Eigen::SelfAdjointEigenSolver<Matrix> es(s.gram);
      return es.eigenvectors();
    }
    case NormForm::product: {
      std::vector<Vector> all;
      for (std::size_t i = 0; i < s.components.size(); ++i) {
        Matrix cv = critical_vectors(s.components[i]);
        for (int c = 0; c < cv.cols(); ++c) all.push_back(s.bases[i] * cv.col(c));
      }
      Matrix out(s.dim, static_cast<int>(all.size()));
      for (int c = 0; c < out.cols(); ++c) out.col(c) = all[static_cast<std::size_t>(c)];
      return out;
    }
  }
  return Matrix();
}

NormValidation validate(const NormedSpace& s, int samples, std::uint64_t seed) {
  NormValidation v;
  Rng rng(seed);
  for (int i = 0; i < samples; ++i) {
    Vector a = rng.normal_vector(s.dim);
    Vector b = rng.normal_vector(s.dim);
    const double lambda = rng.uniform(-3.0, 3.0);
    const double na = norm(s, a);
    const double nb = norm(s, b);
    if (na <= 0 && a.norm() > 1e-12) {
      v.ok = false;
      v.reason = "norm vanishes on a nonzero vector";
      return v;
    }
    const double hom = std::abs(norm(s, Vector(lambda * a)) - std::abs(lambda) * na) / std::max(1.0, na);
    const double sym = std::abs(norm(s, Vector(-a)) - na) / std::max(1.0, na);
    const double tri = (norm(s, Vector(a + b)) - na - nb) / std::max(1.0, na + nb);
    v.worst_homogeneity = std::max(v.worst_homogeneity, std::max(hom, sym));
    v.worst_triangle = std::max(v.worst_triangle, tri);
  }
  if (v.worst_homogeneity > 1e-9) {
    v.ok = false;
    v.reason = "homogeneity violated beyond tolerance";
  } else if (v.worst_triangle > 1e-9) {
    v.ok = false;
    v.reason = "triangle inequality violated beyond tolerance";
  }
  return v;
}

ProductCheck is_product_decomposition(const NormedSpace& s, const Subspace& s1, const Subspace& s2,
                                      int samples, std::uint64_t seed, double tol) {
  if (s1.ambient() != s.dim || s2.ambient() != s.dim) {
    throw std::invalid_argument("subspace ambient dimension mismatch");
  }
  if (s1.dim() + s2.dim() != s.dim || !complementary(s1, s2)) {
    throw std::invalid_argument("subspaces do not form a direct sum of the space");
  }
  ProductCheck pc;
  auto residual = [&](const Vector& v1, const Vector& v2) {
    const double n1 = norm(s, v1);
    const double n2 = norm(s, v2);
    const double n = norm(s, Vector(v1 + v2));
    const double denom = std::max(n1 * n1 + n2 * n2, 1e-30);
    return std::abs(n * n - n1 * n1 - n2 * n2) / denom;
  };
  Rng rng(seed);
  for (int i = 0; i < samples; ++i) {
    Vector v1 = s1.basis * rng.normal_vector(s1.dim());
    Vector v2 = s2.basis * rng.normal_vector(s2.dim());
    if (v1.norm() < 1e-12 || v2.norm() < 1e-12) continue;
    pc.worst = std::max(pc.worst, residual(v1, v2));
    ++pc.pairs_tested;
  }
  Matrix cv = critical_vectors(s);
  if (cv.cols() > 0 && cv.cols() <= 96) {
    Matrix p1 = projector_onto_along(s1, s2);
    Matrix p2 = projector_onto_along(s2, s1);
    Matrix c1 = p1 * cv;
    Matrix c2 = p2 * cv;
    for (int i = 0; i < c1.cols(); ++i) {
      if (c1.col(i).norm() < 1e-9) continue;
      for (int j = 0; j < c2.cols(); ++j) {
        if (c2.col(j).norm() < 1e-9) continue;
        pc.worst = std::max(pc.worst, residual(c1.col(i), c2.col(j)));
        ++pc.pairs_tested;
      }
    }
  }
  pc.ok = pc.worst <= tol;
  if (!pc.ok) pc.reason = "Pythagorean norm identity fails on a sampled pair";
  return pc;
}

bool hull_dimension_additivity(const NormedSpace& a, const NormedSpace& b) {
  NormedSpace prod = product_space({a, b});
  Matrix joint(prod.dim, prod.dim);
  joint << prod.bases[0], prod.bases[1];
  return prod.dim == a.dim + b.dim && rank_of(joint) == prod.dim;
}

std::vector<std::pair<Subspace, Subspace>> decomposition_candidates(
    const NormedSpace& s, int samples, std::uint64_t seed, double tol) {
  std::vector<std::pair<Subspace, Subspace>> out;
  auto try_pair = [&](const Subspace& s1, const Subspace& s2) {
    if (s1.dim() == 0 || s2.dim() == 0) return;
    if (s1.dim() + s2.dim() != s.dim || !complementary(s1, s2)) return;
    if (is_product_decomposition(s, s1, s2, samples, seed, tol).ok) out.emplace_back(s1, s2);
  };
  if (s.form == NormForm::product && s.components.size() >= 2 && s.components.size() <= 12) {
    const int k = static_cast<int>(s.components.size());
    for (int mask = 0; mask < (1 << (k - 1)); ++mask) {
      // component 0 stays in the first part; drop the trivial grouping
      std::vector<int> left{0}, right;
      for (int i = 1; i < k; ++i) ((mask >> (i - 1)) & 1 ? left : right).push_back(i);
      if (right.empty()) continue;
      auto span_of_group = [&](const std::vector<int>& g) {
        int cols = 0;
        for (int i : g) cols += s.components[static_cast<std::size_t>(i)].dim;
        Matrix b(s.dim, cols);
        int off = 0;
        for (int i : g) {
          b.middleCols(off, s.components[static_cast<std::size_t>(i)].dim) = s.bases[static_cast<std::size_t>(i)];
          off += s.components[static_cast<std::size_t>(i)].dim;
        }
        return Subspace::span_of(b);
      };
      try_pair(span_of_group(left), span_of_group(right));
    }
    return out;
  }
  if (s.form == NormForm::gram) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(s.gram);
    Matrix u = es.eigenvectors();
    for (int i = 0; i < s.dim; ++i) {
      Matrix rest(s.dim, s.dim - 1);
      int c = 0;
      for (int j = 0; j < s.dim; ++j) {
        if (j != i) rest.col(c++) = u.col(j);
      }
      try_pair(Subspace::span_of(u.col(i)), Subspace::span_of(rest));
    }
    return out;
  }
  // coordinate splits for the remaining forms
  for (int i = 0; i < s.dim && s.dim >= 2; ++i) {
    Matrix one = Matrix::Zero(s.dim, 1);
    one(i, 0) = 1.0;
    Matrix rest = Matrix::Zero(s.dim, s.dim - 1);
    int c = 0;
    for (int j = 0; j < s.dim; ++j) {
      if (j != i) rest(j, c++) = 1.0;
    }
    try_pair(Subspace::span_of(one), Subspace::span_of(rest));
  }
  return out;
}

}  // namespace derham
