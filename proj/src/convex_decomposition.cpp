#include "derham/convex_decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "derham/polyhedra.hpp"

namespace derham {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

LemmaReport refuse(const std::string& why) {
  LemmaReport r;
  r.refused = true;
  r.reason = why;
  return r;
}

bool gram_orthogonal(const Matrix& gram, const Subspace& u, const Subspace& v, double tol = 1e-9) {
  if (u.dim() == 0 || v.dim() == 0) return true;
  return (u.basis.transpose() * gram * v.basis).cwiseAbs().maxCoeff() <= tol;
}

// the decomposition preconditions shared by the two lemmas
std::optional<LemmaReport> orthogonality_precheck(const ConvexBody& c, const Matrix& gram,
                                                  const Subspace& a, const Subspace& abar,
                                                  const Subspace& b, const Subspace& bbar) {
  if (gram.rows() != c.dim || gram.cols() != c.dim) return refuse("gram matrix has wrong shape");
  if (!complementary(a, abar)) return refuse("A and Abar do not decompose the space");
  if (!complementary(b, bbar)) return refuse("B and Bbar do not decompose the space");
  if (!gram_orthogonal(gram, a, abar)) return refuse("A and Abar are not orthogonal");
  if (!gram_orthogonal(gram, b, bbar)) return refuse("B and Bbar are not orthogonal");
  return std::nullopt;
}

// c cut by a subspace; supports bounded bodies and full-lineality spaces
ConvexBody section_body(const ConvexBody& c, const Subspace& s) {
  if (s.dim() == 0) return make_body(Matrix::Zero(c.dim, 1), Matrix(), c.gram);
  Subspace l = lineality_space(c);
  if (l.dim() == c.dim) return make_body(Matrix::Zero(c.dim, 1), s.basis, c.gram);
  if (l.dim() != 0) throw std::runtime_error("sections of mixed generator bodies are not supported");
  Subspace h = linear_hull(c);
  Subspace cut = intersect(h, s);
  if (cut.dim() == 0) return make_body(Matrix::Zero(c.dim, 1), Matrix(), c.gram);
  // work in hull coordinates so facet enumeration sees a full-dimensional body
  Matrix vh = h.basis.transpose() * c.vertices;
  Matrix facets = vertices_to_facets(vh);
  Matrix cut_in_h = h.basis.transpose() * cut.basis;
  Matrix sec = polytope_section(facets, Subspace::span_of(cut_in_h));
  return make_body(h.basis * sec, Matrix(), c.gram);
}

bool bodies_equal(const ConvexBody& x, const ConvexBody& y, double tol = 1e-9) {
  Subspace lx = lineality_space(x);
  Subspace ly = lineality_space(y);
  if (lx.dim() != ly.dim() || !lx.contains(ly) || !ly.contains(lx)) return false;
  for (int i = 0; i < x.vertices.cols(); ++i) {
    if (!body_contains(y, x.vertices.col(i), tol)) return false;
  }
  for (int i = 0; i < y.vertices.cols(); ++i) {
    if (!body_contains(x, y.vertices.col(i), tol)) return false;
  }
  return true;
}

struct DirectionGroups {
  Matrix dirs;                    // unit edge directions
  std::vector<int> group;         // union-find parent per direction
  int find(int i) { return group[static_cast<std::size_t>(i)] == i ? i : group[static_cast<std::size_t>(i)] = find(group[static_cast<std::size_t>(i)]); }
  void merge(int i, int j) { group[static_cast<std::size_t>(find(i))] = find(j); }
};

int direction_index(const Matrix& dirs, const Vector& edge) {
  Vector d = edge.normalized();
  for (int k = 0; k < d.size(); ++k) {
    if (std::abs(d[k]) > 1e-9) {
      if (d[k] < 0) d = -d;
      break;
    }
  }
  for (int c = 0; c < dirs.cols(); ++c) {
    if ((dirs.col(c) - d).norm() <= 1e-6) return c;
  }
  return -1;
}

bool vertex_present(const Matrix& v, const Vector& p, double tol) {
  for (int i = 0; i < v.cols(); ++i) {
    if ((v.col(i) - p).norm() <= tol) return true;
  }
  return false;
}

// assigns cluster ids to projected points under a distance tolerance
std::vector<int> cluster_ids(const Matrix& pts, double tol, int& count) {
  std::vector<int> id(static_cast<std::size_t>(pts.cols()), -1);
  count = 0;
  for (int i = 0; i < pts.cols(); ++i) {
    for (int j = 0; j < i; ++j) {
      if ((pts.col(i) - pts.col(j)).norm() <= tol) {
        id[static_cast<std::size_t>(i)] = id[static_cast<std::size_t>(j)];
        break;
      }
    }
    if (id[static_cast<std::size_t>(i)] < 0) id[static_cast<std::size_t>(i)] = count++;
  }
  return id;
}

struct SplitOutcome {
  bool ok = false;
  Matrix v1, v2;  // vertex sets of the two factors
};

// grid test: vertices must be exactly the pairwise sums of their projections
SplitOutcome try_split(const Matrix& v, const Subspace& s1, const Subspace& s2, const Subspace& hull) {
  SplitOutcome out;
  const int d = static_cast<int>(v.rows());
  if (s1.dim() == 0 || s2.dim() == 0) return out;
  if (s1.dim() + s2.dim() != hull.dim()) return out;
  if (intersect(s1, s2).dim() != 0) return out;
  Subspace along1 = s2;
  Subspace along2 = s1;
  if (hull.dim() < d) {
    Subspace rest = orthogonal_complement(hull);
    along1 = subspace_sum(s2, rest);
    along2 = subspace_sum(s1, rest);
  }
  Matrix p1, p2;
  try {
    p1 = projector_onto_along(s1, along1) * v;
    p2 = projector_onto_along(s2, along2) * v;
  } catch (const std::invalid_argument&) {
    return out;
  }
  const double scale = std::max(1.0, v.cwiseAbs().maxCoeff());
  int n1 = 0, n2 = 0;
  std::vector<int> id1 = cluster_ids(p1, 1e-7 * scale, n1);
  std::vector<int> id2 = cluster_ids(p2, 1e-7 * scale, n2);
  if (n1 < 2 || n2 < 2) return out;
  if (static_cast<long>(n1) * n2 != v.cols()) return out;
  std::vector<char> seen(static_cast<std::size_t>(n1 * n2), 0);
  for (int i = 0; i < v.cols(); ++i) {
    char& cell = seen[static_cast<std::size_t>(id1[static_cast<std::size_t>(i)] * n2 + id2[static_cast<std::size_t>(i)])];
    if (cell) return out;  // two vertices collide in the grid
    cell = 1;
  }
  out.ok = true;
  out.v1 = extreme_points(p1);
  out.v2 = extreme_points(p2);
  return out;
}

// recursive splitting of a line-free vertex set; appends indecomposable leaves
void split_recursive(const Matrix& v, std::optional<Matrix> gram,
                     std::vector<DirectSumPart>& parts, bool& partial, std::string& note) {
  Subspace hull = Subspace::span_of(v);
  if (hull.dim() == 0) return;
  auto emit_leaf = [&]() {
    parts.push_back({hull, make_body(v, Matrix(), gram)});
  };
  if (hull.dim() == 1) { emit_leaf(); return; }

  auto edges = polytope_edges(v);
  Matrix dirs = edge_directions(v, edges);
  const int m = static_cast<int>(dirs.cols());
  if (m <= 1) { emit_leaf(); return; }

  DirectionGroups g;
  g.dirs = dirs;
  g.group.resize(static_cast<std::size_t>(m));
  std::iota(g.group.begin(), g.group.end(), 0);

  // a split separating two edge directions at a common vertex forces the
  // fourth parallelogram point to be a vertex; merge when it is absent
  const double scale = std::max(1.0, v.cwiseAbs().maxCoeff());
  std::vector<std::vector<std::pair<int, int>>> incident(static_cast<std::size_t>(v.cols()));
  for (const auto& [a, b] : edges) {
    int di = direction_index(dirs, v.col(b) - v.col(a));
    incident[static_cast<std::size_t>(a)].emplace_back(b, di);
    incident[static_cast<std::size_t>(b)].emplace_back(a, di);
  }
  for (int vi = 0; vi < v.cols(); ++vi) {
    const auto& inc = incident[static_cast<std::size_t>(vi)];
    for (std::size_t x = 0; x < inc.size(); ++x) {
      for (std::size_t y = x + 1; y < inc.size(); ++y) {
        if (g.find(inc[x].second) == g.find(inc[y].second)) continue;
        Vector fourth = v.col(inc[x].first) + v.col(inc[y].first) - v.col(vi);
        if (!vertex_present(v, fourth, 1e-7 * scale)) g.merge(inc[x].second, inc[y].second);
      }
    }
  }
  // groups with intersecting spans cannot be separated either
  for (bool changed = true; changed;) {
    changed = false;
    std::vector<int> roots;
    for (int i = 0; i < m; ++i) {
      if (g.find(i) == i) roots.push_back(i);
    }
    auto span_of_root = [&](int r) {
      std::vector<int> cols;
      for (int i = 0; i < m; ++i) {
        if (g.find(i) == r) cols.push_back(i);
      }
      Matrix b(v.rows(), static_cast<int>(cols.size()));
      for (int c = 0; c < b.cols(); ++c) b.col(c) = dirs.col(cols[static_cast<std::size_t>(c)]);
      return Subspace::span_of(b);
    };
    for (std::size_t x = 0; x < roots.size() && !changed; ++x) {
      for (std::size_t y = x + 1; y < roots.size() && !changed; ++y) {
        Subspace sx = span_of_root(roots[x]);
        Subspace sy = span_of_root(roots[y]);
        if (intersect(sx, sy).dim() > 0) {
          g.merge(roots[x], roots[y]);
          changed = true;
        }
      }
    }
  }

  std::vector<int> roots;
  for (int i = 0; i < m; ++i) {
    if (g.find(i) == i) roots.push_back(i);
  }
  const int k = static_cast<int>(roots.size());
  if (k == 1) { emit_leaf(); return; }
  if (k > 18) {
    partial = true;
    note = "direction group count above the search cap";
    emit_leaf();
    return;
  }

  auto span_of_mask = [&](unsigned mask, bool complementary_side) {
    std::vector<int> cols;
    for (int i = 0; i < m; ++i) {
      int r = g.find(i);
      int pos = static_cast<int>(std::find(roots.begin(), roots.end(), r) - roots.begin());
      const bool inside = (mask >> pos) & 1u;
      if (inside != complementary_side) cols.push_back(i);
    }
    Matrix b(v.rows(), static_cast<int>(cols.size()));
    for (int c = 0; c < b.cols(); ++c) b.col(c) = dirs.col(cols[static_cast<std::size_t>(c)]);
    return Subspace::span_of(b);
  };

  for (unsigned mask = 0; mask + 1 < (1u << (k - 1)); ++mask) {
    // root 0 always on the first side; mask enumerates the other roots,
    // excluding the assignment that would leave the second side empty
    unsigned full_mask = (mask << 1) | 1u;
    Subspace s1 = span_of_mask(full_mask, false);
    Subspace s2 = span_of_mask(full_mask, true);
    SplitOutcome so = try_split(v, s1, s2, hull);
    if (so.ok) {
      split_recursive(so.v1, gram, parts, partial, note);
      split_recursive(so.v2, gram, parts, partial, note);
      return;
    }
  }
  emit_leaf();
}

}  // namespace

ConvexBody make_body(const Matrix& vertices, const Matrix& lineality, std::optional<Matrix> gram) {
  require(vertices.cols() >= 1, "a body needs at least one point");
  ConvexBody c;
  c.dim = static_cast<int>(vertices.rows());
  if (lineality.size() > 0) {
    require(lineality.rows() == vertices.rows(), "lineality dimension mismatch");
    c.lineality = Subspace::span_of(lineality).basis;
  } else {
    c.lineality = Matrix::Zero(c.dim, 0);
  }
  if (gram) {
    require(gram->rows() == c.dim && gram->cols() == c.dim, "gram matrix has wrong shape");
    require((*gram - gram->transpose()).norm() <= 1e-9 * std::max(1.0, gram->norm()),
            "gram matrix must be symmetric");
  }
  c.gram = std::move(gram);
  // canonical bounded part: vertices modulo the lineality span
  Matrix v = vertices;
  if (c.lineality.cols() > 0) {
    Subspace l{c.lineality};
    Matrix p = Matrix::Identity(c.dim, c.dim) - l.basis * l.basis.transpose();
    v = p * v;
  }
  c.vertices = extreme_points(v);
  require(in_hull(c.vertices, c.lineality, Vector::Zero(c.dim)), "the body must contain the origin");
  return c;
}

bool body_contains(const ConvexBody& c, const Vector& p, double tol) {
  return in_hull(c.vertices, c.lineality, p, tol);
}

Subspace lineality_space(const ConvexBody& c) { return Subspace::span_of(c.lineality); }

Subspace linear_hull(const ConvexBody& c) {
  Matrix joint(c.dim, c.vertices.cols() + c.lineality.cols());
  joint << c.vertices, c.lineality;
  return Subspace::span_of(joint);
}

DirectSumDecomposition gruber_decompose(const ConvexBody& c, int dim_cap) {
  DirectSumDecomposition d;
  d.orthogonal = c.gram.has_value();
  Subspace l = lineality_space(c);
  Matrix v = c.vertices;
  if (l.dim() > 0) {
    d.parts.push_back({l, make_body(Matrix::Zero(c.dim, 1), l.basis, c.gram)});
    // the bounded part is already canonicalized orthogonally to L; re-project
    // under the attached inner product when one is present
    if (c.gram) {
      Subspace w = orthogonal_complement(l, &*c.gram);
      v = projector_onto_along(w, l) * v;
    }
  }
  Subspace hull = Subspace::span_of(v);
  if (hull.dim() > dim_cap) {
    d.partial = true;
    d.note = "hull dimension above the search cap";
    if (hull.dim() > 0) d.parts.push_back({hull, make_body(v, Matrix(), c.gram)});
    return d;
  }
  split_recursive(v, c.gram, d.parts, d.partial, d.note);
  return d;
}

bool is_direct_split(const ConvexBody& c, const Subspace& s1, const Subspace& s2, double tol) {
  (void)tol;
  if (lineality_space(c).dim() > 0) return false;
  return try_split(c.vertices, s1, s2, linear_hull(c)).ok;
}

LemmaReport check_lemma_eucl(const ConvexBody& c, const Matrix& gram, const Subspace& a,
                             const Subspace& abar, const Subspace& b, const Subspace& bbar) {
  if (auto pre = orthogonality_precheck(c, gram, a, abar, b, bbar)) return *pre;
  LemmaReport r;
  Subspace ab = intersect(a, b);
  ConvexBody body_ab = section_body(c, ab);
  ConvexBody body_abar = section_body(c, abar);
  ConvexBody target = section_body(c, b);

  Matrix sum_vertices = minkowski_sum(body_ab.vertices, body_abar.vertices);
  Matrix sum_lineality(c.dim, body_ab.lineality.cols() + body_abar.lineality.cols());
  sum_lineality << body_ab.lineality, body_abar.lineality;

  Matrix pb = projector_onto_along(b, bbar);
  ConvexBody image = make_body(pb * sum_vertices, pb * sum_lineality, c.gram);
  r.ok = bodies_equal(image, target);
  if (!r.ok) r.reason = "projected sum does not reproduce the B-part";
  return r;
}

LemmaReport check_lemma_euclhelp(const ConvexBody& c, const Matrix& gram, const Subspace& a,
                                 const Subspace& abar, const Subspace& b, const Subspace& bbar) {
  if (auto pre = orthogonality_precheck(c, gram, a, abar, b, bbar)) return *pre;
  if (intersect(b, a).dim() != 0) return refuse("precondition B cap A = {0} fails");
  if (intersect(b, abar).dim() != 0) return refuse("precondition B cap Abar = {0} fails");
  LemmaReport r;
  ConvexBody body_b = section_body(c, b);
  Subspace lb = lineality_space(body_b);
  Subspace hb = linear_hull(body_b);
  r.ok = lb.dim() == hb.dim() && hb.contains(lb);
  if (!r.ok) r.reason = "the B-part is not a linear space";
  return r;
}

}  // namespace derham
