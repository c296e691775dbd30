#include "derham/rigidity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "derham/loewner.hpp"
#include "derham/parallel.hpp"
#include "derham/rng.hpp"

namespace derham {

namespace {

struct Candidate {
  double value = -1.0;
  Vector x, y;
};

// canonical representative of the ray through (x, y): Euclidean-unit with the
// first nonzero coordinate positive, so ties break deterministically
void canonicalize(Vector& x, Vector& y) {
  double n = std::sqrt(x.squaredNorm() + y.squaredNorm());
  if (n <= 0) return;
  x /= n;
  y /= n;
  for (int i = 0; i < x.size() + y.size(); ++i) {
    double c = i < x.size() ? x[i] : y[i - x.size()];
    if (std::abs(c) > 1e-14) {
      if (c < 0) {
        x = -x;
        y = -y;
      }
      break;
    }
  }
}

bool lexicographically_before(const Vector& x1, const Vector& y1, const Vector& x2,
                              const Vector& y2) {
  for (int i = 0; i < x1.size(); ++i) {
    if (x1[i] != x2[i]) return x1[i] < x2[i];
  }
  for (int i = 0; i < y1.size(); ++i) {
    if (y1[i] != y2[i]) return y1[i] < y2[i];
  }
  return false;
}

void consider(Candidate& best, const NormedSpace& s, Vector x, Vector y) {
  canonicalize(x, y);
  double v = defect_ratio(s, x, y);
  if (!std::isfinite(v)) return;
  if (v > best.value ||
      (v == best.value && best.x.size() > 0 && lexicographically_before(x, y, best.x, best.y))) {
    best = Candidate{v, x, y};
  }
}

// projected ascent on the defect ratio over the Euclidean sphere of pairs
Candidate ascend_pair(const NormedSpace& s, Vector x, Vector y, int iters = 200) {
  const int d = s.dim;
  canonicalize(x, y);
  double value = defect_ratio(s, x, y);
  double eta = 0.5;
  for (int it = 0; it < iters && eta > 1e-10; ++it) {
    Vector gx = Vector::Zero(d), gy = Vector::Zero(d);
    const Vector sum = x + y, dif = x - y;
    const double np = norm(s, sum), nm = norm(s, dif);
    const double nx = norm(s, x), ny = norm(s, y);
    const double den = 2.0 * (nx * nx + ny * ny);
    if (den <= 1e-28) break;
    const double num = np * np + nm * nm;
    if (np > 1e-14) {
      Vector g = norm_subgradient(s, sum);
      gx += 2.0 * np * g;
      gy += 2.0 * np * g;
    }
    if (nm > 1e-14) {
      Vector g = norm_subgradient(s, dif);
      gx += 2.0 * nm * g;
      gy -= 2.0 * nm * g;
    }
    if (nx > 1e-14) gx -= (num / den) * 4.0 * nx * norm_subgradient(s, x);
    if (ny > 1e-14) gy -= (num / den) * 4.0 * ny * norm_subgradient(s, y);
    gx /= den;
    gy /= den;

    bool moved = false;
    for (; eta > 1e-10; eta *= 0.5) {
      Vector xn = x + eta * gx, yn = y + eta * gy;
      canonicalize(xn, yn);
      double vn = defect_ratio(s, xn, yn);
      if (std::isfinite(vn) && vn > value + 1e-15) {
        x = xn;
        y = yn;
        value = vn;
        eta *= 1.3;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  return Candidate{value, x, y};
}

// exact maximum over the extreme points of the squared-sum ball of C^2 for
// polyhedral data: pairs (cos t * u, sin t * v) of ball vertices, with the
// active facet pair reducing the inner maximization to a 2x2 eigenvalue
bool extreme_pair_scan(const NormedSpace& s, const Matrix& verts, const Matrix& facets,
                       Candidate& best) {
  const double cost = static_cast<double>(verts.cols()) * verts.cols() *
                      static_cast<double>(facets.rows()) * facets.rows();
  if (verts.cols() == 0 || facets.rows() == 0 || cost > 1e8) return false;
  for (int iu = 0; iu < verts.cols(); ++iu) {
    for (int iv = 0; iv < verts.cols(); ++iv) {
      const Vector alpha = facets * verts.col(iu);
      const Vector beta = facets * verts.col(iv);
      for (int ia = 0; ia < facets.rows(); ++ia) {
        for (int ib = 0; ib < facets.rows(); ++ib) {
          const double w1x = alpha[ia], w1y = beta[ia];
          const double w2x = alpha[ib], w2y = -beta[ib];
          const double a00 = 0.5 * (w1x * w1x + w2x * w2x);
          const double a01 = 0.5 * (w1x * w1y + w2x * w2y);
          const double a11 = 0.5 * (w1y * w1y + w2y * w2y);
          const double tr = a00 + a11;
          const double det = a00 * a11 - a01 * a01;
          const double lam = 0.5 * (tr + std::sqrt(std::max(0.0, tr * tr - 4.0 * det)));
          if (lam <= best.value * best.value + 1e-15) continue;
          Vector dir(2);
          dir << a01, lam - a00;
          if (dir.norm() < 1e-12) dir << lam - a11, a01;
          if (dir.norm() < 1e-12) dir << 1.0, 0.0;
          dir.normalize();
          consider(best, s, dir[0] * verts.col(iu), dir[1] * verts.col(iv));
        }
      }
    }
  }
  return true;
}

std::string intersection_name(int i) {
  switch (i) {
    case 0: return "A and B";
    case 1: return "A and Bbar";
    case 2: return "Abar and B";
    default: return "Abar and Bbar";
  }
}

// matrix of Q = P_A o P_B acting on A, in the coordinates of a's basis
Matrix q_matrix(const ProjectionPair& pp) {
  Matrix pa = projector_onto_along(pp.a, pp.abar);
  Matrix pb = projector_onto_along(pp.b, pp.bbar);
  return pp.a.basis.transpose() * (pa * (pb * pp.a.basis));
}

}  // namespace

double defect_ratio(const NormedSpace& s, const Vector& x, const Vector& y) {
  const double np = norm(s, x + y), nm = norm(s, x - y);
  const double nx = norm(s, x), ny = norm(s, y);
  const double den = 2.0 * (nx * nx + ny * ny);
  if (den <= 0) return std::numeric_limits<double>::quiet_NaN();
  return std::sqrt((np * np + nm * nm) / den);
}

DefectReport defect(const NormedSpace& s, int starts, std::uint64_t seed) {
  const int d = s.dim;
  DefectReport rep;
  std::ostringstream log;

  Candidate best;
  // the colinear pair evaluates to exactly 1, the guaranteed lower end
  consider(best, s, Vector::Unit(d, 0), Vector::Unit(d, 0));
  consider(best, s, Vector::Unit(d, 0), d > 1 ? Vector::Unit(d, 1) : Vector::Unit(d, 0));

  // critical-direction cross pairs; exact hits for polytope products
  Matrix cv = critical_vectors(s);
  {
    const int step = cv.cols() > 48 ? (static_cast<int>(cv.cols()) + 47) / 48 : 1;
    for (int i = 0; i < cv.cols(); i += step) {
      for (int j = 0; j < cv.cols(); j += step) {
        consider(best, s, cv.col(i), cv.col(j));
      }
    }
    if (cv.cols() > 0) log << "critical cross pairs scanned (" << cv.cols() << " directions); ";
  }

  // exact extreme-pair scan when the polyhedral data is available
  bool scanned = false;
  {
    Matrix verts = ball_vertices(s);
    Matrix facets = ball_facets(s);
    if (verts.cols() > 0 && facets.rows() > 0) {
      scanned = extreme_pair_scan(s, verts, facets, best);
      if (scanned) {
        log << "extreme-pair scan over " << verts.cols() << " vertices and " << facets.rows()
            << " facets; ";
      }
    }
  }

  // seeded multi-start ascent; slots are independent so the reduction is
  // deterministic regardless of the worker count
  std::vector<Candidate> found(static_cast<std::size_t>(starts));
  parallel_for(starts, [&](int i) {
    Rng rng(seed + 0x9e3779b97f4a7c15ull * static_cast<std::uint64_t>(i + 1));
    Vector z = rng.unit_vector(2 * d);
    found[static_cast<std::size_t>(i)] = ascend_pair(s, z.head(d), z.tail(d));
  });
  for (const auto& c : found) {
    if (c.x.size() > 0) consider(best, s, c.x, c.y);
  }
  log << starts << " ascent starts; ";

  // polish the incumbent
  Candidate polish = ascend_pair(s, best.x, best.y);
  consider(best, s, polish.x, polish.y);

  rep.m_value = best.value;
  rep.x = best.x;
  rep.y = best.y;
  rep.certified_lower = true;
  rep.certified_global = scanned && d <= 3;
  if (rep.certified_global) {
    log << "global: extreme-pair argument applies (polyhedral, dim <= 3)";
  } else {
    log << "value is a certified lower bound";
  }
  rep.log = log.str();
  return rep;
}

RectangularityReport extremal_rectangularity(const NormedSpace& s, const Subspace& s1,
                                             const Subspace& s2, const Vector& x, const Vector& y,
                                             double tol) {
  RectangularityReport rep;
  ProductCheck pc;
  try {
    pc = is_product_decomposition(s, s1, s2);
  } catch (const std::invalid_argument& e) {
    rep.refused = true;
    rep.reason = e.what();
    return rep;
  }
  if (!pc.ok) {
    rep.refused = true;
    rep.reason = "the given subspaces do not decompose the norm: " + pc.reason;
    return rep;
  }

  DefectReport m = defect(s);
  const double ratio = defect_ratio(s, x, y);
  if (!(std::abs(ratio - m.m_value) <= tol)) {
    rep.refused = true;
    std::ostringstream os;
    os << "the pair is not extremal: ratio " << ratio << " vs m = " << m.m_value;
    rep.reason = os.str();
    return rep;
  }

  Matrix p1 = projector_onto_along(s1, s2);
  Vector x1 = p1 * x, y1 = p1 * y;
  Vector x2 = x - x1, y2 = y - y1;
  const double scale = std::sqrt(x.squaredNorm() + y.squaredNorm());
  rep.zero_1 = std::sqrt(x1.squaredNorm() + y1.squaredNorm()) <= 1e-9 * scale;
  rep.zero_2 = std::sqrt(x2.squaredNorm() + y2.squaredNorm()) <= 1e-9 * scale;
  bool ok1 = rep.zero_1, ok2 = rep.zero_2;
  if (!rep.zero_1) {
    rep.ratio_1 = defect_ratio(s, x1, y1);
    ok1 = std::abs(rep.ratio_1 - m.m_value) <= tol;
  }
  if (!rep.zero_2) {
    rep.ratio_2 = defect_ratio(s, x2, y2);
    ok2 = std::abs(rep.ratio_2 - m.m_value) <= tol;
  }
  rep.ok = ok1 && ok2;
  if (!rep.ok) rep.reason = "a block component of the extremal pair is neither extremal nor zero";
  return rep;
}

PairValidation validate_projection_pair(const ProjectionPair& pp, bool require_transversal,
                                        int samples, std::uint64_t seed) {
  PairValidation v;
  const char* names[2] = {"A x Abar", "B x Bbar"};
  const Subspace* firsts[2] = {&pp.a, &pp.b};
  const Subspace* seconds[2] = {&pp.abar, &pp.bbar};
  for (int i = 0; i < 2; ++i) {
    ProductCheck pc;
    try {
      pc = is_product_decomposition(pp.space, *firsts[i], *seconds[i], samples, seed);
    } catch (const std::invalid_argument& e) {
      v.reason = std::string(names[i]) + ": " + e.what();
      return v;
    }
    if (!pc.ok) {
      v.reason = std::string(names[i]) + " is not a product decomposition: " + pc.reason;
      return v;
    }
  }
  const Subspace* lefts[4] = {&pp.a, &pp.a, &pp.abar, &pp.abar};
  const Subspace* rights[4] = {&pp.b, &pp.bbar, &pp.b, &pp.bbar};
  v.transversal = true;
  for (int i = 0; i < 4; ++i) {
    int dim = intersect(*lefts[i], *rights[i]).dim();
    if (dim > 0) {
      v.transversal = false;
      if (require_transversal) {
        std::ostringstream os;
        os << "the decompositions are not transversal: the intersection of " << intersection_name(i)
           << " has dimension " << dim;
        v.reason = os.str();
        return v;
      }
    }
  }
  v.ok = true;
  return v;
}

EigenReport composed_projection_eigen(const ProjectionPair& pp) {
  EigenReport rep;
  PairValidation val = validate_projection_pair(pp, true);
  if (!val.ok) {
    rep.refused = true;
    rep.reason = val.reason;
    return rep;
  }
  const NormedSpace& s = pp.space;
  const int k = pp.a.dim();
  Matrix pb = projector_onto_along(pp.b, pp.bbar);
  Matrix qa = q_matrix(pp);
  Matrix pb_a = pb * pp.a.basis;

  // top real eigenvalue of the matrix of Q
  {
    Eigen::EigenSolver<Matrix> es(qa);
    double top = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < k; ++i) {
      if (std::abs(es.eigenvalues()[i].imag()) <= 1e-8) {
        top = std::max(top, es.eigenvalues()[i].real());
      }
    }
    rep.lambda_algebraic = top;
  }

  // variational characterization: maximize |P_B x| / |x| over the sphere of A
  auto value_at = [&](const Vector& c) {
    double nw = norm(s, Vector(pp.a.basis * c));
    if (nw <= 1e-14) return 0.0;
    return norm(s, Vector(pb_a * c)) / nw;
  };
  Rng rng(0xe16e5u + static_cast<std::uint64_t>(k));
  Vector cbest = Vector::Unit(k, 0);
  double fbest = value_at(cbest);
  const int tries = 64 + k;
  for (int t = 0; t < tries; ++t) {
    Vector c = t < k ? Vector(Vector::Unit(k, t)) : rng.unit_vector(k);
    double f = value_at(c);
    double eta = 0.5;
    for (int it = 0; it < 200 && eta > 1e-12; ++it) {
      Vector w = pp.a.basis * c;
      Vector pw = pb_a * c;
      double nw = norm(s, w), npw = norm(s, pw);
      if (nw <= 1e-14) break;
      Vector grad = Vector::Zero(k);
      if (npw > 1e-14) grad += (pb_a.transpose() * norm_subgradient(s, pw)) / nw;
      grad -= (npw / (nw * nw)) * (pp.a.basis.transpose() * norm_subgradient(s, w));
      bool moved = false;
      for (; eta > 1e-12; eta *= 0.5) {
        Vector cn = (c + eta * grad).normalized();
        double fn = value_at(cn);
        if (fn > f + 1e-16) {
          c = cn;
          f = fn;
          eta *= 1.3;
          moved = true;
          break;
        }
      }
      if (!moved) break;
    }
    if (f > fbest) {
      fbest = f;
      cbest = c;
    }
  }

  // the ascent converges linearly and can stall with the eigen residual just
  // above the gate; shifted inverse iteration sharpens the vector while the
  // value stays variational
  auto residual_at = [&](const Vector& c, double f) { return (qa * c - f * f * c).norm(); };
  for (int it = 0; it < 3; ++it) {
    Matrix shifted = qa - (fbest * fbest + 1e-12) * Matrix::Identity(k, k);
    Eigen::FullPivLU<Matrix> lu(shifted);
    if (!lu.isInvertible()) break;
    Vector cn = lu.solve(cbest);
    if (!cn.allFinite() || !(cn.norm() > 0)) break;
    cn.normalize();
    if (cn.dot(cbest) < 0) cn = -cn;
    const double fn = value_at(cn);
    if (residual_at(cn, fn) >= residual_at(cbest, fbest)) break;
    cbest = cn;
    fbest = fn;
  }

  rep.lambda = fbest * fbest;
  rep.vector = (pp.a.basis * cbest).normalized();
  rep.residual = (qa * cbest - rep.lambda * cbest).norm();
  const bool in_range = rep.lambda > 1e-10 && rep.lambda < 1.0 - 1e-10;
  const bool agree = std::isfinite(rep.lambda_algebraic) &&
                     std::abs(rep.lambda - rep.lambda_algebraic) <= 1e-8;
  rep.ok = in_range && agree && rep.residual <= 1e-8;
  if (!rep.ok) rep.reason = "variational and algebraic eigen data disagree beyond tolerance";
  return rep;
}

UniqueReport check_lemma_unique(const ProjectionPair& pp, double lambda, int samples,
                                std::uint64_t seed) {
  UniqueReport rep;
  PairValidation val = validate_projection_pair(pp, true);
  if (!val.ok) {
    rep.refused = true;
    rep.reason = val.reason;
    return rep;
  }
  Matrix qa = q_matrix(pp);
  const int k = pp.a.dim();
  double off = (qa - lambda * Matrix::Identity(k, k)).cwiseAbs().maxCoeff();
  if (off > 1e-8) {
    std::ostringstream os;
    os << "Q is not the claimed multiple of the identity: max deviation " << off;
    rep.refused = true;
    rep.reason = os.str();
    return rep;
  }
  if (!(lambda > 1e-9 && lambda < 1.0 - 1e-9)) {
    rep.refused = true;
    rep.reason = "lambda must lie strictly between 0 and 1";
    return rep;
  }
  rep.lambda = lambda;
  const double sv = std::sqrt((1.0 - lambda) / lambda);
  rep.slope = sv;

  const NormedSpace& s = pp.space;
  Matrix pb = projector_onto_along(pp.b, pp.bbar);
  Matrix pabar = projector_onto_along(pp.abar, pp.a);
  // identification of Abar with A; an isometry by the projection slopes
  Matrix iso = (pabar * (pb * pp.a.basis)) / std::sqrt(lambda * (1.0 - lambda));

  Rng rng(seed);
  for (int i = 0; i < samples; ++i) {
    Vector cx = rng.unit_vector(k);
    Vector cy = rng.unit_vector(k);
    Vector x = pp.a.basis * cx, y = pp.a.basis * cy;
    Vector ix = iso * cx, iy = iso * cy;

    double niso = std::abs(norm(s, ix) - norm(s, x)) / std::max(1.0, norm(s, x));
    rep.worst_isometry = std::max(rep.worst_isometry, niso);

    // the product decomposition along B x Bbar, written through the
    // identification (p, q) -> p + I(q) of C with A x A
    double t1 = norm(s, Vector(x + sv * ix));
    double t2 = norm(s, Vector(-sv * y + iy));
    double t3 = norm(s, Vector(x - sv * y + sv * ix + iy));
    double res = std::abs(t1 * t1 + t2 * t2 - t3 * t3) / std::max(1.0, t3 * t3);
    rep.worst_identity = std::max(rep.worst_identity, res);

    double nx = norm(s, x), ny = norm(s, y);
    double lhs = (1.0 + sv * sv) * (nx * nx + ny * ny);
    double nmy = norm(s, Vector(x - sv * y));
    double npx = norm(s, Vector(sv * x + y));
    double red = std::abs(lhs - nmy * nmy - npx * npx) / std::max(1.0, lhs);
    rep.worst_reduced = std::max(rep.worst_reduced, red);
  }
  rep.identity_ok = rep.worst_identity <= 1e-8 && rep.worst_isometry <= 1e-8;

  LoewnerResult eu = euclideanization(s);
  if (eu.converged) rep.boundary_dev = boundary_deviation(s, eu.ellipsoid.shape);
  rep.euclidean_confirmed = eu.converged && rep.boundary_dev <= 1e-6;
  return rep;
}

StrikeReport check_strike(const ProjectionPair& pp, int starts, std::uint64_t seed) {
  StrikeReport rep;
  PairValidation val = validate_projection_pair(pp, true);
  if (!val.ok) {
    rep.refused = true;
    rep.reason = val.reason;
    return rep;
  }
  const NormedSpace& s = pp.space;
  DefectReport m = defect(s, starts, seed);
  rep.m_value = m.m_value;
  LoewnerResult eu = euclideanization(s);
  if (eu.converged) rep.boundary_dev = boundary_deviation(s, eu.ellipsoid.shape);
  rep.euclidean_confirmed = rep.m_value <= 1.0 + 1e-6 && eu.converged && rep.boundary_dev <= 1e-6;
  if (rep.euclidean_confirmed) {
    rep.chain = "defect and ellipsoid certificates agree";
    return rep;
  }

  // a transversal pair with defect above tolerance cannot be consistent; run
  // the reduction chain anyway and report its data, never a verdict
  rep.inconsistency = true;
  std::ostringstream chain;
  chain << "m = " << rep.m_value << ", ellipsoid deviation = " << rep.boundary_dev << "; ";

  Matrix pa = projector_onto_along(pp.a, pp.abar);
  Matrix pb = projector_onto_along(pp.b, pp.bbar);
  Matrix pbbar = projector_onto_along(pp.bbar, pp.b);

  Vector xa = pa * m.x, ya = pa * m.y;
  Vector xr = m.x - xa, yr = m.y - ya;
  const double na = std::sqrt(xa.squaredNorm() + ya.squaredNorm());
  const double nr = std::sqrt(xr.squaredNorm() + yr.squaredNorm());
  chain << "extremal line split along the first decomposition: component ratios ";
  if (na > 1e-9) {
    chain << defect_ratio(s, xa, ya);
  } else {
    chain << "zero";
  }
  chain << " / ";
  if (nr > 1e-9) {
    chain << defect_ratio(s, xr, yr);
  } else {
    chain << "zero";
  }
  chain << "; ";

  Vector ux = na >= nr ? xa : xr, uy = na >= nr ? ya : yr;
  Vector qux = pa * (pb * ux), quy = pa * (pb * uy);
  const double usq = ux.squaredNorm() + uy.squaredNorm();
  double mu = 0.0, eigres = 0.0;
  if (usq > 1e-18) {
    mu = (qux.dot(ux) + quy.dot(uy)) / usq;
    eigres = std::sqrt((qux - mu * ux).squaredNorm() + (quy - mu * uy).squaredNorm()) /
             std::sqrt(usq);
  }
  chain << "restricted composed projection: scalar " << mu << ", eigen residual " << eigres
        << "; ";

  Matrix lbasis(2 * s.dim, 2);
  lbasis.col(0) << pb * ux, pb * uy;
  lbasis.col(1) << pbbar * ux, pbbar * uy;
  Subspace v = Subspace::span_of(lbasis.topRows(s.dim));
  Subspace w = Subspace::span_of(lbasis.bottomRows(s.dim));
  Subspace ctilde = subspace_sum(v, w);
  chain << "span dims: L = " << Subspace::span_of(lbasis).dim() << ", V = " << v.dim()
        << ", W = " << w.dim() << ", V + W = " << ctilde.dim() << "; ";

  Vector px = ctilde.project(m.x), py = ctilde.project(m.y);
  if (px.squaredNorm() + py.squaredNorm() > 1e-18) {
    chain << "extremal pair projected into V + W has ratio " << defect_ratio(s, px, py) << "; ";
  }
  chain << "the reduction forces V + W Euclidean while the defect stays above tolerance, so the "
           "input or the arithmetic is inconsistent";
  rep.chain = chain.str();
  return rep;
}

IntersectionReport check_maininter_unbound(const NormedSpace& s, const ProjectionPair& pp,
                                           int samples, std::uint64_t seed) {
  IntersectionReport rep;
  PairValidation val = validate_projection_pair(pp, false);
  if (!val.ok) {
    rep.reason = val.reason;
    return rep;
  }
  Subspace f = intersect(pp.a, pp.b);
  rep.intersection_dim = f.dim();

  if (f.dim() == 0) {
    rep.ok = true;
    rep.structural = true;
    rep.reason = "A cap B is trivial, a trivial factor of B";
    if (intersect(pp.b, pp.abar).dim() == 0) {
      rep.reason += "; B meets neither A nor Abar, and as a linear subspace it is complete";
    }
    return rep;
  }
  if (f.dim() == pp.b.dim()) {
    rep.ok = true;
    rep.structural = true;
    rep.reason = "A cap B equals B, a factor of itself";
    return rep;
  }

  // candidate complements of F inside B
  std::vector<Subspace> candidates;
  {
    Matrix rest = pp.b.basis - f.basis * (f.basis.transpose() * pp.b.basis);
    Subspace g = Subspace::span_of(rest);
    if (g.dim() == pp.b.dim() - f.dim()) candidates.push_back(g);
  }
  {
    Matrix cv = critical_vectors(s);
    std::vector<Vector> inside;
    for (int i = 0; i < cv.cols(); ++i) {
      Vector c = cv.col(i);
      if ((c - pp.b.project(c)).norm() > 1e-9 * c.norm()) continue;
      if ((c - f.project(c)).norm() <= 1e-9 * c.norm()) continue;
      inside.push_back(c);
    }
    if (!inside.empty()) {
      Matrix m(s.dim, static_cast<int>(inside.size()));
      for (int i = 0; i < m.cols(); ++i) m.col(i) = inside[static_cast<std::size_t>(i)];
      Subspace g = Subspace::span_of(m);
      if (g.dim() == pp.b.dim() - f.dim() && intersect(g, f).dim() == 0) candidates.push_back(g);
    }
  }

  for (const auto& g : candidates) {
    double worst = 0.0;
    Rng rng(seed);
    auto test_pair = [&](const Vector& u, const Vector& w) {
      double nu = norm(s, u), nw = norm(s, w), nsum = norm(s, Vector(u + w));
      double res = std::abs(nsum * nsum - nu * nu - nw * nw) / std::max(1.0, nsum * nsum);
      worst = std::max(worst, res);
    };
    for (int i = 0; i < samples; ++i) {
      test_pair(f.basis * rng.unit_vector(f.dim()), g.basis * rng.unit_vector(g.dim()));
    }
    Matrix cv = critical_vectors(s);
    for (int i = 0; i < cv.cols(); ++i) {
      Vector c = cv.col(i);
      bool in_f = (c - f.project(c)).norm() <= 1e-9 * c.norm();
      bool in_g = (c - g.project(c)).norm() <= 1e-9 * c.norm();
      if (!in_f && !in_g) continue;
      for (int j = 0; j < cv.cols(); ++j) {
        Vector e = cv.col(j);
        if (in_f && (e - g.project(e)).norm() <= 1e-9 * e.norm()) test_pair(c, e);
        if (in_g && (e - f.project(e)).norm() <= 1e-9 * e.norm()) test_pair(e, c);
      }
    }
    if (worst <= 1e-9) {
      rep.ok = true;
      rep.complement = g;
      rep.worst = worst;
      rep.reason = "A cap B splits off inside B against the found complement";
      return rep;
    }
    rep.worst = worst;
  }
  rep.reason = "no rectangular complement of A cap B inside B passed the Pythagoras check";
  return rep;
}

}  // namespace derham
