// End-to-end acceptance battery: twelve criteria, one PASS/FAIL line each.
// Exit status is the number of failed criteria.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "derham/convex_decomposition.hpp"
#include "derham/factorizer.hpp"
#include "derham/generator.hpp"
#include "derham/loewner.hpp"
#include "derham/metric_space.hpp"
#include "derham/normed_space.hpp"
#include "derham/product_structure.hpp"
#include "derham/rigidity.hpp"
#include "derham/rng.hpp"

namespace {

using namespace derham;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void fail(const std::string& why) {
    if (pass) detail << why;
    pass = false;
  }
};

FiniteMetricSpace random_cloud(int n, std::uint64_t seed, const std::string& prefix) {
  Rng rng(seed);
  const int dim = std::max(2, n / 2 + 1);
  Matrix pts(dim, n);
  for (int i = 0; i < n; ++i) pts.col(i) = rng.normal_vector(dim);
  const double q = rng.uniform(0.75, 0.95);
  Matrix d = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      d(i, j) = d(j, i) = std::pow((pts.col(i) - pts.col(j)).norm(), q);
    }
  }
  std::vector<std::string> labels;
  for (int i = 0; i < n; ++i) labels.push_back(prefix + std::to_string(i));
  return FiniteMetricSpace(labels, d);
}

FiniteMetricSpace segment(double len, const std::string& prefix) {
  Matrix d(2, 2);
  d << 0, len, len, 0;
  return FiniteMetricSpace({prefix + "0", prefix + "1"}, d);
}

// seeded desk-scale corpus, every space at most 12 points
std::vector<std::pair<std::string, FiniteMetricSpace>> fuzz_corpus() {
  std::vector<std::pair<std::string, FiniteMetricSpace>> out;
  out.emplace_back("grid-3-4", product(segment(3, "a"), segment(4, "b")));
  out.emplace_back("prod-2x3", product(random_cloud(2, 21, "y"), random_cloud(3, 22, "z")));
  out.emplace_back("prod-3x3", product(random_cloud(3, 23, "y"), random_cloud(3, 24, "z")));
  out.emplace_back("prod-2x2", product(random_cloud(2, 25, "y"), random_cloud(2, 26, "z")));
  out.emplace_back("prod-3x4", product(random_cloud(3, 27, "y"), random_cloud(4, 28, "z")));
  out.emplace_back("prod-2x2x3",
                   product(product(random_cloud(2, 29, "y"), random_cloud(2, 30, "z")),
                           random_cloud(3, 31, "w")));
  out.emplace_back("prod-2x2x2",
                   product(product(random_cloud(2, 32, "y"), random_cloud(2, 33, "z")),
                           random_cloud(2, 34, "w")));
  FiniteMetricSpace f = random_cloud(2, 35, "f");
  out.emplace_back("square-2x2", product(f, f));
  out.emplace_back("shuffled-2x3", generate_shuffled_product({2, 3}, 41).space);
  out.emplace_back("shuffled-2x2x3", generate_shuffled_product({2, 2, 3}, 42).space);
  out.emplace_back("cloud-5", random_cloud(5, 51, "c"));
  out.emplace_back("cloud-6", random_cloud(6, 52, "c"));
  out.emplace_back("cloud-7", random_cloud(7, 53, "c"));
  out.emplace_back("cloud-9", random_cloud(9, 54, "c"));
  out.emplace_back("cloud-12", random_cloud(12, 55, "c"));
  return out;
}

// ---------------------------------------------------------------- criterion 1

Outcome criterion_product_law() {
  Outcome o;
  for (int t = 0; t < 100; ++t) {
    const int ny = 2 + t % 11;
    const int nz = 2 + (t / 5) % 11;
    FiniteMetricSpace y = random_cloud(ny, 1000 + 2 * static_cast<std::uint64_t>(t), "y");
    FiniteMetricSpace z = random_cloud(nz, 1001 + 2 * static_cast<std::uint64_t>(t), "z");
    FiniteMetricSpace p = product(y, z);
    for (int i = 0; i < ny && o.pass; ++i) {
      for (int k = 0; k < ny; ++k) {
        for (int j = 0; j < nz; ++j) {
          for (int l = 0; l < nz; ++l) {
            if (p(i * nz + j, k * nz + l) != std::hypot(y(i, k), z(j, l))) {
              o.fail("law not exact at t=" + std::to_string(t));
              break;
            }
          }
        }
      }
    }
    if (!o.pass) return o;
  }
  FiniteMetricSpace grid = product(segment(3, "a"), segment(4, "b"));
  const double diag = grid(0, 3);
  if (std::abs(diag - 5.0) > 1e-12) o.fail("3-4-5 diagonal off");
  o.detail << "100 seeded pairs exact, diagonal " << diag;
  return o;
}

// ---------------------------------------------------------------- criterion 2

Outcome criterion_assembly() {
  Outcome o;
  const std::vector<std::vector<int>> shapes = {{2, 3}, {3, 3}, {2, 2, 2}, {2, 4}, {3, 4}};
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    MetricInstance inst =
        generate_shuffled_product(shapes[static_cast<std::size_t>(t) % shapes.size()],
                                  2000 + static_cast<std::uint64_t>(t));
    const FiniteMetricSpace& s = inst.space;
    Tolerance tol = s.default_tolerance();
    std::vector<std::vector<int>> fibers(static_cast<std::size_t>(inst.witness.y_count));
    for (int p = 0; p < s.size(); ++p) {
      fibers[static_cast<std::size_t>(inst.witness.y_index[static_cast<std::size_t>(p)])]
          .push_back(p);
    }
    auto fs = derive_matchings(s, fibers, tol);
    if (!fs) {
      o.fail("matchings failed at t=" + std::to_string(t));
      return o;
    }
    AssembleResult res = assemble_from_fibers(s, *fs, tol);
    if (!res.ok || res.worst_residual > 1e-9) {
      o.fail("assembly failed at t=" + std::to_string(t) + ": " + res.error);
      return o;
    }
    worst = std::max(worst, res.worst_residual);
    if (!res.base || res.base->size() != inst.factors[0].size() ||
        !find_isometry(*res.base, inst.factors[0], tol)) {
      o.fail("base is not isometric to the planted factor at t=" + std::to_string(t));
      return o;
    }
  }
  o.detail << "100 shuffled products reassembled, worst residual " << worst;
  return o;
}

// ---------------------------------------------------------------- criterion 3

Outcome criterion_completeness() {
  Outcome o;
  int instances = 0, witnesses = 0;
  for (const auto& [name, s] : fuzz_corpus()) {
    if (s.size() > 12) continue;
    Tolerance tol = s.default_tolerance();
    WitnessList pruned = enumerate_witnesses(s, tol);
    WitnessList brute = enumerate_witnesses_bruteforce(s, tol);
    if (!pruned.complete || !brute.complete) {
      o.fail(name + ": search incomplete");
      return o;
    }
    std::set<std::vector<int>> a, b;
    for (const auto& w : pruned.witnesses) a.insert(witness_canonical_key(w));
    for (const auto& w : brute.witnesses) b.insert(witness_canonical_key(w));
    if (a != b) {
      o.fail(name + ": pruned set (" + std::to_string(a.size()) +
             ") differs from brute force (" + std::to_string(b.size()) + ")");
      return o;
    }
    ++instances;
    witnesses += static_cast<int>(a.size());
  }
  o.detail << instances << " spaces agree with the oracle, " << witnesses
           << " witnesses total";
  return o;
}

// ---------------------------------------------------------------- criterion 4

Outcome criterion_slopes() {
  Outcome o;
  double worst = 0.0;
  long pairs = 0, placements = 0;
  for (const auto& [name, s] : fuzz_corpus()) {
    Tolerance tol = s.default_tolerance();
    WitnessList wl = enumerate_witnesses(s, tol);
    for (const ProductWitness& w : wl.witnesses) {
      for (int x = 0; x < s.size(); ++x) {
        for (int z = x + 1; z < s.size(); ++z) {
          Slope sl = slope(s, w, x, z);
          const double r = std::abs(sl.a * sl.a + sl.abar * sl.abar - 1.0);
          worst = std::max(worst, r);
          ++pairs;
          if (r > 1e-9) {
            o.fail(name + ": slope identity off by " + std::to_string(r));
            return o;
          }
        }
      }
      // parallel placements of the same factor pair have bitwise equal slopes
      for (int i1 = 0; i1 < w.y_count; ++i1) {
        for (int i2 = i1 + 1; i2 < w.y_count; ++i2) {
          for (int j1 = 0; j1 < w.ybar_count; ++j1) {
            for (int j2 = j1 + 1; j2 < w.ybar_count; ++j2) {
              Slope s1 = slope(s, w, point_at(w, i1, j1), point_at(w, i2, j1));
              Slope s2 = slope(s, w, point_at(w, i1, j2), point_at(w, i2, j2));
              ++placements;
              if (s1.a != s2.a || s1.abar != s2.abar) {
                o.fail(name + ": parallel placements disagree");
                return o;
              }
            }
          }
        }
      }
    }
  }
  o.detail << pairs << " slope pairs, worst defect " << worst << ", " << placements
           << " parallel placements exact";
  return o;
}

// ---------------------------------------------------------------- criterion 5

Outcome criterion_interbase() {
  Outcome o;
  std::vector<std::pair<std::string, FiniteMetricSpace>> corpus;
  for (std::uint64_t seed : {61, 62}) {
    FiniteMetricSpace p = product(random_cloud(2, seed * 10 + 1, "a"),
                                  random_cloud(2, seed * 10 + 2, "b"));
    p = product(p, random_cloud(2, seed * 10 + 3, "c"));
    p = product(p, random_cloud(2, seed * 10 + 4, "d"));
    corpus.emplace_back("four-factor-16", p);
  }
  corpus.emplace_back("prod-2x2x3",
                      product(product(random_cloud(2, 63, "a"), random_cloud(2, 64, "b")),
                              random_cloud(3, 65, "c")));
  double worst = 0.0;
  long checks = 0;
  for (const auto& [name, s] : corpus) {
    Tolerance tol = s.default_tolerance();
    WitnessList wl = enumerate_witnesses(s, tol);
    if (wl.witnesses.size() < 2) {
      o.fail(name + ": expected several decompositions");
      return o;
    }
    std::vector<ProductWitness> ws = wl.witnesses;
    for (std::size_t i = 0; i < ws.size(); ++i) {
      std::vector<ProductWitness> partners;
      for (std::size_t j = 0; j < ws.size(); ++j) {
        if (j != i) partners.push_back(ws[j]);
      }
      partners.push_back(ws[i].swapped());
      for (const ProductWitness& other : partners) {
        for (int x = 0; x < s.size(); ++x) {
          InterbaseReport ib = check_interbase(s, ws[i], other, x, tol);
          PropertyOReport po = check_property_O(s, ws[i], other, x, tol);
          ++checks;
          if (!ib.ok || ib.worst_residual > 1e-9) {
            o.fail(name + ": interbase failed: " + ib.reason);
            return o;
          }
          if (!po.ok || po.worst_residual > 1e-9) {
            o.fail(name + ": property O failed: " + po.reason);
            return o;
          }
          worst = std::max(worst, std::max(ib.worst_residual, po.worst_residual));
        }
      }
    }
  }
  o.detail << checks << " witness-pair checks, worst residual " << worst;
  return o;
}

// ---------------------------------------------------------------- criterion 6

Outcome criterion_isometry_order() {
  Outcome o;
  struct Case {
    std::string name;
    FiniteMetricSpace s;
  };
  std::vector<Case> cases;
  const std::vector<std::vector<int>> shapes = {{2, 3}, {3, 3}, {2, 4}, {2, 2, 2}, {2, 5}};
  for (int t = 0; t < 15; ++t) {
    MetricInstance inst =
        generate_random_product_metric(shapes[static_cast<std::size_t>(t) % shapes.size()],
                                       3000 + static_cast<std::uint64_t>(t));
    cases.push_back({"random-" + std::to_string(t), inst.space});
  }
  for (int t = 0; t < 5; ++t) {
    FiniteMetricSpace f = random_cloud(2 + t % 2, 3100 + static_cast<std::uint64_t>(t), "r");
    FiniteMetricSpace s = product(f, f);
    if (t == 4) s = product(s, f);  // three equal factors
    cases.push_back({"repeated-" + std::to_string(t), s});
  }
  int repeated_nontrivial = 0;
  for (const Case& c : cases) {
    Tolerance tol = c.s.default_tolerance();
    FactorizationReport rep = factorize(c.s, tol);
    IsometryGroupReport r = verify_exact_sequence(c.s, rep, tol);
    if (!r.ok || !r.exact || !r.kernel_trivial) {
      o.fail(c.name + ": " + (r.reason.empty() ? "sequence not exact" : r.reason));
      return o;
    }
    if (r.order != r.factor_group_order * r.permutation_group_order) {
      o.fail(c.name + ": order product mismatch");
      return o;
    }
    if (c.name.rfind("repeated", 0) == 0 && r.permutation_group_order > 1) {
      ++repeated_nontrivial;
    }
  }
  if (repeated_nontrivial < 5) {
    o.fail("expected nontrivial factor permutations on the repeated-factor cases");
    return o;
  }
  o.detail << cases.size() << " products verified, " << repeated_nontrivial
           << " with factor swaps";
  return o;
}

// ---------------------------------------------------------------- criterion 7

bool oracle_has_split(const ConvexBody& c) {
  const Matrix& v = c.vertices;
  const int n = static_cast<int>(v.cols());
  Subspace hull = linear_hull(c);
  const int d = hull.dim();
  if (d < 2 || n < 4 || n > 14) return false;
  const double scale = std::max(1.0, v.cwiseAbs().maxCoeff());
  const int amb = static_cast<int>(v.rows());
  for (unsigned mask = 1; mask < (1u << (n - 1)); ++mask) {
    std::vector<int> cls{0};
    for (int i = 0; i + 1 < n; ++i) {
      if (mask & (1u << i)) cls.push_back(i + 1);
    }
    const int k = static_cast<int>(cls.size());
    if (k < 2 || k > n / 2 || n % k != 0) continue;
    Matrix diffs(amb, k - 1);
    for (int i = 1; i < k; ++i) diffs.col(i - 1) = v.col(cls[static_cast<std::size_t>(i)]) - v.col(0);
    Subspace s2 = Subspace::span_of(diffs);
    if (s2.dim() == 0 || s2.dim() >= d) continue;
    // cluster the vertices modulo s2; every class must have k members
    Matrix proj = v - s2.basis * (s2.basis.transpose() * v);
    std::vector<int> id(static_cast<std::size_t>(n), -1);
    int clusters = 0;
    bool sized = true;
    for (int i = 0; i < n && sized; ++i) {
      if (id[static_cast<std::size_t>(i)] >= 0) continue;
      int members = 0;
      for (int j = i; j < n; ++j) {
        if (id[static_cast<std::size_t>(j)] < 0 &&
            (proj.col(j) - proj.col(i)).cwiseAbs().maxCoeff() <= 1e-6 * scale) {
          id[static_cast<std::size_t>(j)] = clusters;
          ++members;
        }
      }
      if (members != k) sized = false;
      ++clusters;
    }
    if (!sized || clusters * k != n) continue;
    // class centroids are the vertices of the complementary summand
    Matrix centroids = Matrix::Zero(amb, clusters);
    for (int i = 0; i < n; ++i) centroids.col(id[static_cast<std::size_t>(i)]) += v.col(i);
    centroids /= static_cast<double>(k);
    Subspace s1 = Subspace::span_of(centroids);
    if (s1.dim() + s2.dim() != d || intersect(s1, s2).dim() != 0) continue;
    if (is_direct_split(c, s1, s2)) return true;
  }
  return false;
}

Outcome criterion_polytope_sums() {
  Outcome o;
  const std::vector<std::vector<int>> combos = {{1, 1},    {1, 2},    {2, 2},       {1, 3},
                                                {2, 3},    {1, 1, 2}, {1, 2, 2},    {1, 1, 1},
                                                {2, 2, 1}, {1, 1, 1, 2}};
  int recovered = 0, leaves_checked = 0, full_checked = 0;
  for (int t = 0; t < 100; ++t) {
    const auto& dims = combos[static_cast<std::size_t>(t) % combos.size()];
    NormInstance inst = generate_random_polytope_norm(dims, 2, 4000 + static_cast<std::uint64_t>(t),
                                                      t % 2 == 1);
    ConvexBody body = make_body(ball_vertices(inst.space));
    DirectSumDecomposition dec = gruber_decompose(body);
    if (dec.partial) {
      o.fail("t=" + std::to_string(t) + ": " + dec.note);
      return o;
    }
    // every part sits inside exactly one planted summand, and the parts
    // assigned to a summand fill it
    std::vector<Subspace> collected(inst.planted.size());
    for (const DirectSumPart& part : dec.parts) {
      int home = -1;
      for (std::size_t pi = 0; pi < inst.planted.size(); ++pi) {
        if (inst.planted[pi].contains(part.sub)) {
          if (home >= 0) home = -2;
          if (home == -1) home = static_cast<int>(pi);
        }
      }
      if (home < 0) {
        o.fail("t=" + std::to_string(t) + ": a part crosses the planted summands");
        return o;
      }
      auto& c = collected[static_cast<std::size_t>(home)];
      c = c.dim() == 0 ? part.sub : subspace_sum(c, part.sub);
    }
    for (std::size_t pi = 0; pi < inst.planted.size(); ++pi) {
      if (collected[pi].dim() != inst.planted[pi].dim()) {
        o.fail("t=" + std::to_string(t) + ": planted summand " + std::to_string(pi) +
               " not recovered");
        return o;
      }
    }
    ++recovered;
    for (const DirectSumPart& part : dec.parts) {
      if (part.sub.dim() >= 2 && part.body.vertices.cols() <= 12) {
        ++leaves_checked;
        if (oracle_has_split(part.body)) {
          o.fail("t=" + std::to_string(t) + ": oracle splits a claimed indecomposable part");
          return o;
        }
      }
    }
    if (body.vertices.cols() <= 12) {
      ++full_checked;
      if (!oracle_has_split(body)) {
        o.fail("t=" + std::to_string(t) + ": oracle misses the planted split");
        return o;
      }
    }
  }
  // indecomposable single-part instances agree with the oracle too
  for (int t = 0; t < 10; ++t) {
    const int d = 2 + t % 2;
    NormInstance inst = generate_random_polytope_norm({d}, d + 1,
                                                      4200 + static_cast<std::uint64_t>(t),
                                                      t % 2 == 1);
    ConvexBody body = make_body(ball_vertices(inst.space));
    DirectSumDecomposition dec = gruber_decompose(body);
    const bool split_found = oracle_has_split(body);
    if ((dec.parts.size() > 1) != split_found) {
      o.fail("single-part t=" + std::to_string(t) + ": certificate disagrees with the oracle");
      return o;
    }
    if (dec.parts.size() == 1) ++leaves_checked;
  }
  o.detail << recovered << " planted sums recovered; oracle agreed on " << leaves_checked
           << " leaves and " << full_checked << " full bodies";
  return o;
}

// ---------------------------------------------------------------- criterion 8

Outcome criterion_ellipsoids() {
  Outcome o;
  LoewnerResult cube = max_inscribed_ellipsoid(linf_space(3));
  if (!cube.converged ||
      (cube.ellipsoid.shape - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() > 1e-6) {
    o.fail("cube ellipsoid is not the unit ball");
    return o;
  }
  LoewnerResult cross = max_inscribed_ellipsoid(l1_space(2));
  Eigen::SelfAdjointEigenSolver<Matrix> es(cross.ellipsoid.shape);
  for (int i = 0; i < 2; ++i) {
    const double radius = 1.0 / std::sqrt(es.eigenvalues()(i));
    if (!cross.converged || std::abs(radius - 1.0 / std::sqrt(2.0)) > 1e-6) {
      o.fail("cross-polytope disk radius off");
      return o;
    }
  }

  const std::vector<std::string> kinds = {"linf", "l1", "gram"};
  double worst_off = 0.0;
  int done = 0;
  for (int t = 0; t < 50; ++t) {
    const std::string c1 = kinds[static_cast<std::size_t>(t) % 3] + ":" +
                           std::to_string(1 + t % 3);
    const std::string c2 = kinds[static_cast<std::size_t>(t / 3) % 3] + ":" +
                           std::to_string(1 + (t / 2) % 3);
    NormInstance inst = generate_product_norm({c1, c2}, 5000 + static_cast<std::uint64_t>(t),
                                              t % 2 == 1);
    EllipsReport rep = check_lemma_ellips(inst.space, inst.planted[0], inst.planted[1]);
    if (rep.refused || !rep.ok || rep.off_block > 1e-5) {
      o.fail("t=" + std::to_string(t) + " (" + c1 + " x " + c2 + "): " +
             (rep.reason.empty() ? "off-block " + std::to_string(rep.off_block) : rep.reason));
      return o;
    }
    worst_off = std::max(worst_off, rep.off_block);
    ++done;
  }
  o.detail << done << " product norms orthogonal under the inscribed ellipsoid, worst off-block "
           << worst_off;
  return o;
}

// ---------------------------------------------------------------- criterion 9

Outcome criterion_defect() {
  Outcome o;
  double lo = 2.0, hi = 0.0;
  for (int t = 0; t < 12; ++t) {
    const int d = 2 + t % 4;
    Rng rng(6000 + static_cast<std::uint64_t>(t));
    Matrix m(d, d);
    for (int i = 0; i < d; ++i) m.col(i) = rng.normal_vector(d);
    Matrix g = m.transpose() * m + Matrix::Identity(d, d);
    DefectReport rep = defect(gram_space(g), 128, 600 + static_cast<std::uint64_t>(t));
    lo = std::min(lo, rep.m_value);
    hi = std::max(hi, rep.m_value);
    if (rep.m_value < 1.0 || rep.m_value > 1.0 + 1e-9) {
      o.fail("inner-product space defect out of range: " + std::to_string(rep.m_value));
      return o;
    }
  }

  const double root2 = std::sqrt(2.0);
  NormedSpace sq = linf_space(2), cr = l1_space(2);
  Vector x(2), y(2);
  x << 1, 1;
  y << 1, -1;
  if (std::abs(defect_ratio(sq, x, y) - root2) > 1e-12 ||
      std::abs(defect(sq, 64, 1).m_value - root2) > 1e-6) {
    o.fail("square norm defect is not sqrt(2) at the stated pair");
    return o;
  }
  x << 1, 0;
  y << 0, 1;
  if (std::abs(defect_ratio(cr, x, y) - root2) > 1e-12 ||
      std::abs(defect(cr, 64, 1).m_value - root2) > 1e-6) {
    o.fail("diamond norm defect is not sqrt(2) at the stated pair");
    return o;
  }

  // universal bound across a mixed corpus
  std::vector<NormedSpace> battery = {linf_space(2), linf_space(3), l1_space(2), l1_space(3),
                                      pnorm_space(2, 1.5), pnorm_space(2, 4.0),
                                      pnorm_space(3, 4.0)};
  for (int t = 0; t < 6; ++t) {
    battery.push_back(generate_product_norm({"linf:2", "l1:2"},
                                            6100 + static_cast<std::uint64_t>(t), t % 2 == 1)
                          .space);
    battery.push_back(
        generate_random_polytope_norm({1, 2}, 2, 6200 + static_cast<std::uint64_t>(t), t % 2 == 1)
            .space);
    battery.push_back(generate_rotated_euclidean_pair(4 + 2 * (t % 2),
                                                      6300 + static_cast<std::uint64_t>(t))
                          .space);
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < battery.size(); ++i) {
    DefectReport rep = defect(battery[i], 96, 700 + static_cast<std::uint64_t>(i));
    worst = std::max(worst, rep.m_value);
    if (rep.m_value > root2 + 1e-12) {
      o.fail("universal bound violated: " + std::to_string(rep.m_value));
      return o;
    }
  }
  o.detail << "inner-product range [" << lo << ", " << hi << "], corpus max " << worst;
  return o;
}

// --------------------------------------------------------------- criterion 10

ProjectionPair planar_pair(double theta) {
  ProjectionPair pp;
  pp.space = euclidean_space(2);
  Matrix a(2, 1), abar(2, 1), b(2, 1), bbar(2, 1);
  a << 1, 0;
  abar << 0, 1;
  b << std::cos(theta), std::sin(theta);
  bbar << -std::sin(theta), std::cos(theta);
  pp.a = Subspace{a};
  pp.abar = Subspace{abar};
  pp.b = Subspace{b};
  pp.bbar = Subspace{bbar};
  return pp;
}

Outcome criterion_eigen() {
  Outcome o;
  for (double theta : {M_PI / 6.0, M_PI / 4.0, M_PI / 3.0}) {
    ProjectionPair pp = planar_pair(theta);
    EigenReport rep = composed_projection_eigen(pp);
    const double want = std::cos(theta) * std::cos(theta);
    if (!rep.ok || std::abs(rep.lambda - want) > 1e-8) {
      o.fail("planar eigenvalue off at theta=" + std::to_string(theta));
      return o;
    }
    Matrix pb = projector_onto_along(pp.b, pp.bbar);
    const Vector av = rep.vector;
    if (std::abs(norm(pp.space, pb * av) - std::sqrt(rep.lambda) * norm(pp.space, av)) > 1e-8) {
      o.fail("projected length is not sqrt(lambda)");
      return o;
    }
  }
  for (int t = 0; t < 20; ++t) {
    NormInstance inst = generate_rotated_euclidean_pair(4 + 2 * (t % 2),
                                                        7000 + static_cast<std::uint64_t>(t));
    EigenReport rep = composed_projection_eigen(inst.pairs[0]);
    if (!rep.ok || rep.lambda <= 0.0 || rep.lambda >= 1.0) {
      o.fail("eigenvalue outside (0, 1) at t=" + std::to_string(t));
      return o;
    }
    Matrix pb = projector_onto_along(inst.pairs[0].b, inst.pairs[0].bbar);
    const double lhs = norm(inst.space, pb * rep.vector);
    const double rhs = std::sqrt(rep.lambda) * norm(inst.space, rep.vector);
    if (std::abs(lhs - rhs) > 1e-8) {
      o.fail("projected length mismatch at t=" + std::to_string(t));
      return o;
    }
  }
  o.detail << "three planar angles exact, 20 seeded instances in range";
  return o;
}

// --------------------------------------------------------------- criterion 11

ProjectionPair rotated_pair_r4(double theta) {
  ProjectionPair pp;
  pp.space = euclidean_space(4);
  Matrix a(4, 2), abar(4, 2), b(4, 2), bbar(4, 2);
  a << 1, 0, 0, 1, 0, 0, 0, 0;
  abar << 0, 0, 0, 0, 1, 0, 0, 1;
  const double c = std::cos(theta), s = std::sin(theta);
  b << c, 0, 0, c, s, 0, 0, s;
  bbar << -s, 0, 0, -s, c, 0, 0, c;
  pp.a = Subspace{a};
  pp.abar = Subspace{abar};
  pp.b = Subspace{b};
  pp.bbar = Subspace{bbar};
  return pp;
}

Outcome criterion_identity() {
  Outcome o;
  const std::pair<double, double> planted[] = {{0.5, M_PI / 4.0}, {0.75, M_PI / 6.0}};
  double worst = 0.0;
  for (const auto& [lambda, theta] : planted) {
    UniqueReport rep = check_lemma_unique(rotated_pair_r4(theta), lambda, 512, 13);
    if (rep.refused || !rep.identity_ok || rep.worst_identity > 1e-8 ||
        !rep.euclidean_confirmed) {
      o.fail("identity failed for lambda=" + std::to_string(lambda) + ": " + rep.reason);
      return o;
    }
    worst = std::max(worst, rep.worst_identity);
  }
  // negative control: the quartic plane norm is not an inner product, so the
  // coordinate axes are not a norm product and the defect stays above 1
  NormedSpace p4 = pnorm_space(2, 4.0);
  ProjectionPair pp;
  pp.space = p4;
  Matrix e1(2, 1), e2(2, 1);
  e1 << 1, 0;
  e2 << 0, 1;
  pp.a = Subspace{e1};
  pp.abar = Subspace{e2};
  pp.b = Subspace{e1};
  pp.bbar = Subspace{e2};
  UniqueReport neg = check_lemma_unique(pp, 0.5, 64, 13);
  DefectReport nd = defect(p4, 128, 3);
  if (!neg.refused || nd.m_value <= 1.0 + 1e-3) {
    o.fail("negative control went undetected");
    return o;
  }
  o.detail << "512 sample pairs per planted scalar, worst residual " << worst
           << "; control refused with defect " << nd.m_value;
  return o;
}

// --------------------------------------------------------------- criterion 12

Outcome criterion_strike() {
  Outcome o;
  int confirmed = 0;
  for (int t = 0; t < 100; ++t) {
    const int dim = t < 50 ? 4 : 6;
    NormInstance inst = generate_rotated_euclidean_pair(dim, 8000 + static_cast<std::uint64_t>(t));
    StrikeReport rep = check_strike(inst.pairs[0], 24, 11 + static_cast<std::uint64_t>(t));
    if (rep.refused || !rep.euclidean_confirmed) {
      o.fail("t=" + std::to_string(t) + " dim " + std::to_string(dim) + ": " +
             (rep.reason.empty() ? "not confirmed" : rep.reason));
      return o;
    }
    ++confirmed;
  }

  NormedSpace lines = product_space({linf_space(1), linf_space(1), linf_space(1), linf_space(1)});
  auto cands = decomposition_candidates(lines);
  if (cands.size() < 2) {
    o.fail("expected several coordinate decompositions of the four-line product");
    return o;
  }
  int refused = 0;
  for (const auto& ca : cands) {
    for (const auto& cb : cands) {
      ProjectionPair pp;
      pp.space = lines;
      pp.a = ca.first;
      pp.abar = ca.second;
      pp.b = cb.first;
      pp.bbar = cb.second;
      StrikeReport rep = check_strike(pp, 8, 1);
      if (!rep.refused || rep.reason.find("transversal") == std::string::npos) {
        o.fail("a candidate pair was not refused at the transversality gate");
        return o;
      }
      ++refused;
    }
  }
  o.detail << confirmed << " rotated instances confirmed; " << refused
           << " four-line candidate pairs refused";
  return o;
}

}  // namespace

int main() {
  struct Entry {
    const char* title;
    Outcome (*run)();
  };
  const Entry entries[] = {
      {"product law", criterion_product_law},
      {"fiber assembly", criterion_assembly},
      {"search completeness", criterion_completeness},
      {"slopes", criterion_slopes},
      {"interbase and property O", criterion_interbase},
      {"isometry group order", criterion_isometry_order},
      {"polytope direct sums", criterion_polytope_sums},
      {"inscribed ellipsoids", criterion_ellipsoids},
      {"parallelogram defect", criterion_defect},
      {"composed projection eigenvalue", criterion_eigen},
      {"generalized parallelogram identity", criterion_identity},
      {"two transversal decompositions", criterion_strike},
  };
  int failures = 0;
  int id = 0;
  for (const Entry& e : entries) {
    ++id;
    Outcome out = e.run();
    if (!out.pass) ++failures;
    std::printf("criterion %2d (%s): %s%s%s\n", id, e.title, out.pass ? "PASS" : "FAIL",
                out.detail.str().empty() ? "" : " - ", out.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d/12 criteria passed\n", 12 - failures);
  return failures;
}
