#include <cmath>
#include <cstdlib>

#include "derham/linalg.hpp"
#include "derham/normed_space.hpp"
#include "derham/rigidity.hpp"
#include "derham/rng.hpp"
#include "doctest.h"

using namespace derham;

namespace {

const double kSqrt2 = std::sqrt(2.0);

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

Vector vec4(double a, double b, double c, double d) {
  Vector v(4);
  v << a, b, c, d;
  return v;
}

Matrix random_spd(Rng& rng, int d) {
  Matrix m(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) m(i, j) = rng.normal();
  }
  return m.transpose() * m + Matrix::Identity(d, d);
}

NormedSpace four_lines() {
  return product_space({linf_space(1), linf_space(1), linf_space(1), linf_space(1)});
}

// A = span(e1,e2) against its copy rotated by theta in the (e1,e3) and
// (e2,e4) planes; the composed projection is cos(theta)^2 times the identity
ProjectionPair rotated_pair_r4(double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  ProjectionPair pp;
  pp.space = euclidean_space(4);
  Matrix a(4, 2), abar(4, 2), b(4, 2), bbar(4, 2);
  a << 1, 0, 0, 1, 0, 0, 0, 0;
  abar << 0, 0, 0, 0, 1, 0, 0, 1;
  b << c, 0, 0, c, s, 0, 0, s;
  bbar << -s, 0, 0, -s, c, 0, 0, c;
  pp.a = Subspace{a};
  pp.abar = Subspace{abar};
  pp.b = Subspace{b};
  pp.bbar = Subspace{bbar};
  return pp;
}

}  // namespace

TEST_CASE("defect ratio arithmetic on the square norms") {
  NormedSpace linf = linf_space(2);
  NormedSpace l1 = l1_space(2);

  CHECK(defect_ratio(linf, vec2(1, 1), vec2(1, -1)) == kSqrt2);
  CHECK(defect_ratio(l1, vec2(1, 0), vec2(0, 1)) == kSqrt2);

  NormedSpace e2 = euclidean_space(2);
  Rng rng(21);
  for (int i = 0; i < 64; ++i) {
    Vector x = rng.normal_vector(2), y = rng.normal_vector(2);
    CHECK(defect_ratio(e2, x, y) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("defect reports for polyhedral and smooth forms") {
  Rng rng(5);
  NormedSpace g = gram_space(random_spd(rng, 3));
  DefectReport dg = defect(g, 128, 2);
  CHECK(std::abs(dg.m_value - 1.0) <= 1e-9);
  CHECK(dg.certified_lower);

  for (const NormedSpace& s : {linf_space(2), l1_space(2), linf_space(3), l1_space(3)}) {
    DefectReport r = defect(s, 64, 3);
    CHECK(r.m_value == doctest::Approx(kSqrt2).epsilon(1e-12));
    CHECK(r.certified_global);
    // the reported pair reproduces the reported value
    CHECK(defect_ratio(s, r.x, r.y) == doctest::Approx(r.m_value).epsilon(1e-9));
  }

  DefectReport p4 = defect(pnorm_space(2, 4.0), 256, 7);
  CHECK(p4.m_value > 1.0 + 1e-3);
  CHECK(p4.m_value <= kSqrt2 + 1e-12);
  CHECK_FALSE(p4.certified_global);
  CHECK(defect_ratio(pnorm_space(2, 4.0), p4.x, p4.y) ==
        doctest::Approx(p4.m_value).epsilon(1e-9));
}

TEST_CASE("universal bound and scaling invariance of the defect") {
  Rng rng(9);
  std::vector<NormedSpace> battery;
  battery.push_back(linf_space(3));
  battery.push_back(l1_space(3));
  battery.push_back(pnorm_space(3, 4.0));
  battery.push_back(gram_space(random_spd(rng, 3)));
  battery.push_back(product_space({linf_space(2), l1_space(2)}));

  for (const NormedSpace& s : battery) {
    for (int i = 0; i < 128; ++i) {
      Vector x = rng.normal_vector(s.dim), y = rng.normal_vector(s.dim);
      double r = defect_ratio(s, x, y);
      CHECK(r <= kSqrt2 + 1e-12);
      CHECK(r >= 1.0 - 1e-12 - 0.3);  // ratios live in [1/sqrt(2), sqrt(2)]
      // ratio homogeneity is exact for power-of-two rescalings of the pair
      CHECK(defect_ratio(s, Vector(4.0 * x), Vector(4.0 * y)) == r);
    }
    CHECK(defect(s, 32, 4).m_value <= kSqrt2 + 1e-12);
  }

  // scaling the norm itself leaves the defect unchanged
  Matrix g = random_spd(rng, 3);
  DefectReport base = defect(gram_space(g), 64, 6);
  DefectReport scaled = defect(gram_space(Matrix(16.0 * g)), 64, 6);
  CHECK(scaled.m_value == base.m_value);
}

TEST_CASE("extremal rectangularity across a product decomposition") {
  NormedSpace s = product_space({linf_space(2), linf_space(2)});
  DefectReport rep = defect(s, 128, 11);
  CHECK(rep.m_value == doctest::Approx(kSqrt2).epsilon(1e-9));
  CHECK_FALSE(rep.certified_global);

  Matrix b1(4, 2), b2(4, 2);
  b1 << 1, 0, 0, 1, 0, 0, 0, 0;
  b2 << 0, 0, 0, 0, 1, 0, 0, 1;
  Subspace s1{b1}, s2{b2};

  // pair supported in the first block: the other component is zero
  RectangularityReport one = extremal_rectangularity(s, s1, s2, vec4(1, 1, 0, 0), vec4(1, -1, 0, 0));
  CHECK(one.ok);
  CHECK_FALSE(one.refused);
  CHECK(one.zero_2);
  CHECK_FALSE(one.zero_1);
  CHECK(one.ratio_1 == doctest::Approx(kSqrt2).epsilon(1e-9));

  // pair mixing the blocks: both components must stay extremal
  RectangularityReport mix = extremal_rectangularity(s, s1, s2, vec4(1, 1, 1, 1), vec4(1, -1, 1, -1));
  CHECK(mix.ok);
  CHECK(mix.ratio_1 == doctest::Approx(kSqrt2).epsilon(1e-6));
  CHECK(mix.ratio_2 == doctest::Approx(kSqrt2).epsilon(1e-6));

  // a pair far from extremal is refused
  RectangularityReport bad = extremal_rectangularity(s, s1, s2, vec4(1, 0, 0, 0), vec4(0, 1, 0, 0));
  CHECK(bad.refused);
  CHECK(defect_ratio(s, vec4(1, 0, 0, 0), vec4(0, 1, 0, 0)) ==
        doctest::Approx(1.0 / kSqrt2).epsilon(1e-12));

  // Euclidean space: every pair is extremal and every split passes
  NormedSpace e4 = euclidean_space(4);
  Matrix r1(4, 2), r2(4, 2);
  r1 << 1, 0, 1, 0, 0, 1, 0, -1;
  r2 << 1, 0, -1, 0, 0, 1, 0, 1;
  Subspace t1 = Subspace::span_of(r1), t2 = Subspace::span_of(r2);
  Rng rng(31);
  for (int i = 0; i < 8; ++i) {
    RectangularityReport ok =
        extremal_rectangularity(e4, t1, t2, rng.normal_vector(4), rng.normal_vector(4));
    CHECK(ok.ok);
    CHECK_FALSE(ok.refused);
  }
}

TEST_CASE("composed projection eigenvalue in the plane") {
  NormedSpace e2 = euclidean_space(2);
  for (double theta : {M_PI / 6.0, M_PI / 4.0, M_PI / 3.0}) {
    const double c = std::cos(theta), s = std::sin(theta);
    ProjectionPair pp;
    pp.space = e2;
    pp.a = Subspace::span_of(vec2(1, 0));
    pp.abar = Subspace::span_of(vec2(0, 1));
    pp.b = Subspace::span_of(vec2(c, s));
    pp.bbar = Subspace::span_of(vec2(-s, c));
    EigenReport rep = composed_projection_eigen(pp);
    CHECK_FALSE(rep.refused);
    CHECK(rep.ok);
    CHECK(rep.lambda == doctest::Approx(c * c).epsilon(1e-9));
    CHECK(rep.lambda_algebraic == doctest::Approx(c * c).epsilon(1e-9));
    CHECK(rep.residual <= 1e-8);
    CHECK(std::abs(rep.vector.dot(vec2(1, 0))) == doctest::Approx(1.0).epsilon(1e-9));
  }

  // the degenerate configuration B = A is rejected by transversality
  ProjectionPair same;
  same.space = e2;
  same.a = Subspace::span_of(vec2(1, 0));
  same.abar = Subspace::span_of(vec2(0, 1));
  same.b = same.a;
  same.bbar = same.abar;
  EigenReport bad = composed_projection_eigen(same);
  CHECK(bad.refused);
  CHECK(bad.reason.find("transversal") != std::string::npos);
}

TEST_CASE("composed projection for rotated planes in four dimensions") {
  ProjectionPair pp = rotated_pair_r4(M_PI / 4.0);
  EigenReport rep = composed_projection_eigen(pp);
  CHECK_FALSE(rep.refused);
  CHECK(rep.ok);
  CHECK(rep.lambda == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(rep.residual <= 1e-8);
}

TEST_CASE("generalized parallelogram identity through the identification") {
  // s = 1: the usual parallelogram equality
  UniqueReport half = check_lemma_unique(rotated_pair_r4(M_PI / 4.0), 0.5, 128, 3);
  CHECK_FALSE(half.refused);
  CHECK(half.slope == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(half.identity_ok);
  CHECK(half.worst_identity <= 1e-8);
  CHECK(half.worst_isometry <= 1e-8);
  CHECK(half.worst_reduced <= 1e-8);
  CHECK(half.euclidean_confirmed);
  CHECK(half.boundary_dev <= 1e-6);

  // lambda = 3/4, s = 1/sqrt(3)
  UniqueReport quarter = check_lemma_unique(rotated_pair_r4(M_PI / 6.0), 0.75, 128, 4);
  CHECK_FALSE(quarter.refused);
  CHECK(quarter.slope == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-12));
  CHECK(quarter.identity_ok);
  CHECK(quarter.euclidean_confirmed);

  // wrong scalar is refused outright
  UniqueReport wrong = check_lemma_unique(rotated_pair_r4(M_PI / 4.0), 0.75, 32, 5);
  CHECK(wrong.refused);

  // a genuinely non-Euclidean plane never reaches the identity stage: the
  // coordinate axes do not decompose the quartic norm
  ProjectionPair pq;
  pq.space = pnorm_space(2, 4.0);
  pq.a = Subspace::span_of(vec2(1, 0));
  pq.abar = Subspace::span_of(vec2(0, 1));
  pq.b = Subspace::span_of(vec2(1, 1));
  pq.bbar = Subspace::span_of(vec2(1, -1));
  UniqueReport quartic = check_lemma_unique(pq, 0.5, 32, 6);
  CHECK(quartic.refused);
  CHECK_FALSE(quartic.euclidean_confirmed);
  EigenReport quartic_eigen = composed_projection_eigen(pq);
  CHECK(quartic_eigen.refused);
}

TEST_CASE("strike checker confirms Euclidean space for transversal pairs") {
  StrikeReport rep = check_strike(rotated_pair_r4(M_PI / 4.0), 64, 9);
  CHECK_FALSE(rep.refused);
  CHECK(rep.euclidean_confirmed);
  CHECK_FALSE(rep.inconsistency);
  CHECK(rep.m_value <= 1.0 + 1e-6);
  CHECK(rep.boundary_dev <= 1e-6);
}

TEST_CASE("strike checker refuses every enumerated pair on products of lines") {
  for (const NormedSpace& s : {four_lines(), product_space({linf_space(2), linf_space(2)})}) {
    auto cands = decomposition_candidates(s);
    REQUIRE(cands.size() >= 1);
    int checked = 0;
    for (const auto& ca : cands) {
      for (const auto& cb : cands) {
        ProjectionPair pp;
        pp.space = s;
        pp.a = ca.first;
        pp.abar = ca.second;
        pp.b = cb.first;
        pp.bbar = cb.second;
        StrikeReport rep = check_strike(pp, 16, 1);
        CHECK(rep.refused);
        CHECK(rep.reason.find("transversal") != std::string::npos);
        ++checked;
      }
    }
    CHECK(checked >= 1);
  }
}

TEST_CASE("strike checker over seeded Euclidean instances") {
  int confirmed = 0, total = 0;
  for (int d : {4, 6}) {
    for (int i = 0; i < 50; ++i) {
      Rng rng(1000 + 17 * static_cast<std::uint64_t>(i) + static_cast<std::uint64_t>(d));
      Matrix g = random_spd(rng, d);
      NormedSpace s = gram_space(g);
      Matrix ra(d, d / 2), rb(d, d / 2);
      for (int r = 0; r < d; ++r) {
        for (int c = 0; c < d / 2; ++c) {
          ra(r, c) = rng.normal();
          rb(r, c) = rng.normal();
        }
      }
      ProjectionPair pp;
      pp.space = s;
      pp.a = Subspace::span_of(ra);
      pp.abar = orthogonal_complement(pp.a, &g);
      pp.b = Subspace::span_of(rb);
      pp.bbar = orthogonal_complement(pp.b, &g);
      StrikeReport rep = check_strike(pp, 24, 31 + static_cast<std::uint64_t>(i));
      ++total;
      if (rep.euclidean_confirmed) ++confirmed;
    }
  }
  CHECK(total == 100);
  CHECK(confirmed == total);
}

TEST_CASE("intersection of decompositions is a factor") {
  NormedSpace lines = four_lines();
  Matrix e12(4, 2), e34(4, 2), e13(4, 2), e24(4, 2);
  e12 << 1, 0, 0, 1, 0, 0, 0, 0;
  e34 << 0, 0, 0, 0, 1, 0, 0, 1;
  e13 << 1, 0, 0, 0, 0, 1, 0, 0;
  e24 << 0, 0, 1, 0, 0, 0, 0, 1;

  // A = B: the intersection is all of B
  ProjectionPair same;
  same.space = lines;
  same.a = Subspace{e12};
  same.abar = Subspace{e34};
  same.b = Subspace{e12};
  same.bbar = Subspace{e34};
  IntersectionReport whole = check_maininter_unbound(lines, same);
  CHECK(whole.ok);
  CHECK(whole.structural);
  CHECK(whole.intersection_dim == 2);

  // F = span(e1) inside B = span(e1, e3); the complement is the e3 line
  ProjectionPair cross;
  cross.space = lines;
  cross.a = Subspace{e12};
  cross.abar = Subspace{e34};
  cross.b = Subspace{e13};
  cross.bbar = Subspace{e24};
  IntersectionReport part = check_maininter_unbound(lines, cross);
  CHECK(part.ok);
  CHECK_FALSE(part.structural);
  CHECK(part.intersection_dim == 1);
  CHECK(part.complement.dim() == 1);
  CHECK(part.complement.contains(vec4(0, 0, 1, 0)));
  CHECK(part.worst <= 1e-9);

  // transversal pair: the intersection is trivial
  IntersectionReport trivial = check_maininter_unbound(euclidean_space(4), rotated_pair_r4(M_PI / 4.0));
  CHECK(trivial.ok);
  CHECK(trivial.structural);
  CHECK(trivial.intersection_dim == 0);
}

TEST_CASE("defect reduction is deterministic across worker counts") {
  NormedSpace s = product_space({linf_space(2), linf_space(2)});
  setenv("DERHAM_THREADS", "4", 1);
  DefectReport wide = defect(s, 48, 3);
  setenv("DERHAM_THREADS", "1", 1);
  DefectReport narrow = defect(s, 48, 3);
  unsetenv("DERHAM_THREADS");

  CHECK(wide.m_value == narrow.m_value);
  REQUIRE(wide.x.size() == narrow.x.size());
  for (int i = 0; i < wide.x.size(); ++i) {
    CHECK(wide.x[i] == narrow.x[i]);
    CHECK(wide.y[i] == narrow.y[i]);
  }
}
