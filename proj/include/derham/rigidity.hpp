#pragma once

#include <cstdint>
#include <string>

#include "derham/linalg.hpp"
#include "derham/normed_space.hpp"

namespace derham {

// defect of the parallelogram equality at the pair (x, y):
// sqrt((|x+y|^2 + |x-y|^2) / (2 (|x|^2 + |y|^2)))
double defect_ratio(const NormedSpace& s, const Vector& x, const Vector& y);

struct DefectReport {
  double m_value = 1.0;
  Vector x, y;  // extremal pair achieving m_value
  bool certified_lower = true;
  // set when the exact extreme-pair scan ran on polyhedral data in dim <= 3;
  // otherwise m_value is a certified lower bound only
  bool certified_global = false;
  std::string log;
};

// sup of defect_ratio over nonzero pairs, in [1, sqrt(2)]. Multi-start
// projected ascent over seeded starts plus, when vertex and facet data are
// available, an exact scan over extreme pairs of the squared-sum ball.
DefectReport defect(const NormedSpace& s, int starts = 512, std::uint64_t seed = 11);

struct RectangularityReport {
  bool ok = false;
  bool refused = false;
  std::string reason;
  bool zero_1 = false, zero_2 = false;
  double ratio_1 = 0.0, ratio_2 = 0.0;  // defect ratios of the block components
};

// splits the extremal pair into its components along the product
// decomposition (s1, s2) and checks each component is extremal or zero
RectangularityReport extremal_rectangularity(const NormedSpace& s, const Subspace& s1,
                                             const Subspace& s2, const Vector& x, const Vector& y,
                                             double tol = 1e-6);

// two product decompositions A x Abar = C = B x Bbar of the same space
struct ProjectionPair {
  NormedSpace space;
  Subspace a, abar, b, bbar;
};

struct PairValidation {
  bool ok = false;
  bool transversal = false;
  std::string reason;
};

// checks both pairs are product decompositions; with require_transversal also
// checks all four pairwise intersections are trivial
PairValidation validate_projection_pair(const ProjectionPair& pp, bool require_transversal,
                                        int samples = 256, std::uint64_t seed = 7);

struct EigenReport {
  bool refused = false;
  std::string reason;
  double lambda = 0.0;            // squared variational value max |P_B x| / |x| over A
  double lambda_algebraic = 0.0;  // top real eigenvalue of the matrix of Q
  Vector vector;                  // ambient unit vector in A attaining the maximum
  double residual = 1.0;          // |Q v - lambda v| in A coordinates
  bool ok = false;
};

// Q = P_A o P_B on A; the eigenvector comes from maximizing |P_B x| / |x|
// over the unit sphere of A and is cross-checked against the matrix spectrum
EigenReport composed_projection_eigen(const ProjectionPair& pp);

struct UniqueReport {
  bool refused = false;
  std::string reason;
  double lambda = 0.0;
  double slope = 0.0;           // s = sqrt((1 - lambda) / lambda)
  double worst_isometry = 0.0;  // identification I between the complements
  double worst_identity = 0.0;  // generalized parallelogram identity, product form
  double worst_reduced = 0.0;   // same identity reduced to norms of A-vectors
  bool identity_ok = false;
  double boundary_dev = 1.0;
  bool euclidean_confirmed = false;  // independent certificate via the ellipsoid
};

// requires Q = lambda Id on A; verifies the generalized parallelogram
// identity through the isometric identification of Abar with A, and confirms
// Euclidean-ness independently through the inscribed ellipsoid
UniqueReport check_lemma_unique(const ProjectionPair& pp, double lambda, int samples = 512,
                                std::uint64_t seed = 13);

struct StrikeReport {
  bool refused = false;
  std::string reason;
  double m_value = 0.0;
  double boundary_dev = 1.0;
  bool euclidean_confirmed = false;
  // a transversal pair with defect above tolerance contradicts the theory,
  // so the executable chain below is reported as an inconsistency datum
  bool inconsistency = false;
  std::string chain;
};

// two transversal decompositions force a Euclidean space; confirmed by the
// defect and ellipsoid certificates together
StrikeReport check_strike(const ProjectionPair& pp, int starts = 512, std::uint64_t seed = 11);

struct IntersectionReport {
  bool ok = false;
  std::string reason;
  int intersection_dim = 0;
  bool structural = false;  // pass by dimension arithmetic alone
  Subspace complement;      // complement of A cap B inside B when one was needed
  double worst = 0.0;       // worst Pythagorean residual of the inner split
};

// F = A cap B must be a norm-product factor of B; the complement is searched
// among the orthogonal complement inside B and critical-direction spans
IntersectionReport check_maininter_unbound(const NormedSpace& s, const ProjectionPair& pp,
                                           int samples = 256, std::uint64_t seed = 17);

}  // namespace derham
