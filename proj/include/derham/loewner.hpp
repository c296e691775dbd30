#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "derham/linalg.hpp"
#include "derham/normed_space.hpp"

namespace derham {

// {v : v' shape v <= 1} with shape symmetric positive-definite
struct Ellipsoid {
  Matrix shape;
};

double unit_ball_volume(int d);
double ellipsoid_volume(const Ellipsoid& e);

struct LoewnerResult {
  bool converged = false;
  Ellipsoid ellipsoid;
  double volume = 0.0;
  // certified relative log-volume optimality gap (dual residual of the
  // facet constraints at the final barrier iterate)
  double gap = 0.0;
  // worst boundary excess max(||x|| - 1) located while refining a sampled
  // ball; 0 for exact facet or quadratic solves
  double violation = 0.0;
  int constraints = 0;
  int rounds = 0;
  std::string note;
};

// maximal-volume ellipsoid inscribed in the polytope {x : facets * x <= 1};
// rows must come in +/- pairs (centrally symmetric ball)
LoewnerResult inscribe_in_facets(const Matrix& facets, double gap_tol = 1e-6);

// generic engine for balls only reachable through their norm: supporting
// functionals sampled at boundary points, refined by constraint generation
// until no boundary point of the ellipsoid exceeds the ball
LoewnerResult inscribe_in_norm(int dim, const std::function<double(const Vector&)>& norm_fn,
                               const std::function<Vector(const Vector&)>& subgradient_fn,
                               const Matrix& seed_directions, double gap_tol = 1e-6);

LoewnerResult max_inscribed_ellipsoid(const NormedSpace& s, double gap_tol = 1e-6);

// the ellipsoid of the norm restricted to a subspace, in sub.basis coordinates
LoewnerResult restricted_ellipsoid(const NormedSpace& s, const Subspace& sub,
                                   double gap_tol = 1e-6);

// alias packaging the result as the induced inner product
LoewnerResult euclideanization(const NormedSpace& s, double gap_tol = 1e-6);

// max_i |norm(x_i) - 1| over seeded points x_i on the ellipsoid boundary
double boundary_deviation(const NormedSpace& s, const Matrix& shape, int samples = 4096,
                          std::uint64_t seed = 5);

struct EllipsReport {
  bool ok = false;
  bool refused = false;
  std::string reason;
  double off_block = 0.0;       // worst normalized inner product between s1 and s2 under E
  double shape_mismatch = 0.0;  // worst relative deviation of E-sections from factor ellipsoids
  Matrix shape;                 // euclideanization of the whole space
};

// product norms: the factor subspaces are orthogonal under the induced inner
// product and the central sections of E are the factor ellipsoids
EllipsReport check_lemma_ellips(const NormedSpace& s, const Subspace& s1, const Subspace& s2,
                                double tol_angle = 1e-6, double tol_shape = 1e-5,
                                double gap_tol = 1e-6);

}  // namespace derham
