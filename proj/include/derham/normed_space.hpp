#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "derham/linalg.hpp"

namespace derham {

enum class NormForm { polyhedral_vertices, polyhedral_facets, p_norm, gram, product };

std::string form_name(NormForm f);

// A finite-dimensional normed space in one of five concrete forms. The unit
// ball is always centrally symmetric: vertex and facet lists are validated to
// be closed under negation, gram matrices to be positive-definite.
struct NormedSpace {
  int dim = 0;
  NormForm form = NormForm::gram;

  Matrix vertices;  // columns, form == polyhedral_vertices
  Matrix facets;    // rows a with ball = {v : a.v <= 1}, form == polyhedral_facets
  double p = 2.0;   // form == p_norm; may be +infinity
  Matrix gram;      // form == gram

  std::vector<NormedSpace> components;  // form == product
  std::vector<Matrix> bases;            // embedding basis columns per component
  Matrix product_inverse;               // cached inverse of the concatenated bases
};

NormedSpace vertices_space(const Matrix& vertices);
NormedSpace facets_space(const Matrix& facets);
NormedSpace pnorm_space(int dim, double p);
NormedSpace gram_space(const Matrix& gram);
NormedSpace euclidean_space(int dim);
// ell-infinity and ell-1 balls carry exact vertex/facet data; built as such
NormedSpace linf_space(int dim);
NormedSpace l1_space(int dim);
NormedSpace product_space(std::vector<NormedSpace> components);
NormedSpace product_space(std::vector<NormedSpace> components, std::vector<Matrix> bases);
// the norm v -> ||t^{-1} v||, i.e. the ball mapped forward by t
NormedSpace transformed_space(const NormedSpace& s, const Matrix& t);

double norm(const NormedSpace& s, const Vector& v);
// g with g.v = ||v|| and g.u <= ||u|| for all u (a supporting functional at v)
Vector norm_subgradient(const NormedSpace& s, const Vector& v);

std::function<double(const Vector&)> norm_functor(const NormedSpace& s);
// c (coordinates in sub) -> ||sub.basis * c||
std::function<double(const Vector&)> restricted_functor(const NormedSpace& s, const Subspace& sub);

// exact restriction to a subspace where the form allows it (facets, gram,
// vertices via facet conversion at low dimension); empty otherwise
struct RestrictedForm {
  bool exact = false;
  NormedSpace space;  // norms coordinates in sub's basis
};
RestrictedForm restricted_space(const NormedSpace& s, const Subspace& sub);

// unit-ball vertices when the form is (or converts to) polyhedral; empty otherwise
Matrix ball_vertices(const NormedSpace& s);
// facet functionals when available exactly; empty otherwise
Matrix ball_facets(const NormedSpace& s);
// extreme/critical directions used to seed product checks and defect scans
Matrix critical_vectors(const NormedSpace& s);

struct NormValidation {
  bool ok = true;
  std::string reason;
  double worst_homogeneity = 0.0;
  double worst_triangle = 0.0;
};
NormValidation validate(const NormedSpace& s, int samples = 1000, std::uint64_t seed = 1);

struct ProductCheck {
  bool ok = false;
  double worst = 0.0;      // worst relative Pythagorean residual
  int pairs_tested = 0;
  std::string reason;
};
// true iff ||v1+v2||^2 = ||v1||^2 + ||v2||^2 for sampled v1 in s1, v2 in s2,
// plus all vertex/facet-derived critical pairs for polyhedral forms.
// Throws std::invalid_argument when s1, s2 do not form a direct sum.
ProductCheck is_product_decomposition(const NormedSpace& s, const Subspace& s1, const Subspace& s2,
                                      int samples = 512, std::uint64_t seed = 7,
                                      double tol = 1e-9);

bool hull_dimension_additivity(const NormedSpace& a, const NormedSpace& b);

// verified product decompositions derived from the form (component groupings
// for products, eigen-splits for gram, coordinate splits otherwise)
std::vector<std::pair<Subspace, Subspace>> decomposition_candidates(
    const NormedSpace& s, int samples = 128, std::uint64_t seed = 7, double tol = 1e-9);

}  // namespace derham
