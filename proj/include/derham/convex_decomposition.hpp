#pragma once

#include <optional>
#include <string>
#include <vector>

#include "derham/linalg.hpp"

namespace derham {

// Convex body containing 0, held in generator representation: the convex hull
// of vertex columns plus the span of lineality columns. The bounded part is
// canonicalized to extreme points at construction.
struct ConvexBody {
  int dim = 0;
  Matrix vertices;   // columns; always at least the origin
  Matrix lineality;  // columns; may be empty
  std::optional<Matrix> gram;
};

// validates 0 in C and canonicalizes; throws std::invalid_argument otherwise
ConvexBody make_body(const Matrix& vertices, const Matrix& lineality = Matrix(),
                     std::optional<Matrix> gram = std::nullopt);

bool body_contains(const ConvexBody& c, const Vector& p, double tol = 1e-9);

Subspace lineality_space(const ConvexBody& c);
Subspace linear_hull(const ConvexBody& c);

struct DirectSumPart {
  Subspace sub;
  ConvexBody body;
};

struct DirectSumDecomposition {
  std::vector<DirectSumPart> parts;
  bool orthogonal = false;  // meaningful only when a gram matrix is attached
  bool partial = false;     // search cap exceeded; parts not certified indecomposable
  std::string note;
};

// unique decomposition into a lineality part plus indecomposable bodies.
// Certification is an exhaustive search over splitting subspaces spanned by
// subsets of edge directions; dimensions above dim_cap set the partial flag.
DirectSumDecomposition gruber_decompose(const ConvexBody& c, int dim_cap = 6);

// valid direct-sum 2-splitting along the given complementary subspaces?
bool is_direct_split(const ConvexBody& c, const Subspace& s1, const Subspace& s2, double tol = 1e-7);

struct LemmaReport {
  bool ok = false;
  bool refused = false;
  std::string reason;
  double worst = 0.0;
};

// P^B((A cap B) + Abar) = B, as bodies cut out of c, with P^B the
// gram-orthogonal projection onto B along Bbar
LemmaReport check_lemma_eucl(const ConvexBody& c, const Matrix& gram, const Subspace& a,
                             const Subspace& abar, const Subspace& b, const Subspace& bbar);

// under B cap A = B cap Abar = {0}, the B-part is a linear space: L = H on it
LemmaReport check_lemma_euclhelp(const ConvexBody& c, const Matrix& gram, const Subspace& a,
                                 const Subspace& abar, const Subspace& b, const Subspace& bbar);

}  // namespace derham
