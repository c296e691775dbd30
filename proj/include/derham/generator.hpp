#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "derham/metric_space.hpp"
#include "derham/normed_space.hpp"
#include "derham/product_structure.hpp"
#include "derham/rigidity.hpp"

namespace derham {

// Instance factories for fuzz and property suites. Every instance embeds its
// own ground truth (generating factors, planted subspaces or pairs), so the
// generator doubles as the oracle for the recognition pipelines.

struct MetricInstance {
  std::string kind;
  std::uint64_t seed = 0;
  FiniteMetricSpace space;
  std::vector<FiniteMetricSpace> factors;  // planted factors, in order
  // witness for the split (factor 0) x (rest), valid for space's point order
  ProductWitness witness;
};

struct NormInstance {
  std::string kind;
  std::uint64_t seed = 0;
  NormedSpace space;
  std::vector<Subspace> planted;      // planted factor / summand subspaces
  std::vector<ProjectionPair> pairs;  // planted transversal decomposition pairs
  Matrix distortion;                  // linear map applied; empty when none
};

// direct product of random snowflaked point-cloud metrics, canonical order
MetricInstance generate_random_product_metric(const std::vector<int>& sizes, std::uint64_t seed);

// same product with the points renamed and shuffled; the witness follows
MetricInstance generate_shuffled_product(const std::vector<int>& sizes, std::uint64_t seed);

// ball = direct (Minkowski) sum of random symmetric polytopes living in
// complementary blocks; optional invertible distortion with singular values
// in [1/2, 2]. part_dims gives the block dimensions.
NormInstance generate_random_polytope_norm(const std::vector<int>& part_dims,
                                           int vertices_per_part, std::uint64_t seed,
                                           bool distort);

// product norm from component descriptors "linf:d", "l1:d", "gram:d", "p:p:d"
NormInstance generate_product_norm(const std::vector<std::string>& components,
                                   std::uint64_t seed, bool distort);

// gram space with two planted transversal product decompositions in general
// position (each subspace paired with its gram-orthogonal complement)
NormInstance generate_rotated_euclidean_pair(int dim, std::uint64_t seed);

}  // namespace derham
