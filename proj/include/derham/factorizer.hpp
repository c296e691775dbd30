#pragma once

#include <string>
#include <vector>

#include "derham/product_structure.hpp"

namespace derham {

struct SearchBudget {
  int max_points = 24;
  long max_nodes = 4000000;   // search tree cap
  long max_group = 1000000;   // isometry enumeration cap
};

struct WitnessList {
  std::vector<ProductWitness> witnesses;  // deduplicated up to factor swap + relabeling
  bool complete = true;
  std::string note;
};

// canonical serialization under factor swap and coordinate relabeling
std::vector<int> witness_canonical_key(const ProductWitness& w);

// Pruned search: candidate Y-fibers through point 0 grown under the additive
// consistency filter on squared distances; every surviving fiber determines
// the full witness, which is then validated outright.
WitnessList enumerate_witnesses(const FiniteMetricSpace& s, const Tolerance& tol,
                                const SearchBudget& budget = {});

// Oracle: enumerate every partition of the points into equal-size blocks, match
// blocks by nearest points, and run the recognition pipeline on each family.
WitnessList enumerate_witnesses_bruteforce(const FiniteMetricSpace& s, const Tolerance& tol,
                                           const SearchBudget& budget = {});

struct FactorizationReport {
  // coordinates[f][p] = coordinate of point p in factor f
  std::vector<std::vector<int>> coordinates;
  std::vector<FiniteMetricSpace> factors;
  std::vector<bool> irreducible_flags;
  bool unique = true;
  bool complete = true;
  // distinct maximal coordinate systems when not unique
  std::vector<std::vector<std::vector<int>>> alternatives;
  std::string note;
};

FactorizationReport factorize(const FiniteMetricSpace& s, const Tolerance& tol,
                              const SearchBudget& budget = {});

struct IsometryList {
  std::vector<std::vector<int>> perms;
  bool complete = true;
};

IsometryList isometry_group(const FiniteMetricSpace& s, const Tolerance& tol,
                            const SearchBudget& budget = {});

struct IsometryGroupReport {
  bool ok = false;
  std::string reason;
  long order = 0;
  std::vector<std::vector<int>> generators;
  long factor_group_order = 1;
  long permutation_group_order = 1;
  bool exact = false;
  // no isometry other than the identity fixes the base point and all of its
  // factor fibers pointwise
  bool kernel_trivial = false;
  std::vector<int> kernel_counterexample;
};

IsometryGroupReport verify_exact_sequence(const FiniteMetricSpace& s,
                                          const FactorizationReport& rep, const Tolerance& tol,
                                          const SearchBudget& budget = {});

}  // namespace derham
