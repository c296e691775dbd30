#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "derham/metric_space.hpp"

namespace derham {

// Coordinate assignment realizing X = Y x Ybar: point p sits on the grid cell
// (y_index[p], ybar_index[p]); the assignment must be a bijection onto the grid.
struct ProductWitness {
  std::vector<int> y_index;
  std::vector<int> ybar_index;
  int y_count = 0;
  int ybar_count = 0;

  ProductWitness swapped() const { return {ybar_index, y_index, ybar_count, y_count}; }
};

struct WitnessCheck {
  bool ok = false;
  std::string reason;
  double worst_residual = 0.0;  // squared-distance units
  std::array<int, 2> worst_pair{-1, -1};
};

// grid bijection + the additive law on squared distances
WitnessCheck check_witness(const FiniteMetricSpace& s, const ProductWitness& w,
                           const Tolerance& tol);

// point index at grid cell (i,j); -1 when the cell is empty or out of range
int point_at(const ProductWitness& w, int i, int j);

struct InducedFactors {
  bool ok = false;
  std::string reason;
  std::optional<FiniteMetricSpace> y, ybar;
  // worst spread of the same factor distance read off different parallel fibers
  double worst_inconsistency = 0.0;
  std::array<int, 2> offending_pair{-1, -1};
};

// reads both factor metrics off the fibers, cross-checking parallel copies
InducedFactors induced_factors(const FiniteMetricSpace& s, const ProductWitness& w,
                               const Tolerance& tol);

// Matched family of subsets: fibers[i] lists point indices; matching (i,j), when
// present, maps positions of fiber i to positions of fiber j.
struct FiberSystem {
  std::vector<std::vector<int>> fibers;
  std::map<std::pair<int, int>, std::vector<int>> matchings;
};

// nearest-point matchings P_ij(x) = argmin_{w in Y_j} d(x, w); fails on ties
std::optional<FiberSystem> derive_matchings(const FiniteMetricSpace& s,
                                            std::vector<std::vector<int>> fibers,
                                            const Tolerance& tol);

struct AssembleResult {
  bool ok = false;
  std::string error;
  std::vector<int> offending;  // indices relevant to the error, if any
  ProductWitness witness;
  std::optional<FiniteMetricSpace> base;       // Ybar factor (merged fiber classes)
  std::vector<int> fiber_class;                // input fiber -> merged base index
  double worst_residual = 0.0;
};

// Recognition route: validates the matching laws and the squared-distance split,
// derives the base pseudo-metric d(Y_i,Y_j), merges zero-distance fibers, and
// returns the witness X = Y_o x J together with the base space.
AssembleResult assemble_from_fibers(const FiniteMetricSpace& s, const FiberSystem& fs,
                                    const Tolerance& tol);

struct InterbaseReport {
  bool ok = false;
  std::string reason;
  double worst_residual = 0.0;  // squared units
  std::array<int, 2> worst_pair{-1, -1};
};

// For p in the w1-Ybar fiber through x and q in F_x = Y_x n Z_x:
// d^2(P^Z p, P^Z q) = d^2(P^Z p, P^Z x) + d^2(P^Z x, P^Z q), P^Z taken in w2.
InterbaseReport check_interbase(const FiniteMetricSpace& s, const ProductWitness& w1,
                                const ProductWitness& w2, int x, const Tolerance& tol);

struct Slope {
  double a = 0.0;
  double abar = 0.0;
};

// a = d(P^Y x, P^Y z)/d(x,z), abar likewise; throws on zero-distance pairs
Slope slope(const FiniteMetricSpace& s, const ProductWitness& w, int x, int z);

// S = P^Y(S) x P^Ybar(S) as index sets
bool is_rectangular(const ProductWitness& w, const std::vector<int>& subset);

struct PropertyOReport {
  bool ok = false;
  std::string reason;
  bool splits = false;
  bool base_matches = false;
  bool surjective = false;
  double worst_residual = 0.0;
};

// T = P^Y(F_x) x Ybar; P^Z(T) must split as P^Z(F_x) x P^Z(Ybar_x) and fill Z.
PropertyOReport check_property_O(const FiniteMetricSpace& s, const ProductWitness& w_yz,
                                 const ProductWitness& w_zz, int x, const Tolerance& tol);

}  // namespace derham
