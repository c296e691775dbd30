#pragma once

#include <utility>
#include <vector>

#include "derham/linalg.hpp"

namespace derham {

// Polytopes are handled in two representations: a matrix of vertex columns
// (convex hull, possibly plus a lineality span) and a matrix of facet rows
// {x : a_i . x <= 1}. All enumeration here is desk-scale and exact up to LP
// tolerances; combinatorial blowups are guarded, not streamed.

// drops duplicate and non-extreme columns
Matrix extreme_points(const Matrix& points, double tol = 1e-9);

// p in conv(points) + span(lineality)?
bool in_hull(const Matrix& points, const Matrix& lineality, const Vector& p, double tol = 1e-9);

// vertex index pairs forming edges; expects an extreme, deduplicated list
std::vector<std::pair<int, int>> polytope_edges(const Matrix& vertices, double tol = 1e-9);

// unit edge directions, sign-canonical and deduplicated
Matrix edge_directions(const Matrix& vertices, const std::vector<std::pair<int, int>>& edges);

// facet functionals of conv(vertices); requires 0 in the interior.
// Throws std::runtime_error when the d-subset count exceeds max_subsets.
Matrix vertices_to_facets(const Matrix& vertices, double tol = 1e-9,
                          std::size_t max_subsets = 4000000);

// vertices of {x : a_i . x <= 1}; requires boundedness (checked a posteriori)
Matrix facets_to_vertices(const Matrix& facets, double tol = 1e-9,
                          std::size_t max_subsets = 4000000);

// vertices (ambient coordinates) of {x : facets.x <= 1} intersected with a subspace
Matrix polytope_section(const Matrix& facets, const Subspace& s, double tol = 1e-9);

// max <theta, v> over the vertex list
double support_value(const Matrix& vertices, const Vector& theta);

// vertex list of the Minkowski sum; exact when the summands live in
// complementary subspaces (every pairwise sum is then a candidate vertex)
Matrix minkowski_sum(const Matrix& v1, const Matrix& v2, double tol = 1e-9);

}  // namespace derham
