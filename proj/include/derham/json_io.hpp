#pragma once

#include <string>

#include "json.hpp"

#include "derham/generator.hpp"
#include "derham/loewner.hpp"
#include "derham/metric_space.hpp"
#include "derham/normed_space.hpp"
#include "derham/product_structure.hpp"
#include "derham/rigidity.hpp"

namespace derham {

// nlohmann::json with the default (alphabetically ordered) object type, so a
// given report has exactly one serialization; dumps carry no timestamps
using Json = nlohmann::json;

inline constexpr const char* kSchemaTag = "derham/1";

// matrices are lists of rows; vectors are flat lists. Column collections
// (vertices, bases) are serialized as lists of the vectors themselves.
Json matrix_rows_to_json(const Matrix& m);
Matrix matrix_rows_from_json(const Json& j, const std::string& field, int expected_cols = -1);
Json matrix_cols_to_json(const Matrix& m);
Matrix matrix_cols_from_json(const Json& j, const std::string& field, int expected_rows = -1);
Json vector_to_json(const Vector& v);
Vector vector_from_json(const Json& j, const std::string& field);

Json metric_to_json(const FiniteMetricSpace& s);
FiniteMetricSpace metric_from_json(const Json& j);

Json norm_to_json(const NormedSpace& s);
NormedSpace norm_from_json(const Json& j);

Json subspace_to_json(const Subspace& s);
Subspace subspace_from_json(const Json& j, const std::string& field);

Json witness_to_json(const ProductWitness& w);
ProductWitness witness_from_json(const Json& j);

// subspace quadruple only; the carrying space comes from the instance file
Json pair_to_json(const ProjectionPair& pp);
ProjectionPair pair_from_json(const Json& j, const NormedSpace& space);

// full instance files, ground truth embedded
Json metric_instance_to_json(const MetricInstance& inst);
Json norm_instance_to_json(const NormInstance& inst);

Json ellipsoid_result_to_json(const LoewnerResult& r);

// plain comma-separated distance matrix with a label header row
std::string metric_to_csv(const FiniteMetricSpace& s);
FiniteMetricSpace metric_from_csv(const std::string& text);

// throws std::runtime_error naming the path/field on any failure
Json load_json_file(const std::string& path);
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// dispatches on content: '{' starts JSON, anything else is CSV
FiniteMetricSpace load_metric_file(const std::string& path);
NormedSpace load_norm_file(const std::string& path);

}  // namespace derham
