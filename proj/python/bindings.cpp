#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>

#include "derham/convex_decomposition.hpp"
#include "derham/factorizer.hpp"
#include "derham/generator.hpp"
#include "derham/json_io.hpp"
#include "derham/loewner.hpp"
#include "derham/metric_space.hpp"
#include "derham/normed_space.hpp"
#include "derham/product_structure.hpp"
#include "derham/rigidity.hpp"

namespace py = pybind11;
using namespace derham;

namespace {

// C++ callers pass an explicit Tolerance; the python surface defaults to the
// space's own scale-derived tolerance when none is given.
Tolerance tol_or_default(const FiniteMetricSpace& s, const std::optional<Tolerance>& tol) {
  return tol ? *tol : s.default_tolerance();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "decomposition of finite metric spaces and finite-dimensional normed spaces";
  m.attr("__version__") = "1.0.0";
  m.attr("SCHEMA") = kSchemaTag;

  // ---- linear algebra carriers ------------------------------------------

  py::class_<Subspace>(m, "Subspace")
      .def(py::init([](const Matrix& cols) { return Subspace::span_of(cols); }), py::arg("cols"),
           "span of the given columns, rank-revealed into an orthonormal basis")
      .def_readonly("basis", &Subspace::basis)
      .def_property_readonly("dim", &Subspace::dim)
      .def_property_readonly("ambient", &Subspace::ambient)
      .def_static("zero", &Subspace::zero, py::arg("d"))
      .def_static("full", &Subspace::full, py::arg("d"))
      .def("contains",
           py::overload_cast<const Vector&, double>(&Subspace::contains, py::const_),
           py::arg("v"), py::arg("tol") = 1e-9)
      .def("project", &Subspace::project, py::arg("v"))
      .def("coords", &Subspace::coords, py::arg("v"))
      .def("__repr__", [](const Subspace& s) {
        std::ostringstream os;
        os << "Subspace(dim=" << s.dim() << ", ambient=" << s.ambient() << ")";
        return os.str();
      });

  // ---- metric spaces -----------------------------------------------------

  py::class_<Tolerance>(m, "Tolerance")
      .def(py::init<>())
      .def(py::init([](double metric, double sq) { return Tolerance{metric, sq}; }),
           py::arg("metric"), py::arg("sq"))
      .def_readwrite("metric", &Tolerance::metric)
      .def_readwrite("sq", &Tolerance::sq);

  py::class_<FiniteMetricSpace>(m, "FiniteMetricSpace")
      .def(py::init<std::vector<std::string>, Matrix>(), py::arg("labels"), py::arg("dist"))
      .def_property_readonly("size", &FiniteMetricSpace::size)
      .def_property_readonly("labels",
                             [](const FiniteMetricSpace& s) { return s.labels(); })
      .def_property_readonly("matrix",
                             [](const FiniteMetricSpace& s) { return s.dist(); })
      .def("label", &FiniteMetricSpace::label, py::arg("i"))
      .def("dist", [](const FiniteMetricSpace& s, int i, int j) { return s(i, j); },
           py::arg("i"), py::arg("j"))
      .def("max_dist", &FiniteMetricSpace::max_dist)
      .def("default_tolerance", &FiniteMetricSpace::default_tolerance)
      .def("restricted", &FiniteMetricSpace::restricted, py::arg("points"))
      .def("__len__", &FiniteMetricSpace::size)
      .def("__repr__", [](const FiniteMetricSpace& s) {
        std::ostringstream os;
        os << "FiniteMetricSpace(" << s.size() << " points)";
        return os.str();
      });

  py::enum_<MetricDefect>(m, "MetricDefect")
      .value("asymmetry", MetricDefect::asymmetry)
      .value("nonzero_diagonal", MetricDefect::nonzero_diagonal)
      .value("nonpositive", MetricDefect::nonpositive)
      .value("triangle", MetricDefect::triangle);

  py::class_<MetricViolation>(m, "MetricViolation")
      .def_readonly("kind", &MetricViolation::kind)
      .def_readonly("i", &MetricViolation::i)
      .def_readonly("j", &MetricViolation::j)
      .def_readonly("k", &MetricViolation::k)
      .def_readonly("amount", &MetricViolation::amount);

  py::class_<ValidationReport>(m, "ValidationReport")
      .def_readonly("ok", &ValidationReport::ok)
      .def_readonly("violations", &ValidationReport::violations)
      .def_readonly("total_violations", &ValidationReport::total_violations);

  m.def(
      "validate_metric",
      [](const FiniteMetricSpace& s, const std::optional<Tolerance>& tol) {
        return validate(s, tol_or_default(s, tol));
      },
      py::arg("space"), py::arg("tol") = py::none());

  m.def("product", &product, py::arg("y"), py::arg("z"),
        "l2 direct product; labels are \"(a,b)\", row-major in the second factor");

  m.def(
      "find_isometry",
      [](const FiniteMetricSpace& a, const FiniteMetricSpace& b,
         const std::optional<Tolerance>& tol) { return find_isometry(a, b, tol_or_default(a, tol)); },
      py::arg("a"), py::arg("b"), py::arg("tol") = py::none());

  // ---- product recognition ----------------------------------------------

  py::class_<ProductWitness>(m, "ProductWitness")
      .def(py::init<>())
      .def_readwrite("y_index", &ProductWitness::y_index)
      .def_readwrite("ybar_index", &ProductWitness::ybar_index)
      .def_readwrite("y_count", &ProductWitness::y_count)
      .def_readwrite("ybar_count", &ProductWitness::ybar_count)
      .def("swapped", &ProductWitness::swapped);

  m.def("point_at", &point_at, py::arg("w"), py::arg("i"), py::arg("j"));
  m.def("witness_canonical_key", &witness_canonical_key, py::arg("w"));

  py::class_<SearchBudget>(m, "SearchBudget")
      .def(py::init<>())
      .def_readwrite("max_points", &SearchBudget::max_points)
      .def_readwrite("max_nodes", &SearchBudget::max_nodes)
      .def_readwrite("max_group", &SearchBudget::max_group);

  py::class_<WitnessList>(m, "WitnessList")
      .def_readonly("witnesses", &WitnessList::witnesses)
      .def_readonly("complete", &WitnessList::complete)
      .def_readonly("note", &WitnessList::note);

  m.def(
      "enumerate_witnesses",
      [](const FiniteMetricSpace& s, const std::optional<Tolerance>& tol,
         const SearchBudget& budget) { return enumerate_witnesses(s, tol_or_default(s, tol), budget); },
      py::arg("space"), py::arg("tol") = py::none(), py::arg("budget") = SearchBudget{});

  m.def(
      "enumerate_witnesses_bruteforce",
      [](const FiniteMetricSpace& s, const std::optional<Tolerance>& tol,
         const SearchBudget& budget) {
        return enumerate_witnesses_bruteforce(s, tol_or_default(s, tol), budget);
      },
      py::arg("space"), py::arg("tol") = py::none(), py::arg("budget") = SearchBudget{});

  py::class_<FactorizationReport>(m, "FactorizationReport")
      .def_readonly("coordinates", &FactorizationReport::coordinates)
      .def_readonly("factors", &FactorizationReport::factors)
      .def_readonly("irreducible_flags", &FactorizationReport::irreducible_flags)
      .def_readonly("unique", &FactorizationReport::unique)
      .def_readonly("complete", &FactorizationReport::complete)
      .def_readonly("alternatives", &FactorizationReport::alternatives)
      .def_readonly("note", &FactorizationReport::note);

  m.def(
      "factorize",
      [](const FiniteMetricSpace& s, const std::optional<Tolerance>& tol,
         const SearchBudget& budget) { return factorize(s, tol_or_default(s, tol), budget); },
      py::arg("space"), py::arg("tol") = py::none(), py::arg("budget") = SearchBudget{});

  py::class_<IsometryList>(m, "IsometryList")
      .def_readonly("perms", &IsometryList::perms)
      .def_readonly("complete", &IsometryList::complete);

  m.def(
      "isometry_group",
      [](const FiniteMetricSpace& s, const std::optional<Tolerance>& tol,
         const SearchBudget& budget) { return isometry_group(s, tol_or_default(s, tol), budget); },
      py::arg("space"), py::arg("tol") = py::none(), py::arg("budget") = SearchBudget{});

  py::class_<IsometryGroupReport>(m, "IsometryGroupReport")
      .def_readonly("ok", &IsometryGroupReport::ok)
      .def_readonly("reason", &IsometryGroupReport::reason)
      .def_readonly("order", &IsometryGroupReport::order)
      .def_readonly("generators", &IsometryGroupReport::generators)
      .def_readonly("factor_group_order", &IsometryGroupReport::factor_group_order)
      .def_readonly("permutation_group_order", &IsometryGroupReport::permutation_group_order)
      .def_readonly("exact", &IsometryGroupReport::exact)
      .def_readonly("kernel_trivial", &IsometryGroupReport::kernel_trivial)
      .def_readonly("kernel_counterexample", &IsometryGroupReport::kernel_counterexample);

  m.def(
      "verify_exact_sequence",
      [](const FiniteMetricSpace& s, const FactorizationReport& rep,
         const std::optional<Tolerance>& tol, const SearchBudget& budget) {
        return verify_exact_sequence(s, rep, tol_or_default(s, tol), budget);
      },
      py::arg("space"), py::arg("report"), py::arg("tol") = py::none(),
      py::arg("budget") = SearchBudget{});

  // ---- normed spaces -----------------------------------------------------

  py::class_<NormedSpace>(m, "NormedSpace")
      .def_readonly("dim", &NormedSpace::dim)
      .def_property_readonly("form",
                             [](const NormedSpace& s) { return form_name(s.form); })
      .def_readonly("p", &NormedSpace::p)
      .def_readonly("vertices", &NormedSpace::vertices)
      .def_readonly("facets", &NormedSpace::facets)
      .def_readonly("gram", &NormedSpace::gram)
      .def_property_readonly("components",
                             [](const NormedSpace& s) { return s.components; })
      .def("__repr__", [](const NormedSpace& s) {
        std::ostringstream os;
        os << "NormedSpace(form=" << form_name(s.form) << ", dim=" << s.dim << ")";
        return os.str();
      });

  m.def("vertices_space", &vertices_space, py::arg("vertices"));
  m.def("facets_space", &facets_space, py::arg("facets"));
  m.def("pnorm_space", &pnorm_space, py::arg("dim"), py::arg("p"));
  m.def("gram_space", &gram_space, py::arg("gram"));
  m.def("euclidean_space", &euclidean_space, py::arg("dim"));
  m.def("linf_space", &linf_space, py::arg("dim"));
  m.def("l1_space", &l1_space, py::arg("dim"));
  m.def("product_space",
        py::overload_cast<std::vector<NormedSpace>>(&product_space), py::arg("components"));
  m.def("product_space",
        py::overload_cast<std::vector<NormedSpace>, std::vector<Matrix>>(&product_space),
        py::arg("components"), py::arg("bases"));
  m.def("transformed_space", &transformed_space, py::arg("space"), py::arg("t"));

  m.def("norm", &norm, py::arg("space"), py::arg("v"));
  m.def("norm_subgradient", &norm_subgradient, py::arg("space"), py::arg("v"));
  m.def("ball_vertices", &ball_vertices, py::arg("space"));
  m.def("ball_facets", &ball_facets, py::arg("space"));

  py::class_<NormValidation>(m, "NormValidation")
      .def_readonly("ok", &NormValidation::ok)
      .def_readonly("reason", &NormValidation::reason)
      .def_readonly("worst_homogeneity", &NormValidation::worst_homogeneity)
      .def_readonly("worst_triangle", &NormValidation::worst_triangle);

  m.def("validate_norm",
        py::overload_cast<const NormedSpace&, int, std::uint64_t>(&validate),
        py::arg("space"), py::arg("samples") = 1000, py::arg("seed") = 1);

  py::class_<ProductCheck>(m, "ProductCheck")
      .def_readonly("ok", &ProductCheck::ok)
      .def_readonly("worst", &ProductCheck::worst)
      .def_readonly("pairs_tested", &ProductCheck::pairs_tested)
      .def_readonly("reason", &ProductCheck::reason);

  m.def("is_product_decomposition", &is_product_decomposition, py::arg("space"), py::arg("s1"),
        py::arg("s2"), py::arg("samples") = 512, py::arg("seed") = 7, py::arg("tol") = 1e-9);

  m.def("decomposition_candidates", &decomposition_candidates, py::arg("space"),
        py::arg("samples") = 128, py::arg("seed") = 7, py::arg("tol") = 1e-9);

  // ---- rigidity ----------------------------------------------------------

  py::class_<DefectReport>(m, "DefectReport")
      .def_readonly("m_value", &DefectReport::m_value)
      .def_readonly("x", &DefectReport::x)
      .def_readonly("y", &DefectReport::y)
      .def_readonly("certified_lower", &DefectReport::certified_lower)
      .def_readonly("certified_global", &DefectReport::certified_global)
      .def_readonly("log", &DefectReport::log);

  m.def("defect_ratio", &defect_ratio, py::arg("space"), py::arg("x"), py::arg("y"));
  m.def("defect", &defect, py::arg("space"), py::arg("starts") = 512, py::arg("seed") = 11);

  py::class_<ProjectionPair>(m, "ProjectionPair")
      .def(py::init([](NormedSpace space, Subspace a, Subspace abar, Subspace b, Subspace bbar) {
             return ProjectionPair{std::move(space), std::move(a), std::move(abar), std::move(b),
                                   std::move(bbar)};
           }),
           py::arg("space"), py::arg("a"), py::arg("abar"), py::arg("b"), py::arg("bbar"))
      .def_readwrite("space", &ProjectionPair::space)
      .def_readwrite("a", &ProjectionPair::a)
      .def_readwrite("abar", &ProjectionPair::abar)
      .def_readwrite("b", &ProjectionPair::b)
      .def_readwrite("bbar", &ProjectionPair::bbar);

  py::class_<PairValidation>(m, "PairValidation")
      .def_readonly("ok", &PairValidation::ok)
      .def_readonly("transversal", &PairValidation::transversal)
      .def_readonly("reason", &PairValidation::reason);

  m.def("validate_projection_pair", &validate_projection_pair, py::arg("pair"),
        py::arg("require_transversal"), py::arg("samples") = 256, py::arg("seed") = 7);

  py::class_<EigenReport>(m, "EigenReport")
      .def_readonly("refused", &EigenReport::refused)
      .def_readonly("reason", &EigenReport::reason)
      .def_readonly("lambda_", &EigenReport::lambda)
      .def_readonly("lambda_algebraic", &EigenReport::lambda_algebraic)
      .def_readonly("vector", &EigenReport::vector)
      .def_readonly("residual", &EigenReport::residual)
      .def_readonly("ok", &EigenReport::ok);

  m.def("composed_projection_eigen", &composed_projection_eigen, py::arg("pair"));

  py::class_<UniqueReport>(m, "UniqueReport")
      .def_readonly("refused", &UniqueReport::refused)
      .def_readonly("reason", &UniqueReport::reason)
      .def_readonly("lambda_", &UniqueReport::lambda)
      .def_readonly("slope", &UniqueReport::slope)
      .def_readonly("worst_isometry", &UniqueReport::worst_isometry)
      .def_readonly("worst_identity", &UniqueReport::worst_identity)
      .def_readonly("worst_reduced", &UniqueReport::worst_reduced)
      .def_readonly("identity_ok", &UniqueReport::identity_ok)
      .def_readonly("boundary_dev", &UniqueReport::boundary_dev)
      .def_readonly("euclidean_confirmed", &UniqueReport::euclidean_confirmed);

  m.def("check_lemma_unique", &check_lemma_unique, py::arg("pair"), py::arg("lam"),
        py::arg("samples") = 512, py::arg("seed") = 13);

  py::class_<StrikeReport>(m, "StrikeReport")
      .def_readonly("refused", &StrikeReport::refused)
      .def_readonly("reason", &StrikeReport::reason)
      .def_readonly("m_value", &StrikeReport::m_value)
      .def_readonly("boundary_dev", &StrikeReport::boundary_dev)
      .def_readonly("euclidean_confirmed", &StrikeReport::euclidean_confirmed)
      .def_readonly("inconsistency", &StrikeReport::inconsistency)
      .def_readonly("chain", &StrikeReport::chain);

  m.def("check_strike", &check_strike, py::arg("pair"), py::arg("starts") = 512,
        py::arg("seed") = 11);

  py::class_<IntersectionReport>(m, "IntersectionReport")
      .def_readonly("ok", &IntersectionReport::ok)
      .def_readonly("reason", &IntersectionReport::reason)
      .def_readonly("intersection_dim", &IntersectionReport::intersection_dim)
      .def_readonly("structural", &IntersectionReport::structural)
      .def_readonly("complement", &IntersectionReport::complement)
      .def_readonly("worst", &IntersectionReport::worst);

  m.def("check_maininter_unbound", &check_maininter_unbound, py::arg("space"), py::arg("pair"),
        py::arg("samples") = 256, py::arg("seed") = 17);

  // ---- ellipsoids --------------------------------------------------------

  py::class_<Ellipsoid>(m, "Ellipsoid").def_readonly("shape", &Ellipsoid::shape);

  py::class_<LoewnerResult>(m, "LoewnerResult")
      .def_readonly("converged", &LoewnerResult::converged)
      .def_readonly("ellipsoid", &LoewnerResult::ellipsoid)
      .def_readonly("volume", &LoewnerResult::volume)
      .def_readonly("gap", &LoewnerResult::gap)
      .def_readonly("violation", &LoewnerResult::violation)
      .def_readonly("constraints", &LoewnerResult::constraints)
      .def_readonly("rounds", &LoewnerResult::rounds)
      .def_readonly("note", &LoewnerResult::note);

  m.def("max_inscribed_ellipsoid", &max_inscribed_ellipsoid, py::arg("space"),
        py::arg("gap_tol") = 1e-6);
  m.def("euclideanization", &euclideanization, py::arg("space"), py::arg("gap_tol") = 1e-6);
  m.def("boundary_deviation", &boundary_deviation, py::arg("space"), py::arg("shape"),
        py::arg("samples") = 4096, py::arg("seed") = 5);

  py::class_<EllipsReport>(m, "EllipsReport")
      .def_readonly("ok", &EllipsReport::ok)
      .def_readonly("refused", &EllipsReport::refused)
      .def_readonly("reason", &EllipsReport::reason)
      .def_readonly("off_block", &EllipsReport::off_block)
      .def_readonly("shape_mismatch", &EllipsReport::shape_mismatch)
      .def_readonly("shape", &EllipsReport::shape);

  m.def("check_lemma_ellips", &check_lemma_ellips, py::arg("space"), py::arg("s1"), py::arg("s2"),
        py::arg("tol_angle") = 1e-6, py::arg("tol_shape") = 1e-5, py::arg("gap_tol") = 1e-6);

  // ---- convex direct sums --------------------------------------------------

  py::class_<ConvexBody>(m, "ConvexBody")
      .def_readonly("dim", &ConvexBody::dim)
      .def_readonly("vertices", &ConvexBody::vertices)
      .def_readonly("lineality", &ConvexBody::lineality)
      .def_readonly("gram", &ConvexBody::gram)
      .def("__repr__", [](const ConvexBody& c) {
        std::ostringstream os;
        os << "ConvexBody(dim=" << c.dim << ", " << c.vertices.cols() << " vertices)";
        return os.str();
      });

  m.def("make_body", &make_body, py::arg("vertices"), py::arg("lineality") = Matrix(),
        py::arg("gram") = std::nullopt);
  m.def("body_contains", &body_contains, py::arg("body"), py::arg("p"), py::arg("tol") = 1e-9);

  py::class_<DirectSumPart>(m, "DirectSumPart")
      .def_readonly("sub", &DirectSumPart::sub)
      .def_readonly("body", &DirectSumPart::body);

  py::class_<DirectSumDecomposition>(m, "DirectSumDecomposition")
      .def_readonly("parts", &DirectSumDecomposition::parts)
      .def_readonly("orthogonal", &DirectSumDecomposition::orthogonal)
      .def_readonly("partial", &DirectSumDecomposition::partial)
      .def_readonly("note", &DirectSumDecomposition::note);

  m.def("gruber_decompose", &gruber_decompose, py::arg("body"), py::arg("dim_cap") = 6);
  m.def("is_direct_split", &is_direct_split, py::arg("body"), py::arg("s1"), py::arg("s2"),
        py::arg("tol") = 1e-7);

  // ---- instance generators -------------------------------------------------

  py::class_<MetricInstance>(m, "MetricInstance")
      .def_readonly("kind", &MetricInstance::kind)
      .def_readonly("seed", &MetricInstance::seed)
      .def_readonly("space", &MetricInstance::space)
      .def_readonly("factors", &MetricInstance::factors)
      .def_readonly("witness", &MetricInstance::witness);

  py::class_<NormInstance>(m, "NormInstance")
      .def_readonly("kind", &NormInstance::kind)
      .def_readonly("seed", &NormInstance::seed)
      .def_readonly("space", &NormInstance::space)
      .def_readonly("planted", &NormInstance::planted)
      .def_readonly("pairs", &NormInstance::pairs)
      .def_readonly("distortion", &NormInstance::distortion);

  m.def("generate_random_product_metric", &generate_random_product_metric, py::arg("sizes"),
        py::arg("seed"));
  m.def("generate_shuffled_product", &generate_shuffled_product, py::arg("sizes"),
        py::arg("seed"));
  m.def("generate_random_polytope_norm", &generate_random_polytope_norm, py::arg("part_dims"),
        py::arg("vertices_per_part"), py::arg("seed"), py::arg("distort"));
  m.def("generate_product_norm", &generate_product_norm, py::arg("components"), py::arg("seed"),
        py::arg("distort"));
  m.def("generate_rotated_euclidean_pair", &generate_rotated_euclidean_pair, py::arg("dim"),
        py::arg("seed"));

  // ---- serialization -------------------------------------------------------

  m.def("metric_to_json",
        [](const FiniteMetricSpace& s) { return metric_to_json(s).dump(2); }, py::arg("space"));
  m.def("metric_from_json",
        [](const std::string& text) { return metric_from_json(Json::parse(text)); },
        py::arg("text"));
  m.def("norm_to_json", [](const NormedSpace& s) { return norm_to_json(s).dump(2); },
        py::arg("space"));
  m.def("norm_from_json",
        [](const std::string& text) { return norm_from_json(Json::parse(text)); },
        py::arg("text"));
  m.def("metric_to_csv", &metric_to_csv, py::arg("space"));
  m.def("metric_from_csv", &metric_from_csv, py::arg("text"));
  m.def("metric_instance_to_json",
        [](const MetricInstance& inst) { return metric_instance_to_json(inst).dump(2); },
        py::arg("instance"));
  m.def("norm_instance_to_json",
        [](const NormInstance& inst) { return norm_instance_to_json(inst).dump(2); },
        py::arg("instance"));
  m.def("load_metric_file", &load_metric_file, py::arg("path"));
  m.def("load_norm_file", &load_norm_file, py::arg("path"));
}
