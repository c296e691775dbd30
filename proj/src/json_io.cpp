#include "derham/json_io.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

namespace derham {

namespace {

[[noreturn]] void fail(const std::string& what) { throw std::runtime_error(what); }

void expect(bool cond, const std::string& what) {
  if (!cond) fail(what);
}

const Json& field(const Json& j, const std::string& name) {
  expect(j.is_object(), "expected an object holding field '" + name + "'");
  auto it = j.find(name);
  expect(it != j.end(), "missing field '" + name + "'");
  return *it;
}

double number_at(const Json& j, const std::string& ctx) {
  expect(j.is_number(), "field '" + ctx + "' must be a number");
  return j.get<double>();
}

}  // namespace

Json matrix_rows_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_rows_from_json(const Json& j, const std::string& name, int expected_cols) {
  expect(j.is_array(), "field '" + name + "' must be a list of rows");
  const int r = static_cast<int>(j.size());
  int c = expected_cols;
  if (r > 0) {
    expect(j[0].is_array(), "field '" + name + "' must be a list of rows");
    c = static_cast<int>(j[0].size());
  }
  if (c < 0) c = 0;
  Matrix m(r, c);
  for (int i = 0; i < r; ++i) {
    expect(j[static_cast<std::size_t>(i)].is_array() &&
               static_cast<int>(j[static_cast<std::size_t>(i)].size()) == c,
           "field '" + name + "' has ragged rows");
    for (int k = 0; k < c; ++k) {
      m(i, k) = number_at(j[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)], name);
    }
  }
  return m;
}

Json matrix_cols_to_json(const Matrix& m) { return matrix_rows_to_json(m.transpose()); }

Matrix matrix_cols_from_json(const Json& j, const std::string& name, int expected_rows) {
  return matrix_rows_from_json(j, name, expected_rows).transpose();
}

Json vector_to_json(const Vector& v) {
  Json a = Json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Vector vector_from_json(const Json& j, const std::string& name) {
  expect(j.is_array(), "field '" + name + "' must be a list");
  Vector v(static_cast<int>(j.size()));
  for (int i = 0; i < v.size(); ++i) v[i] = number_at(j[static_cast<std::size_t>(i)], name);
  return v;
}

Json metric_to_json(const FiniteMetricSpace& s) {
  Json j;
  j["schema"] = kSchemaTag;
  j["kind"] = "metric";
  j["labels"] = s.labels();
  j["dist"] = matrix_rows_to_json(s.dist());
  return j;
}

FiniteMetricSpace metric_from_json(const Json& j) {
  const Json& jl = field(j, "labels");
  expect(jl.is_array(), "field 'labels' must be a list of strings");
  std::vector<std::string> labels;
  for (const auto& l : jl) {
    expect(l.is_string(), "field 'labels' must be a list of strings");
    labels.push_back(l.get<std::string>());
  }
  Matrix d = matrix_rows_from_json(field(j, "dist"), "dist");
  try {
    return FiniteMetricSpace(std::move(labels), std::move(d));
  } catch (const std::invalid_argument& e) {
    fail(std::string("field 'dist': ") + e.what());
  }
}

Json norm_to_json(const NormedSpace& s) {
  Json j;
  j["schema"] = kSchemaTag;
  j["kind"] = "norm";
  j["dim"] = s.dim;
  j["form"] = form_name(s.form);
  switch (s.form) {
    case NormForm::polyhedral_vertices:
      j["vertices"] = matrix_cols_to_json(s.vertices);
      break;
    case NormForm::polyhedral_facets:
      j["facets"] = matrix_rows_to_json(s.facets);
      break;
    case NormForm::p_norm:
      if (std::isinf(s.p)) {
        j["p"] = "inf";
      } else {
        j["p"] = s.p;
      }
      break;
    case NormForm::gram:
      j["gram"] = matrix_rows_to_json(s.gram);
      break;
    case NormForm::product: {
      Json comps = Json::array();
      for (const auto& c : s.components) comps.push_back(norm_to_json(c));
      Json bases = Json::array();
      for (const auto& b : s.bases) bases.push_back(matrix_cols_to_json(b));
      j["components"] = std::move(comps);
      j["bases"] = std::move(bases);
      break;
    }
  }
  return j;
}

NormedSpace norm_from_json(const Json& j) {
  const Json& f = field(j, "form");
  expect(f.is_string(), "field 'form' must be a string");
  const std::string form = f.get<std::string>();
  try {
    if (form == "polyhedral_vertices") {
      return vertices_space(matrix_cols_from_json(field(j, "vertices"), "vertices"));
    }
    if (form == "polyhedral_facets") {
      return facets_space(matrix_rows_from_json(field(j, "facets"), "facets"));
    }
    if (form == "p_norm") {
      const Json& jp = field(j, "p");
      double p = 0.0;
      if (jp.is_string() && jp.get<std::string>() == "inf") {
        p = std::numeric_limits<double>::infinity();
      } else {
        p = number_at(jp, "p");
      }
      const Json& jd = field(j, "dim");
      expect(jd.is_number_integer(), "field 'dim' must be an integer");
      return pnorm_space(jd.get<int>(), p);
    }
    if (form == "gram") {
      return gram_space(matrix_rows_from_json(field(j, "gram"), "gram"));
    }
    if (form == "product") {
      const Json& jc = field(j, "components");
      expect(jc.is_array() && !jc.empty(), "field 'components' must be a nonempty list");
      std::vector<NormedSpace> comps;
      for (const auto& c : jc) comps.push_back(norm_from_json(c));
      if (j.contains("bases")) {
        const Json& jb = j.at("bases");
        expect(jb.is_array() && jb.size() == jc.size(),
               "field 'bases' must list one basis per component");
        std::vector<Matrix> bases;
        for (const auto& b : jb) bases.push_back(matrix_cols_from_json(b, "bases"));
        return product_space(std::move(comps), std::move(bases));
      }
      return product_space(std::move(comps));
    }
  } catch (const std::invalid_argument& e) {
    fail(std::string("field 'form=") + form + "': " + e.what());
  }
  fail("field 'form': unknown value '" + form + "'");
}

Json subspace_to_json(const Subspace& s) {
  Json j;
  j["ambient"] = s.ambient();
  j["basis"] = matrix_cols_to_json(s.basis);
  return j;
}

Subspace subspace_from_json(const Json& j, const std::string& name) {
  const Json& ja = field(j, "ambient");
  expect(ja.is_number_integer(), "field '" + name + ".ambient' must be an integer");
  const int ambient = ja.get<int>();
  Matrix basis = matrix_cols_from_json(field(j, "basis"), name + ".basis", ambient);
  if (basis.cols() == 0) return Subspace::zero(ambient);
  expect(basis.rows() == ambient, "field '" + name + ".basis' does not match ambient");
  return Subspace::span_of(basis);
}

Json witness_to_json(const ProductWitness& w) {
  Json j;
  j["y_count"] = w.y_count;
  j["ybar_count"] = w.ybar_count;
  j["y_index"] = w.y_index;
  j["ybar_index"] = w.ybar_index;
  return j;
}

ProductWitness witness_from_json(const Json& j) {
  ProductWitness w;
  const Json& yc = field(j, "y_count");
  const Json& bc = field(j, "ybar_count");
  expect(yc.is_number_integer() && bc.is_number_integer(), "witness counts must be integers");
  w.y_count = yc.get<int>();
  w.ybar_count = bc.get<int>();
  const Json& yi = field(j, "y_index");
  const Json& bi = field(j, "ybar_index");
  expect(yi.is_array() && bi.is_array() && yi.size() == bi.size(),
         "witness index lists must have equal length");
  for (const auto& v : yi) w.y_index.push_back(v.get<int>());
  for (const auto& v : bi) w.ybar_index.push_back(v.get<int>());
  return w;
}

Json pair_to_json(const ProjectionPair& pp) {
  Json j;
  j["a"] = subspace_to_json(pp.a);
  j["abar"] = subspace_to_json(pp.abar);
  j["b"] = subspace_to_json(pp.b);
  j["bbar"] = subspace_to_json(pp.bbar);
  return j;
}

ProjectionPair pair_from_json(const Json& j, const NormedSpace& space) {
  ProjectionPair pp;
  pp.space = space;
  pp.a = subspace_from_json(field(j, "a"), "a");
  pp.abar = subspace_from_json(field(j, "abar"), "abar");
  pp.b = subspace_from_json(field(j, "b"), "b");
  pp.bbar = subspace_from_json(field(j, "bbar"), "bbar");
  expect(pp.a.ambient() == space.dim, "pair subspaces must live in the space's dimension");
  return pp;
}

Json metric_instance_to_json(const MetricInstance& inst) {
  Json j = metric_to_json(inst.space);
  Json gt;
  gt["generator"] = inst.kind;
  gt["seed"] = inst.seed;
  Json factors = Json::array();
  for (const auto& f : inst.factors) factors.push_back(metric_to_json(f));
  gt["factors"] = std::move(factors);
  gt["witness"] = witness_to_json(inst.witness);
  j["ground_truth"] = std::move(gt);
  return j;
}

Json norm_instance_to_json(const NormInstance& inst) {
  Json j = norm_to_json(inst.space);
  Json gt;
  gt["generator"] = inst.kind;
  gt["seed"] = inst.seed;
  Json planted = Json::array();
  for (const auto& s : inst.planted) planted.push_back(subspace_to_json(s));
  gt["planted"] = std::move(planted);
  Json pairs = Json::array();
  for (const auto& p : inst.pairs) pairs.push_back(pair_to_json(p));
  gt["pairs"] = std::move(pairs);
  if (inst.distortion.size() > 0) gt["distortion"] = matrix_rows_to_json(inst.distortion);
  j["ground_truth"] = std::move(gt);
  return j;
}

Json ellipsoid_result_to_json(const LoewnerResult& r) {
  Json j;
  j["converged"] = r.converged;
  j["ellipsoid"] = Json{{"shape", matrix_rows_to_json(r.ellipsoid.shape)}};
  j["volume"] = r.volume;
  j["gap"] = r.gap;
  j["violation"] = r.violation;
  j["constraints"] = r.constraints;
  j["rounds"] = r.rounds;
  j["note"] = r.note;
  return j;
}

namespace {

// product labels look like "(a,b)": quote any field holding a separator
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> row;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(cell);
      cell.clear();
    } else {
      cell += c;
    }
  }
  row.push_back(cell);
  return row;
}

}  // namespace

std::string metric_to_csv(const FiniteMetricSpace& s) {
  std::ostringstream os;
  os.precision(17);
  for (int i = 0; i < s.size(); ++i) os << (i ? "," : "") << csv_field(s.label(i));
  os << "\n";
  for (int i = 0; i < s.size(); ++i) {
    for (int j = 0; j < s.size(); ++j) os << (j ? "," : "") << s(i, j);
    os << "\n";
  }
  return os.str();
}

FiniteMetricSpace metric_from_csv(const std::string& text) {
  std::vector<std::vector<std::string>> cells;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    cells.push_back(split_csv_line(line));
  }
  expect(!cells.empty(), "csv input is empty");

  auto numeric = [](const std::string& c) {
    char* end = nullptr;
    std::strtod(c.c_str(), &end);
    return end != c.c_str() && *end == '\0';
  };

  std::vector<std::string> labels;
  std::size_t first_row = 0;
  if (!numeric(cells[0][0])) {
    labels = cells[0];
    first_row = 1;
  }
  const std::size_t n = cells.size() - first_row;
  expect(n > 0, "csv input has no matrix rows");
  if (labels.empty()) {
    for (std::size_t i = 0; i < n; ++i) labels.push_back("p" + std::to_string(i));
  }
  expect(labels.size() == n, "csv header width does not match the row count");
  Matrix d(static_cast<int>(n), static_cast<int>(n));
  for (std::size_t i = 0; i < n; ++i) {
    expect(cells[first_row + i].size() == n, "csv row " + std::to_string(i) + " has wrong width");
    for (std::size_t j = 0; j < n; ++j) {
      const std::string& c = cells[first_row + i][j];
      expect(numeric(c), "csv cell (" + std::to_string(i) + "," + std::to_string(j) +
                             ") is not a number");
      d(static_cast<int>(i), static_cast<int>(j)) = std::stod(c);
    }
  }
  try {
    return FiniteMetricSpace(std::move(labels), std::move(d));
  } catch (const std::invalid_argument& e) {
    fail(std::string("csv matrix: ") + e.what());
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open input file '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("cannot open output file '" + path + "'");
  out << content;
  if (!out) fail("failed writing output file '" + path + "'");
}

Json load_json_file(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail("file '" + path + "' is not valid JSON: " + e.what());
  }
}

FiniteMetricSpace load_metric_file(const std::string& path) {
  const std::string text = read_text_file(path);
  std::size_t i = text.find_first_not_of(" \t\r\n");
  if (i != std::string::npos && text[i] == '{') {
    Json j;
    try {
      j = Json::parse(text);
    } catch (const Json::parse_error& e) {
      fail("file '" + path + "' is not valid JSON: " + e.what());
    }
    return metric_from_json(j);
  }
  return metric_from_csv(text);
}

NormedSpace load_norm_file(const std::string& path) { return norm_from_json(load_json_file(path)); }

}  // namespace derham
