#include "derham/generator.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "derham/rng.hpp"

namespace derham {

namespace {

void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument(what);
}

// snowflaked point-cloud metric: d^q of a Euclidean cloud stays a metric but
// has no accidental product structure and no ties between distinct distances
FiniteMetricSpace random_cloud_metric(Rng& rng, int n, const std::string& prefix) {
  const int dim = std::max(2, n / 2 + 1);
  const double q = rng.uniform(0.75, 0.95);
  std::vector<Vector> pts;
  pts.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) pts.push_back(rng.normal_vector(dim));
  Matrix d = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      d(i, j) = d(j, i) =
          std::pow((pts[static_cast<std::size_t>(i)] - pts[static_cast<std::size_t>(j)]).norm(), q);
    }
  }
  std::vector<std::string> labels;
  for (int i = 0; i < n; ++i) labels.push_back(prefix + std::to_string(i));
  return FiniteMetricSpace(labels, d);
}

Matrix random_orthogonal(Rng& rng, int d) {
  Matrix m(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) m(i, j) = rng.normal();
  }
  Eigen::HouseholderQR<Matrix> qr(m);
  Matrix q = qr.householderQ();
  // fix the sign convention so the result is seed-determined
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < d; ++i) {
    if (r(i, i) < 0) q.col(i) = -q.col(i);
  }
  return q;
}

Matrix random_distortion(Rng& rng, int d) {
  Matrix q1 = random_orthogonal(rng, d);
  Matrix q2 = random_orthogonal(rng, d);
  Vector sv(d);
  for (int i = 0; i < d; ++i) sv[i] = rng.uniform(0.5, 2.0);
  return q1 * sv.asDiagonal() * q2;
}

// centrally symmetric full-dimensional vertex set in R^d
Matrix random_symmetric_vertices(Rng& rng, int d, int count) {
  const int extra = std::max(0, count - d);
  Matrix v(d, 2 * (d + extra));
  for (int i = 0; i < d; ++i) {
    Vector a = Vector::Unit(d, i) * rng.uniform(0.6, 1.5);
    v.col(2 * i) = a;
    v.col(2 * i + 1) = -a;
  }
  for (int k = 0; k < extra; ++k) {
    Vector a = rng.unit_vector(d) * rng.uniform(0.8, 1.4);
    v.col(2 * (d + k)) = a;
    v.col(2 * (d + k) + 1) = -a;
  }
  return v;
}

MetricInstance product_instance(const std::vector<int>& sizes, std::uint64_t seed,
                                const std::string& kind) {
  require(sizes.size() >= 2, "need at least two factor sizes");
  for (int n : sizes) require(n >= 2, "factor sizes must be at least 2");

  Rng rng(seed);
  std::vector<FiniteMetricSpace> factors;
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    factors.push_back(
        random_cloud_metric(rng, sizes[k], "f" + std::to_string(k) + "p"));
  }
  FiniteMetricSpace rest = factors.back();
  for (std::size_t k = sizes.size() - 1; k-- > 1;) rest = product(factors[k], rest);
  FiniteMetricSpace full = product(factors[0], rest);

  ProductWitness w;
  const int ny = factors[0].size();
  const int nbar = rest.size();
  w.y_count = ny;
  w.ybar_count = nbar;
  w.y_index.resize(static_cast<std::size_t>(full.size()));
  w.ybar_index.resize(static_cast<std::size_t>(full.size()));
  for (int p = 0; p < full.size(); ++p) {
    w.y_index[static_cast<std::size_t>(p)] = p / nbar;
    w.ybar_index[static_cast<std::size_t>(p)] = p % nbar;
  }
  return MetricInstance{kind, seed, std::move(full), std::move(factors), std::move(w)};
}

}  // namespace

MetricInstance generate_random_product_metric(const std::vector<int>& sizes,
                                              std::uint64_t seed) {
  return product_instance(sizes, seed, "random-product-metric");
}

MetricInstance generate_shuffled_product(const std::vector<int>& sizes, std::uint64_t seed) {
  MetricInstance inst = product_instance(sizes, seed, "shuffled-product");
  const int n = inst.space.size();
  Rng rng(seed ^ 0xabcdef1234567890ull);
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(perm);

  Matrix d(n, n);
  std::vector<std::string> labels;
  for (int a = 0; a < n; ++a) labels.push_back("p" + std::to_string(a));
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      d(a, b) = inst.space(perm[static_cast<std::size_t>(a)], perm[static_cast<std::size_t>(b)]);
    }
  }
  ProductWitness w = inst.witness;
  for (int a = 0; a < n; ++a) {
    w.y_index[static_cast<std::size_t>(a)] =
        inst.witness.y_index[static_cast<std::size_t>(perm[static_cast<std::size_t>(a)])];
    w.ybar_index[static_cast<std::size_t>(a)] =
        inst.witness.ybar_index[static_cast<std::size_t>(perm[static_cast<std::size_t>(a)])];
  }
  inst.space = FiniteMetricSpace(labels, d);
  inst.witness = w;
  return inst;
}

NormInstance generate_random_polytope_norm(const std::vector<int>& part_dims,
                                           int vertices_per_part, std::uint64_t seed,
                                           bool distort) {
  require(!part_dims.empty(), "need at least one part dimension");
  int total = 0;
  for (int d : part_dims) {
    require(d >= 1, "part dimensions must be positive");
    total += d;
  }
  require(vertices_per_part >= 1, "vertices_per_part must be positive");

  Rng rng(seed);
  std::vector<Matrix> parts;
  int offset = 0;
  std::vector<int> offsets;
  for (int d : part_dims) {
    offsets.push_back(offset);
    parts.push_back(random_symmetric_vertices(rng, d, vertices_per_part));
    offset += d;
  }

  // vertices of a direct sum of polytopes in complementary blocks: all sums
  // of one vertex per part
  long count = 1;
  for (const Matrix& p : parts) count *= p.cols();
  require(count <= 4096, "vertex grid too large");
  Matrix verts = Matrix::Zero(total, static_cast<int>(count));
  long stride = 1;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const Matrix& p = parts[k];
    for (long c = 0; c < count; ++c) {
      const int pick = static_cast<int>((c / stride) % p.cols());
      verts.block(offsets[k], static_cast<int>(c), part_dims[k], 1) = p.col(pick);
    }
    stride *= p.cols();
  }

  NormInstance inst;
  inst.kind = "random-polytope-norm";
  inst.seed = seed;
  Matrix t = Matrix::Identity(total, total);
  if (distort) {
    t = random_distortion(rng, total);
    verts = t * verts;
    inst.distortion = t;
  }
  inst.space = vertices_space(verts);
  for (std::size_t k = 0; k < parts.size(); ++k) {
    Matrix basis = t.middleCols(offsets[k], part_dims[k]);
    inst.planted.push_back(Subspace::span_of(basis));
  }
  return inst;
}

NormInstance generate_product_norm(const std::vector<std::string>& components,
                                   std::uint64_t seed, bool distort) {
  require(!components.empty(), "need at least one component descriptor");
  Rng rng(seed);
  std::vector<NormedSpace> comps;
  for (const std::string& c : components) {
    const auto p1 = c.find(':');
    require(p1 != std::string::npos, "component descriptor must look like name:dim, got " + c);
    const std::string name = c.substr(0, p1);
    const std::string rest = c.substr(p1 + 1);
    if (name == "p") {
      const auto p2 = rest.find(':');
      require(p2 != std::string::npos, "p-norm descriptor must look like p:value:dim, got " + c);
      const double pv = std::stod(rest.substr(0, p2));
      const int d = std::stoi(rest.substr(p2 + 1));
      comps.push_back(pnorm_space(d, pv));
      continue;
    }
    const int d = std::stoi(rest);
    require(d >= 1, "component dimension must be positive in " + c);
    if (name == "linf") {
      comps.push_back(linf_space(d));
    } else if (name == "l1") {
      comps.push_back(l1_space(d));
    } else if (name == "gram") {
      Matrix m(d, d);
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) m(i, j) = rng.normal();
      }
      comps.push_back(gram_space(Matrix(m.transpose() * m + Matrix::Identity(d, d))));
    } else {
      require(false, "unknown component kind " + name);
    }
  }

  NormInstance inst;
  inst.kind = "product-norm";
  inst.seed = seed;
  NormedSpace s = product_space(comps);
  const int total = s.dim;
  Matrix t = Matrix::Identity(total, total);
  if (distort) {
    t = random_distortion(rng, total);
    s = transformed_space(s, t);
    inst.distortion = t;
  }
  for (const Matrix& b : s.bases) inst.planted.push_back(Subspace::span_of(b));
  inst.space = std::move(s);
  return inst;
}

NormInstance generate_rotated_euclidean_pair(int dim, std::uint64_t seed) {
  require(dim >= 4 && dim % 2 == 0, "dimension must be even and at least 4");
  Rng rng(seed);
  Matrix m(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) m(i, j) = rng.normal();
  }
  Matrix gram = m.transpose() * m + Matrix::Identity(dim, dim);

  NormInstance inst;
  inst.kind = "rotated-euclidean-pair";
  inst.seed = seed;
  inst.space = gram_space(gram);

  auto random_half = [&]() {
    Matrix r(dim, dim / 2);
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim / 2; ++j) r(i, j) = rng.normal();
    }
    return Subspace::span_of(r);
  };

  ProjectionPair pp;
  pp.space = inst.space;
  pp.a = random_half();
  pp.abar = orthogonal_complement(pp.a, &gram);
  for (int attempt = 0; attempt < 64; ++attempt) {
    pp.b = random_half();
    pp.bbar = orthogonal_complement(pp.b, &gram);
    const bool transversal = intersect(pp.a, pp.b).dim() == 0 &&
                             intersect(pp.a, pp.bbar).dim() == 0 &&
                             intersect(pp.abar, pp.b).dim() == 0 &&
                             intersect(pp.abar, pp.bbar).dim() == 0;
    if (transversal) {
      inst.pairs.push_back(pp);
      inst.planted = {pp.a, pp.abar, pp.b, pp.bbar};
      return inst;
    }
  }
  throw std::runtime_error("failed to draw a transversal pair");
}

}  // namespace derham
