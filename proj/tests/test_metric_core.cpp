#include "doctest.h"

#include <cmath>

#include "derham/json_io.hpp"
#include "derham/metric_space.hpp"
#include "test_util.hpp"

using namespace derham;
using namespace derham::testutil;

TEST_CASE("structural errors throw") {
  Matrix d = Matrix::Zero(2, 3);
  CHECK_THROWS_AS(FiniteMetricSpace({"a", "b"}, d), std::invalid_argument);
  Matrix ok = Matrix::Zero(2, 2);
  CHECK_THROWS_AS(FiniteMetricSpace({"a", "a"}, ok), std::invalid_argument);
  CHECK_THROWS_AS(FiniteMetricSpace({}, Matrix::Zero(0, 0)), std::invalid_argument);
}

TEST_CASE("validate flags the violated triangle") {
  auto good = space_from({"x", "y", "z"}, {{0, 3, 5}, {3, 0, 4}, {5, 4, 0}});
  CHECK(validate(good).ok);

  auto bad = space_from({"x", "y", "z"}, {{0, 3, 8}, {3, 0, 4}, {8, 4, 0}});
  auto rep = validate(bad);
  CHECK(!rep.ok);
  REQUIRE(!rep.violations.empty());
  bool found = false;
  for (const auto& v : rep.violations) {
    if (v.kind == MetricDefect::triangle && v.i == 0 && v.j == 1 && v.k == 2) found = true;
  }
  CHECK(found);

  auto asym = space_from({"x", "y"}, {{0, 1}, {2, 0}});
  auto rep2 = validate(asym);
  CHECK(!rep2.ok);
  CHECK(rep2.violations.front().kind == MetricDefect::asymmetry);

  auto degenerate = space_from({"x", "y"}, {{0, 0}, {0, 0}});
  CHECK(!validate(degenerate).ok);
}

TEST_CASE("squared view and default tolerance scale") {
  auto s = space_from({"x", "y"}, {{0, 3}, {3, 0}});
  CHECK(s.squared()(0, 1) == doctest::Approx(9.0));
  auto tol = s.default_tolerance();
  CHECK(tol.metric == doctest::Approx(3e-9));
  CHECK(tol.sq == doctest::Approx(9e-9));
}

TEST_CASE("product law: 3-4-5 diagonal") {
  auto p = product(k2(3, "a"), k2(4, "b"));
  REQUIRE(p.size() == 4);
  CHECK(p.label(0) == "(a0,b0)");
  CHECK(p(0, 3) == doctest::Approx(5.0));   // diagonal
  CHECK(p(0, 1) == doctest::Approx(4.0));   // second factor moves
  CHECK(p(0, 2) == doctest::Approx(3.0));   // first factor moves
  CHECK(validate(p).ok);
}

TEST_CASE("product law: path3 x K2 corner") {
  auto p = product(path3(1, 1), k2(1, "b"));
  // far corner combines the full path length 2 with the rung 1
  CHECK(p(0, 5) == doctest::Approx(std::sqrt(5.0)));
  CHECK(validate(p).ok);
}

TEST_CASE("squared distances add over products pointwise") {
  Rng rng(11);
  auto y = random_cloud(rng, 3, 0.9, "y");
  auto z = random_cloud(rng, 4, 0.8, "z");
  auto p = product(y, z);
  const Matrix d2 = p.squared();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 4; ++j) {
      for (int k = 0; k < 3; ++k) {
        for (int l = 0; l < 4; ++l) {
          const double want = y(i, k) * y(i, k) + z(j, l) * z(j, l);
          CHECK(d2(i * 4 + j, k * 4 + l) == doctest::Approx(want).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("find_isometry matches relabeled spaces") {
  Rng rng(5);
  auto a = random_cloud(rng, 6);
  std::vector<int> perm{3, 1, 4, 0, 2, 5};
  std::vector<std::string> labels;
  Matrix d(6, 6);
  for (int i = 0; i < 6; ++i) {
    labels.push_back("m" + std::to_string(i));
    for (int j = 0; j < 6; ++j) {
      d(i, j) = a(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
    }
  }
  FiniteMetricSpace b(labels, d);
  auto tol = a.default_tolerance();
  auto iso = find_isometry(a, b, tol);
  REQUIRE(iso.has_value());
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      CHECK(a(i, j) ==
            doctest::Approx(b((*iso)[static_cast<std::size_t>(i)], (*iso)[static_cast<std::size_t>(j)])));
    }
  }
  CHECK(!find_isometry(a, random_cloud(rng, 6), tol).has_value());
}

TEST_CASE("csv round trip quotes labels holding separators") {
  auto f = space_from({"a", "b"}, {{0, 1}, {1, 0}});
  // product labels are "(a,b)"; the csv writer must quote them
  const FiniteMetricSpace p = product(f, f);
  const FiniteMetricSpace back = metric_from_csv(metric_to_csv(p));
  CHECK(back.labels() == p.labels());
  CHECK((back.dist() - p.dist()).cwiseAbs().maxCoeff() == 0.0);

  const FiniteMetricSpace q = metric_from_csv("\"x,\"\"1\",y\n0,2\n2,0\n");
  CHECK(q.label(0) == "x,\"1");
  CHECK(q.label(1) == "y");
  CHECK(q(0, 1) == 2.0);
}
