#include "doctest.h"

#include "derham/linalg.hpp"
#include "derham/lp.hpp"
#include "derham/rng.hpp"

using namespace derham;

TEST_CASE("rng is reproducible and roughly centered") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng r(7);
  double sum = 0;
  for (int i = 0; i < 4000; ++i) sum += r.normal();
  CHECK(std::abs(sum / 4000.0) < 0.1);
  for (int i = 0; i < 200; ++i) {
    const int v = r.uniform_int(5);
    CHECK(v >= 0);
    CHECK(v < 5);
  }
}

TEST_CASE("subspace algebra") {
  Matrix cols(3, 3);
  cols << 1, 2, 3, 0, 0, 0, 1, 2, 3;  // rank 1
  auto s = Subspace::span_of(cols);
  CHECK(s.dim() == 1);
  Vector v(3);
  v << 2, 0, 2;
  CHECK(s.contains(v));
  v << 1, 1, 1;
  CHECK(!s.contains(v));

  Matrix xy(3, 2), yz(3, 2);
  xy << 1, 0, 0, 1, 0, 0;
  yz << 0, 0, 1, 0, 0, 1;
  auto a = Subspace::span_of(xy), b = Subspace::span_of(yz);
  auto cap = intersect(a, b);
  REQUIRE(cap.dim() == 1);
  Vector e2(3);
  e2 << 0, 1, 0;
  CHECK(cap.contains(e2));
  CHECK(subspace_sum(a, b).dim() == 3);

  auto comp = orthogonal_complement(a);
  REQUIRE(comp.dim() == 1);
  Vector e3(3);
  e3 << 0, 0, 1;
  CHECK(comp.contains(e3));
}

TEST_CASE("oblique projector") {
  Matrix ab(2, 1), bb(2, 1);
  ab << 1, 0;
  bb << 1, 1;  // project onto x-axis along the diagonal
  Matrix p = projector_onto_along(Subspace::span_of(ab), Subspace::span_of(bb));
  Vector v(2);
  v << 3, 2;
  Vector pv = p * v;
  CHECK(pv[0] == doctest::Approx(1.0));
  CHECK(pv[1] == doctest::Approx(0.0));
  CHECK((p * p - p).norm() < 1e-12);
}

TEST_CASE("lp basics") {
  // min x+y st x+2y >= 4, x,y >= 0  ->  (0,2)
  LpProblem p;
  p.c = Vector(2);
  p.c << 1, 1;
  p.a_ub = Matrix(1, 2);
  p.a_ub << -1, -2;
  p.b_ub = Vector(1);
  p.b_ub << -4;
  p.nonneg = {true, true};
  auto r = solve_lp(p);
  REQUIRE(r.status == LpStatus::optimal);
  CHECK(r.value == doctest::Approx(2.0));

  // infeasible: x >= 1 and x <= 0
  LpProblem q;
  q.c = Vector::Zero(1);
  q.a_ub = Matrix(2, 1);
  q.a_ub << -1, 1;
  q.b_ub = Vector(2);
  q.b_ub << -1, 0;
  CHECK(solve_lp(q).status == LpStatus::infeasible);

  // unbounded: min -x, x >= 0
  LpProblem u;
  u.c = Vector(1);
  u.c << -1;
  u.nonneg = {true};
  u.a_eq = Matrix(0, 1);
  u.b_eq = Vector(0);
  CHECK(solve_lp(u).status == LpStatus::unbounded);

  // equality + free variable: min x st x + y = 3, y <= 1 -> x = 2
  LpProblem e;
  e.c = Vector(2);
  e.c << 1, 0;
  e.a_eq = Matrix(1, 2);
  e.a_eq << 1, 1;
  e.b_eq = Vector(1);
  e.b_eq << 3;
  e.a_ub = Matrix(1, 2);
  e.a_ub << 0, 1;
  e.b_ub = Vector(1);
  e.b_ub << 1;
  auto re = solve_lp(e);
  REQUIRE(re.status == LpStatus::optimal);
  CHECK(re.x[0] == doctest::Approx(2.0));
}

TEST_CASE("lp support function of a square") {
  // max <th, x> over the unit square |x_i| <= 1 equals |th_1| + |th_2|
  Matrix a(4, 2);
  a << 1, 0, -1, 0, 0, 1, 0, -1;
  Vector b = Vector::Ones(4);
  Vector th(2);
  th << 0.3, -2.0;
  LpProblem p;
  p.c = -th;
  p.a_ub = a;
  p.b_ub = b;
  auto r = solve_lp(p);
  REQUIRE(r.status == LpStatus::optimal);
  CHECK(-r.value == doctest::Approx(2.3));
}
