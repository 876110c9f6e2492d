#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "reuse/core.hpp"
#include "reuse/random.hpp"

using namespace reuse;

namespace {

FeatureVector vec(std::initializer_list<double> xs) {
  FeatureVector v(Eigen::Index(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

}  // namespace

TEST_CASE("distance examples") {
  CHECK(distance(vec({1, 2, 3}), vec({1, 2, 3})) == 0.0);
  CHECK(distance(vec({0, 0}), vec({3, 4})) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(distance(vec({1, 1, 1, 1}), vec({2, 2, 2, 2})) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("distance rejects mixed feature spaces") {
  try {
    (void)distance(vec({1, 2}), vec({1, 2, 3}));
    FAIL("expected DimensionMismatch");
  } catch (const DimensionMismatch& e) {
    CHECK(e.expected() == 2);
    CHECK(e.actual() == 3);
  }
}

TEST_CASE("distance is a metric on random vectors") {
  Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    const Eigen::Index d = 1 + Eigen::Index(rng.below(20));
    FeatureVector a(d), b(d), c(d);
    for (Eigen::Index j = 0; j < d; ++j) {
      a(j) = rng.normal(0, 5);
      b(j) = rng.normal(0, 5);
      c(j) = rng.normal(0, 5);
    }
    const double ab = distance(a, b), ba = distance(b, a);
    CHECK(ab >= 0.0);
    CHECK(ab == ba);
    CHECK(distance(a, a) == 0.0);
    CHECK(distance(a, c) <= ab + distance(b, c) + 1e-12);
    double sq = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) sq += (a(j) - b(j)) * (a(j) - b(j));
    CHECK(ab == doctest::Approx(std::sqrt(sq)).epsilon(1e-12));
  }
}

TEST_CASE("distance works for float vectors") {
  Eigen::VectorXf a(2), b(2);
  a << 0.f, 0.f;
  b << 3.f, 4.f;
  CHECK(distance(a, b) == doctest::Approx(5.0f));
}

TEST_CASE("cosine distance") {
  CHECK(cosine_distance(vec({1, 0}), vec({2, 0})) == doctest::Approx(0.0));
  CHECK(cosine_distance(vec({1, 0}), vec({0, 3})) == doctest::Approx(1.0));
  CHECK(cosine_distance(vec({1, 0}), vec({-1, 0})) == doctest::Approx(2.0));
}

TEST_CASE("feature validation") {
  CHECK_NOTHROW(validate_features(vec({1, 2}), 2));
  CHECK_THROWS_AS(validate_features(FeatureVector()), std::invalid_argument);
  CHECK_THROWS_AS(validate_features(vec({1, 2}), 3), DimensionMismatch);
  CHECK_THROWS_AS(validate_features(vec({1, std::nan("")})), std::invalid_argument);
  CHECK_THROWS_AS(validate_features(vec({1, INFINITY})), std::invalid_argument);
}

TEST_CASE("task validation") {
  Task t;
  t.service = "svc";
  t.features = vec({1, 2});
  t.input_size = 1;
  t.output_size = 1;
  t.complexity = 1;
  CHECK_NOTHROW(validate(t));
  Task bad = t;
  bad.complexity = 0;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = t;
  bad.input_size = -1;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = t;
  bad.arrival_time = -0.5;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
}

TEST_CASE("task view exposes only service and features") {
  Task t;
  t.service = "detect";
  t.object_label = "obj-3";
  t.features = vec({1, 2});
  const TaskView v = view_of(t);
  CHECK(v.service == "detect");
  CHECK(&v.features == &t.features);
}

TEST_CASE("cost parameter validation") {
  CHECK_NOTHROW(validate(CostParams{}));
  CostParams p;
  p.edge_bandwidth = 0;
  CHECK_THROWS_WITH_AS(validate(p), doctest::Contains("edge_bandwidth"), std::invalid_argument);
  p = {};
  p.cloud_hops = 0;
  CHECK_THROWS_AS(validate(p), std::invalid_argument);
  p = {};
  p.lookup_cost = -1;
  CHECK_THROWS_AS(validate(p), std::invalid_argument);
}

TEST_CASE("outcome factories keep fields consistent") {
  const ReuseMatch m{7, Output{"obj-1", 0.2}, 0.3};
  const Outcome full = Outcome::full_reuse(m);
  CHECK(full.kind() == OutcomeKind::FullReuse);
  CHECK(full.at_edge());
  CHECK(full.reused());
  CHECK(full.full());
  CHECK(full.remaining_fraction() == 0.0);
  CHECK(full.match()->entry == 7);

  const Outcome part = Outcome::partial_reuse(m, 0.25);
  CHECK(part.kind() == OutcomeKind::PartialReuse);
  CHECK(part.reused());
  CHECK_FALSE(part.full());
  CHECK(part.remaining_fraction() == doctest::Approx(0.75));
  CHECK_THROWS_AS((void)Outcome::partial_reuse(m, 0.0), std::invalid_argument);
  CHECK_THROWS_AS((void)Outcome::partial_reuse(m, 1.0), std::invalid_argument);

  const Outcome edge = Outcome::edge_compute();
  CHECK(edge.at_edge());
  CHECK_FALSE(edge.reused());
  CHECK_FALSE(edge.match().has_value());

  const Outcome cloud = Outcome::cloud_offload();
  CHECK_FALSE(cloud.at_edge());
  CHECK_FALSE(cloud.reused());
  CHECK(to_string(cloud.kind()) == "cloud_offload");
  CHECK(to_string(OutcomeKind::PartialReuse) == "partial_reuse");
}

TEST_CASE("rng streams are reproducible and distinct") {
  Rng a(derive_seed(5, "x")), b(derive_seed(5, "x")), c(derive_seed(5, "y"));
  for (int i = 0; i < 10; ++i) {
    const auto va = a.next_u64();
    CHECK(va == b.next_u64());
    CHECK(va != c.next_u64());
  }
  CHECK(derive_seed(5, "x", 0) != derive_seed(5, "x", 1));
}

TEST_CASE("rng distributions have the right moments") {
  Rng rng(3);
  const int n = 200000;
  double su = 0, sn = 0, sn2 = 0, se = 0, lo = 1, hi = 0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    su += u;
    const double z = rng.normal();
    sn += z;
    sn2 += z * z;
    se += rng.exponential(4.0);
  }
  CHECK(lo >= 0.0);
  CHECK(hi < 1.0);
  CHECK(su / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(std::abs(sn / n) < 0.01);
  CHECK(sn2 / n == doctest::Approx(1.0).epsilon(0.02));
  CHECK(se / n == doctest::Approx(0.25).epsilon(0.02));
}
