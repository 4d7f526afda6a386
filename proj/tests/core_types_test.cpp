#include <cmath>
#include <random>

#include "doctest.h"
#include "impulse/scenarios.hpp"
#include "support.hpp"

using namespace impulse;
using testing::vec;

TEST_CASE("projection onto boxes and balls") {
  const ControlSet square = testing::box(2);
  CHECK(project_to_set(vec({0.5, 0.5}), square) == vec({0.5, 0.5}));
  CHECK(project_to_set(vec({2.0, 0.0}), square) == vec({1.0, 0.0}));

  const ControlSet disc = ControlSet::ball(Vec::Zero(2), 1.0);
  const Vec p = vec({3.0, 4.0});
  const Vec expected = p / std::hypot(3.0, 4.0);
  CHECK((project_to_set(p, disc) - expected).norm() < 1e-15);
  CHECK(project_to_set(vec({0.1, -0.2}), disc) == vec({0.1, -0.2}));
}

TEST_CASE("polytope projection satisfies the variational inequality") {
  // Triangle with vertices (0,0), (2,0), (0,1).
  Mat A(3, 2);
  A << -1, 0, 0, -1, 1, 2;
  const ControlSet tri = ControlSet::polytope(A, vec({0.0, 0.0, 2.0}));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coord(-3.0, 3.0), weight(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Vec p = vec({coord(rng), coord(rng)});
    const Vec q = project_to_set(p, tri);
    REQUIRE(tri.contains(q, 1e-9));
    // (p - q)·(y - q) <= 0 for every y in K, checked on convex combinations of the vertices.
    for (int s = 0; s < 30; ++s) {
      double a = weight(rng), b = weight(rng);
      if (a + b > 1.0) { a = 1.0 - a; b = 1.0 - b; }
      const Vec y = a * vec({2.0, 0.0}) + b * vec({0.0, 1.0});
      CHECK((p - q).dot(y - q) <= 1e-8);
    }
  }
}

TEST_CASE("projection is idempotent") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> coord(-4.0, 4.0);
  Mat A(4, 2);
  A << 1, 1, -1, 1, 1, -1, -1, -1;
  const std::vector<ControlSet> sets = {
      testing::box(2), ControlSet::ball(vec({0.5, -0.5}), 2.0), ControlSet::polytope(A, Vec::Ones(4)),
      ControlSet::star_union({ControlSet::box(vec({0.0, 0.0}), vec({1.0, 0.2})),
                              ControlSet::box(vec({0.0, 0.0}), vec({0.2, 1.0}))},
                             Vec::Zero(2), std::sqrt(2.0))};
  for (const auto& K : sets) {
    for (int i = 0; i < 100; ++i) {
      const Vec p = vec({coord(rng), coord(rng)});
      const Vec once = project_to_set(p, K);
      CHECK(K.contains(once, 1e-9));
      CHECK((project_to_set(once, K) - once).norm() < 1e-9);
    }
  }
}

TEST_CASE("straight segments stay in convex sets") {
  std::mt19937_64 rng(3);
  const ControlSet disc = ControlSet::ball(Vec::Zero(2), 1.0);
  std::uniform_real_distribution<double> angle(0.0, 6.283185307179586), radius(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double a1 = angle(rng), r1 = radius(rng), a2 = angle(rng), r2 = radius(rng);
    const Vec u1 = r1 * vec({std::cos(a1), std::sin(a1)});
    const Vec u2 = r2 * vec({std::cos(a2), std::sin(a2)});
    for (int i = 1; i <= 100; ++i) {
      const double w = i / 101.0;
      CHECK(disc.contains((1 - w) * u1 + w * u2, 1e-12));
    }
  }
}

TEST_CASE("control set validation") {
  CHECK_THROWS_AS(ControlSet::box(vec({1.0}), vec({0.0})), PreconditionError);
  CHECK_THROWS_AS(ControlSet::ball(Vec::Zero(2), -1.0), PreconditionError);
  CHECK_THROWS_AS(ControlSet::star_union({testing::box(2)}, vec({5.0, 5.0}), 1.0), PreconditionError);
  CHECK_THROWS_AS(ControlSet::star_union({testing::box(2)}, Vec::Zero(2), 0.5), PreconditionError);
  CHECK(testing::box(2).whitney_constant() == 1.0);
}

namespace {

VectorFieldSet scalar_drift(std::function<double(double)> g) {
  VectorFieldSet F;
  F.state_dim = 1;
  F.channels = 1;
  F.ordinary_dim = 1;
  F.drift = [g](const Vec& x, const Vec&, const Vec&, Eigen::Ref<Vec> out) { out(0) = g(x(0)); };
  F.impulsive = [](const Vec&, const Vec&, const Vec&, Eigen::Ref<Mat> out) { out.setZero(); };
  F.growth = 1.0;
  return F;
}

std::vector<GrowthSample> line_samples(std::initializer_list<double> xs) {
  std::vector<GrowthSample> out;
  for (double x : xs) out.push_back({vec({x}), vec({0.0}), vec({0.0})});
  return out;
}

}  // namespace

TEST_CASE("growth bound check") {
  std::vector<GrowthSample> cloud;
  for (int i = -100; i <= 100; ++i) cloud.push_back({vec({i / 10.0}), vec({0.0}), vec({0.0})});
  CHECK(check_growth_bound(scalar_drift([](double x) { return x; }), cloud).ok());

  const GrowthReport bad = check_growth_bound(scalar_drift([](double x) { return x * x; }), line_samples({3.0}));
  REQUIRE(bad.violations.size() == 1);
  CHECK(bad.violations[0].norm == doctest::Approx(9.0));
  CHECK(bad.violations[0].bound == doctest::Approx(4.0));
  CHECK_THROWS_AS(check_growth_bound(scalar_drift([](double x) { return x; }), {}), PreconditionError);

  std::vector<GrowthSample> wide;
  for (int i = -500; i <= 500; ++i) wide.push_back({vec({i / 50.0}), vec({0.0}), vec({0.0})});
  const auto square = scalar_drift([](double x) { return x * x; });
  const GrowthReport serial = check_growth_bound(square, wide, Execution::Serial);
  const GrowthReport parallel = check_growth_bound(square, wide, Execution::Parallel);
  // |x|² > 1 + |x| exactly when |x| > (1 + √5)/2.
  std::size_t expected = 0;
  for (const auto& s : wide) expected += std::abs(s.x(0)) > 0.5 * (1.0 + std::sqrt(5.0));
  REQUIRE(serial.violations.size() == expected);
  REQUIRE(parallel.violations.size() == expected);
  for (std::size_t i = 0; i < expected; ++i) {
    CHECK(serial.violations[i].sample == parallel.violations[i].sample);
    CHECK(serial.violations[i].norm == parallel.violations[i].norm);
  }
}

TEST_CASE("Example 2.1 fields satisfy the declared growth bound with the cut-off") {
  const VectorFieldSet F = example21_fields();
  CHECK(F.growth == 200.0);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unit(0.0, 1.0), v(-1.0, 1.0);
  std::vector<GrowthSample> samples;
  double largest = 0.0;
  for (int i = 0; i < 5000; ++i) {
    Vec x(4);
    for (int c = 0; c < 4; ++c) x(c) = gauss(rng);
    x *= 20.0 * std::pow(unit(rng), 0.25) / x.norm();
    Vec u = vec({gauss(rng), gauss(rng)});
    u *= std::sqrt(unit(rng)) / u.norm();
    samples.push_back({x, u, vec({v(rng)})});
    largest = std::max(largest, F.eval_impulsive(x, u, samples.back().v).colwise().norm().maxCoeff());
  }
  // Independent oracle: the largest sampled |gi| is far below M.
  CHECK(largest < 200.0);
  CHECK(check_growth_bound(F, samples).ok());
  CHECK(v2_sensitivity(F, samples) == 0.0);
}

TEST_CASE("radial cut-off") {
  CHECK(radial_cutoff(vec({3.0, 4.0}), 10.0) == 1.0);
  CHECK(radial_cutoff(vec({20.0}), 10.0) == 0.0);
  CHECK(radial_cutoff(vec({15.0}), 10.0) == doctest::Approx(0.5));
  CHECK(radial_cutoff(vec({12.0}), 10.0) == doctest::Approx(1.0 - 0.04 * 2.6));
}

TEST_CASE("modulus of continuity") {
  CHECK(Modulus::lipschitz(2.0)(0.25) == 0.5);
  const Modulus table = Modulus::table({{0.0, 0.0}, {1.0, 1.0}, {2.0, 1.5}});
  CHECK(table(0.5) == doctest::Approx(0.5));
  CHECK(table(1.5) == doctest::Approx(1.25));
  CHECK(table(3.0) == doctest::Approx(2.0));
}

TEST_CASE("parallel kernels agree with the serial reference") {
  std::vector<double> data(10007);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (auto& x : data) x = d(rng);
  auto term = [&](std::size_t i) { return std::abs(std::sin(data[i]) * data[i]); };
  CHECK(parallel_max(data.size(), term) == serial_max(data.size(), term));

  std::vector<double> a(data.size()), b(data.size());
  serial_for(data.size(), [&](std::size_t i) { a[i] = std::exp(data[i]); });
  parallel_for(data.size(), [&](std::size_t i) { b[i] = std::exp(data[i]); });
  CHECK(a == b);

  // The lowest failing index is reported, as in the serial loop.
  try {
    parallel_for(100, [](std::size_t i) {
      if (i % 7 == 3) throw std::runtime_error(std::to_string(i));
    });
    FAIL("expected an exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "3");
  }
}

TEST_CASE("trajectory helpers") {
  Trajectory x;
  x.times = {0.0, 1.0, 2.0};
  x.states = Mat(1, 3);
  x.states << 0.0, 2.0, 6.0;
  CHECK(x.interpolate(1.5)(0) == doctest::Approx(4.0));
  CHECK_THROWS_AS(x.interpolate(2.5), DomainError);
  x.times = {0.0, 1.0, 1.0};
  CHECK_THROWS_AS(x.validate(), PreconditionError);
  const auto g = uniform_grid(2.0, 5);
  CHECK(g == std::vector<double>{0.0, 0.5, 1.0, 1.5, 2.0});
}
