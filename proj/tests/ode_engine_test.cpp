#include <cmath>
#include <numbers>

#include "doctest.h"
#include "impulse/ode_engine.hpp"
#include "impulse/scenarios.hpp"
#include "support.hpp"

using namespace impulse;
using testing::vec;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

IntegratorConfig steps(std::size_t n) {
  IntegratorConfig cfg;
  cfg.steps_per_unit = n;
  return cfg;
}

double cross(const Vec& p, const Vec& q) { return p(0) * q(1) - p(1) * q(0); }

// g1 = (1,0,-x2), g2 = (0,1,x1), no drift.
VectorFieldSet brockett() {
  VectorFieldSet F;
  F.state_dim = 3;
  F.channels = 2;
  F.ordinary_dim = 1;
  F.drift = [](const Vec&, const Vec&, const Vec&, Eigen::Ref<Vec> out) { out.setZero(); };
  F.impulsive = [](const Vec& x, const Vec&, const Vec&, Eigen::Ref<Mat> out) {
    out.setZero();
    out(0, 0) = 1.0;
    out(1, 1) = 1.0;
    out(2, 0) = -x(1);
    out(2, 1) = x(0);
  };
  F.growth = 1.0;
  return F;
}

// x' = c x v1, scalar; one dummy channel.
VectorFieldSet scalar_drift(double c) {
  VectorFieldSet F;
  F.state_dim = 1;
  F.channels = 1;
  F.ordinary_dim = 1;
  F.drift = [c](const Vec& x, const Vec&, const Vec& v1, Eigen::Ref<Vec> out) { out(0) = c * x(0) * v1(0); };
  F.impulsive = [](const Vec&, const Vec&, const Vec&, Eigen::Ref<Mat> out) { out.setZero(); };
  return F;
}

// Exact solution of Example 2.1 driven by the polyline u of example21_controls,
// at the knots of u. From x0 = (0,0,1,x4): x1 = u1, x2 = u2, and on each
// segment p -> q, x3 scales by exp(-cross(p,q)) and x4 by exp(cross(p,q)).
Mat example21_polyline_exact(const ControlPath& u, const OrdinaryControl& v, double x4) {
  const auto& t = u.knot_times();
  const Mat& U = u.knot_values();
  Mat out(4, static_cast<Eigen::Index>(t.size()));
  Vec x = vec({0.0, 0.0, 1.0, x4});
  out.col(0) = x;
  for (std::size_t i = 1; i < t.size(); ++i) {
    const auto j = static_cast<Eigen::Index>(i);
    const double c = cross(U.col(j - 1), U.col(j));
    x(2) *= std::exp(-c);
    x(3) = x(3) * std::exp(c) + v.v1(t[i - 1])(0) * (t[i] - t[i - 1]);
    x.head(2) = U.col(j);
    out.col(j) = x;
  }
  return out;
}

}  // namespace

TEST_CASE("constant fields integrate exactly") {
  Mat G(3, 2);
  G << 1.0, 2.0, 0.0, -1.0, 0.5, 0.5;
  const VectorFieldSet F = testing::constant_fields(G);
  Mat values(2, 4);
  values << 0.0, 1.0, -0.5, 0.2, 0.0, 0.3, 0.3, -1.0;
  const ControlPath u = ControlPath::polyline({0.0, 0.3, 0.6, 1.0}, values);
  const OrdinaryControl v = OrdinaryControl::constant(1.0, vec({0.0}));
  const auto grid = uniform_grid(1.0, 17);
  const Vec x0 = vec({1.0, 2.0, 3.0});
  const Trajectory x = solve_caratheodory(F, x0, u, v, {}, grid);
  for (std::size_t i = 0; i < grid.size(); ++i)
    CHECK((x.state(i) - (x0 + G * (u.value(grid[i]) - u.initial_value()))).norm() < 1e-12);
}

TEST_CASE("Brockett integrator gives the signed area") {
  Mat values(2, 5);
  values << 0.0, 1.0, 1.0, 0.2, -0.4, 0.0, 0.0, 1.0, 0.5, 0.3;
  const ControlPath u = ControlPath::polyline({0.0, 0.5, 1.0, 1.2, 2.0}, values);
  const OrdinaryControl v = OrdinaryControl::constant(2.0, vec({0.0}));
  double area = 0.0;
  for (Eigen::Index i = 1; i < values.cols(); ++i) area += cross(values.col(i - 1), values.col(i));
  const std::vector<double> grid{0.0, 2.0};
  const Trajectory x = solve_caratheodory(brockett(), Vec::Zero(3), u, v, steps(64), grid);
  CHECK(x.state(1)(2) == doctest::Approx(area).epsilon(1e-12));
  CHECK((x.state(1).head(2) - values.col(4)).norm() < 1e-12);
}

TEST_CASE("ordinary control switches between knots") {
  // v1 switches at 0.3, which is neither a knot of u nor a grid point.
  Mat v1(1, 2);
  v1 << 2.0, -1.0;
  const OrdinaryControl v({0.0, 0.3, 1.0}, v1);
  const ControlPath u = ControlPath::constant(1.0, vec({0.0}));
  const std::vector<double> grid{0.0, 0.5, 1.0};
  const Trajectory x = solve_caratheodory(scalar_drift(-1.0), vec({1.0}), u, v, steps(256), grid);
  CHECK(x.state(1)(0) == doctest::Approx(std::exp(-(0.6 - 0.2))).epsilon(1e-10));
  CHECK(x.state(2)(0) == doctest::Approx(std::exp(-(0.6 - 0.7))).epsilon(1e-10));
}

TEST_CASE("fourth-order convergence against the polyline solution") {
  const auto [u, v] = example21_controls(4, 8);
  const VectorFieldSet F = example21_fields();
  // x4 grows by about e^7.5 over three periods; stay inside the cut-off radius.
  const Vec x0 = vec({0.0, 0.0, 1.0, 0.002});
  const Mat exact = example21_polyline_exact(u, v, 0.002);
  const auto& grid = u.knot_times();
  std::vector<double> errors;
  for (std::size_t n : {32u, 64u, 128u}) {
    const Trajectory x = solve_caratheodory(F, x0, u, v, steps(n), grid);
    errors.push_back((x.states - exact).colwise().norm().maxCoeff());
  }
  MESSAGE("errors " << errors[0] << " " << errors[1] << " " << errors[2]);
  CHECK(errors[0] / errors[1] >= 8.0);
  CHECK(errors[1] / errors[2] >= 8.0);
  CHECK(errors[2] < 1e-6);

  const ConvergenceEstimate est = self_convergence_check(F, x0, u, v, steps(16), grid);
  CHECK(est.order > 3.0);
  CHECK(est.e2 < est.e1);
  CHECK(est.error < 1e-5);
}

TEST_CASE("carathéodory preconditions and divergence") {
  const VectorFieldSet F = scalar_drift(1.0);
  const ControlPath u = ControlPath::constant(1.0, vec({0.0}));
  const OrdinaryControl v = OrdinaryControl::constant(1.0, vec({1.0}));
  const std::vector<double> grid{0.0, 1.0};
  CHECK_THROWS_AS(solve_caratheodory(F, vec({1.0, 0.0}), u, v, {}, grid), PreconditionError);
  CHECK_THROWS_AS(solve_caratheodory(F, vec({1.0}), testing::step_path(vec({0.0}), vec({1.0}), 0.5, 1.0), v, {}, grid),
                  PreconditionError);
  CHECK_THROWS_AS(solve_caratheodory(F, vec({1.0}), u, OrdinaryControl::constant(2.0, vec({1.0})), {}, grid),
                  PreconditionError);
  const std::vector<double> short_grid{0.0, 0.5};
  CHECK_THROWS_AS(solve_caratheodory(F, vec({1.0}), u, v, {}, short_grid), PreconditionError);
  CHECK_THROWS_AS(solve_caratheodory(F, vec({1.0}), u, v, steps(0), grid), PreconditionError);
  IntegratorConfig loose;
  loose.tolerance = 0.0;
  CHECK_THROWS_AS(loose.validate(), PreconditionError);

  // x' = x^2 blows up at t = 1.
  VectorFieldSet blow = F;
  blow.drift = [](const Vec& x, const Vec&, const Vec&, Eigen::Ref<Vec> out) { out(0) = x(0) * x(0); };
  const ControlPath u2 = ControlPath::constant(2.0, vec({0.0}));
  const std::vector<double> grid2{0.0, 2.0};
  CHECK_THROWS_AS(solve_caratheodory(blow, vec({1.0}), u2, OrdinaryControl::constant(2.0, vec({0.0})), {}, grid2),
                  DivergenceError);
}

TEST_CASE("space-time solution across a jump depends on the bridge") {
  const ControlPath u = testing::step_path(vec({0.0, 0.0}), vec({1.0, 1.0}), 0.5, 1.0);
  const OrdinaryControl v = OrdinaryControl::constant(1.0, vec({0.0}));
  const ControlSet U = testing::box(2, -2.0, 2.0);
  const auto grid = uniform_grid(1.0, 11);

  const GraphCompletion straight = complete_graph(u, v, U);
  const ParamPath xs = solve_spacetime(brockett(), Vec::Zero(3), straight.control, {});
  const Trajectory x = reconstruct_solution(xs, straight.clock, grid);
  CHECK((x.state(10) - vec({1.0, 1.0, 0.0})).norm() < 1e-12);
  CHECK(x.state(4).norm() == 0.0);
  REQUIRE(x.jumps.size() == 1);
  CHECK(x.jumps[0].time == 0.5);
  CHECK(x.jumps[0].left.norm() < 1e-15);
  CHECK((x.jumps[0].right - vec({1.0, 1.0, 0.0})).norm() < 1e-12);

  const GraphCompletion legs =
      complete_graph(u, v, U, {FiberSpec{staircase_bridge(vec({0.0, 0.0}), vec({1.0, 1.0}), U), {}}});
  const ParamPath xl = solve_spacetime(brockett(), Vec::Zero(3), legs.control, {});
  const Trajectory y = reconstruct_solution(xl, legs.clock, grid);
  // Signed area of (0,0) -> (1,0) -> (1,1).
  CHECK((y.state(10) - vec({1.0, 1.0, 1.0})).norm() < 1e-12);
  CHECK(y.jumps.at(0).right(2) == doctest::Approx(1.0));
}

TEST_CASE("space-time solution of an AC control matches the direct solution") {
  const auto [u, v] = example21_controls(3, 64);
  const VectorFieldSet F = example21_fields();
  const Vec x0 = vec({0.0, 0.0, 1.0, 1.0});
  const auto grid = uniform_grid(kTwoPi, 101);
  const Trajectory direct = solve_caratheodory(F, x0, u, v, {}, grid);
  CompletionOptions opts;
  opts.sample_times = grid;
  const GraphCompletion g = complete_graph(u, v, testing::box(2, -2.0, 2.0), {}, opts);
  const ParamPath xi = solve_spacetime(F, x0, g.control, {});
  const Trajectory via = reconstruct_solution(xi, g.clock, grid);
  CHECK(sup_distance(direct, via, grid) < 1e-9);
  CHECK(via.jumps.empty());
}

TEST_CASE("reconstruction needs the whole clock range") {
  ParamPath xi{{0.0, 1.0}, {0.0, 1.0}, Mat::Zero(1, 2)};
  const Clock clock({{0.0, 0.0, 0.0}, {1.0, 2.0, 2.0}});
  const std::vector<double> grid{0.0, 1.0};
  CHECK_THROWS_AS(reconstruct_solution(xi, clock, grid), DomainError);
}
