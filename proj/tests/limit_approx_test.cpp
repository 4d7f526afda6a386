#include <cmath>

#include "doctest.h"
#include "impulse/limit_approx.hpp"
#include "support.hpp"

using namespace impulse;
using testing::vec;

namespace {

// Clock of a unit jump at 0.5 on [0,1]: fiber [0.5, 1.5].
Clock unit_jump_clock() { return Clock({{0.0, 0.0, 0.0}, {0.5, 0.5, 1.5}, {1.0, 2.0, 2.0}}); }

// x' = c x v1 with no impulsive part; one channel.
VectorFieldSet drift_only(double c, double lipschitz) {
  VectorFieldSet F;
  F.state_dim = 1;
  F.channels = 1;
  F.ordinary_dim = 1;
  F.drift = [c](const Vec& x, const Vec&, const Vec& v1, Eigen::Ref<Vec> out) { out(0) = 1.0 + c * x(0) * v1(0); };
  F.impulsive = [](const Vec&, const Vec&, const Vec&, Eigen::Ref<Mat> out) { out.setZero(); };
  F.lipschitz = lipschitz;
  F.modulus = Modulus::lipschitz(std::abs(c));
  return F;
}

// g1 = (1,0,-x2), g2 = (0,1,x1).
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
  F.lipschitz = 1.0;
  F.growth = 1.0;
  return F;
}

}  // namespace

TEST_CASE("sigma_k ramps across the fiber") {
  const Clock clock = unit_jump_clock();
  // δ = min(w / 2k, t̄ / 2) with w = 1, t̄ = 0.5.
  const PiecewiseLinearMap s1 = build_sigma_k(clock, 1);
  CHECK(s1.xs() == std::vector<double>{0.0, 0.25, 0.5, 1.0});
  CHECK(s1.ys() == std::vector<double>{0.0, 0.25, 1.5, 2.0});
  for (int k : {2, 4, 16, 1000}) {
    const double delta = 1.0 / (2.0 * k);
    const PiecewiseLinearMap s = build_sigma_k(clock, k);
    CHECK(s(0.5 - delta) == doctest::Approx(0.5 - delta));
    CHECK(s(0.5) == 1.5);
    CHECK(s(1.0) == 2.0);
    CHECK(s(0.5 - delta / 2) == doctest::Approx(1.0 - delta / 2));
    for (double slope : s.slopes()) CHECK(slope >= 1.0 - 1e-12);
  }
  // Pointwise convergence: σ_k(t) = σ(t) once the ramp has passed t.
  const PiecewiseLinearMap big = build_sigma_k(clock, 100);
  for (double t : {0.1, 0.49, 0.5, 0.7, 1.0}) CHECK(big(t) == doctest::Approx(clock(t)));
  CHECK_THROWS_AS(build_sigma_k(clock, 0), PreconditionError);
  CHECK_THROWS_AS(build_sigma_k(Clock({{0.0, 0.0, 1.0}, {1.0, 2.0, 2.0}}), 3), PreconditionError);
}

TEST_CASE("sigma_k keeps ramps of neighbouring jumps apart") {
  // Fibers of width 4 at 0.2 and 0.3: δ is capped at half the gap.
  const Clock clock({{0.0, 0.0, 0.0}, {0.2, 0.2, 4.2}, {0.3, 4.3, 8.3}, {1.0, 9.0, 9.0}});
  const PiecewiseLinearMap s = build_sigma_k(clock, 1);
  CHECK(s.xs() == std::vector<double>{0.0, 0.1, 0.2, 0.25, 0.3, 1.0});
  CHECK(s(0.25) == doctest::Approx(4.25));
  CHECK(s.strictly_increasing());
}

TEST_CASE("composed controls of a scalar step") {
  const ControlPath u = testing::step_path(vec({0.0}), vec({1.0}), 0.5, 1.0);
  const OrdinaryControl v = OrdinaryControl::constant(1.0, vec({0.3}), vec({0.0}));
  Mat fiber(1, 2);
  fiber << 1.0, -1.0;
  const GraphCompletion g =
      complete_graph(u, v, testing::box(1, -1.0, 1.0), {FiberSpec{{}, StepFunction({0.0, 0.5, 1.0}, fiber)}});
  for (int k : {2, 8, 64}) {
    const double delta = 1.0 / (2.0 * k);
    const PiecewiseLinearMap s = build_sigma_k(g.clock, k);
    const ControlPath u_k = compose_control(g.control, s);
    const OrdinaryControl v_k = compose_ordinary(g.control, s);
    CHECK(u_k.absolutely_continuous());
    CHECK(u_k.total_variation() == doctest::Approx(1.0));
    CHECK(u_k.value(0.5 - delta)(0) == doctest::Approx(0.0));
    // The ramp first crosses the rest of [t̄-δ, t̄) in s, then the fiber:
    // u_k = σ_k - t̄ once σ_k passes t̄.
    const double rise = delta / (1.0 + delta);
    CHECK(u_k.value(0.5 - rise)(0) == doctest::Approx(0.0));
    CHECK(u_k.value(0.5 - rise / 4)(0) == doctest::Approx(0.75));
    CHECK(u_k.value(0.75)(0) == 1.0);
    // Triangle between the ramp and the step.
    CHECK(l1_distance(u_k, u) == doctest::Approx(rise / 2));
    CHECK(v_k.v1(0.5 - delta / 4)(0) == 0.3);
    CHECK(v_k.v2(0.5 - delta * 0.75)(0) == 1.0);
    CHECK(v_k.v2(0.5 - delta * 0.25)(0) == -1.0);
    CHECK(v_k.v2(0.75)(0) == 0.0);
    // ψ2 condition holds exactly for the composed v2_k.
    CHECK(check_psi2_condition(v_k.second(), s, g.control.psi2_function(), u_k.total_variation()) < 1e-12);
    // A v2_k that ignores the fiber misses ∫|ψ2| = 1 over it.
    const StepFunction zero = StepFunction::constant(0.0, 1.0, vec({0.0}));
    CHECK(check_psi2_condition(zero, s, g.control.psi2_function(), u_k.total_variation()) == doctest::Approx(1.0));
  }
}

TEST_CASE("gronwall bound for a drift perturbation") {
  const VectorFieldSet F = drift_only(0.0, 0.0);
  // x' = 1 only; perturbing v1 changes nothing.
  const ControlPath u = ControlPath::constant(1.0, vec({0.0}));
  const auto grid = uniform_grid(1.0, 11);
  const GronwallCheck same =
      gronwall_bound(F, vec({0.0}), u, OrdinaryControl::constant(1.0, vec({1.0})),
                     OrdinaryControl::constant(1.0, vec({0.0})), grid);
  CHECK(same.lhs == 0.0);
  CHECK(same.holds);

  // x' = 1 + x v1 with L = 1 on a short horizon: lhs <= ∫|Δv1| e^{2L(T+Var)}.
  const VectorFieldSet G = drift_only(1.0, 1.0);
  Mat v1(1, 2);
  v1 << 0.5, 0.0;
  const OrdinaryControl v_k({0.0, 0.2, 1.0}, v1);
  const OrdinaryControl v = OrdinaryControl::constant(1.0, vec({0.0}));
  const GronwallCheck g = gronwall_bound(G, vec({1.0}), u, v_k, v, grid);
  // Independent: x_hat = 1 + t; x_k = e^{0.5t}(1 + 2(1 - e^{-0.5t})) on [0,0.2], then + (t - 0.2).
  const double x02 = std::exp(0.1) * (1.0 + 2.0 * (1.0 - std::exp(-0.1)));
  CHECK(g.lhs == doctest::Approx(x02 - 1.2).epsilon(1e-8));
  CHECK(g.rhs == doctest::Approx(0.5 * 0.2 * std::exp(2.0)));
  CHECK(g.holds);

  const OrdinaryControl other_v2 = OrdinaryControl::constant(1.0, vec({0.0}), vec({1.0}));
  CHECK_THROWS_AS(gronwall_bound(G, vec({1.0}), u, other_v2, v, grid), PreconditionError);
}

TEST_CASE("whitney tail fix") {
  const ControlPath u_k = testing::scalar_polyline({0.0, 0.5, 1.0}, {0.0, 0.8, 0.2});
  const ControlSet U = testing::box(1, -1.0, 1.0);
  const ControlPath fixed = whitney_tail_fix(u_k, 0.75, vec({-0.5}), U);
  CHECK(fixed.horizon() == 1.0);
  CHECK(fixed.value(0.3)(0) == doctest::Approx(u_k.value(0.3)(0)));
  CHECK(fixed.value(0.75)(0) == doctest::Approx(0.5));
  CHECK(fixed.value(1.0)(0) == doctest::Approx(-0.5));
  CHECK(fixed.value(0.875)(0) == doctest::Approx(0.0));
  CHECK_THROWS_AS(whitney_tail_fix(u_k, 1.0, vec({0.0}), U), PreconditionError);
  CHECK_THROWS_AS(whitney_tail_fix(u_k, 0.0, vec({0.0}), U), PreconditionError);
  CHECK_THROWS_AS(whitney_tail_fix(u_k, 0.5, vec({2.0}), U), PreconditionError);
}

TEST_CASE("equiuniformity deviations of steepening ramps") {
  // u_k = min(kt, 1) on [0,1] with x = u; graph length (k+1)τ before the corner.
  std::vector<Trajectory> xs;
  std::vector<ControlPath> us;
  const std::vector<int> ks{1, 4, 16};
  for (int k : ks) {
    const double corner = 1.0 / k;
    const ControlPath u = k == 1 ? testing::scalar_polyline({0.0, 1.0}, {0.0, 1.0})
                                 : testing::scalar_polyline({0.0, corner, 1.0}, {0.0, 1.0, 1.0});
    const auto grid = uniform_grid(1.0, 1001);
    Trajectory x{grid, Mat(1, 1001), {}};
    for (std::size_t i = 0; i < grid.size(); ++i) x.states(0, static_cast<Eigen::Index>(i)) = u.value(grid[i])(0);
    xs.push_back(std::move(x));
    us.push_back(u);
  }
  const std::vector<double> thresholds{0.5, 10.0};
  const auto entries = check_equiuniformity(xs, us, thresholds);
  REQUIRE(entries.size() == 6);
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const double k = ks[i];
    const auto& e = entries[2 * i];
    CHECK(e.reached);
    CHECK(e.tau == doctest::Approx(0.5 / (k + 1)));
    CHECK(e.dev_u == doctest::Approx((0.5 * k + 1) / (k + 1)));
    CHECK(e.dev_x == doctest::Approx(e.dev_u).epsilon(1e-3));
    CHECK(e.dev == doctest::Approx(std::hypot(e.dev_x, e.dev_u)));
    CHECK_FALSE(entries[2 * i + 1].reached);
  }
  const std::vector<double> bad{1.0, 0.5};
  CHECK_THROWS_AS(check_equiuniformity(xs, us, bad), PreconditionError);
}

TEST_CASE("approximating sequence of a scalar jump") {
  Mat G(1, 1);
  G << 1.0;
  VectorFieldSet F = testing::constant_fields(G);
  F.lipschitz = 0.0;
  const ControlPath u = testing::step_path(vec({0.0}), vec({1.0}), 0.5, 1.0);
  const OrdinaryControl v = OrdinaryControl::constant(1.0, vec({0.0}));
  const GraphCompletion g = complete_graph(u, v, testing::box(1, -1.0, 1.0));
  const auto grid = uniform_grid(1.0, 11);
  const std::vector<int> ks{2, 8, 32};
  const ApproxSequence seq = approximate_sequence(F, vec({0.0}), g, u, v, ks, grid);
  REQUIRE(seq.members.size() == 3);
  CHECK(seq.target.state(5)(0) == doctest::Approx(1.0));
  CHECK(seq.target.state(4)(0) == 0.0);
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const ApproxRecord& r = seq.report[i];
    CHECK(r.k == ks[i]);
    CHECK(r.var_uk == doctest::Approx(1.0));
    const double delta = 1.0 / (2.0 * ks[i]);
    CHECK(r.l1_u == doctest::Approx(delta / (2.0 * (1.0 + delta))));
    CHECK(r.l1_v == 0.0);
    CHECK(r.psi2_gap < 1e-12);
    CHECK(r.gronwall_lhs == 0.0);
    // x_k = u_k for this system.
    for (std::size_t j = 0; j < grid.size(); ++j)
      CHECK(seq.members[i].x.state(j)(0) == doctest::Approx(seq.members[i].u.value(grid[j])(0)));
  }
  // k = 2 ramps over [0.25, 0.5] and is still off at 0.4.
  CHECK(seq.report[0].sup_dist > 0.0);
  CHECK(seq.report[2].sup_dist < 1e-12);

  const ApproxSequence serial = approximate_sequence(F, vec({0.0}), g, u, v, ks, grid, {}, Execution::Serial);
  for (std::size_t i = 0; i < ks.size(); ++i) CHECK(serial.report[i].sup_dist == seq.report[i].sup_dist);

  const std::vector<int> unsorted{4, 2};
  CHECK_THROWS_AS(approximate_sequence(F, vec({0.0}), g, u, v, unsorted, grid), PreconditionError);
}

TEST_CASE("approximations follow the chosen bridge") {
  const ControlPath u = testing::step_path(vec({0.0, 0.0}), vec({1.0, 1.0}), 0.5, 1.0);
  const OrdinaryControl v = OrdinaryControl::constant(1.0, vec({0.0}));
  const ControlSet U = testing::box(2, -1.0, 1.0);
  const GraphCompletion g =
      complete_graph(u, v, U, {FiberSpec{staircase_bridge(vec({0.0, 0.0}), vec({1.0, 1.0}), U), {}}});
  const auto grid = uniform_grid(1.0, 11);
  const std::vector<int> ks{4, 16, 64};
  const ApproxSequence seq = approximate_sequence(brockett(), Vec::Zero(3), g, u, v, ks, grid);
  for (const auto& m : seq.members) {
    // Reparametrizing the same path leaves the endpoint unchanged.
    CHECK((m.x.state(10) - vec({1.0, 1.0, 1.0})).norm() < 1e-8);
    CHECK(m.u.total_variation() == doctest::Approx(2.0));
  }
  CHECK(seq.report[2].sup_dist < seq.report[0].sup_dist);
  CHECK(seq.report[2].sup_dist < 1e-8);
}
