#include "impulse/scenarios.hpp"

#include <cmath>
#include <numbers>

namespace impulse {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Vec vec(std::initializer_list<double> values) {
  Vec out(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double v : values) out(i++) = v;
  return out;
}

ControlSet unit_box(int dim) { return ControlSet::box(Vec::Constant(dim, -1.0), Vec::Constant(dim, 1.0)); }

// Constant control a on [0,t̄), b on [t̄,T].
ControlPath single_jump(const Vec& a, const Vec& b, double t_bar, double T) {
  Mat left(a.size(), 2), right(b.size(), 2);
  left << a, a;
  right << b, b;
  return ControlPath(T, {AcSegment{{0.0, t_bar}, left}, Jump{t_bar, a, b}, AcSegment{{t_bar, T}, right}});
}

// Brockett integrator g1 = c(1,0,-x2), g2 = c(0,1,x1).
void brockett_columns(const Vec& x, double c, Eigen::Ref<Mat> out) {
  out.setZero();
  out(0, 0) = c;
  out(1, 1) = c;
  out(2, 0) = -c * x(1);
  out(2, 1) = c * x(0);
}

VectorFieldSet brockett_fields() {
  VectorFieldSet F;
  F.state_dim = 3;
  F.channels = 2;
  F.ordinary_dim = 1;
  F.drift = [](const Vec&, const Vec&, const Vec&, Eigen::Ref<Vec> out) { out.setZero(); };
  F.impulsive = [](const Vec& x, const Vec&, const Vec&, Eigen::Ref<Mat> out) { brockett_columns(x, 1.0, out); };
  F.lipschitz = 1.0;
  F.growth = 1.0;
  F.modulus = Modulus::lipschitz(0.0);
  return F;
}

VectorFieldSet brockett_v2_fields() {
  VectorFieldSet F;
  F.state_dim = 3;
  F.channels = 2;
  F.ordinary_dim = 1;
  F.drift = [](const Vec& x, const Vec&, const Vec& v1, Eigen::Ref<Vec> out) {
    out.setZero();
    out(2) = v1(0) + 0.5 * x(0);
  };
  F.impulsive = [](const Vec& x, const Vec&, const Vec& v2, Eigen::Ref<Mat> out) {
    brockett_columns(x, 1.0 + 0.5 * v2(0), out);
  };
  F.lipschitz = 1.5;
  F.growth = 1.5;
  F.modulus = Modulus::lipschitz(1.0);
  F.v2_active = true;
  return F;
}

VectorFieldSet scalar_fields() {
  VectorFieldSet F;
  F.state_dim = 1;
  F.channels = 1;
  F.ordinary_dim = 1;
  F.drift = [](const Vec&, const Vec&, const Vec&, Eigen::Ref<Vec> out) { out.setZero(); };
  F.impulsive = [](const Vec&, const Vec&, const Vec&, Eigen::Ref<Mat> out) { out.setOnes(); };
  F.lipschitz = 0.0;
  F.growth = 1.0;
  return F;
}

VectorFieldSet commutative_fields() {
  VectorFieldSet F;
  F.state_dim = 3;
  F.channels = 2;
  F.ordinary_dim = 1;
  F.drift = [](const Vec& x, const Vec&, const Vec& v1, Eigen::Ref<Vec> out) {
    out << v1(0), 0.0, x(0);
  };
  F.impulsive = [](const Vec&, const Vec&, const Vec&, Eigen::Ref<Mat> out) {
    out << 1.0, 0.0,
           0.0, 1.0,
           1.0, -1.0;
  };
  F.lipschitz = 1.0;
  F.growth = 2.0;
  F.modulus = Modulus::lipschitz(1.0);
  return F;
}

}  // namespace

VectorFieldSet example21_fields(bool with_cost_state) {
  VectorFieldSet F;
  F.state_dim = with_cost_state ? 5 : 4;
  F.channels = 2;
  F.ordinary_dim = 1;
  F.drift = [with_cost_state](const Vec& x, const Vec& u, const Vec& v1, Eigen::Ref<Vec> out) {
    out.setZero();
    out(3) = radial_cutoff(x.head(4)) * v1(0);
    if (with_cost_state) out(4) = std::abs(v1(0)) + u.norm();
  };
  F.impulsive = [](const Vec& x, const Vec&, const Vec&, Eigen::Ref<Mat> out) {
    const double eta = radial_cutoff(x.head(4));
    out.setZero();
    out(0, 0) = eta;
    out(2, 0) = eta * x(2) * x(1);
    out(3, 0) = -eta * x(3) * x(1);
    out(1, 1) = eta;
    out(2, 1) = -eta * x(2) * x(0);
    out(3, 1) = eta * x(3) * x(0);
  };
  F.lipschitz = 8.0;
  F.growth = 200.0;
  F.modulus = Modulus::lipschitz(1.0);
  return F;
}

std::pair<ControlPath, OrdinaryControl> example21_controls(int k, int samples_per_period) {
  if (k < 1 || samples_per_period < 1) throw PreconditionError("example21_controls: k and samples must be >= 1");
  const double period = kTwoPi / k;
  const double scale = 1.0 / std::cbrt(static_cast<double>(k));
  const long long count = static_cast<long long>(k - 1) * samples_per_period;

  std::vector<double> times{0.0};
  Mat values = Mat::Zero(2, count + 2);
  times.reserve(static_cast<std::size_t>(count) + 2);
  for (long long j = 0; j <= count; ++j) {
    // k t = 2π + 2π j / samples, reduced before taking cos and sin.
    const double angle = kTwoPi * static_cast<double>(j % samples_per_period) / samples_per_period;
    times.push_back(j == count ? kTwoPi : period * (1.0 + static_cast<double>(j) / samples_per_period));
    values(0, j + 1) = scale * (std::cos(angle) - 1.0);
    values(1, j + 1) = scale * std::sin(angle);
  }

  const double level = k * std::exp(-kTwoPi * std::cbrt(static_cast<double>(k)));
  std::vector<double> grid{0.0};
  std::vector<double> v;
  if (k > 1) {
    grid.push_back(period);
    v.push_back(level);
  }
  grid.push_back(kTwoPi);
  v.push_back(k > 1 ? 0.0 : level);
  Mat v1(1, static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) v1(0, static_cast<Eigen::Index>(i)) = v[i];

  return {ControlPath::polyline(std::move(times), std::move(values)), OrdinaryControl(std::move(grid), std::move(v1))};
}

Vec example21_closed_form(double k, double t) {
  const double c = std::cbrt(k);
  const double period = kTwoPi / k;
  if (t < period) return vec({0.0, 0.0, 1.0, k * std::exp(-kTwoPi * c) * t});
  const double s = std::sin(k * t);
  return vec({(std::cos(k * t) - 1.0) / c, s / c, std::exp(-c * (t - s / k - period)),
              kTwoPi * std::exp(c * (t - kTwoPi - s / k - period))});
}

Trajectory example21_closed_form_trajectory(double k, const std::vector<double>& grid) {
  Trajectory x;
  x.times = grid;
  x.states.resize(4, static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) x.states.col(static_cast<Eigen::Index>(i)) = example21_closed_form(k, grid[i]);
  return x;
}

BolzaTerms example21_bolza_closed_form(double k) {
  if (!(k >= 1.0)) throw PreconditionError("example21_bolza_closed_form: k must be >= 1");
  BolzaTerms J;
  // |u_k| = 2 k^{-1/3} |sin(kt/2)|, integrated over k-1 full periods.
  J.running_u = 8.0 * (k - 1.0) / std::pow(k, 4.0 / 3.0);
  J.running_v = kTwoPi * std::exp(-kTwoPi * std::cbrt(k));
  const double gap = -kTwoPi * std::expm1(-kTwoPi * std::pow(k, -2.0 / 3.0));
  J.endpoint = gap * gap;
  return J;
}

BolzaTerms cost_bolza(const Trajectory& x, const ControlPath& u, const OrdinaryControl& v) {
  if (x.dimension() < 4) throw PreconditionError("cost_bolza: state needs at least four components");
  BolzaTerms J;
  double prev = u.value(x.times.front()).norm();
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double cur = u.value(x.times[i]).norm();
    J.running_u += 0.5 * (prev + cur) * (x.times[i] - x.times[i - 1]);
    prev = cur;
  }
  J.running_v = v.first().l1_norm();
  const double gap = kTwoPi - x.states(3, x.states.cols() - 1);
  J.endpoint = gap * gap;
  return J;
}

MayerCost cost_mayer(const Trajectory& x) {
  if (x.dimension() != 5) throw PreconditionError("cost_mayer: state must be five-dimensional");
  const Vec end = x.state(x.size() - 1);
  return {std::abs(end(2)) + std::abs(kTwoPi - end(3)), std::abs(end(4))};
}

double example22_limit_x3(double k) {
  return std::exp(-std::cbrt(k) * (kTwoPi - kTwoPi / k));
}

ControlPath random_fixed_v_control(std::mt19937_64& rng, int k, double horizon, int samples) {
  std::uniform_real_distribution<double> amp(0.0, 0.7), freq(1.0, static_cast<double>(std::max(k, 2)));
  const double scale = 1.0 / std::cbrt(static_cast<double>(k));
  const double a1 = amp(rng), a2 = amp(rng), w1 = freq(rng), w2 = freq(rng);
  std::vector<double> times(static_cast<std::size_t>(samples) + 1);
  Mat values(2, samples + 1);
  for (int i = 0; i <= samples; ++i) {
    const double t = i == samples ? horizon : horizon * i / samples;
    times[static_cast<std::size_t>(i)] = t;
    values(0, i) = scale * a1 * 0.5 * (std::cos(w1 * t) - 1.0);
    values(1, i) = scale * a2 * std::sin(w2 * t);
  }
  return ControlPath::polyline(std::move(times), std::move(values));
}

std::vector<Scenario> builtin_scenarios() {
  std::vector<Scenario> out;

  Scenario ex21;
  ex21.id = "example-2.1";
  ex21.description = "Bolza problem on the cut-off system in R^4; regular infimum 0 is not attained, extended limit solution reaches it";
  ex21.fields = example21_fields();
  ex21.x0 = vec({0.0, 0.0, 1.0, 0.0});
  ex21.u0 = Vec::Zero(2);
  ex21.horizon = kTwoPi;
  ex21.U = ControlSet::ball(Vec::Zero(2), 1.0);
  ex21.V = unit_box(1);
  ex21.cost = CostKind::Bolza;
  ex21.tolerance = 1e-4;
  ex21.ks = {16, 64, 256};
  ex21.closed_form_ks = {1e3, 1e6, 1e9};
  out.push_back(std::move(ex21));

  Scenario ex22;
  ex22.id = "example-2.2";
  ex22.description = "Mayer problem with endpoint constraint x5(2π)=0; regular, limit and extended infima 1+2π, 2π, 0";
  ex22.fields = example21_fields(true);
  ex22.x0 = vec({0.0, 0.0, 1.0, 0.0, 0.0});
  ex22.u0 = Vec::Zero(2);
  ex22.horizon = kTwoPi;
  ex22.U = ControlSet::ball(Vec::Zero(2), 1.0);
  ex22.V = unit_box(1);
  ex22.cost = CostKind::Mayer;
  ex22.endpoint_constraint = "x5(T)=0";
  ex22.tolerance = 1e-2;
  ex22.ks = {16, 64, 256};
  ex22.closed_form_ks = {1e3, 1e6, 1e9};
  out.push_back(std::move(ex22));

  Scenario brockett;
  brockett.id = "brockett";
  brockett.description = "Nonholonomic integrator, jump (0,0)->(1,1) at t=0.5; x3 jump depends on the bridge";
  brockett.fields = brockett_fields();
  brockett.x0 = Vec::Zero(3);
  brockett.u0 = Vec::Zero(2);
  brockett.horizon = 1.0;
  brockett.U = unit_box(2);
  brockett.V = unit_box(1);
  brockett.tolerance = 1e-3;
  brockett.ks = {16, 64, 256};
  brockett.u = single_jump(Vec::Zero(2), vec({1.0, 1.0}), 0.5, 1.0);
  brockett.v = OrdinaryControl::constant(1.0, Vec::Zero(1));
  brockett.expected_endpoint = vec({1.0, 1.0, 0.0});
  out.push_back(std::move(brockett));

  Scenario v2jump;
  v2jump.id = "brockett-v2-jump";
  v2jump.description =
      "Synthetic: Brockett fields scaled by (1+v2/2) with drift x3' = v1 + x1/2; two-leg bridge, fiber control v2 = 1";
  v2jump.synthetic = true;
  v2jump.fields = brockett_v2_fields();
  v2jump.x0 = Vec::Zero(3);
  v2jump.u0 = Vec::Zero(2);
  v2jump.horizon = 1.0;
  v2jump.U = unit_box(2);
  v2jump.V = unit_box(1);
  v2jump.tolerance = 1e-2;
  v2jump.ks = {16, 64, 256};
  v2jump.u = single_jump(Vec::Zero(2), vec({1.0, 1.0}), 0.5, 1.0);
  v2jump.v = OrdinaryControl::constant(1.0, vec({0.5}), vec({0.0}));
  v2jump.fibers = {FiberSpec{staircase_bridge(Vec::Zero(2), vec({1.0, 1.0}), v2jump.U),
                             StepFunction::constant(0.0, 1.0, vec({1.0}))}};
  v2jump.expected_endpoint = vec({1.5, 1.5, 3.125});
  out.push_back(std::move(v2jump));

  Scenario scalar;
  scalar.id = "scalar-jump";
  scalar.description = "x' = u', unit jump of u at t=0.5";
  scalar.fields = scalar_fields();
  scalar.x0 = Vec::Zero(1);
  scalar.u0 = Vec::Zero(1);
  scalar.horizon = 1.0;
  scalar.U = ControlSet::box(Vec::Zero(1), Vec::Ones(1));
  scalar.V = unit_box(1);
  scalar.tolerance = 1e-9;
  scalar.ks = {16, 64, 256};
  scalar.u = single_jump(Vec::Zero(1), Vec::Ones(1), 0.5, 1.0);
  scalar.v = OrdinaryControl::constant(1.0, Vec::Zero(1));
  scalar.expected_endpoint = Vec::Ones(1);
  out.push_back(std::move(scalar));

  Scenario comm;
  comm.id = "commutative-pair";
  comm.description = "Constant impulsive fields (vanishing brackets) with drift (v1, 0, x1); jump outcome is bridge independent";
  comm.fields = commutative_fields();
  comm.x0 = Vec::Zero(3);
  comm.u0 = Vec::Zero(2);
  comm.horizon = 1.0;
  comm.U = unit_box(2);
  comm.V = unit_box(1);
  comm.tolerance = 1e-2;
  comm.ks = {16, 64, 256};
  comm.u = single_jump(Vec::Zero(2), vec({1.0, 1.0}), 0.5, 1.0);
  comm.v = OrdinaryControl::constant(1.0, vec({0.25}));
  comm.expected_endpoint = vec({1.25, 1.0, 0.625});
  out.push_back(std::move(comm));

  return out;
}

Scenario find_scenario(const std::string& id) {
  for (auto& s : builtin_scenarios())
    if (s.id == id) return s;
  throw PreconditionError("unknown scenario: " + id);
}

}  // namespace impulse
