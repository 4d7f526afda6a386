#include "impulse/ode_engine.hpp"

#include <algorithm>
#include <cmath>

namespace impulse {

namespace {

// One piece of the unified cell dynamics
//   y' = a g0(y, w0 + τ b, p1) + G(y, w0 + τ b, p2) b,   τ ∈ [0, len].
// Both solvers reduce to this: a = 1 for the Carathéodory system, a = φ0'
// for the space-time system.
class CellIntegrator {
 public:
  explicit CellIntegrator(const VectorFieldSet& F)
      : F_(F),
        g0_(F.state_dim),
        G_(F.state_dim, F.channels),
        k1_(F.state_dim),
        k2_(F.state_dim),
        k3_(F.state_dim),
        k4_(F.state_dim),
        tmp_(F.state_dim),
        w_(F.channels) {}

  void run(Vec& y, double a, const Vec& w0, const Vec& b, const Vec& p1, const Vec& p2, double len,
           std::size_t steps) {
    const double h = len / static_cast<double>(steps);
    for (std::size_t i = 0; i < steps; ++i) {
      const double tau = h * static_cast<double>(i);
      rhs(y, a, w0, b, p1, p2, tau, k1_);
      tmp_ = y + 0.5 * h * k1_;
      rhs(tmp_, a, w0, b, p1, p2, tau + 0.5 * h, k2_);
      tmp_ = y + 0.5 * h * k2_;
      rhs(tmp_, a, w0, b, p1, p2, tau + 0.5 * h, k3_);
      tmp_ = y + h * k3_;
      rhs(tmp_, a, w0, b, p1, p2, tau + h, k4_);
      y += (h / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
      const double norm = y.norm();
      if (!(norm <= kDivergenceGuard)) throw DivergenceError("integrator: state norm exceeded the divergence guard");
    }
  }

 private:
  void rhs(const Vec& y, double a, const Vec& w0, const Vec& b, const Vec& p1, const Vec& p2, double tau,
           Vec& out) {
    w_ = w0 + tau * b;
    out.setZero();
    if (a != 0.0) {
      F_.drift(y, w_, p1, g0_);
      out += a * g0_;
    }
    if (b.squaredNorm() != 0.0) {
      F_.impulsive(y, w_, p2, G_);
      out.noalias() += G_ * b;
    }
  }

  const VectorFieldSet& F_;
  Vec g0_;
  Mat G_;
  Vec k1_, k2_, k3_, k4_, tmp_, w_;
};

std::size_t step_count(double len, std::size_t per_unit) {
  return static_cast<std::size_t>(std::max(1.0, std::ceil(len * static_cast<double>(per_unit))));
}

void check_dimensions(const VectorFieldSet& F, const Vec& x0, int channels, int ordinary) {
  if (x0.size() != F.state_dim) throw PreconditionError("integrator: initial state has the wrong dimension");
  if (channels != F.channels) throw PreconditionError("integrator: control dimension differs from m");
  if (ordinary != F.ordinary_dim) throw PreconditionError("integrator: ordinary control dimension differs from l");
}

}  // namespace

void IntegratorConfig::validate() const {
  if (steps_per_unit < 1) throw PreconditionError("integrator: steps per unit must be >= 1");
  if (!(tolerance > 0.0)) throw PreconditionError("integrator: tolerance must be positive");
}

Trajectory solve_caratheodory(const VectorFieldSet& F, const Vec& x0, const ControlPath& u,
                              const OrdinaryControl& v, const IntegratorConfig& cfg,
                              std::span<const double> grid) {
  cfg.validate();
  check_dimensions(F, x0, u.dimension(), v.dimension());
  if (!u.absolutely_continuous()) throw PreconditionError("solve_caratheodory: u has a jump");
  const double T = u.horizon();
  if (grid.size() < 2 || grid.front() != 0.0 || grid.back() != T)
    throw PreconditionError("solve_caratheodory: grid must run from 0 to T");
  if (std::abs(v.horizon() - T) > 1e-12 * std::max(1.0, T))
    throw PreconditionError("solve_caratheodory: u and v have different horizons");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw PreconditionError("solve_caratheodory: grid not strictly increasing");

  // Breakpoints: knots of u, grid of v, output grid.
  const auto& knots = u.knot_times();
  std::vector<double> times(knots.begin(), knots.end());
  for (double t : v.grid())
    if (t > 0.0 && t < T) times.push_back(t);
  times.insert(times.end(), grid.begin(), grid.end());
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  Trajectory out;
  out.times.assign(grid.begin(), grid.end());
  out.states.resize(F.state_dim, static_cast<Eigen::Index>(grid.size()));
  out.states.col(0) = x0;

  const Mat& U = u.knot_values();
  CellIntegrator integrator(F);
  Vec y = x0;
  Vec b(u.dimension());
  std::size_t knot = 0;   // knots[knot] <= a < knots[knot+1]
  std::size_t out_i = 1;  // next grid sample
  for (std::size_t j = 0; j + 1 < times.size(); ++j) {
    const double a = times[j];
    const double c = times[j + 1];
    while (knot + 2 < knots.size() && knots[knot + 1] <= a) ++knot;
    const auto k = static_cast<Eigen::Index>(knot);
    const double seg = knots[knot + 1] - knots[knot];
    b = (U.col(k + 1) - U.col(k)) / seg;
    const Vec w0 = U.col(k) + (a - knots[knot]) * b;
    integrator.run(y, 1.0, w0, b, v.v1(a), v.v2(a), c - a, step_count(c - a, cfg.steps_per_unit));
    if (out_i < grid.size() && grid[out_i] == c) out.states.col(static_cast<Eigen::Index>(out_i++)) = y;
  }
  return out;
}

ParamPath solve_spacetime(const VectorFieldSet& F, const Vec& x0, const SpaceTimeControl& stc,
                          const IntegratorConfig& cfg) {
  cfg.validate();
  check_dimensions(F, x0, stc.channels(), stc.ordinary_dim());
  const auto& nodes = stc.nodes();
  const auto& phi0 = stc.phi0();
  const Mat& phi = stc.phi();

  ParamPath out;
  out.nodes = nodes;
  out.times = phi0;
  out.states.resize(F.state_dim, static_cast<Eigen::Index>(nodes.size()));
  out.states.col(0) = x0;

  CellIntegrator integrator(F);
  Vec y = x0;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const auto c = static_cast<Eigen::Index>(i);
    const double len = nodes[i + 1] - nodes[i];
    const double a = (phi0[i + 1] - phi0[i]) / len;
    const Vec b = (phi.col(c + 1) - phi.col(c)) / len;
    integrator.run(y, a, phi.col(c), b, stc.psi1().col(c), stc.psi2().col(c), len,
                   step_count(len, cfg.steps_per_unit));
    out.states.col(c + 1) = y;
  }
  return out;
}

Trajectory reconstruct_solution(const ParamPath& xi, const Clock& clock, std::span<const double> grid) {
  const double slack = 1e-12 * std::max(1.0, xi.horizon());
  if (clock.parameter_horizon() > xi.horizon() + slack)
    throw DomainError("reconstruct_solution: clock range exceeds the domain of ξ");
  Trajectory out;
  out.times.assign(grid.begin(), grid.end());
  out.states.resize(xi.states.rows(), static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i)
    out.states.col(static_cast<Eigen::Index>(i)) = xi.interpolate(clock(grid[i]));
  for (const auto& f : clock.fibers()) out.jumps.push_back({f.t, xi.interpolate(f.s_left), xi.interpolate(f.s)});
  out.validate();
  return out;
}

ConvergenceEstimate self_convergence_check(const VectorFieldSet& F, const Vec& x0,
                                           const ControlPath& u, const OrdinaryControl& v,
                                           const IntegratorConfig& cfg, std::span<const double> grid) {
  IntegratorConfig c = cfg;
  const Trajectory x1 = solve_caratheodory(F, x0, u, v, c, grid);
  c.steps_per_unit = 2 * cfg.steps_per_unit;
  const Trajectory x2 = solve_caratheodory(F, x0, u, v, c, grid);
  c.steps_per_unit = 4 * cfg.steps_per_unit;
  const Trajectory x4 = solve_caratheodory(F, x0, u, v, c, grid);
  ConvergenceEstimate est;
  est.e1 = (x1.states - x2.states).colwise().norm().maxCoeff();
  est.e2 = (x2.states - x4.states).colwise().norm().maxCoeff();
  est.order = est.e2 > 0.0 ? std::log2(est.e1 / est.e2) : 0.0;
  const double ratio = std::exp2(est.order);
  est.error = ratio > 1.0 ? est.e2 / (ratio - 1.0) : est.e2;
  return est;
}

}  // namespace impulse
