#include "impulse/limit_approx.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace impulse {

namespace {

// Times t with σ_k(t) at a node of the control or at a knot of σ_k.
std::vector<double> pullback_times(const SpaceTimeControl& stc, const PiecewiseLinearMap& sigma_k) {
  std::vector<double> ts(sigma_k.xs());
  for (double s : stc.nodes()) ts.push_back(sigma_k.inverse(s));
  std::sort(ts.begin(), ts.end());
  const double T = sigma_k.domain_end();
  const double snap = 1e-12 * std::max(1.0, T);
  std::vector<double> out{0.0};
  for (double t : ts)
    if (t - out.back() > snap) out.push_back(t);
  if (T - out.back() <= snap) out.back() = T;
  else out.push_back(T);
  return out;
}

OrdinaryControl drift_from(const OrdinaryControl& v, const OrdinaryControl& v_k) {
  const double T = v.horizon();
  const auto grid = merged_grid(v.grid(), v_k.grid(), 0.0, T);
  const auto cells = static_cast<Eigen::Index>(grid.size() - 1);
  Mat v1(v.dimension(), cells), v2(v.dimension(), cells);
  for (Eigen::Index i = 0; i < cells; ++i) {
    const double mid = 0.5 * (grid[static_cast<std::size_t>(i)] + grid[static_cast<std::size_t>(i) + 1]);
    v1.col(i) = v.v1(mid);
    v2.col(i) = v_k.v2(mid);
  }
  return OrdinaryControl(grid, std::move(v1), std::move(v2));
}

}  // namespace

PiecewiseLinearMap build_sigma_k(const Clock& clock, int k) {
  if (k < 1) throw PreconditionError("build_sigma_k: k must be >= 1");
  const auto& knots = clock.knots();

  // Ramp windows [t̄ - δ, t̄] for every fiber.
  std::vector<std::pair<double, double>> windows;
  double previous_jump = 0.0;
  for (const auto& knot : knots) {
    if (!(knot.s > knot.s_left)) continue;
    if (knot.t == 0.0) throw PreconditionError("build_sigma_k: fiber at t = 0 cannot be ramped");
    const double width = knot.s - knot.s_left;
    const double delta = std::min(width / (2.0 * k), 0.5 * (knot.t - previous_jump));
    windows.emplace_back(knot.t - delta, knot.t);
    previous_jump = knot.t;
  }

  std::vector<double> ts, ss;
  std::size_t w = 0;
  for (const auto& knot : knots) {
    while (w < windows.size() && windows[w].second < knot.t) ++w;
    if (w < windows.size() && knot.t > windows[w].first && knot.t < windows[w].second) continue;
    if (w < windows.size() && knot.t == windows[w].second) {
      const double start = windows[w].first;
      if (ts.empty() || start > ts.back()) {
        ts.push_back(start);
        ss.push_back(clock(start));
      }
    }
    if (!ts.empty() && knot.t == ts.back()) {
      ss.back() = knot.s;
      continue;
    }
    ts.push_back(knot.t);
    ss.push_back(knot.s);
  }
  return PiecewiseLinearMap(std::move(ts), std::move(ss));
}

ControlPath compose_control(const SpaceTimeControl& stc, const PiecewiseLinearMap& sigma_k) {
  const auto ts = pullback_times(stc, sigma_k);
  Mat values(stc.channels(), static_cast<Eigen::Index>(ts.size()));
  for (std::size_t i = 0; i < ts.size(); ++i) values.col(static_cast<Eigen::Index>(i)) = stc.phi_at(sigma_k(ts[i]));
  return ControlPath::polyline(ts, std::move(values));
}

OrdinaryControl compose_ordinary(const SpaceTimeControl& stc, const PiecewiseLinearMap& sigma_k) {
  const auto ts = pullback_times(stc, sigma_k);
  const auto cells = static_cast<Eigen::Index>(ts.size() - 1);
  Mat v1(stc.ordinary_dim(), cells), v2(stc.ordinary_dim(), cells);
  for (Eigen::Index i = 0; i < cells; ++i) {
    const double mid = 0.5 * (ts[static_cast<std::size_t>(i)] + ts[static_cast<std::size_t>(i) + 1]);
    const auto c = static_cast<Eigen::Index>(stc.cell_at(sigma_k(mid)));
    v1.col(i) = stc.psi1().col(c);
    v2.col(i) = stc.psi2().col(c);
  }
  return OrdinaryControl(ts, std::move(v1), std::move(v2));
}

double check_psi2_condition(const StepFunction& v2_k, const PiecewiseLinearMap& sigma_k,
                            const StepFunction& psi2, double V_k) {
  const auto& grid = v2_k.grid();
  std::vector<double> mapped{sigma_k(grid.front())};
  std::vector<Eigen::Index> cells;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double right = sigma_k(grid[i + 1]);
    if (!(right > mapped.back())) continue;
    mapped.push_back(right);
    cells.push_back(static_cast<Eigen::Index>(i));
  }
  Mat values(v2_k.dimension(), static_cast<Eigen::Index>(cells.size()));
  for (std::size_t i = 0; i < cells.size(); ++i) values.col(static_cast<Eigen::Index>(i)) = v2_k.values().col(cells[i]);
  const StepFunction pulled(std::move(mapped), std::move(values));
  return pulled.l1_distance(psi2, 0.0, v2_k.end() + V_k);
}

GronwallCheck gronwall_bound(const VectorFieldSet& F, const Vec& x0, const ControlPath& u_k,
                             const OrdinaryControl& v_k, const OrdinaryControl& v, std::span<const double> grid,
                             const IntegratorConfig& cfg) {
  const double T = u_k.horizon();
  if (v_k.second().l1_distance(v.second(), 0.0, T) > 1e-12)
    throw PreconditionError("gronwall_bound: v2 must be the same in both inputs");
  const Trajectory x_hat = solve_caratheodory(F, x0, u_k, v, cfg, grid);
  const Trajectory x_k = solve_caratheodory(F, x0, u_k, v_k, cfg, grid);

  GronwallCheck out;
  out.lhs = sup_distance(x_hat, x_k, grid, Execution::Serial);
  const auto cells = merged_grid(v_k.grid(), v.grid(), 0.0, T);
  double integral = 0.0;
  for (std::size_t i = 0; i + 1 < cells.size(); ++i) {
    const double mid = 0.5 * (cells[i] + cells[i + 1]);
    integral += F.modulus((v_k.v1(mid) - v.v1(mid)).norm()) * (cells[i + 1] - cells[i]);
  }
  const double exponent = (F.channels + 1) * F.lipschitz * (T + u_k.total_variation());
  const double growth = std::exp(exponent);
  out.rhs = integral == 0.0 ? 0.0 : integral * growth;
  if (std::isnan(out.rhs)) out.rhs = std::numeric_limits<double>::infinity();
  out.slack = 1e-6 * growth;
  out.holds = out.lhs <= out.rhs + out.slack;
  return out;
}

ControlPath whitney_tail_fix(const ControlPath& u_k, double tau, const Vec& u_T, const ControlSet& U) {
  const double T = u_k.horizon();
  if (!(tau < T)) throw PreconditionError("whitney_tail_fix: τ must be < T");
  if (!(tau > 0.0)) throw PreconditionError("whitney_tail_fix: τ must be > 0");
  if (!u_k.absolutely_continuous()) throw PreconditionError("whitney_tail_fix: u_k must be absolutely continuous");
  const ControlPath head = u_k.truncated(tau);
  const ControlPath bridge = whitney_bridge(head.value(tau), u_T, U);

  std::vector<double> ts(head.knot_times());
  const auto& bt = bridge.knot_times();
  const Mat& bu = bridge.knot_values();
  Mat values(u_k.dimension(), static_cast<Eigen::Index>(ts.size() + bt.size() - 1));
  values.leftCols(static_cast<Eigen::Index>(ts.size())) = head.knot_values();
  for (std::size_t i = 1; i < bt.size(); ++i) {
    ts.push_back(i + 1 == bt.size() ? T : tau + bt[i] * (T - tau));
    values.col(static_cast<Eigen::Index>(ts.size() - 1)) = bu.col(static_cast<Eigen::Index>(i));
  }
  return ControlPath::polyline(std::move(ts), std::move(values));
}

std::vector<EquiuniformityEntry> check_equiuniformity(const std::vector<Trajectory>& xs,
                                                      const std::vector<ControlPath>& us,
                                                      std::span<const double> thresholds) {
  if (xs.size() != us.size()) throw PreconditionError("check_equiuniformity: need one trajectory per control");
  for (std::size_t j = 1; j < thresholds.size(); ++j)
    if (!(thresholds[j] > thresholds[j - 1])) throw PreconditionError("check_equiuniformity: thresholds must increase");
  std::vector<EquiuniformityEntry> out;
  for (std::size_t k = 0; k < us.size(); ++k) {
    const ControlPath& u = us[k];
    if (!u.absolutely_continuous()) throw PreconditionError("check_equiuniformity: controls must be absolutely continuous");
    std::vector<double> ys(u.knot_times().size());
    for (std::size_t i = 0; i < ys.size(); ++i) ys[i] = u.knot_times()[i] + u.cumulative_variation()[i];
    const PiecewiseLinearMap graph_length(u.knot_times(), std::move(ys));
    const double T = u.horizon();
    const Vec xT = xs[k].state(xs[k].size() - 1);
    const Vec uT = u.value(T);
    for (std::size_t j = 0; j < thresholds.size(); ++j) {
      EquiuniformityEntry e;
      e.j = j;
      e.k = k;
      e.reached = thresholds[j] >= 0.0 && thresholds[j] <= graph_length.range_end();
      if (e.reached) {
        e.tau = graph_length.inverse(thresholds[j]);
        e.dev_x = (xs[k].interpolate(e.tau) - xT).norm();
        e.dev_u = (u.value(e.tau) - uT).norm();
        e.dev = std::hypot(e.dev_x, e.dev_u);
      }
      out.push_back(e);
    }
  }
  return out;
}

ApproxSequence approximate_sequence(const VectorFieldSet& F, const Vec& x0, const GraphCompletion& completion,
                                    const ControlPath& u, const OrdinaryControl& v, std::span<const int> ks,
                                    std::span<const double> grid, const IntegratorConfig& cfg, Execution exec) {
  for (std::size_t i = 0; i < ks.size(); ++i)
    if (ks[i] < 1 || (i > 0 && ks[i] <= ks[i - 1]))
      throw PreconditionError("approximate_sequence: ks must be positive and strictly increasing");
  const SpaceTimeControl& stc = completion.control;
  const ParamPath xi = solve_spacetime(F, x0, stc, cfg);
  ApproxSequence out{reconstruct_solution(xi, completion.clock, grid), {}, {}};
  const StepFunction psi2 = stc.psi2_function();

  std::vector<std::optional<ApproxMember>> members(ks.size());
  std::vector<ApproxRecord> report(ks.size());
  for_each_index(ks.size(), exec, [&](std::size_t i) {
    PiecewiseLinearMap sigma = build_sigma_k(completion.clock, ks[i]);
    ControlPath u_k = compose_control(stc, sigma);
    OrdinaryControl v_k = compose_ordinary(stc, sigma);
    Trajectory x_k = solve_caratheodory(F, x0, u_k, v_k, cfg, grid);

    ApproxRecord& r = report[i];
    r.k = ks[i];
    r.var_uk = u_k.total_variation();
    r.sup_dist = sup_distance(x_k, out.target, grid, Execution::Serial);
    r.l1_u = l1_distance(u_k, u);
    r.l1_v = v_k.l1_distance(v);
    r.psi2_gap = check_psi2_condition(v_k.second(), sigma, psi2, r.var_uk);
    const GronwallCheck g = gronwall_bound(F, x0, u_k, v_k, drift_from(v, v_k), grid, cfg);
    r.gronwall_lhs = g.lhs;
    r.gronwall_rhs = g.rhs;
    r.gronwall_holds = g.holds;
    members[i] = ApproxMember{std::move(u_k), std::move(v_k), std::move(x_k), std::move(sigma)};
  });
  for (auto& m : members) out.members.push_back(std::move(*m));
  out.report = std::move(report);
  return out;
}

}  // namespace impulse
