#include "impulse/graph_completion.hpp"

#include <algorithm>
#include <cmath>

namespace impulse {

namespace {

constexpr double kMembershipTol = 1e-9;

ControlPath polyline_through(const std::vector<Vec>& points) {
  std::vector<double> lengths{0.0};
  for (std::size_t i = 1; i < points.size(); ++i)
    lengths.push_back(lengths.back() + (points[i] - points[i - 1]).norm());
  const double total = lengths.back();
  if (total == 0.0) return ControlPath::constant(1.0, points.front());
  std::vector<double> times;
  std::vector<Vec> kept;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double t = lengths[i] / total;
    if (!times.empty() && t <= times.back()) continue;
    times.push_back(t);
    kept.push_back(points[i]);
  }
  times.back() = 1.0;
  kept.back() = points.back();
  Mat values(points.front().size(), static_cast<Eigen::Index>(kept.size()));
  for (std::size_t i = 0; i < kept.size(); ++i) values.col(static_cast<Eigen::Index>(i)) = kept[i];
  return ControlPath::polyline(std::move(times), std::move(values));
}

void require_in_set(const Vec& p, const ControlSet& U, const char* what) {
  if (p.size() != U.dimension() || !U.contains(p, kMembershipTol)) throw PreconditionError(what);
}

// Node list under construction: s, φ0, φ at nodes; ψ and fiber tags per cell.
struct NodeList {
  std::vector<double> s, t;
  std::vector<Vec> phi;
  std::vector<Vec> psi1, psi2;
  std::vector<double> fiber_length;  // 0 on AC cells

  void push(double s_next, double t_next, Vec phi_next, Vec p1, Vec p2, double fiber) {
    s.push_back(s_next);
    t.push_back(t_next);
    phi.push_back(std::move(phi_next));
    psi1.push_back(std::move(p1));
    psi2.push_back(std::move(p2));
    fiber_length.push_back(fiber);
  }
};

// Sorted evaluation times: every knot of u is kept; extra times closer than
// `snap` to a kept time are dropped.
std::vector<double> completion_times(const ControlPath& u, const OrdinaryControl& v,
                                     const std::vector<double>& samples) {
  const double T = u.horizon();
  const double snap = 1e-10 * std::max(1.0, T);
  std::vector<std::pair<double, bool>> all;  // (time, is knot of u)
  for (double t : u.breakpoints()) all.emplace_back(t, true);
  for (double t : v.grid())
    if (t > 0.0 && t < T) all.emplace_back(t, false);
  for (double t : samples)
    if (t > 0.0 && t < T) all.emplace_back(t, false);
  std::sort(all.begin(), all.end());
  std::vector<std::pair<double, bool>> kept;
  for (const auto& entry : all) {
    if (!kept.empty() && entry.first - kept.back().first < snap) {
      if (entry.second && !kept.back().second) kept.back() = entry;
      continue;
    }
    kept.push_back(entry);
  }
  std::vector<double> out;
  out.reserve(kept.size());
  for (const auto& entry : kept) out.push_back(entry.first);
  return out;
}

}  // namespace

ControlPath whitney_bridge(const Vec& u1, const Vec& u2, const ControlSet& U) {
  require_in_set(u1, U, "whitney_bridge: start point outside U");
  require_in_set(u2, U, "whitney_bridge: end point outside U");
  if ((u1 - u2).norm() == 0.0) return ControlPath::constant(1.0, u1);
  const int part = U.part_containing(u1, kMembershipTol);
  if (U.convex() || (part >= 0 && U.parts()[static_cast<std::size_t>(part)].contains(u2, kMembershipTol)))
    return polyline_through({u1, u2});
  // Points in different parts: two legs through the star center.
  ControlPath path = polyline_through({u1, U.star_center(), u2});
  if (path.total_variation() > U.whitney_constant() * (u1 - u2).norm() * (1.0 + 1e-12))
    throw DomainError("whitney_bridge: declared Whitney constant is too small for the star route");
  return path;
}

ControlPath staircase_bridge(const Vec& u1, const Vec& u2, const ControlSet& U) {
  require_in_set(u1, U, "staircase_bridge: start point outside U");
  require_in_set(u2, U, "staircase_bridge: end point outside U");
  std::vector<Vec> corners{u1};
  Vec p = u1;
  for (Eigen::Index i = 0; i < u1.size(); ++i) {
    if (p(i) == u2(i)) continue;
    p(i) = u2(i);
    corners.push_back(p);
  }
  for (std::size_t i = 1; i < corners.size(); ++i) {
    if (!U.contains(corners[i], kMembershipTol)) throw DomainError("staircase_bridge: corner leaves U");
    const int part = U.part_containing(corners[i - 1], kMembershipTol);
    if (!U.convex() && !U.parts()[static_cast<std::size_t>(part)].contains(corners[i], kMembershipTol))
      throw DomainError("staircase_bridge: leg leaves U");
  }
  return polyline_through(corners);
}

GraphCompletion complete_graph(const ControlPath& u, const OrdinaryControl& v, const ControlSet& U,
                               const std::vector<FiberSpec>& fibers, const CompletionOptions& options) {
  const double T = u.horizon();
  if (std::abs(v.horizon() - T) > 1e-12 * std::max(1.0, T))
    throw PreconditionError("complete_graph: u and v have different horizons");
  const auto jumps = u.jumps();
  if (!fibers.empty() && fibers.size() != jumps.size())
    throw PreconditionError("complete_graph: need one fiber spec per jump");
  if (options.min_cells == 0 || options.min_fiber_cells == 0)
    throw PreconditionError("complete_graph: cell counts must be >= 1");

  const auto times = completion_times(u, v, options.sample_times);
  NodeList nodes;
  nodes.s.push_back(0.0);
  nodes.t.push_back(0.0);
  nodes.phi.push_back(u.value(0.0));
  std::vector<ClockKnot> knots{{0.0, 0.0, 0.0}};

  double s = 0.0;
  std::size_t next_jump = 0;
  for (std::size_t j = 0; j + 1 < times.size(); ++j) {
    const double a = times[j];
    const double b = times[j + 1];
    const Vec ua = u.value(a);
    Vec ub = u.left_limit(b);
    s += (b - a) + (ub - ua).norm();
    nodes.push(s, b, ub, v.v1(a), v.v2(a), 0.0);

    const bool is_jump = next_jump < jumps.size() && jumps[next_jump].time == b;
    if (!is_jump) {
      knots.push_back({b, s, s});
      continue;
    }
    const Jump& jump = jumps[next_jump];
    const FiberSpec spec = fibers.empty() ? FiberSpec{} : fibers[next_jump];
    ++next_jump;

    const ControlPath bridge = spec.bridge ? *spec.bridge : whitney_bridge(jump.left, jump.right, U);
    if (!bridge.absolutely_continuous()) throw PreconditionError("complete_graph: bridge must be absolutely continuous");
    if (bridge.dimension() != u.dimension() ||
        (bridge.initial_value() - jump.left).norm() > 1e-9 * (1.0 + jump.left.norm()) ||
        (bridge.value(bridge.horizon()) - jump.right).norm() > 1e-9 * (1.0 + jump.right.norm()))
      throw PreconditionError("complete_graph: bridge endpoints do not match the jump");
    const double length = bridge.total_variation();

    // Fractions of arc length where the fiber needs a node: bridge knots and
    // switching points of the fiber control.
    const auto& cum = bridge.cumulative_variation();
    std::vector<double> fractions;
    for (double c : cum) fractions.push_back(c / length);
    if (spec.psi2) {
      if (spec.psi2->start() != 0.0 || spec.psi2->end() != 1.0 || spec.psi2->dimension() != v.dimension())
        throw PreconditionError("complete_graph: fiber control must be a step function on [0,1] with values in V");
      for (double f : spec.psi2->grid()) fractions.push_back(f);
    }
    std::sort(fractions.begin(), fractions.end());
    fractions.erase(std::unique(fractions.begin(), fractions.end()), fractions.end());

    // Point on the bridge at an arc-length fraction.
    const auto& bt = bridge.knot_times();
    const auto bridge_at = [&](double f) -> Vec {
      const double target = f * length;
      const auto it = std::lower_bound(cum.begin(), cum.end(), target);
      const auto i = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(it - cum.begin(), 1,
                                                                         static_cast<std::ptrdiff_t>(cum.size()) - 1));
      const double seg = cum[i] - cum[i - 1];
      const double w = seg > 0.0 ? (target - cum[i - 1]) / seg : 1.0;
      return bridge.value(bt[i - 1] + w * (bt[i] - bt[i - 1]));
    };

    const double s_left = s;
    const Vec p1 = v.v1(b);
    const Vec frozen = v.v2(b);
    for (std::size_t q = 1; q < fractions.size(); ++q) {
      const double f0 = fractions[q - 1];
      const double f1 = fractions[q];
      const double s_next = s_left + f1 * length;
      if (!(s_next > nodes.s.back())) continue;
      Vec p2 = spec.psi2 ? spec.psi2->value(0.5 * (f0 + f1)) : frozen;
      Vec point = q + 1 == fractions.size() ? jump.right : bridge_at(f1);
      nodes.push(s_next, b, std::move(point), p1, std::move(p2), length);
    }
    s = nodes.s.back();
    knots.push_back({b, s_left, s});
  }
  knots.back().t = T;

  // Refinement: uniform subdivision to cells of length <= S / min_cells and at
  // least min_fiber_cells per fiber.
  const double S = nodes.s.back();
  const double h_max = S / static_cast<double>(options.min_cells);
  const std::size_t cell_count = nodes.s.size() - 1;
  std::vector<double> s_out{0.0}, t_out{0.0};
  std::vector<Vec> phi_out{nodes.phi.front()};
  std::vector<std::size_t> source_cell;
  for (std::size_t i = 0; i < cell_count; ++i) {
    const double len = nodes.s[i + 1] - nodes.s[i];
    double cap = h_max;
    if (nodes.fiber_length[i] > 0.0)
      cap = std::min(cap, nodes.fiber_length[i] / static_cast<double>(options.min_fiber_cells));
    const auto pieces = static_cast<std::size_t>(std::max(1.0, std::ceil(len / cap - 1e-9)));
    for (std::size_t p = 1; p <= pieces; ++p) {
      const double w = static_cast<double>(p) / static_cast<double>(pieces);
      if (p == pieces) {
        s_out.push_back(nodes.s[i + 1]);
        t_out.push_back(nodes.t[i + 1]);
        phi_out.push_back(nodes.phi[i + 1]);
      } else {
        s_out.push_back(nodes.s[i] + w * len);
        t_out.push_back(nodes.t[i] + w * (nodes.t[i + 1] - nodes.t[i]));
        phi_out.push_back((1.0 - w) * nodes.phi[i] + w * nodes.phi[i + 1]);
      }
      source_cell.push_back(i);
    }
  }
  t_out.back() = T;

  const auto n_nodes = static_cast<Eigen::Index>(s_out.size());
  const Eigen::Index l = v.dimension();
  Mat phi(u.dimension(), n_nodes), psi1(l, n_nodes - 1), psi2(l, n_nodes - 1);
  for (Eigen::Index i = 0; i < n_nodes; ++i) phi.col(i) = phi_out[static_cast<std::size_t>(i)];
  for (Eigen::Index i = 0; i + 1 < n_nodes; ++i) {
    const std::size_t src = source_cell[static_cast<std::size_t>(i)];
    psi1.col(i) = nodes.psi1[src];
    psi2.col(i) = nodes.psi2[src];
  }
  return {SpaceTimeControl(std::move(s_out), std::move(t_out), std::move(phi), std::move(psi1), std::move(psi2)),
          Clock(std::move(knots))};
}

NormalizedControl normalize_feasible(const SpaceTimeControl& control) {
  const auto& nodes = control.nodes();
  const auto& phi0 = control.phi0();
  const Mat& phi = control.phi();
  const std::size_t cells = control.cells();

  std::vector<double> eta_values{0.0};
  std::vector<double> lengths(cells);
  for (std::size_t i = 0; i < cells; ++i) {
    const auto a = static_cast<Eigen::Index>(i);
    lengths[i] = (phi0[i + 1] - phi0[i]) + (phi.col(a + 1) - phi.col(a)).norm();
    eta_values.push_back(eta_values.back() + lengths[i]);
  }
  const double total = eta_values.back();
  if (!(total > 0.0)) throw PreconditionError("normalize_feasible: η(S) = 0, nothing to parametrize");

  const double dead = 1e-13 * std::max(1.0, control.horizon());
  std::vector<double> r{0.0}, t{0.0};
  std::vector<Eigen::Index> kept_nodes{0};
  std::vector<Eigen::Index> kept_cells;
  for (std::size_t i = 0; i < cells; ++i) {
    if (lengths[i] <= dead) continue;
    r.push_back(r.back() + lengths[i]);
    t.push_back(phi0[i + 1]);
    kept_nodes.push_back(static_cast<Eigen::Index>(i + 1));
    kept_cells.push_back(static_cast<Eigen::Index>(i));
  }
  const auto n = static_cast<Eigen::Index>(kept_nodes.size());
  Mat new_phi(phi.rows(), n), psi1(control.psi1().rows(), n - 1), psi2(control.psi2().rows(), n - 1);
  for (Eigen::Index i = 0; i < n; ++i) new_phi.col(i) = phi.col(kept_nodes[static_cast<std::size_t>(i)]);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    psi1.col(i) = control.psi1().col(kept_cells[static_cast<std::size_t>(i)]);
    psi2.col(i) = control.psi2().col(kept_cells[static_cast<std::size_t>(i)]);
  }
  return {SpaceTimeControl(std::move(r), std::move(t), std::move(new_phi), std::move(psi1), std::move(psi2)),
          PiecewiseLinearMap(nodes, std::move(eta_values))};
}

SpaceTimeControl reparametrize_control(const SpaceTimeControl& control, const PiecewiseLinearMap& theta) {
  const double S = control.horizon();
  if (theta.xs().front() != 0.0 || theta.ys().front() != 0.0 ||
      std::abs(theta.range_end() - S) > 1e-12 * std::max(1.0, S))
    throw PreconditionError("reparametrize_control: θ must map [0,R] onto [0,S]");
  for (double slope : theta.slopes())
    if (slope > 1.0 + 1e-12) throw PreconditionError("reparametrize_control: θ' must be <= 1");

  std::vector<double> rs(theta.xs());
  for (double s : control.nodes()) rs.push_back(theta.inverse(std::min(s, theta.range_end())));
  std::sort(rs.begin(), rs.end());
  const double snap = 1e-13 * std::max(1.0, theta.domain_end());
  std::vector<double> nodes{0.0};
  for (double r : rs)
    if (r - nodes.back() > snap) nodes.push_back(r);
  nodes.back() = theta.domain_end();

  const auto n = static_cast<Eigen::Index>(nodes.size());
  std::vector<double> phi0(nodes.size());
  Mat phi(control.channels(), n), psi1(control.ordinary_dim(), n - 1), psi2(control.ordinary_dim(), n - 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double s = std::min(theta(nodes[static_cast<std::size_t>(i)]), S);
    phi0[static_cast<std::size_t>(i)] = control.phi0_at(s);
    phi.col(i) = control.phi_at(s);
  }
  phi0.front() = 0.0;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double mid = 0.5 * (nodes[static_cast<std::size_t>(i)] + nodes[static_cast<std::size_t>(i) + 1]);
    const auto c = static_cast<Eigen::Index>(control.cell_at(std::min(theta(mid), S)));
    psi1.col(i) = control.psi1().col(c);
    psi2.col(i) = control.psi2().col(c);
  }
  return SpaceTimeControl(std::move(nodes), std::move(phi0), std::move(phi), std::move(psi1), std::move(psi2));
}

Clock reparametrize_clock(const Clock& clock, const PiecewiseLinearMap& eta) {
  std::vector<ClockKnot> knots;
  knots.reserve(clock.knots().size());
  for (const auto& k : clock.knots()) knots.push_back({k.t, eta(k.s_left), eta(k.s)});
  knots.front().s_left = 0.0;
  knots.front().s = 0.0;
  return Clock(std::move(knots), clock.policy());
}

}  // namespace impulse
