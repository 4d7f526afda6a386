#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "impulse/cli.hpp"

namespace impulse {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

class Checks {
 public:
  explicit Checks(RunResult& r) : r_(r) {}
  bool add(std::string name, bool ok, std::string detail) {
    r_.checks.push_back({std::move(name), ok, std::move(detail)});
    return ok;
  }

 private:
  RunResult& r_;
};

IntegratorConfig config_for(const RunManifest& m) {
  IntegratorConfig cfg;
  if (m.steps) cfg.steps_per_unit = *m.steps;
  cfg.validate();
  return cfg;
}

std::vector<int> sweep_for(const Scenario& sc, const RunManifest& m) { return m.ks.empty() ? sc.ks : m.ks; }

Vec last_state(const Trajectory& x) { return x.state(x.size() - 1); }

bool nonincreasing(const std::vector<double>& values, double slack) {
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > (1.0 + slack) * values[i - 1] + 1e-12) return false;
  return true;
}

std::string list(const std::vector<double>& values) {
  std::string out;
  for (double v : values) out += (out.empty() ? "" : ", ") + sci(v);
  return "[" + out + "]";
}

// x(0) = x0, zero on (0,T), (0,0,0,2π[,0]) at T: the extended limit solution.
Trajectory extended_limit_solution(const Vec& x0, const std::vector<double>& grid) {
  Trajectory x;
  x.times = grid;
  x.states = Mat::Zero(x0.size(), static_cast<Eigen::Index>(grid.size()));
  x.states.col(0) = x0;
  x.states(3, x.states.cols() - 1) = kTwoPi;
  return x;
}

Table gap_table(double regular, double limit, double extended) {
  Table t;
  t.columns = {"class", "cost"};
  t.rows = {{std::string("regular"), regular}, {std::string("limit"), limit}, {std::string("extended"), extended}};
  return t;
}

void run_example21(const Scenario& sc, const RunManifest& m, RunResult& r) {
  Checks checks(r);
  const auto ks = sweep_for(sc, m);
  const auto cfg = config_for(m);
  const auto grid = uniform_grid(sc.horizon, 10000);

  struct Row {
    double err = 0.0, J = 0.0, max_norm = 0.0;
    Trajectory x;
  };
  std::vector<Row> rows(ks.size());
  for_each_index(ks.size(), Execution::Parallel, [&](std::size_t i) {
    const auto [u, v] = example21_controls(ks[i]);
    Row& row = rows[i];
    row.x = solve_caratheodory(sc.fields, sc.x0, u, v, cfg, grid);
    row.err = sup_distance(row.x, example21_closed_form_trajectory(ks[i], grid), grid, Execution::Serial);
    row.J = cost_bolza(row.x, u, v).total();
    row.max_norm = row.x.states.colwise().norm().maxCoeff();
  });
  Table sweep;
  sweep.columns = {"k", "J_closed_form", "J_ode", "sup_err"};
  for (std::size_t i = 0; i < ks.size(); ++i) {
    checks.add("closed form k=" + std::to_string(ks[i]), rows[i].err < sc.tolerance,
               "sup error " + sci(rows[i].err) + " vs tolerance " + sci(sc.tolerance));
    checks.add("cut-off inactive k=" + std::to_string(ks[i]), rows[i].max_norm < 10.0,
               "max |x| = " + sci(rows[i].max_norm));
    r.files.push_back(write_table(trajectory_table(rows[i].x), m.out, "traj_k" + std::to_string(ks[i]), m.format));
    sweep.rows.push_back({static_cast<double>(ks[i]), example21_bolza_closed_form(ks[i]).total(), rows[i].J, rows[i].err});
  }
  std::vector<double> trend;
  for (double k : sc.closed_form_ks) {
    trend.push_back(example21_bolza_closed_form(k).total());
    sweep.rows.push_back({k, trend.back(), std::string(), std::string()});
  }
  r.files.push_back(write_table(sweep, m.out, "j_sweep", m.format));
  if (!trend.empty())
    checks.add("Bolza closed-form trend", nonincreasing(trend, 0.0) && trend.back() < 0.1,
               "J over " + list(sc.closed_form_ks) + " = " + list(trend));

  // Regular solution with (u,v) = (0,0).
  const ControlPath zero_u = ControlPath::constant(sc.horizon, sc.u0);
  const OrdinaryControl zero_v = OrdinaryControl::constant(sc.horizon, Vec::Zero(1));
  const Trajectory regular = solve_caratheodory(sc.fields, sc.x0, zero_u, zero_v, cfg, grid);
  const double J_regular = cost_bolza(regular, zero_u, zero_v).total();
  checks.add("regular cost 4π²", std::abs(J_regular - 4.0 * std::numbers::pi * std::numbers::pi) <= 1e-9,
             "J = " + sci(J_regular));

  // Fixed v = 0: x̃4 stays identically zero for any AC sequence.
  std::mt19937_64 rng(m.seed);
  std::uniform_int_distribution<int> pick_k(16, 4096);
  const auto coarse = uniform_grid(sc.horizon, 2001);
  double worst_x4 = 0.0, worst_out = 0.0, limit_endpoint = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const ControlPath u_tilde = random_fixed_v_control(rng, pick_k(rng), sc.horizon);
    worst_out = std::max(worst_out, u_tilde.distance_from(sc.U));
    const Trajectory x = solve_caratheodory(sc.fields, sc.x0, u_tilde, zero_v, cfg, coarse);
    worst_x4 = std::max(worst_x4, x.states.row(3).cwiseAbs().maxCoeff());
    limit_endpoint = std::max(limit_endpoint, std::pow(kTwoPi - last_state(x)(3), 2));
  }
  checks.add("fixed-v sequences keep x4 = 0", worst_x4 < 1e-9 && worst_out == 0.0,
             "max |x4| = " + sci(worst_x4) + " over 5 sequences (seed " + std::to_string(m.seed) + ")");

  const Trajectory esls = extended_limit_solution(sc.x0, grid);
  const double J_extended = cost_bolza(esls, zero_u, zero_v).total();
  checks.add("extended limit cost 0", J_extended == 0.0, "J = " + sci(J_extended));
  r.files.push_back(write_table(gap_table(J_regular, limit_endpoint, J_extended), m.out, "gap_table", m.format));
}

void run_example22(const Scenario& sc, const RunManifest& m, RunResult& r) {
  Checks checks(r);
  const auto ks = sweep_for(sc, m);
  const auto cfg = config_for(m);
  const auto grid = uniform_grid(sc.horizon, 10000);
  const OrdinaryControl zero_v = OrdinaryControl::constant(sc.horizon, Vec::Zero(1));

  const ControlPath zero_u = ControlPath::constant(sc.horizon, sc.u0);
  const MayerCost regular = cost_mayer(solve_caratheodory(sc.fields, sc.x0, zero_u, zero_v, cfg, grid));
  checks.add("regular cost 1+2π", std::abs(regular.psi - (1.0 + kTwoPi)) <= sc.tolerance && regular.x5_residual == 0.0,
             "Ψ = " + sci(regular.psi) + ", x5 = " + sci(regular.x5_residual));

  struct Row {
    MayerCost limit, extended;
    double max_x4 = 0.0;
  };
  std::vector<Row> rows(ks.size());
  for_each_index(ks.size(), Execution::Parallel, [&](std::size_t i) {
    const auto [u, v] = example21_controls(ks[i]);
    const Trajectory fixed = solve_caratheodory(sc.fields, sc.x0, u, zero_v, cfg, grid);
    rows[i].limit = cost_mayer(fixed);
    rows[i].max_x4 = fixed.states.row(3).cwiseAbs().maxCoeff();
    rows[i].extended = cost_mayer(solve_caratheodory(sc.fields, sc.x0, u, v, cfg, grid));
  });

  const auto closed_extended = [](double k) {
    const Vec end = example21_closed_form(k, kTwoPi);
    const BolzaTerms J = example21_bolza_closed_form(k);
    return MayerCost{std::abs(end(2)) + std::abs(kTwoPi - end(3)), J.running_u + J.running_v};
  };
  Table sweep;
  sweep.columns = {"k", "source", "psi_limit", "psi_extended", "x5_extended"};
  std::vector<double> x5_trend;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const double k = ks[i];
    const MayerCost cf = closed_extended(k);
    const double psi_limit_cf = example22_limit_x3(k) + kTwoPi;
    checks.add("sequence vs closed form k=" + std::to_string(ks[i]),
               std::abs(rows[i].extended.psi - cf.psi) <= sc.tolerance &&
                   std::abs(rows[i].limit.psi - psi_limit_cf) <= sc.tolerance && rows[i].max_x4 < 1e-9,
               "Ψ_ext " + sci(rows[i].extended.psi) + " vs " + sci(cf.psi) + ", Ψ_lim " + sci(rows[i].limit.psi) +
                   " vs " + sci(psi_limit_cf));
    sweep.rows.push_back({static_cast<double>(ks[i]), std::string("ode"), rows[i].limit.psi, rows[i].extended.psi,
                          rows[i].extended.x5_residual});
    x5_trend.push_back(cf.x5_residual);
  }
  for (double k : sc.closed_form_ks) {
    const MayerCost cf = closed_extended(k);
    sweep.rows.push_back({k, std::string("closed-form"), example22_limit_x3(k) + kTwoPi, cf.psi, cf.x5_residual});
    x5_trend.push_back(cf.x5_residual);
  }
  r.files.push_back(write_table(sweep, m.out, "mayer_sweep", m.format));
  checks.add("extended sequence admissibility", nonincreasing(x5_trend, 0.0) && x5_trend.back() < sc.tolerance,
             "x5(2π) along the sweep " + list(x5_trend));

  const double psi_limit = example22_limit_x3(1e6) + kTwoPi;
  checks.add("limit cost 2π", std::abs(psi_limit - kTwoPi) <= sc.tolerance, "Ψ at k=1e6 = " + sci(psi_limit));

  const MayerCost extended = cost_mayer(extended_limit_solution(sc.x0, grid));
  checks.add("extended limit cost 0", extended.psi == 0.0 && extended.x5_residual == 0.0,
             "Ψ = " + sci(extended.psi));
  r.files.push_back(write_table(gap_table(regular.psi, psi_limit, extended.psi), m.out, "gap_table", m.format));
}

struct JumpSolve {
  GraphCompletion completion;
  ParamPath xi;
  Trajectory x;
};

JumpSolve solve_jump(const Scenario& sc, const std::vector<FiberSpec>& fibers, const std::vector<double>& grid,
                     const IntegratorConfig& cfg) {
  CompletionOptions options;
  options.sample_times = grid;
  GraphCompletion gc = complete_graph(*sc.u, *sc.v, sc.U, fibers, options);
  ParamPath xi = solve_spacetime(sc.fields, sc.x0, gc.control, cfg);
  Trajectory x = reconstruct_solution(xi, gc.clock, grid);
  return {std::move(gc), std::move(xi), std::move(x)};
}

std::vector<FiberSpec> two_leg(const Scenario& sc) {
  std::vector<FiberSpec> out;
  for (const auto& j : sc.u->jumps()) out.push_back({staircase_bridge(j.left, j.right, sc.U), std::nullopt});
  return out;
}

void run_jump(const Scenario& sc, const RunManifest& m, RunResult& r) {
  Checks checks(r);
  const auto ks = sweep_for(sc, m);
  const auto cfg = config_for(m);
  const auto grid = uniform_grid(sc.horizon, 101);

  const JumpSolve main = solve_jump(sc, sc.fibers, grid, cfg);
  const Vec end = last_state(main.x);
  std::string end_text;
  for (Eigen::Index i = 0; i < end.size(); ++i) end_text += (i ? ", " : "") + sci(end(i));
  r.notes.push_back("endpoint x(T) = (" + end_text + ")");
  if (sc.expected_endpoint)
    checks.add("endpoint", (end - *sc.expected_endpoint).norm() <= sc.tolerance, "x(T) = (" + end_text + ")");
  r.files.push_back(write_json(to_json(main.completion.control), m.out / "completion.json"));
  r.files.push_back(write_json(to_json(main.completion.clock), m.out / "clock.json"));
  r.files.push_back(write_table(trajectory_table(main.x), m.out, "traj_limit", m.format));
  r.files.push_back(write_table(param_path_table(main.xi), m.out, "xi", m.format));

  const ApproxSequence seq = approximate_sequence(sc.fields, sc.x0, main.completion, *sc.u, *sc.v, ks, grid, cfg);
  r.files.push_back(write_table(report_table(seq.report), m.out, "report", m.format));
  for (std::size_t i = 0; i < ks.size(); ++i)
    r.files.push_back(write_table(trajectory_table(seq.members[i].x), m.out, "traj_k" + std::to_string(ks[i]), m.format));

  std::vector<double> sup, l1v;
  double var_err = 0.0, psi2 = 0.0;
  bool gronwall = true;
  const double var_phi = main.completion.control.phi_variation();
  for (const auto& rec : seq.report) {
    sup.push_back(rec.sup_dist);
    l1v.push_back(rec.l1_v);
    var_err = std::max(var_err, std::abs(rec.var_uk - var_phi));
    psi2 = std::max(psi2, rec.psi2_gap);
    gronwall = gronwall && rec.gronwall_holds;
  }
  if (!sup.empty()) {
    checks.add("sweep convergence", nonincreasing(sup, 0.1) && sup.back() < sc.tolerance,
               "sup distance over k " + list(sup));
    checks.add("equibounded variation", var_err <= 1e-6, "max |Var u_k - Var φ| = " + sci(var_err));
    checks.add("v L1 convergence", nonincreasing(l1v, 0.1), "‖v_k - v‖ " + list(l1v));
    checks.add("psi2 condition", psi2 < 1e-6, "max discrepancy " + sci(psi2));
    checks.add("Gronwall inequality", gronwall, "lhs <= rhs on every k");
  }

  if (sc.id == "brockett") {
    const double straight = end(2);
    const double leg = last_state(solve_jump(sc, two_leg(sc), grid, cfg).x)(2);
    checks.add("bridge nonuniqueness", std::abs(straight) <= 1e-3 && std::abs(leg - 1.0) <= 1e-3,
               "x3(T) straight " + sci(straight) + ", two-leg " + sci(leg));
  } else if (sc.id == "commutative-pair") {
    const Vec leg = last_state(solve_jump(sc, two_leg(sc), grid, cfg).x);
    checks.add("bridge invariance", (leg - end).norm() <= 4.0 * cfg.tolerance,
               "|x_two-leg(T) - x_straight(T)| = " + sci((leg - end).norm()));
  } else if (sc.id == "brockett-v2-jump") {
    std::vector<FiberSpec> frozen = sc.fibers;
    for (auto& f : frozen) f.psi2 = StepFunction::constant(0.0, 1.0, Vec::Zero(1));
    const double x3_frozen = last_state(solve_jump(sc, frozen, grid, cfg).x)(2);
    checks.add("fiber control changes the jump", std::abs(x3_frozen - 1.75) <= sc.tolerance &&
                                                     std::abs(end(2) - 3.125) <= sc.tolerance,
               "x3(T) with ψ2=0: " + sci(x3_frozen) + ", with ψ2=1: " + sci(end(2)));
  } else if (sc.id == "scalar-jump") {
    double worst = 0.0;
    for (const auto& member : seq.members) worst = std::max(worst, std::abs(last_state(member.x)(0) - 1.0));
    checks.add("approximations reach 1", worst <= 1e-12, "max |x_k(T) - 1| = " + sci(worst));
  }
}

}  // namespace

void RunManifest::validate() const {
  for (std::size_t i = 0; i < ks.size(); ++i)
    if (ks[i] < 1 || (i > 0 && ks[i] <= ks[i - 1])) throw PreconditionError("--ks must be positive and strictly increasing");
  if (steps && *steps < 1) throw PreconditionError("--steps must be >= 1");
}

bool RunResult::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

RunResult cmd_run_scenario(const RunManifest& manifest) {
  manifest.validate();
  const Scenario sc = find_scenario(manifest.scenario);
  RunResult r;
  r.files.push_back(write_json(manifest_json(sc), manifest.out / "manifest.json"));
  if (sc.id == "example-2.1") run_example21(sc, manifest, r);
  else if (sc.id == "example-2.2") run_example22(sc, manifest, r);
  else run_jump(sc, manifest, r);
  return r;
}

}  // namespace impulse
