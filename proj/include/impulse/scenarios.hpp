#pragma once

#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "impulse/graph_completion.hpp"

namespace impulse {

enum class CostKind { None, Bolza, Mayer };

/// A named system with its data, cost and acceptance settings. Jump
/// scenarios also carry their BV control and per-jump fiber overrides.
struct Scenario {
  std::string id;
  std::string description;
  bool synthetic = false;  // built for this library rather than taken from the literature
  VectorFieldSet fields;
  Vec x0, u0;
  double horizon = 0.0;
  ControlSet U, V;
  CostKind cost = CostKind::None;
  std::string endpoint_constraint;  // empty when unconstrained
  double tolerance = 0.0;
  std::vector<int> ks;                 // integrated sweep
  std::vector<double> closed_form_ks;  // evaluated through closed forms only
  std::optional<ControlPath> u;
  std::optional<OrdinaryControl> v;
  std::vector<FiberSpec> fibers;
  std::optional<Vec> expected_endpoint;
};

/// Example 2.1 fields: g0 = η(x)(0,0,0,v1), g1 = η(x)(1,0,x3x2,-x4x2),
/// g2 = η(x)(0,1,-x3x1,x4x1) with the radial cut-off η of radius 10. With
/// `with_cost_state` a fifth component x5' = |v1| + |u| is appended.
VectorFieldSet example21_fields(bool with_cost_state = false);

/// (u_k, v_k): u_k = k^{-1/3}(cos kt - 1, sin kt) on [2π/k, 2π], 0 before;
/// v_k = k e^{-2π∛k} on [0, 2π/k), 0 after. u_k is sampled
/// `samples_per_period` times per oscillation.
std::pair<ControlPath, OrdinaryControl> example21_controls(int k, int samples_per_period = 4096);

/// Closed-form x_k(t) of Example 2.1 (four components).
Vec example21_closed_form(double k, double t);
Trajectory example21_closed_form_trajectory(double k, const std::vector<double>& grid);

struct BolzaTerms {
  double running_u = 0.0;  // ∫|u|
  double running_v = 0.0;  // ∫|v|
  double endpoint = 0.0;   // (2π - x4(2π))²
  double total() const { return running_u + running_v + endpoint; }
};

/// J(x_k, u_k, v_k) from the closed forms; valid for any k >= 1.
BolzaTerms example21_bolza_closed_form(double k);

/// J(x,u,v) = ∫(|u|+|v1|) + (2π - x4(T))². ∫|u| by the trapezoid rule on the
/// trajectory grid; ∫|v1| exactly (v is piecewise constant).
BolzaTerms cost_bolza(const Trajectory& x, const ControlPath& u, const OrdinaryControl& v);

struct MayerCost {
  double psi = 0.0;        // |x3| + |2π - x4| at T
  double x5_residual = 0.0;  // |x5(T)|, the endpoint constraint violation
};

/// Ψ(x(T)) for a five-dimensional trajectory.
MayerCost cost_mayer(const Trajectory& x);

/// x̃3(2π) for the fixed-v sequence (u_k, 0) of Example 2.2: e^{-∛k(2π - 2π/k)}.
double example22_limit_x3(double k);

/// Random AC control on [0,T] inside the unit disc that converges to 0
/// pointwise as k grows: a k^{-1/3}-scaled random trigonometric curve.
ControlPath random_fixed_v_control(std::mt19937_64& rng, int k, double horizon, int samples = 2048);

std::vector<Scenario> builtin_scenarios();
/// Throws PreconditionError for an unknown id.
Scenario find_scenario(const std::string& id);

}  // namespace impulse
