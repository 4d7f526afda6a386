#pragma once

#include <span>
#include <vector>

#include "impulse/graph_completion.hpp"
#include "impulse/ode_engine.hpp"

namespace impulse {

/// Piecewise-linear σ_k with σ_k(0)=0, σ_k(T)=S, slope >= 1 and
/// σ_k → σ pointwise. Each fiber skip of width w at t̄ becomes a linear ramp
/// on [t̄-δ, t̄] with δ = min(w/(2k), half the distance to the previous jump
/// or to 0), ending at σ_k(t̄) = σ(t̄). Away from the ramps σ_k = σ.
PiecewiseLinearMap build_sigma_k(const Clock& clock, int k);

struct ApproxRecord {
  int k = 0;
  double var_uk = 0.0;    // Var_[0,T](u_k)
  double sup_dist = 0.0;  // max over the grid of |x_k - x|
  double l1_u = 0.0;      // ‖u_k - u‖_L¹
  double l1_v = 0.0;      // ‖v_k - v‖_L¹
  double psi2_gap = 0.0;  // check_psi2_condition for v2_k
  double gronwall_lhs = 0.0;
  double gronwall_rhs = 0.0;
  bool gronwall_holds = false;  // lhs <= rhs + slack
};

struct ApproxMember {
  ControlPath u;
  OrdinaryControl v;
  Trajectory x;
  PiecewiseLinearMap sigma;
};

struct ApproxSequence {
  Trajectory target;  // graph-completion solution ξ∘σ on the grid
  std::vector<ApproxMember> members;
  std::vector<ApproxRecord> report;
};

/// u_k = φ∘σ_k, v_k = ψ∘σ_k, x_k their Carathéodory solution; report rows
/// compare against ξ∘σ and against (u, v). ks must be strictly increasing.
/// Each k runs independently.
ApproxSequence approximate_sequence(const VectorFieldSet& F, const Vec& x0, const GraphCompletion& completion,
                                    const ControlPath& u, const OrdinaryControl& v, std::span<const int> ks,
                                    std::span<const double> grid, const IntegratorConfig& cfg = {},
                                    Execution exec = Execution::Parallel);

/// u_k = φ∘σ_k as a polyline; exact since σ_k and φ are piecewise linear.
ControlPath compose_control(const SpaceTimeControl& stc, const PiecewiseLinearMap& sigma_k);
/// (ψ1, ψ2)∘σ_k as a step function pair.
OrdinaryControl compose_ordinary(const SpaceTimeControl& stc, const PiecewiseLinearMap& sigma_k);

/// ‖(v2_k∘σ_k⁻¹ - ψ2) χ_[0,T+V_k]‖_L¹, exact: v2_k∘σ_k⁻¹ is the step function
/// on the mapped grid σ_k(t_i). Both maps count as 0 outside their grids.
double check_psi2_condition(const StepFunction& v2_k, const PiecewiseLinearMap& sigma_k,
                            const StepFunction& psi2, double V_k);

struct GronwallCheck {
  double lhs = 0.0;  // sup over the grid of |x̂_k - x_k|
  double rhs = 0.0;  // ∫ω(|v1_k - v1|) · exp((m+1) L (T + Var u_k)); inf on overflow
  double slack = 0.0;
  bool holds = false;  // lhs <= rhs + slack
};

/// Compares x̂_k = x[u_k, v] with x_k = x[u_k, v_k]. Only the drift control
/// may differ: v2 of v_k and v must agree.
GronwallCheck gronwall_bound(const VectorFieldSet& F, const Vec& x0, const ControlPath& u_k,
                             const OrdinaryControl& v_k, const OrdinaryControl& v, std::span<const double> grid,
                             const IntegratorConfig& cfg = {});

/// u_k on [0,τ] followed by whitney_bridge(u_k(τ), u_T) rescaled to [τ,T].
ControlPath whitney_tail_fix(const ControlPath& u_k, double tau, const Vec& u_T, const ControlSet& U);

struct EquiuniformityEntry {
  std::size_t j = 0;  // threshold index
  std::size_t k = 0;  // sequence index
  bool reached = false;
  double tau = 0.0;
  double dev_x = 0.0;  // |x_k(τ) - x_k(T)|
  double dev_u = 0.0;  // |u_k(τ) - u_k(T)|
  double dev = 0.0;    // |(dev_x, dev_u)|
};

/// For each threshold s̃_j and member k, τ with τ + Var_[0,τ](u_k) = s̃_j and
/// the deviations there. Diagnostic only.
std::vector<EquiuniformityEntry> check_equiuniformity(const std::vector<Trajectory>& xs,
                                                      const std::vector<ControlPath>& us,
                                                      std::span<const double> thresholds);

}  // namespace impulse
