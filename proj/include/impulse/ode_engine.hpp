#pragma once

#include <span>

#include "impulse/space_time.hpp"

namespace impulse {

enum class Method { RK4 };

struct IntegratorConfig {
  Method method = Method::RK4;
  std::size_t steps_per_unit = 2048;  // per unit of t (or s)
  double tolerance = 1e-8;            // absolute, for self-convergence checks

  void validate() const;
};

/// State norm beyond which the integrators throw DivergenceError.
inline constexpr double kDivergenceGuard = 1e12;

/// Carathéodory solution of ẋ = g0(x,u,v1) + Σ gi(x,u,v2) u̇i for AC u.
/// Steps are aligned with the knots of u, the grid of v and `grid`; each
/// interval takes max(1, ceil(length * steps_per_unit)) RK4 steps. `grid`
/// must start at 0 and end at T. Throws PreconditionError when u jumps.
Trajectory solve_caratheodory(const VectorFieldSet& F, const Vec& x0, const ControlPath& u,
                              const OrdinaryControl& v, const IntegratorConfig& cfg,
                              std::span<const double> grid);

/// ξ' = g0(ξ,φ,ψ1) φ0' + Σ gi(ξ,φ,ψ2) φi' on [0,S], sampled at the nodes.
ParamPath solve_spacetime(const VectorFieldSet& F, const Vec& x0, const SpaceTimeControl& stc,
                          const IntegratorConfig& cfg);

/// x(t) = ξ(σ(t)) on `grid`, with a jump record (ξ(σ(t̄-)), ξ(σ(t̄))) for
/// every fiber of the clock. Throws DomainError when σ(T) exceeds the domain
/// of ξ.
Trajectory reconstruct_solution(const ParamPath& xi, const Clock& clock, std::span<const double> grid);

struct ConvergenceEstimate {
  double order = 0.0;  // log2(e1 / e2)
  double error = 0.0;  // Richardson estimate of the error at the finest step
  double e1 = 0.0;     // |x_h - x_{h/2}|
  double e2 = 0.0;     // |x_{h/2} - x_{h/4}|
};

/// Solves at h = 1/steps_per_unit, h/2 and h/4 and compares on `grid`.
ConvergenceEstimate self_convergence_check(const VectorFieldSet& F, const Vec& x0,
                                           const ControlPath& u, const OrdinaryControl& v,
                                           const IntegratorConfig& cfg, std::span<const double> grid);

}  // namespace impulse
