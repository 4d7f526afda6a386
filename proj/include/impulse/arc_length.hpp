#pragma once

#include "impulse/space_time.hpp"

namespace impulse {

/// Arc-length graph parametrization (ξ, φ0, φ, ψ, S) of an AC trajectory-control
/// triple: σ(t) = t + Var_[0,t](u), φ0 = σ⁻¹, (φ, ψ, ξ) = (u, v, x) ∘ φ0.
struct ArcLengthGraph {
  SpaceTimeControl control;
  Clock clock;
  ParamPath xi;
};

/// Throws PreconditionError when u has a jump. The nodes are the knots of u,
/// the grid of v and the grid of x, mapped through σ.
ArcLengthGraph arc_length_param(const ControlPath& u, const OrdinaryControl& v, const Trajectory& x);

}  // namespace impulse
