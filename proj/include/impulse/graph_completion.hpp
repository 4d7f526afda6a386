#pragma once

#include <optional>
#include <vector>

#include "impulse/space_time.hpp"

namespace impulse {

/// AC path on [0,1] inside U joining u1 to u2 with Var <= C |u1 - u2|.
/// Straight segment when both points share a convex part of U, otherwise
/// the two legs through the star center.
ControlPath whitney_bridge(const Vec& u1, const Vec& u2, const ControlSet& U);

/// Axis-aligned path from u1 to u2 changing one coordinate at a time in index
/// order; in two dimensions the corner is (u2[0], u1[1]).
ControlPath staircase_bridge(const Vec& u1, const Vec& u2, const ControlSet& U);

/// Per-jump overrides, in jump order. An empty bridge uses whitney_bridge; an
/// empty fiber control freezes ψ2 at v2(t̄). The fiber control is a step
/// function on [0,1], indexed by the arc-length fraction of the bridge.
struct FiberSpec {
  std::optional<ControlPath> bridge;
  std::optional<StepFunction> psi2;
};

struct CompletionOptions {
  std::size_t min_cells = 4096;      // cells of length <= S / min_cells
  std::size_t min_fiber_cells = 64;  // per jump fiber
  std::vector<double> sample_times;  // times whose σ(t) must be a node
};

struct GraphCompletion {
  SpaceTimeControl control;
  Clock clock;
};

/// Feasible graph completion of (u, v): arc-length parametrization on AC
/// stretches and a unit-speed bridge on a fiber at each jump, with the clock
/// selecting the right end of each fiber.
GraphCompletion complete_graph(const ControlPath& u, const OrdinaryControl& v, const ControlSet& U,
                               const std::vector<FiberSpec>& fibers = {},
                               const CompletionOptions& options = {});

struct NormalizedControl {
  SpaceTimeControl control;
  PiecewiseLinearMap eta;  // s ↦ ∫_0^s (φ0' + |φ'|)
};

/// Reparametrizes to unit speed through η and its right inverse; cells where
/// φ0' + |φ'| vanishes are excised.
NormalizedControl normalize_feasible(const SpaceTimeControl& control);

/// (φ0, φ, ψ) ∘ θ for a nondecreasing piecewise-linear θ from [0,R] onto
/// [0,S] with slope <= 1; the nodes are the knots of θ and θ⁻¹ of the old
/// nodes. The result has speed θ' and the same solution path reparametrized.
SpaceTimeControl reparametrize_control(const SpaceTimeControl& control, const PiecewiseLinearMap& theta);

/// σ̃ = η ∘ σ.
Clock reparametrize_clock(const Clock& clock, const PiecewiseLinearMap& eta);

}  // namespace impulse
