#pragma once

#include <utility>
#include <vector>

#include "impulse/bv_controls.hpp"

namespace impulse {

/// Nondecreasing piecewise-linear map through (xs[i], ys[i]).
class PiecewiseLinearMap {
 public:
  PiecewiseLinearMap() = default;
  PiecewiseLinearMap(std::vector<double> xs, std::vector<double> ys);

  double operator()(double x) const;
  /// Smallest x with map(x) = y. Requires y in [ys.front(), ys.back()].
  double inverse(double y) const;
  /// Slope on each cell (size knots - 1).
  std::vector<double> slopes() const;
  bool strictly_increasing() const;

  const std::vector<double>& xs() const { return xs_; }
  const std::vector<double>& ys() const { return ys_; }
  double domain_end() const { return xs_.back(); }
  double range_end() const { return ys_.back(); }

 private:
  std::vector<double> xs_, ys_;
};

/// Space-time control (φ0, φ, ψ1, ψ2) on [0,S]: φ0 and φ piecewise linear
/// through the nodes, ψ1 and ψ2 constant on each node cell.
///
/// Invariants: φ0(0)=0, φ0 nondecreasing, φ0' + |φ'| <= 1 on every cell.
/// The control is feasible when every cell has φ0' + |φ'| = 1 within 1e-8.
class SpaceTimeControl {
 public:
  SpaceTimeControl(std::vector<double> nodes, std::vector<double> phi0, Mat phi, Mat psi1, Mat psi2);

  double horizon() const { return nodes_.back(); }
  double time_horizon() const { return phi0_.back(); }
  std::size_t cells() const { return nodes_.size() - 1; }
  int channels() const { return static_cast<int>(phi_.rows()); }
  int ordinary_dim() const { return static_cast<int>(psi1_.rows()); }

  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& phi0() const { return phi0_; }
  const Mat& phi() const { return phi_; }
  const Mat& psi1() const { return psi1_; }
  const Mat& psi2() const { return psi2_; }

  double phi0_at(double s) const;
  Vec phi_at(double s) const;
  std::size_t cell_at(double s) const;

  /// (Δφ0 + |Δφ|) / Δs on cell i.
  double cell_speed(std::size_t i) const;
  double max_speed_deviation() const;
  bool feasible() const { return feasible_; }

  /// Var_[0,S](φ), exact on the polyline.
  double phi_variation() const;
  /// ψ2 as a step function on [0,S].
  StepFunction psi2_function() const { return StepFunction(nodes_, psi2_); }
  StepFunction psi1_function() const { return StepFunction(nodes_, psi1_); }

 private:
  std::vector<double> nodes_;
  std::vector<double> phi0_;
  Mat phi_;
  Mat psi1_, psi2_;
  bool feasible_ = false;
};

enum class JumpSelection { RightEnd };

struct ClockKnot {
  double t = 0.0;
  double s_left = 0.0;  // σ(t-)
  double s = 0.0;       // σ(t)
};

/// Strictly increasing t ↦ s, linear between knots. At a jump time the left
/// limit and the value differ by the fiber width; the value is the right end
/// of the fiber.
class Clock {
 public:
  Clock() = default;
  explicit Clock(std::vector<ClockKnot> knots, JumpSelection policy = JumpSelection::RightEnd);

  double operator()(double t) const;
  double left_limit(double t) const;
  double time_horizon() const { return knots_.back().t; }
  double parameter_horizon() const { return knots_.back().s; }
  const std::vector<ClockKnot>& knots() const { return knots_; }
  JumpSelection policy() const { return policy_; }

  /// Knots with s_left < s.
  std::vector<ClockKnot> fibers() const;
  /// Sorted (t, s) pairs; a jump contributes (t̄, σ(t̄-)) then (t̄, σ(t̄)).
  std::vector<std::pair<double, double>> pairs() const;
  static Clock from_pairs(const std::vector<std::pair<double, double>>& pairs);

 private:
  std::vector<ClockKnot> knots_;
  JumpSelection policy_ = JumpSelection::RightEnd;
};

/// σ(t); throws DomainError for t outside [0,T].
double evaluate_clock(const Clock& clock, double t);

/// State path ξ sampled at the nodes of a space-time control; `times` holds
/// φ0 at the same nodes.
struct ParamPath {
  std::vector<double> nodes;
  std::vector<double> times;
  Mat states;

  double horizon() const { return nodes.back(); }
  Vec interpolate(double s) const;
};

}  // namespace impulse
