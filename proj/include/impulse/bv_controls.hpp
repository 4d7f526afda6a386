#pragma once

#include <span>
#include <variant>
#include <vector>

#include "impulse/core_types.hpp"

namespace impulse {

/// Sampled absolutely continuous stretch: u is the polyline through
/// (times[i], values.col(i)). At least two samples, times strictly increasing.
struct AcSegment {
  std::vector<double> times;
  Mat values;
};

/// Jump at `time` from the left limit to the right value.
struct Jump {
  double time = 0.0;
  Vec left;
  Vec right;
};

using Piece = std::variant<AcSegment, Jump>;

/// Bounded-variation control u on [0,T] with finitely many jumps.
///
/// Internally the path is a flat knot list: a polyline in t where a jump at
/// t̄ appears as two consecutive knots with the same time (left value, then
/// right value). Evaluation is right-continuous, so u(t̄) = u(t̄+).
class ControlPath {
 public:
  /// Builds from pieces tiling [0,T]. The first piece is an AC segment
  /// starting at 0; jumps sit at the end of an AC segment and must match its
  /// last value; an AC segment following a jump starts at its right value.
  ControlPath(double horizon, const std::vector<Piece>& pieces);

  /// Single AC segment.
  static ControlPath polyline(std::vector<double> times, Mat values);
  static ControlPath constant(double horizon, const Vec& value);

  double horizon() const { return knot_t_.back(); }
  int dimension() const { return static_cast<int>(knot_u_.rows()); }
  Vec initial_value() const { return knot_u_.col(0); }

  Vec value(double t) const;
  Vec left_limit(double t) const;
  bool absolutely_continuous() const { return jump_count_ == 0; }
  std::size_t jump_count() const { return jump_count_; }
  std::vector<Jump> jumps() const;
  std::vector<Piece> pieces() const;

  /// Var_[0,t](u): polyline length up to t plus jumps at times <= t.
  double variation(double t) const;
  double total_variation() const { return cum_var_.back(); }

  /// Distinct knot times in increasing order.
  std::vector<double> breakpoints() const;

  // Flat knot access; see the class comment.
  const std::vector<double>& knot_times() const { return knot_t_; }
  const Mat& knot_values() const { return knot_u_; }
  const std::vector<double>& cumulative_variation() const { return cum_var_; }

  /// The path restricted to [0, t_end] (t_end > 0), as a path on [0, t_end].
  ControlPath truncated(double t_end) const;

  /// Largest distance of a knot value from U; 0 iff every sample lies in U.
  double distance_from(const ControlSet& U) const;

 private:
  ControlPath() = default;
  void finish();

  std::vector<double> knot_t_;
  Mat knot_u_;
  std::vector<double> cum_var_;
  std::size_t jump_count_ = 0;
};

/// Var_[0,t](u); throws DomainError outside [0,T].
double variation(const ControlPath& u, double t);

/// Right-continuous piecewise-constant map on a grid g_0 < ... < g_N; column
/// i of `values` holds the value on [g_i, g_{i+1}). At g_N the last value.
class StepFunction {
 public:
  StepFunction() = default;
  StepFunction(std::vector<double> grid, Mat values);
  static StepFunction constant(double start, double end, const Vec& value);

  double start() const { return grid_.front(); }
  double end() const { return grid_.back(); }
  int dimension() const { return static_cast<int>(values_.rows()); }
  std::size_t cells() const { return static_cast<std::size_t>(values_.cols()); }
  const std::vector<double>& grid() const { return grid_; }
  const Mat& values() const { return values_; }
  bool empty() const { return grid_.empty(); }

  std::size_t cell_at(double t) const;
  Vec value(double t) const { return values_.col(static_cast<Eigen::Index>(cell_at(t))); }

  /// ∫_a^b |f - g| with both maps taken as 0 outside their grids.
  double l1_distance(const StepFunction& other, double a, double b) const;
  /// ∫ |f| over the grid.
  double l1_norm() const;

 private:
  std::vector<double> grid_;
  Mat values_;
};

/// L¹ control v = (v1, v2) on [0,T], piecewise constant on a shared grid.
/// When no v2 is supplied it is stored as zero with the dimension of v1.
class OrdinaryControl {
 public:
  OrdinaryControl(std::vector<double> grid, Mat v1, Mat v2 = Mat());
  static OrdinaryControl constant(double horizon, const Vec& v1);
  static OrdinaryControl constant(double horizon, const Vec& v1, const Vec& v2);

  double horizon() const { return v1_.end(); }
  int dimension() const { return v1_.dimension(); }
  bool has_v2() const { return has_v2_; }
  const std::vector<double>& grid() const { return v1_.grid(); }
  const StepFunction& first() const { return v1_; }
  const StepFunction& second() const { return v2_; }

  Vec v1(double t) const { return v1_.value(t); }
  Vec v2(double t) const { return v2_.value(t); }

  /// ‖(v1,v2) - (w1,w2)‖_L¹ with the Euclidean norm of the stacked pair.
  double l1_distance(const OrdinaryControl& other) const;

  /// Largest distance of a value from V.
  double distance_from(const ControlSet& V) const;

 private:
  StepFunction v1_, v2_;
  bool has_v2_ = false;
};

/// Union of the grids of two step functions restricted to [a, b], sorted.
std::vector<double> merged_grid(std::span<const double> a, std::span<const double> b,
                                double lo, double hi);

/// max_i |a(t_i) - b(t_i)| on the given grid; both trajectories must carry
/// exactly that grid.
double sup_distance(const Trajectory& a, const Trajectory& b, std::span<const double> grid,
                    Execution exec = Execution::Parallel);

/// ∫_0^T |u(t) - w(t)| dt for two paths on the same horizon, exact on the
/// merged knot cells.
double l1_distance(const ControlPath& u, const ControlPath& w);

}  // namespace impulse
