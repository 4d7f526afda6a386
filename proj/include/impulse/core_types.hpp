#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "impulse/kernels.hpp"

namespace impulse {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Raised when an operation is called outside its documented preconditions.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an argument lies outside the domain of a map (time outside
/// [0,T], parameter outside [0,S], ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised by the integrators when the state norm crosses the overflow guard.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SetShape { Box, Ball, Polytope, StarUnion };

/// Compact control set: a box, a closed ball, a convex polytope {p : A p <= b}
/// or a finite union of those that is star-shaped about a declared center.
///
/// Convex shapes have Whitney constant 1 (straight segments are admissible
/// bridges). For a star union the constant is declared by the caller and
/// bridges between points of different parts are routed through the center.
class ControlSet {
 public:
  /// Placeholder of dimension 0.
  ControlSet() = default;
  static ControlSet box(Vec lower, Vec upper);
  static ControlSet ball(Vec center, double radius);
  /// The description must be bounded; only finiteness of the data is checked.
  static ControlSet polytope(Mat normals, Vec offsets);
  static ControlSet star_union(std::vector<ControlSet> parts, Vec center,
                               double whitney_constant);

  SetShape shape() const { return shape_; }
  int dimension() const { return dim_; }
  bool convex() const { return shape_ != SetShape::StarUnion; }
  double whitney_constant() const { return whitney_; }
  const Vec& star_center() const { return center_; }
  const std::vector<ControlSet>& parts() const { return parts_; }

  bool contains(const Vec& p, double tol = 1e-12) const;
  /// Index of a convex part containing p, or -1. For convex sets returns 0.
  int part_containing(const Vec& p, double tol = 1e-12) const;

  // Shape data, for serialization.
  const Vec& lower() const { return lower_; }
  const Vec& upper() const { return upper_; }
  double radius() const { return radius_; }
  const Mat& normals() const { return normals_; }
  const Vec& offsets() const { return offsets_; }

 private:
  SetShape shape_ = SetShape::Box;
  int dim_ = 0;
  double whitney_ = 1.0;
  Vec lower_, upper_;    // box
  Vec center_;           // ball center or star center
  double radius_ = 0.0;  // ball
  Mat normals_;          // polytope rows
  Vec offsets_;
  std::vector<ControlSet> parts_;
};

/// Returns the nearest point of K (Euclidean); points already in K are
/// returned unchanged.
Vec project_to_set(const Vec& p, const ControlSet& K);

/// Modulus of continuity ω of the fields in the ordinary control. Either
/// linear, ω(r) = slope * r, or a user table interpolated linearly and
/// extended past the last entry with the last slope.
class Modulus {
 public:
  static Modulus lipschitz(double slope);
  static Modulus table(std::vector<std::pair<double, double>> points);

  double operator()(double r) const;
  bool is_linear() const { return table_.empty(); }
  double slope() const { return slope_; }

 private:
  double slope_ = 0.0;
  std::vector<std::pair<double, double>> table_;
};

/// g0(x, u, v1) written into `out` (size n).
using DriftField =
    std::function<void(const Vec& x, const Vec& u, const Vec& v1, Eigen::Ref<Vec> out)>;
/// Columns g1..gm of the impulsive fields at (x, u, v2) written into `out` (n x m).
using ImpulsiveFields =
    std::function<void(const Vec& x, const Vec& u, const Vec& v2, Eigen::Ref<Mat> out)>;

struct VectorFieldSet {
  int state_dim = 0;     // n
  int channels = 0;      // m, dimension of U
  int ordinary_dim = 0;  // l, dimension of V
  DriftField drift;
  ImpulsiveFields impulsive;
  double lipschitz = 0.0;  // L in (x,u), uniform in v
  double growth = 0.0;     // M
  Modulus modulus = Modulus::lipschitz(0.0);
  bool v2_active = false;  // false: the gi ignore v2

  Vec eval_drift(const Vec& x, const Vec& u, const Vec& v1) const;
  Mat eval_impulsive(const Vec& x, const Vec& u, const Vec& v2) const;
};

struct GrowthSample {
  Vec x, u, v;
};

struct GrowthViolation {
  std::size_t sample = 0;
  int field = 0;  // 0 for the drift, i for gi
  double norm = 0.0;
  double bound = 0.0;
};

struct GrowthReport {
  std::vector<GrowthViolation> violations;
  bool ok() const { return violations.empty(); }
};

/// Checks |gi(x,u,v)| <= M (1 + |(x,u)|) on every sample, for g0 and each gi.
/// The same v is used as v1 and v2.
GrowthReport check_growth_bound(const VectorFieldSet& fields,
                                const std::vector<GrowthSample>& samples,
                                Execution exec = Execution::Parallel);

/// Largest |gi(x,u,v2) - gi(x,u,0)| over the samples; zero certifies that the
/// impulsive fields ignore v2 on the sample cloud.
double v2_sensitivity(const VectorFieldSet& fields, const std::vector<GrowthSample>& samples);

/// Radial cut-off: 1 on |x| <= R, 0 on |x| >= 2R, cubic smoothstep between.
double radial_cutoff(const Vec& x, double radius = 10.0);

/// Jump record of a trajectory: left limit and value at a jump time.
struct JumpState {
  double time = 0.0;
  Vec left;
  Vec right;
};

/// State samples on a strictly increasing time grid covering [0,T]. Columns
/// of `states` are x(t_i); at registered jump times the column holds the
/// value after the jump.
struct Trajectory {
  std::vector<double> times;
  Mat states;
  std::vector<JumpState> jumps;

  int dimension() const { return static_cast<int>(states.rows()); }
  std::size_t size() const { return times.size(); }
  double horizon() const { return times.empty() ? 0.0 : times.back(); }
  Vec state(std::size_t i) const { return states.col(static_cast<Eigen::Index>(i)); }
  /// Linear interpolation between grid samples.
  Vec interpolate(double t) const;
  /// Throws PreconditionError when the grid is not strictly increasing or
  /// the sample count does not match.
  void validate() const;
};

/// Uniform grid of `points` times on [0, horizon], both ends included.
std::vector<double> uniform_grid(double horizon, std::size_t points);

}  // namespace impulse
