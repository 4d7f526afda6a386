#include "impulse/core_types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace impulse {

namespace {

bool all_finite(const Vec& v) { return v.allFinite(); }

Vec project_polytope(const Vec& p, const Mat& normals, const Vec& offsets) {
  // Dykstra's alternating projections onto the halfspaces a_i . x <= b_i.
  const Eigen::Index rows = normals.rows();
  std::vector<Vec> increments(static_cast<std::size_t>(rows), Vec::Zero(p.size()));
  Vec x = p;
  for (int sweep = 0; sweep < 20000; ++sweep) {
    const Vec before = x;
    for (Eigen::Index i = 0; i < rows; ++i) {
      auto& y = increments[static_cast<std::size_t>(i)];
      const Vec z = x + y;
      const Vec a = normals.row(i).transpose();
      const double excess = a.dot(z) - offsets(i);
      x = excess > 0.0 ? Vec(z - (excess / a.squaredNorm()) * a) : z;
      y = z - x;
    }
    if ((x - before).norm() <= 1e-15 * (1.0 + x.norm())) break;
  }
  return x;
}

}  // namespace

ControlSet ControlSet::box(Vec lower, Vec upper) {
  if (lower.size() != upper.size() || lower.size() == 0)
    throw PreconditionError("box: bound dimensions differ or are empty");
  if (!all_finite(lower) || !all_finite(upper))
    throw PreconditionError("box: bounds must be finite");
  if ((lower.array() > upper.array()).any())
    throw PreconditionError("box: lower bound exceeds upper bound");
  ControlSet s;
  s.shape_ = SetShape::Box;
  s.dim_ = static_cast<int>(lower.size());
  s.lower_ = std::move(lower);
  s.upper_ = std::move(upper);
  s.center_ = 0.5 * (s.lower_ + s.upper_);
  return s;
}

ControlSet ControlSet::ball(Vec center, double radius) {
  if (center.size() == 0 || !all_finite(center) || !std::isfinite(radius) || radius < 0.0)
    throw PreconditionError("ball: center must be finite and radius a finite nonnegative number");
  ControlSet s;
  s.shape_ = SetShape::Ball;
  s.dim_ = static_cast<int>(center.size());
  s.center_ = std::move(center);
  s.radius_ = radius;
  return s;
}

ControlSet ControlSet::polytope(Mat normals, Vec offsets) {
  if (normals.rows() != offsets.size() || normals.rows() == 0 || normals.cols() == 0)
    throw PreconditionError("polytope: normals and offsets disagree in size");
  if (!normals.allFinite() || !all_finite(offsets))
    throw PreconditionError("polytope: data must be finite");
  for (Eigen::Index i = 0; i < normals.rows(); ++i)
    if (normals.row(i).norm() == 0.0) throw PreconditionError("polytope: zero normal");
  ControlSet s;
  s.shape_ = SetShape::Polytope;
  s.dim_ = static_cast<int>(normals.cols());
  s.normals_ = std::move(normals);
  s.offsets_ = std::move(offsets);
  return s;
}

ControlSet ControlSet::star_union(std::vector<ControlSet> parts, Vec center,
                                  double whitney_constant) {
  if (parts.empty()) throw PreconditionError("star_union: no parts");
  if (!(whitney_constant >= 1.0)) throw PreconditionError("star_union: Whitney constant must be >= 1");
  for (const auto& part : parts) {
    if (!part.convex()) throw PreconditionError("star_union: parts must be convex");
    if (part.dimension() != center.size()) throw PreconditionError("star_union: dimension mismatch");
    if (!part.contains(center)) throw PreconditionError("star_union: every part must contain the center");
  }
  ControlSet s;
  s.shape_ = SetShape::StarUnion;
  s.dim_ = static_cast<int>(center.size());
  s.center_ = std::move(center);
  s.whitney_ = whitney_constant;
  s.parts_ = std::move(parts);
  return s;
}

bool ControlSet::contains(const Vec& p, double tol) const {
  if (p.size() != dim_) return false;
  switch (shape_) {
    case SetShape::Box:
      return (p.array() >= lower_.array() - tol).all() && (p.array() <= upper_.array() + tol).all();
    case SetShape::Ball:
      return (p - center_).norm() <= radius_ + tol;
    case SetShape::Polytope:
      return ((normals_ * p - offsets_).array() <= tol).all();
    case SetShape::StarUnion:
      return part_containing(p, tol) >= 0;
  }
  return false;
}

int ControlSet::part_containing(const Vec& p, double tol) const {
  if (convex()) return contains(p, tol) ? 0 : -1;
  for (std::size_t i = 0; i < parts_.size(); ++i)
    if (parts_[i].contains(p, tol)) return static_cast<int>(i);
  return -1;
}

Vec project_to_set(const Vec& p, const ControlSet& K) {
  if (p.size() != K.dimension()) throw PreconditionError("project_to_set: dimension mismatch");
  if (K.contains(p, 0.0)) return p;
  switch (K.shape()) {
    case SetShape::Box:
      return p.cwiseMax(K.lower()).cwiseMin(K.upper());
    case SetShape::Ball: {
      const Vec d = p - K.star_center();
      return K.star_center() + (K.radius() / d.norm()) * d;
    }
    case SetShape::Polytope:
      return project_polytope(p, K.normals(), K.offsets());
    case SetShape::StarUnion: {
      Vec best;
      double best_dist = std::numeric_limits<double>::infinity();
      for (const auto& part : K.parts()) {
        Vec q = project_to_set(p, part);
        const double d = (q - p).norm();
        if (d < best_dist) {
          best_dist = d;
          best = std::move(q);
        }
      }
      return best;
    }
  }
  return p;
}

Modulus Modulus::lipschitz(double slope) {
  if (!(slope >= 0.0) || !std::isfinite(slope)) throw PreconditionError("modulus slope must be finite and >= 0");
  Modulus m;
  m.slope_ = slope;
  return m;
}

Modulus Modulus::table(std::vector<std::pair<double, double>> points) {
  if (points.empty()) throw PreconditionError("modulus table is empty");
  std::sort(points.begin(), points.end());
  if (points.front().first != 0.0 || points.front().second != 0.0)
    points.insert(points.begin(), {0.0, 0.0});
  for (std::size_t i = 1; i < points.size(); ++i)
    if (points[i].first <= points[i - 1].first || points[i].second < points[i - 1].second)
      throw PreconditionError("modulus table must be strictly increasing in r and nondecreasing in value");
  Modulus m;
  const auto& a = points[points.size() - 2];
  const auto& b = points.back();
  m.slope_ = (b.second - a.second) / (b.first - a.first);
  m.table_ = std::move(points);
  return m;
}

double Modulus::operator()(double r) const {
  if (r <= 0.0) return 0.0;
  if (table_.empty()) return slope_ * r;
  if (r >= table_.back().first) return table_.back().second + slope_ * (r - table_.back().first);
  const auto it = std::upper_bound(table_.begin(), table_.end(), r,
                                   [](double value, const auto& p) { return value < p.first; });
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double w = (r - lo.first) / (hi.first - lo.first);
  return lo.second + w * (hi.second - lo.second);
}

Vec VectorFieldSet::eval_drift(const Vec& x, const Vec& u, const Vec& v1) const {
  Vec out = Vec::Zero(state_dim);
  drift(x, u, v1, out);
  return out;
}

Mat VectorFieldSet::eval_impulsive(const Vec& x, const Vec& u, const Vec& v2) const {
  Mat out = Mat::Zero(state_dim, channels);
  impulsive(x, u, v2, out);
  return out;
}

GrowthReport check_growth_bound(const VectorFieldSet& fields,
                                const std::vector<GrowthSample>& samples, Execution exec) {
  if (samples.empty()) throw PreconditionError("check_growth_bound: no samples");
  std::vector<std::vector<GrowthViolation>> found(samples.size());
  for_each_index(samples.size(), exec, [&](std::size_t i) {
    const auto& smp = samples[i];
    Vec xu(smp.x.size() + smp.u.size());
    xu << smp.x, smp.u;
    const double bound = fields.growth * (1.0 + xu.norm());
    const double g0 = fields.eval_drift(smp.x, smp.u, smp.v).norm();
    if (!(g0 <= bound)) found[i].push_back({i, 0, g0, bound});
    const Mat g = fields.eval_impulsive(smp.x, smp.u, smp.v);
    for (Eigen::Index c = 0; c < g.cols(); ++c) {
      const double gi = g.col(c).norm();
      if (!(gi <= bound)) found[i].push_back({i, static_cast<int>(c) + 1, gi, bound});
    }
  });
  GrowthReport report;
  for (auto& f : found) report.violations.insert(report.violations.end(), f.begin(), f.end());
  return report;
}

double v2_sensitivity(const VectorFieldSet& fields, const std::vector<GrowthSample>& samples) {
  double worst = 0.0;
  for (const auto& smp : samples) {
    const Mat with_v = fields.eval_impulsive(smp.x, smp.u, smp.v);
    const Mat without = fields.eval_impulsive(smp.x, smp.u, Vec::Zero(smp.v.size()));
    worst = std::max(worst, (with_v - without).norm());
  }
  return worst;
}

double radial_cutoff(const Vec& x, double radius) {
  const double r = x.norm();
  if (r <= radius) return 1.0;
  if (r >= 2.0 * radius) return 0.0;
  const double w = (r - radius) / radius;
  return 1.0 - w * w * (3.0 - 2.0 * w);
}

Vec Trajectory::interpolate(double t) const {
  if (times.empty()) throw PreconditionError("interpolate: empty trajectory");
  if (t < times.front() || t > times.back())
    throw DomainError("interpolate: time outside the trajectory grid");
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  if (it == times.end()) return state(times.size() - 1);
  const std::size_t hi = static_cast<std::size_t>(it - times.begin());
  const std::size_t lo = hi - 1;
  const double w = (t - times[lo]) / (times[hi] - times[lo]);
  return (1.0 - w) * state(lo) + w * state(hi);
}

void Trajectory::validate() const {
  if (times.empty()) throw PreconditionError("trajectory: empty grid");
  if (static_cast<std::size_t>(states.cols()) != times.size())
    throw PreconditionError("trajectory: sample count differs from grid size");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) throw PreconditionError("trajectory: grid not strictly increasing");
}

std::vector<double> uniform_grid(double horizon, std::size_t points) {
  if (points < 2 || !(horizon > 0.0)) throw PreconditionError("uniform_grid: need >= 2 points and T > 0");
  std::vector<double> grid(points);
  const double n = static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) grid[i] = horizon * (static_cast<double>(i) / n);
  grid.back() = horizon;
  return grid;
}

}  // namespace impulse
