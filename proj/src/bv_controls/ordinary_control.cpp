#include <algorithm>
#include <cmath>

#include "impulse/bv_controls.hpp"

namespace impulse {

StepFunction::StepFunction(std::vector<double> grid, Mat values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (grid_.size() < 2) throw PreconditionError("step function: grid needs >= 2 points");
  if (static_cast<std::size_t>(values_.cols()) + 1 != grid_.size())
    throw PreconditionError("step function: expected one value per grid cell");
  for (std::size_t i = 1; i < grid_.size(); ++i)
    if (!(grid_[i] > grid_[i - 1])) throw PreconditionError("step function: grid not strictly increasing");
  if (!values_.allFinite()) throw PreconditionError("step function: non-finite value");
}

StepFunction StepFunction::constant(double start, double end, const Vec& value) {
  Mat values(value.size(), 1);
  values.col(0) = value;
  return StepFunction({start, end}, std::move(values));
}

std::size_t StepFunction::cell_at(double t) const {
  if (!(t >= grid_.front() && t <= grid_.back())) throw DomainError("step function: argument outside its grid");
  const auto it = std::upper_bound(grid_.begin(), grid_.end(), t);
  const auto i = static_cast<std::size_t>(it - grid_.begin());
  return std::min(i, cells()) - 1;
}

double StepFunction::l1_distance(const StepFunction& other, double a, double b) const {
  if (dimension() != other.dimension()) throw PreconditionError("l1_distance: dimension mismatch");
  if (!(b > a)) return 0.0;
  const auto grid = merged_grid(grid_, other.grid_, a, b);
  const Vec zero = Vec::Zero(dimension());
  auto eval = [&zero](const StepFunction& f, double t) -> Vec {
    return (t >= f.start() && t < f.end()) ? f.value(t) : zero;
  };
  double total = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double mid = 0.5 * (grid[i - 1] + grid[i]);
    total += (eval(*this, mid) - eval(other, mid)).norm() * (grid[i] - grid[i - 1]);
  }
  return total;
}

double StepFunction::l1_norm() const {
  double total = 0.0;
  for (std::size_t i = 0; i < cells(); ++i)
    total += values_.col(static_cast<Eigen::Index>(i)).norm() * (grid_[i + 1] - grid_[i]);
  return total;
}

OrdinaryControl::OrdinaryControl(std::vector<double> grid, Mat v1, Mat v2) {
  has_v2_ = v2.size() > 0;
  if (!has_v2_) v2 = Mat::Zero(v1.rows(), v1.cols());
  if (v2.rows() != v1.rows() || v2.cols() != v1.cols())
    throw PreconditionError("ordinary control: v1 and v2 must share dimension and grid");
  v2_ = StepFunction(grid, std::move(v2));
  v1_ = StepFunction(std::move(grid), std::move(v1));
  if (v1_.start() != 0.0) throw PreconditionError("ordinary control: grid must start at 0");
}

OrdinaryControl OrdinaryControl::constant(double horizon, const Vec& v1) {
  Mat a(v1.size(), 1);
  a.col(0) = v1;
  return OrdinaryControl({0.0, horizon}, std::move(a));
}

OrdinaryControl OrdinaryControl::constant(double horizon, const Vec& v1, const Vec& v2) {
  Mat a(v1.size(), 1), b(v2.size(), 1);
  a.col(0) = v1;
  b.col(0) = v2;
  return OrdinaryControl({0.0, horizon}, std::move(a), std::move(b));
}

double OrdinaryControl::l1_distance(const OrdinaryControl& other) const {
  if (dimension() != other.dimension()) throw PreconditionError("l1_distance: dimension mismatch");
  const double hi = std::max(horizon(), other.horizon());
  const auto grid = merged_grid(this->grid(), other.grid(), 0.0, hi);
  const int l = dimension();
  auto stacked = [l](const OrdinaryControl& c, double t) -> Vec {
    Vec out = Vec::Zero(2 * l);
    if (t < c.horizon()) out << c.v1(t), c.v2(t);
    return out;
  };
  double total = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double mid = 0.5 * (grid[i - 1] + grid[i]);
    total += (stacked(*this, mid) - stacked(other, mid)).norm() * (grid[i] - grid[i - 1]);
  }
  return total;
}

double OrdinaryControl::distance_from(const ControlSet& V) const {
  double worst = 0.0;
  for (const StepFunction* f : {&v1_, &v2_})
    for (Eigen::Index i = 0; i < f->values().cols(); ++i) {
      const Vec p = f->values().col(i);
      worst = std::max(worst, (project_to_set(p, V) - p).norm());
    }
  return worst;
}

std::vector<double> merged_grid(std::span<const double> a, std::span<const double> b, double lo,
                                double hi) {
  std::vector<double> out;
  out.reserve(a.size() + b.size() + 2);
  out.push_back(lo);
  out.push_back(hi);
  for (double t : a)
    if (t > lo && t < hi) out.push_back(t);
  for (double t : b)
    if (t > lo && t < hi) out.push_back(t);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double sup_distance(const Trajectory& a, const Trajectory& b, std::span<const double> grid,
                    Execution exec) {
  auto matches = [&grid](const Trajectory& x) {
    return x.times.size() == grid.size() && std::equal(grid.begin(), grid.end(), x.times.begin());
  };
  if (!matches(a) || !matches(b)) throw PreconditionError("sup_distance: trajectories are not sampled on the grid");
  if (a.dimension() != b.dimension()) throw PreconditionError("sup_distance: dimension mismatch");
  return max_over(grid.size(), exec, [&](std::size_t i) {
    const auto c = static_cast<Eigen::Index>(i);
    return (a.states.col(c) - b.states.col(c)).norm();
  });
}

}  // namespace impulse
