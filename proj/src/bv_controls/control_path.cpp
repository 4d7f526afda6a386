#include <algorithm>
#include <cmath>

#include "impulse/bv_controls.hpp"

namespace impulse {

namespace {

bool same_point(const Vec& a, const Vec& b) {
  return (a - b).norm() <= 1e-12 * (1.0 + a.norm());
}

}  // namespace

ControlPath::ControlPath(double horizon, const std::vector<Piece>& pieces) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw PreconditionError("control path: horizon must be > 0");
  if (pieces.empty()) throw PreconditionError("control path: no pieces");

  std::vector<double> times;
  std::vector<Vec> values;
  bool last_was_jump = false;
  for (const auto& piece : pieces) {
    if (const auto* seg = std::get_if<AcSegment>(&piece)) {
      if (seg->times.size() < 2 || static_cast<std::size_t>(seg->values.cols()) != seg->times.size())
        throw PreconditionError("control path: AC segment needs >= 2 samples matching its values");
      for (std::size_t i = 1; i < seg->times.size(); ++i)
        if (!(seg->times[i] > seg->times[i - 1]))
          throw PreconditionError("control path: AC sample times must be strictly increasing");
      if (!seg->values.allFinite()) throw PreconditionError("control path: non-finite sample");
      std::size_t first = 0;
      if (times.empty()) {
        if (seg->times.front() != 0.0) throw PreconditionError("control path: first segment must start at 0");
      } else {
        if (seg->values.rows() != values.back().size())
          throw PreconditionError("control path: dimension mismatch between pieces");
        if (seg->times.front() != times.back())
          throw PreconditionError("control path: pieces leave a gap or overlap");
        if (!same_point(seg->values.col(0), values.back()))
          throw PreconditionError("control path: AC segment does not start at the preceding value");
        first = 1;
      }
      for (std::size_t i = first; i < seg->times.size(); ++i) {
        times.push_back(seg->times[i]);
        values.emplace_back(seg->values.col(static_cast<Eigen::Index>(i)));
      }
      last_was_jump = false;
    } else {
      const auto& jump = std::get<Jump>(piece);
      if (times.empty()) throw PreconditionError("control path: a jump cannot open the path (u(0) is fixed)");
      if (last_was_jump) throw PreconditionError("control path: consecutive jumps need an AC segment between them");
      if (jump.time != times.back()) throw PreconditionError("control path: jump time must close the preceding segment");
      if (jump.left.size() != values.back().size() || jump.right.size() != values.back().size())
        throw PreconditionError("control path: jump dimension mismatch");
      if (!same_point(jump.left, values.back()))
        throw PreconditionError("control path: jump left value differs from the preceding segment");
      if (!jump.right.allFinite()) throw PreconditionError("control path: non-finite jump value");
      if (!same_point(jump.left, jump.right)) {
        times.push_back(jump.time);
        values.push_back(jump.right);
        ++jump_count_;
      }
      last_was_jump = true;
    }
  }
  if (std::abs(times.back() - horizon) > 1e-12 * std::max(1.0, horizon))
    throw PreconditionError("control path: pieces do not end at the horizon");
  // A jump landing exactly on the horizon keeps both knots at T.
  if (times.size() >= 2 && times[times.size() - 2] == times.back()) times[times.size() - 2] = horizon;
  times.back() = horizon;

  knot_t_ = std::move(times);
  knot_u_.resize(values.front().size(), static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) knot_u_.col(static_cast<Eigen::Index>(i)) = values[i];
  finish();
}

ControlPath ControlPath::polyline(std::vector<double> times, Mat values) {
  const double horizon = times.empty() ? 0.0 : times.back();
  return ControlPath(horizon, {AcSegment{std::move(times), std::move(values)}});
}

ControlPath ControlPath::constant(double horizon, const Vec& value) {
  Mat values(value.size(), 2);
  values.col(0) = value;
  values.col(1) = value;
  return polyline({0.0, horizon}, std::move(values));
}

void ControlPath::finish() {
  cum_var_.assign(knot_t_.size(), 0.0);
  for (std::size_t i = 1; i < knot_t_.size(); ++i) {
    const auto a = static_cast<Eigen::Index>(i - 1);
    const auto b = static_cast<Eigen::Index>(i);
    cum_var_[i] = cum_var_[i - 1] + (knot_u_.col(b) - knot_u_.col(a)).norm();
  }
}

Vec ControlPath::value(double t) const {
  if (!(t >= 0.0 && t <= horizon())) throw DomainError("control path: time outside [0,T]");
  const auto it = std::upper_bound(knot_t_.begin(), knot_t_.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - knot_t_.begin()) - 1;
  if (i + 1 == knot_t_.size()) return knot_u_.col(static_cast<Eigen::Index>(i));
  const double w = (t - knot_t_[i]) / (knot_t_[i + 1] - knot_t_[i]);
  const auto a = static_cast<Eigen::Index>(i);
  return (1.0 - w) * knot_u_.col(a) + w * knot_u_.col(a + 1);
}

Vec ControlPath::left_limit(double t) const {
  if (!(t >= 0.0 && t <= horizon())) throw DomainError("control path: time outside [0,T]");
  if (t == 0.0) return initial_value();
  const auto it = std::lower_bound(knot_t_.begin(), knot_t_.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - knot_t_.begin()) - 1;
  const double w = (t - knot_t_[i]) / (knot_t_[i + 1] - knot_t_[i]);
  const auto a = static_cast<Eigen::Index>(i);
  return (1.0 - w) * knot_u_.col(a) + w * knot_u_.col(a + 1);
}

std::vector<Jump> ControlPath::jumps() const {
  std::vector<Jump> out;
  for (std::size_t i = 1; i < knot_t_.size(); ++i)
    if (knot_t_[i] == knot_t_[i - 1])
      out.push_back({knot_t_[i], knot_u_.col(static_cast<Eigen::Index>(i - 1)),
                     knot_u_.col(static_cast<Eigen::Index>(i))});
  return out;
}

std::vector<Piece> ControlPath::pieces() const {
  std::vector<Piece> out;
  std::size_t start = 0;
  auto emit_segment = [&](std::size_t lo, std::size_t hi) {  // inclusive
    AcSegment seg;
    seg.times.assign(knot_t_.begin() + static_cast<std::ptrdiff_t>(lo),
                     knot_t_.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
    seg.values = knot_u_.middleCols(static_cast<Eigen::Index>(lo), static_cast<Eigen::Index>(hi - lo + 1));
    out.emplace_back(std::move(seg));
  };
  for (std::size_t i = 1; i < knot_t_.size(); ++i) {
    if (knot_t_[i] != knot_t_[i - 1]) continue;
    emit_segment(start, i - 1);
    out.emplace_back(Jump{knot_t_[i], knot_u_.col(static_cast<Eigen::Index>(i - 1)),
                          knot_u_.col(static_cast<Eigen::Index>(i))});
    start = i;
  }
  if (start + 1 < knot_t_.size()) emit_segment(start, knot_t_.size() - 1);
  return out;
}

double ControlPath::variation(double t) const {
  if (!(t >= 0.0 && t <= horizon())) throw DomainError("variation: time outside [0,T]");
  const auto it = std::upper_bound(knot_t_.begin(), knot_t_.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - knot_t_.begin()) - 1;
  return cum_var_[i] + (value(t) - knot_u_.col(static_cast<Eigen::Index>(i))).norm();
}

double variation(const ControlPath& u, double t) { return u.variation(t); }

std::vector<double> ControlPath::breakpoints() const {
  std::vector<double> out = knot_t_;
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

ControlPath ControlPath::truncated(double t_end) const {
  if (!(t_end > 0.0 && t_end <= horizon())) throw DomainError("truncated: end time outside (0,T]");
  ControlPath out;
  std::size_t count = 0;
  while (count < knot_t_.size() && knot_t_[count] <= t_end) ++count;
  const bool closes_on_knot = knot_t_[count - 1] == t_end;
  const std::size_t total = closes_on_knot ? count : count + 1;
  out.knot_t_.assign(knot_t_.begin(), knot_t_.begin() + static_cast<std::ptrdiff_t>(count));
  out.knot_u_.resize(knot_u_.rows(), static_cast<Eigen::Index>(total));
  out.knot_u_.leftCols(static_cast<Eigen::Index>(count)) = knot_u_.leftCols(static_cast<Eigen::Index>(count));
  if (!closes_on_knot) {
    out.knot_t_.push_back(t_end);
    out.knot_u_.col(static_cast<Eigen::Index>(count)) = value(t_end);
  }
  for (std::size_t i = 1; i < out.knot_t_.size(); ++i)
    if (out.knot_t_[i] == out.knot_t_[i - 1]) ++out.jump_count_;
  out.finish();
  return out;
}

double ControlPath::distance_from(const ControlSet& U) const {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < knot_u_.cols(); ++i) {
    const Vec p = knot_u_.col(i);
    worst = std::max(worst, (project_to_set(p, U) - p).norm());
  }
  return worst;
}

namespace {

// ∫_0^1 |p + τ q| dτ in closed form.
double affine_norm_integral(const Vec& p, const Vec& q) {
  const double A = q.squaredNorm();
  if (A <= 1e-30 * std::max(1.0, p.squaredNorm())) return p.norm();
  const double B = p.dot(q);
  const double h2 = std::max(0.0, p.squaredNorm() - B * B / A) / A;
  const double h = std::sqrt(h2);
  const auto antiderivative = [&](double x) {
    const double r = std::sqrt(x * x + h2);
    return 0.5 * (x * r + (h > 0.0 ? h2 * std::asinh(x / h) : 0.0));
  };
  const double x0 = B / A;
  return std::sqrt(A) * (antiderivative(1.0 + x0) - antiderivative(x0));
}

}  // namespace

double l1_distance(const ControlPath& u, const ControlPath& w) {
  if (u.horizon() != w.horizon() || u.dimension() != w.dimension())
    throw PreconditionError("l1_distance: paths differ in horizon or dimension");
  const auto a = u.breakpoints();
  const auto b = w.breakpoints();
  const auto grid = merged_grid(a, b, 0.0, u.horizon());
  double total = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double lo = grid[i - 1];
    const double len = grid[i] - lo;
    // u - w is affine on the cell: p + τ q for τ in [0,1].
    const Vec p = u.value(lo) - w.value(lo);
    const Vec q = u.left_limit(grid[i]) - w.left_limit(grid[i]) - p;
    total += affine_norm_integral(p, q) * len;
  }
  return total;
}

}  // namespace impulse
