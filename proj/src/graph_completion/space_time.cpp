#include <algorithm>
#include <cmath>

#include "impulse/space_time.hpp"

namespace impulse {

namespace {

// Index i with xs[i] <= x < xs[i+1], clamped to the last cell.
std::size_t cell_index(const std::vector<double>& xs, double x) {
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const auto i = static_cast<std::size_t>(it - xs.begin());
  return std::clamp<std::size_t>(i, 1, xs.size() - 1) - 1;
}

double clamp_to_domain(double x, double lo, double hi, const char* what) {
  const double slack = 1e-12 * std::max(1.0, std::abs(hi));
  if (x < lo - slack || x > hi + slack || std::isnan(x)) throw DomainError(what);
  return std::clamp(x, lo, hi);
}

}  // namespace

PiecewiseLinearMap::PiecewiseLinearMap(std::vector<double> xs, std::vector<double> ys)
    : xs_(std::move(xs)), ys_(std::move(ys)) {
  if (xs_.size() < 2 || xs_.size() != ys_.size()) throw PreconditionError("piecewise-linear map: need >= 2 matching knots");
  for (std::size_t i = 1; i < xs_.size(); ++i) {
    if (!(xs_[i] > xs_[i - 1])) throw PreconditionError("piecewise-linear map: abscissae not strictly increasing");
    if (ys_[i] < ys_[i - 1]) throw PreconditionError("piecewise-linear map: map must be nondecreasing");
  }
}

double PiecewiseLinearMap::operator()(double x) const {
  x = clamp_to_domain(x, xs_.front(), xs_.back(), "piecewise-linear map: argument outside domain");
  const std::size_t i = cell_index(xs_, x);
  const double w = (x - xs_[i]) / (xs_[i + 1] - xs_[i]);
  return ys_[i] + w * (ys_[i + 1] - ys_[i]);
}

double PiecewiseLinearMap::inverse(double y) const {
  y = clamp_to_domain(y, ys_.front(), ys_.back(), "piecewise-linear map: value outside range");
  const auto it = std::lower_bound(ys_.begin(), ys_.end(), y);
  const auto i = static_cast<std::size_t>(it - ys_.begin());
  if (i == 0) return xs_.front();
  const double dy = ys_[i] - ys_[i - 1];
  const double w = dy > 0.0 ? (y - ys_[i - 1]) / dy : 1.0;
  return xs_[i - 1] + w * (xs_[i] - xs_[i - 1]);
}

std::vector<double> PiecewiseLinearMap::slopes() const {
  std::vector<double> out(xs_.size() - 1);
  for (std::size_t i = 0; i + 1 < xs_.size(); ++i) out[i] = (ys_[i + 1] - ys_[i]) / (xs_[i + 1] - xs_[i]);
  return out;
}

bool PiecewiseLinearMap::strictly_increasing() const {
  for (std::size_t i = 1; i < ys_.size(); ++i)
    if (!(ys_[i] > ys_[i - 1])) return false;
  return true;
}

SpaceTimeControl::SpaceTimeControl(std::vector<double> nodes, std::vector<double> phi0, Mat phi,
                                   Mat psi1, Mat psi2)
    : nodes_(std::move(nodes)),
      phi0_(std::move(phi0)),
      phi_(std::move(phi)),
      psi1_(std::move(psi1)),
      psi2_(std::move(psi2)) {
  const std::size_t n = nodes_.size();
  if (n < 2 || phi0_.size() != n || static_cast<std::size_t>(phi_.cols()) != n)
    throw PreconditionError("space-time control: node data sizes disagree");
  if (static_cast<std::size_t>(psi1_.cols()) != n - 1 || psi2_.cols() != psi1_.cols() ||
      psi2_.rows() != psi1_.rows())
    throw PreconditionError("space-time control: ψ needs one value per cell for both components");
  if (nodes_.front() != 0.0 || phi0_.front() != 0.0)
    throw PreconditionError("space-time control: must start at s = 0 with φ0(0) = 0");
  for (std::size_t i = 1; i < n; ++i) {
    if (!(nodes_[i] > nodes_[i - 1])) throw PreconditionError("space-time control: nodes not strictly increasing");
    if (phi0_[i] < phi0_[i - 1]) throw PreconditionError("space-time control: φ0 must be nondecreasing");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double speed = cell_speed(i);
    if (speed > 1.0 + 1e-8) throw PreconditionError("space-time control: φ0' + |φ'| exceeds 1");
    worst = std::max(worst, std::abs(speed - 1.0));
  }
  feasible_ = worst <= 1e-8;
}

double SpaceTimeControl::phi0_at(double s) const {
  s = clamp_to_domain(s, 0.0, horizon(), "space-time control: parameter outside [0,S]");
  const std::size_t i = cell_index(nodes_, s);
  const double w = (s - nodes_[i]) / (nodes_[i + 1] - nodes_[i]);
  return phi0_[i] + w * (phi0_[i + 1] - phi0_[i]);
}

Vec SpaceTimeControl::phi_at(double s) const {
  s = clamp_to_domain(s, 0.0, horizon(), "space-time control: parameter outside [0,S]");
  const std::size_t i = cell_index(nodes_, s);
  const double w = (s - nodes_[i]) / (nodes_[i + 1] - nodes_[i]);
  const auto a = static_cast<Eigen::Index>(i);
  return (1.0 - w) * phi_.col(a) + w * phi_.col(a + 1);
}

std::size_t SpaceTimeControl::cell_at(double s) const {
  s = clamp_to_domain(s, 0.0, horizon(), "space-time control: parameter outside [0,S]");
  return cell_index(nodes_, s);
}

double SpaceTimeControl::cell_speed(std::size_t i) const {
  const auto a = static_cast<Eigen::Index>(i);
  const double ds = nodes_[i + 1] - nodes_[i];
  return ((phi0_[i + 1] - phi0_[i]) + (phi_.col(a + 1) - phi_.col(a)).norm()) / ds;
}

double SpaceTimeControl::max_speed_deviation() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < cells(); ++i) worst = std::max(worst, std::abs(cell_speed(i) - 1.0));
  return worst;
}

double SpaceTimeControl::phi_variation() const {
  double total = 0.0;
  for (Eigen::Index i = 1; i < phi_.cols(); ++i) total += (phi_.col(i) - phi_.col(i - 1)).norm();
  return total;
}

Clock::Clock(std::vector<ClockKnot> knots, JumpSelection policy) : knots_(std::move(knots)), policy_(policy) {
  if (knots_.size() < 2) throw PreconditionError("clock: need >= 2 knots");
  if (knots_.front().t != 0.0 || knots_.front().s_left != 0.0)
    throw PreconditionError("clock: must start at (0, 0)");
  for (std::size_t i = 0; i < knots_.size(); ++i) {
    const auto& k = knots_[i];
    if (k.s < k.s_left) throw PreconditionError("clock: value below its left limit");
    if (i > 0 && (!(k.t > knots_[i - 1].t) || !(k.s_left > knots_[i - 1].s)))
      throw PreconditionError("clock: knots must be strictly increasing in t and s");
  }
}

double Clock::operator()(double t) const {
  if (!(t >= 0.0 && t <= time_horizon())) throw DomainError("clock: time outside [0,T]");
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), t,
                                   [](double value, const ClockKnot& k) { return value < k.t; });
  const auto i = static_cast<std::size_t>(it - knots_.begin()) - 1;
  const auto& a = knots_[i];
  if (t == a.t || i + 1 == knots_.size()) return a.s;
  const auto& b = knots_[i + 1];
  const double w = (t - a.t) / (b.t - a.t);
  return a.s + w * (b.s_left - a.s);
}

double Clock::left_limit(double t) const {
  if (!(t >= 0.0 && t <= time_horizon())) throw DomainError("clock: time outside [0,T]");
  const auto it = std::lower_bound(knots_.begin(), knots_.end(), t,
                                   [](const ClockKnot& k, double value) { return k.t < value; });
  if (it != knots_.end() && it->t == t) return it->s_left;
  return (*this)(t);
}

std::vector<ClockKnot> Clock::fibers() const {
  std::vector<ClockKnot> out;
  for (const auto& k : knots_)
    if (k.s > k.s_left) out.push_back(k);
  return out;
}

std::vector<std::pair<double, double>> Clock::pairs() const {
  std::vector<std::pair<double, double>> out;
  out.reserve(knots_.size());
  for (const auto& k : knots_) {
    if (k.s > k.s_left) out.emplace_back(k.t, k.s_left);
    out.emplace_back(k.t, k.s);
  }
  return out;
}

Clock Clock::from_pairs(const std::vector<std::pair<double, double>>& pairs) {
  std::vector<ClockKnot> knots;
  for (const auto& [t, s] : pairs) {
    if (!knots.empty() && knots.back().t == t) {
      if (s < knots.back().s) throw PreconditionError("clock: pairs at a jump time must be sorted");
      knots.back().s = s;
    } else {
      knots.push_back({t, s, s});
    }
  }
  return Clock(std::move(knots));
}

double evaluate_clock(const Clock& clock, double t) { return clock(t); }

Vec ParamPath::interpolate(double s) const {
  s = clamp_to_domain(s, nodes.front(), nodes.back(), "parametrized path: parameter outside [0,S]");
  const std::size_t i = cell_index(nodes, s);
  const double w = (s - nodes[i]) / (nodes[i + 1] - nodes[i]);
  const auto a = static_cast<Eigen::Index>(i);
  if (w == 0.0) return states.col(a);
  if (w == 1.0) return states.col(a + 1);
  return (1.0 - w) * states.col(a) + w * states.col(a + 1);
}

}  // namespace impulse
