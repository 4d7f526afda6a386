#pragma once

#include <initializer_list>

#include "impulse/graph_completion.hpp"

namespace testing {

using impulse::Vec;

inline Vec vec(std::initializer_list<double> values) {
  Vec out(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double v : values) out(i++) = v;
  return out;
}

inline impulse::ControlSet box(int dim, double lo = -1.0, double hi = 1.0) {
  return impulse::ControlSet::box(Vec::Constant(dim, lo), Vec::Constant(dim, hi));
}

// Constant a on [0,t̄), constant b on [t̄,T].
inline impulse::ControlPath step_path(const Vec& a, const Vec& b, double t_bar, double T) {
  impulse::Mat left(a.size(), 2), right(b.size(), 2);
  left << a, a;
  right << b, b;
  return impulse::ControlPath(T, {impulse::AcSegment{{0.0, t_bar}, left}, impulse::Jump{t_bar, a, b},
                                  impulse::AcSegment{{t_bar, T}, right}});
}

inline impulse::ControlPath scalar_polyline(std::vector<double> ts, std::initializer_list<double> values) {
  impulse::Mat m(1, static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double v : values) m(0, i++) = v;
  return impulse::ControlPath::polyline(std::move(ts), std::move(m));
}

// ẋ = Σ gi u̇i with constant gi = columns of G; no drift.
inline impulse::VectorFieldSet constant_fields(const impulse::Mat& G, int ordinary = 1) {
  impulse::VectorFieldSet F;
  F.state_dim = static_cast<int>(G.rows());
  F.channels = static_cast<int>(G.cols());
  F.ordinary_dim = ordinary;
  F.drift = [](const Vec&, const Vec&, const Vec&, Eigen::Ref<Vec> out) { out.setZero(); };
  F.impulsive = [G](const Vec&, const Vec&, const Vec&, Eigen::Ref<impulse::Mat> out) { out = G; };
  F.growth = G.colwise().norm().maxCoeff();
  return F;
}

}  // namespace testing
