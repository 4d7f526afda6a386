#include <algorithm>
#include <cmath>

#include "impulse/arc_length.hpp"

#include "impulse/graph_completion.hpp"

namespace impulse {

ArcLengthGraph arc_length_param(const ControlPath& u, const OrdinaryControl& v, const Trajectory& x) {
  if (!u.absolutely_continuous()) throw PreconditionError("arc_length_param: u has a jump");
  if (x.size() < 2 || std::abs(x.horizon() - u.horizon()) > 1e-12 * std::max(1.0, u.horizon()))
    throw PreconditionError("arc_length_param: trajectory must cover [0,T]");
  CompletionOptions options;
  options.min_cells = 1;
  options.min_fiber_cells = 1;
  options.sample_times = x.times;
  auto [control, clock] = complete_graph(u, v, ControlSet::box(Vec::Constant(u.dimension(), -1e300),
                                                               Vec::Constant(u.dimension(), 1e300)),
                                         {}, options);
  ParamPath xi;
  xi.nodes = control.nodes();
  xi.times = control.phi0();
  xi.states.resize(x.dimension(), static_cast<Eigen::Index>(xi.nodes.size()));
  for (std::size_t i = 0; i < xi.nodes.size(); ++i)
    xi.states.col(static_cast<Eigen::Index>(i)) = x.interpolate(xi.times[i]);
  return {std::move(control), std::move(clock), std::move(xi)};
}

}  // namespace impulse
