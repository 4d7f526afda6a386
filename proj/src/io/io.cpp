#include "impulse/io.hpp"

#include <charconv>
#include <fstream>
#include <numbers>
#include <ostream>

namespace impulse {

namespace {

Json column(const Vec& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Vec read_vec(const Json& j) {
  if (!j.is_array()) throw ParseError("expected an array of numbers");
  Vec out(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) out(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return out;
}

Json columns(const Mat& m) {
  Json out = Json::array();
  for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back(column(m.col(c)));
  return out;
}

Mat read_columns(const Json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw ParseError(std::string(what) + ": expected a nonempty array");
  const auto rows = static_cast<Eigen::Index>(j[0].size());
  Mat out(rows, static_cast<Eigen::Index>(j.size()));
  for (std::size_t c = 0; c < j.size(); ++c) {
    const Vec v = read_vec(j[c]);
    if (v.size() != rows) throw ParseError(std::string(what) + ": ragged entries");
    out.col(static_cast<Eigen::Index>(c)) = v;
  }
  return out;
}

const char* shape_name(SetShape s) {
  switch (s) {
    case SetShape::Box: return "box";
    case SetShape::Ball: return "ball";
    case SetShape::Polytope: return "polytope";
    case SetShape::StarUnion: return "star-union";
  }
  return "?";
}

Json set_json(const ControlSet& K) {
  Json j{{"shape", shape_name(K.shape())}, {"dimension", K.dimension()}, {"whitney_constant", K.whitney_constant()}};
  switch (K.shape()) {
    case SetShape::Box: j["lower"] = column(K.lower()); j["upper"] = column(K.upper()); break;
    case SetShape::Ball: j["center"] = column(K.star_center()); j["radius"] = K.radius(); break;
    case SetShape::Polytope: j["normals"] = columns(K.normals().transpose()); j["offsets"] = column(K.offsets()); break;
    case SetShape::StarUnion:
      j["center"] = column(K.star_center());
      j["parts"] = Json::array();
      for (const auto& p : K.parts()) j["parts"].push_back(set_json(p));
      break;
  }
  return j;
}

// Wraps nlohmann's exceptions so callers see one error type for bad input.
template <class F>
auto parsing(const char* what, F&& f) {
  try {
    return f();
  } catch (const Json::exception& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  } catch (const PreconditionError& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

Json to_json(const ControlPath& u) {
  Json pieces = Json::array();
  for (const auto& piece : u.pieces()) {
    if (const auto* seg = std::get_if<AcSegment>(&piece)) {
      Json samples = Json::array();
      for (std::size_t i = 0; i < seg->times.size(); ++i) {
        Json row{seg->times[i]};
        for (Eigen::Index r = 0; r < seg->values.rows(); ++r) row.push_back(seg->values(r, static_cast<Eigen::Index>(i)));
        samples.push_back(std::move(row));
      }
      pieces.push_back({{"type", "ac"}, {"samples", std::move(samples)}});
    } else {
      const auto& jump = std::get<Jump>(piece);
      pieces.push_back({{"type", "jump"}, {"t", jump.time}, {"left", column(jump.left)}, {"right", column(jump.right)}});
    }
  }
  return {{"horizon", u.horizon()}, {"pieces", std::move(pieces)}};
}

ControlPath control_path_from_json(const Json& j) {
  return parsing("control path", [&] {
    std::vector<Piece> pieces;
    for (const auto& p : j.at("pieces")) {
      const auto type = p.at("type").get<std::string>();
      if (type == "ac") {
        const auto& samples = p.at("samples");
        if (samples.size() < 2) throw ParseError("control path: AC piece needs >= 2 samples");
        AcSegment seg;
        const auto dim = static_cast<Eigen::Index>(samples[0].size()) - 1;
        if (dim < 1) throw ParseError("control path: samples need a time and a value");
        seg.values.resize(dim, static_cast<Eigen::Index>(samples.size()));
        for (std::size_t i = 0; i < samples.size(); ++i) {
          const Vec row = read_vec(samples[i]);
          if (row.size() != dim + 1) throw ParseError("control path: ragged samples");
          seg.times.push_back(row(0));
          seg.values.col(static_cast<Eigen::Index>(i)) = row.tail(dim);
        }
        pieces.emplace_back(std::move(seg));
      } else if (type == "jump") {
        pieces.emplace_back(Jump{p.at("t").get<double>(), read_vec(p.at("left")), read_vec(p.at("right"))});
      } else {
        throw ParseError("control path: unknown piece type '" + type + "'");
      }
    }
    return ControlPath(j.at("horizon").get<double>(), pieces);
  });
}

Json to_json(const OrdinaryControl& v) {
  Json j{{"horizon", v.horizon()}, {"grid", v.grid()}, {"v1", columns(v.first().values())}};
  if (v.has_v2()) j["v2"] = columns(v.second().values());
  return j;
}

OrdinaryControl ordinary_control_from_json(const Json& j) {
  return parsing("ordinary control", [&] {
    auto grid = j.at("grid").get<std::vector<double>>();
    if (j.contains("horizon") && grid.back() != j.at("horizon").get<double>())
      throw ParseError("ordinary control: grid does not end at the horizon");
    Mat v1 = read_columns(j.at("v1"), "v1");
    Mat v2 = j.contains("v2") ? read_columns(j.at("v2"), "v2") : Mat();
    return OrdinaryControl(std::move(grid), std::move(v1), std::move(v2));
  });
}

Json to_json(const SpaceTimeControl& stc) {
  Json samples = Json::array();
  const auto& nodes = stc.nodes();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto c = static_cast<Eigen::Index>(i);
    const auto cell = static_cast<Eigen::Index>(std::min(i, stc.cells() - 1));
    Json row{nodes[i], stc.phi0()[i]};
    for (Eigen::Index r = 0; r < stc.phi().rows(); ++r) row.push_back(stc.phi()(r, c));
    for (Eigen::Index r = 0; r < stc.psi1().rows(); ++r) row.push_back(stc.psi1()(r, cell));
    for (Eigen::Index r = 0; r < stc.psi2().rows(); ++r) row.push_back(stc.psi2()(r, cell));
    samples.push_back(std::move(row));
  }
  return {{"S", stc.horizon()}, {"m", stc.channels()}, {"l", stc.ordinary_dim()}, {"samples", std::move(samples)}};
}

SpaceTimeControl space_time_from_json(const Json& j) {
  return parsing("space-time control", [&] {
    const int m = j.at("m").get<int>();
    const int l = j.at("l").get<int>();
    const auto& samples = j.at("samples");
    const std::size_t n = samples.size();
    if (n < 2) throw ParseError("space-time control: need >= 2 samples");
    std::vector<double> nodes(n), phi0(n);
    Mat phi(m, static_cast<Eigen::Index>(n)), psi1(l, static_cast<Eigen::Index>(n - 1)), psi2(l, static_cast<Eigen::Index>(n - 1));
    for (std::size_t i = 0; i < n; ++i) {
      const Vec row = read_vec(samples[i]);
      if (row.size() != 2 + m + 2 * l) throw ParseError("space-time control: sample width disagrees with m and l");
      nodes[i] = row(0);
      phi0[i] = row(1);
      phi.col(static_cast<Eigen::Index>(i)) = row.segment(2, m);
      if (i + 1 < n) {
        psi1.col(static_cast<Eigen::Index>(i)) = row.segment(2 + m, l);
        psi2.col(static_cast<Eigen::Index>(i)) = row.segment(2 + m + l, l);
      }
    }
    return SpaceTimeControl(std::move(nodes), std::move(phi0), std::move(phi), std::move(psi1), std::move(psi2));
  });
}

Json to_json(const Clock& clock) {
  Json out = Json::array();
  for (const auto& [t, s] : clock.pairs()) out.push_back({t, s});
  return out;
}

Clock clock_from_json(const Json& j) {
  return parsing("clock", [&] {
    std::vector<std::pair<double, double>> pairs;
    for (const auto& p : j) {
      if (!p.is_array() || p.size() != 2) throw ParseError("clock: expected [t, s] pairs");
      pairs.emplace_back(p[0].get<double>(), p[1].get<double>());
    }
    return Clock::from_pairs(pairs);
  });
}

Json manifest_json(const Scenario& s) {
  const char* cost = s.cost == CostKind::Bolza ? "bolza" : s.cost == CostKind::Mayer ? "mayer" : "none";
  Json j{{"id", s.id},
         {"description", s.description},
         {"synthetic", s.synthetic},
         {"state_dim", s.fields.state_dim},
         {"channels", s.fields.channels},
         {"ordinary_dim", s.fields.ordinary_dim},
         {"v2_active", s.fields.v2_active},
         {"lipschitz", s.fields.lipschitz},
         {"growth", s.fields.growth},
         {"x0", column(s.x0)},
         {"u0", column(s.u0)},
         {"horizon", s.horizon},
         {"U", set_json(s.U)},
         {"V", set_json(s.V)},
         {"cost", cost},
         {"tolerance", s.tolerance},
         {"ks", s.ks},
         {"closed_form_ks", s.closed_form_ks}};
  if (!s.endpoint_constraint.empty()) j["endpoint_constraint"] = s.endpoint_constraint;
  if (s.u) j["u"] = to_json(*s.u);
  if (s.v) j["v"] = to_json(*s.v);
  if (s.expected_endpoint) j["expected_endpoint"] = column(*s.expected_endpoint);
  return j;
}

void Table::write_csv(std::ostream& out) const {
  for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << ',';
      if (const auto* d = std::get_if<double>(&row[c])) out << format_double(*d);
      else out << std::get<std::string>(row[c]);
    }
    out << '\n';
  }
}

Json Table::to_json() const {
  Json out = Json::array();
  for (const auto& row : rows) {
    Json obj = Json::object();
    for (std::size_t c = 0; c < row.size(); ++c)
      std::visit([&](const auto& cell) { obj[columns[c]] = cell; }, row[c]);
    out.push_back(std::move(obj));
  }
  return out;
}

Table trajectory_table(const Trajectory& x) {
  Table t;
  t.columns.push_back("t");
  for (int i = 1; i <= x.dimension(); ++i) t.columns.push_back("x" + std::to_string(i));
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::vector<Table::Cell> row{x.times[i]};
    for (Eigen::Index r = 0; r < x.states.rows(); ++r) row.emplace_back(x.states(r, static_cast<Eigen::Index>(i)));
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table param_path_table(const ParamPath& xi) {
  Table t;
  t.columns = {"s", "t"};
  for (Eigen::Index i = 1; i <= xi.states.rows(); ++i) t.columns.push_back("x" + std::to_string(i));
  for (std::size_t i = 0; i < xi.nodes.size(); ++i) {
    std::vector<Table::Cell> row{xi.nodes[i], xi.times[i]};
    for (Eigen::Index r = 0; r < xi.states.rows(); ++r) row.emplace_back(xi.states(r, static_cast<Eigen::Index>(i)));
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table report_table(const std::vector<ApproxRecord>& report) {
  Table t;
  t.columns = {"k", "var_uk", "sup_dist", "l1_u", "l1_v", "psi2_gap", "gronwall_lhs", "gronwall_rhs"};
  for (const auto& r : report)
    t.rows.push_back({static_cast<double>(r.k), r.var_uk, r.sup_dist, r.l1_u, r.l1_v, r.psi2_gap, r.gronwall_lhs,
                      r.gronwall_rhs});
  return t;
}

std::filesystem::path write_table(const Table& table, const std::filesystem::path& dir, const std::string& stem,
                                  OutputFormat format) {
  std::filesystem::create_directories(dir);
  const auto path = dir / (stem + (format == OutputFormat::Csv ? ".csv" : ".json"));
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  if (format == OutputFormat::Csv) table.write_csv(out);
  else out << table.to_json().dump(2) << '\n';
  return path;
}

std::filesystem::path write_json(const Json& doc, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
  return path;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace impulse
