#include <cstdlib>
#include <ostream>

#include "CLI11.hpp"
#include "impulse/cli.hpp"

namespace impulse {

namespace {

std::vector<FiberSpec> bridges_from_file(const std::filesystem::path& path, std::size_t jumps) {
  const Json doc = read_json_file(path);
  std::vector<FiberSpec> out;
  if (doc.is_array()) {
    for (const auto& b : doc) out.push_back({control_path_from_json(b), std::nullopt});
  } else {
    const ControlPath bridge = control_path_from_json(doc);
    out.assign(jumps, FiberSpec{bridge, std::nullopt});
  }
  if (out.size() != jumps) throw ParseError("bridge file: expected one bridge per jump");
  return out;
}

std::uint64_t seed_from_env(std::uint64_t fallback) {
  const char* text = std::getenv("IMPULSE_GC_SEED");
  if (!text || !*text) return fallback;
  char* end = nullptr;
  const auto value = std::strtoull(text, &end, 10);
  if (*end != '\0') throw PreconditionError("IMPULSE_GC_SEED must be an unsigned integer");
  return value;
}

}  // namespace

void parse_bridge_flag(const std::string& flag, CompleteOptions& options) {
  if (flag == "straight") {
    options.bridge = BridgeChoice::Straight;
  } else if (flag == "two-leg") {
    options.bridge = BridgeChoice::TwoLeg;
  } else if (flag.rfind("file:", 0) == 0 && flag.size() > 5) {
    options.bridge = BridgeChoice::File;
    options.bridge_file = flag.substr(5);
  } else {
    throw PreconditionError("--bridge must be straight, two-leg or file:<path>");
  }
}

CompleteResult cmd_complete(const CompleteOptions& options) {
  const Scenario sc = find_scenario(options.fields_id);
  const Json doc = read_json_file(options.control_file);
  IntegratorConfig cfg;
  if (options.steps) cfg.steps_per_unit = *options.steps;
  cfg.validate();
  if (options.points < 2) throw PreconditionError("--points must be >= 2");
  const Vec x0 = doc.contains("x0") ? Vec(Eigen::Map<const Vec>(doc["x0"].get<std::vector<double>>().data(),
                                                                 static_cast<Eigen::Index>(doc["x0"].size())))
                                    : sc.x0;

  std::optional<GraphCompletion> gc;
  std::vector<double> grid;
  if (doc.contains("stc")) {
    SpaceTimeControl stc = space_time_from_json(doc.at("stc"));
    Clock clock = clock_from_json(doc.at("clock"));
    grid = uniform_grid(clock.time_horizon(), options.points);
    gc.emplace(GraphCompletion{std::move(stc), std::move(clock)});
  } else {
    const ControlPath u = control_path_from_json(doc.contains("u") ? doc.at("u") : doc);
    const OrdinaryControl v = doc.contains("v")
                                  ? ordinary_control_from_json(doc.at("v"))
                                  : OrdinaryControl::constant(u.horizon(), Vec::Zero(sc.fields.ordinary_dim));
    grid = uniform_grid(u.horizon(), options.points);
    std::vector<FiberSpec> fibers;
    if (options.bridge == BridgeChoice::TwoLeg)
      for (const auto& j : u.jumps()) fibers.push_back({staircase_bridge(j.left, j.right, sc.U), std::nullopt});
    else if (options.bridge == BridgeChoice::File)
      fibers = bridges_from_file(options.bridge_file, u.jump_count());
    CompletionOptions copt;
    copt.sample_times = grid;
    gc.emplace(complete_graph(u, v, sc.U, fibers, copt));
  }

  if (options.normalize) {
    NormalizedControl nc = normalize_feasible(gc->control);
    gc.emplace(GraphCompletion{std::move(nc.control), reparametrize_clock(gc->clock, nc.eta)});
  }
  const ParamPath xi = solve_spacetime(sc.fields, x0, gc->control, cfg);
  CompleteResult result{reconstruct_solution(xi, gc->clock, grid), {}};
  result.files.push_back(write_json(to_json(gc->control), options.out / "completion.json"));
  result.files.push_back(write_json(to_json(gc->clock), options.out / "clock.json"));
  result.files.push_back(write_table(trajectory_table(result.solution), options.out, "solution", OutputFormat::Csv));
  result.files.push_back(write_table(param_path_table(xi), options.out, "xi", OutputFormat::Csv));
  return result;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Graph-completion solutions of impulsive control systems"};
  app.require_subcommand(1);

  RunManifest manifest;
  std::string format = "csv";
  std::size_t steps = 0;
  auto* run = app.add_subcommand("run", "Run a built-in scenario and its acceptance checks");
  run->add_option("scenario", manifest.scenario, "Scenario id (see `list`)")->required();
  run->add_option("--ks", manifest.ks, "Comma-separated k sweep")->delimiter(',');
  run->add_option("--steps", steps, "RK4 steps per unit time");
  run->add_option("--out", manifest.out, "Output directory");
  run->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  CompleteOptions complete;
  std::string bridge = "straight";
  std::size_t complete_steps = 0;
  auto* comp = app.add_subcommand("complete", "Complete the graph of a BV control and solve");
  comp->add_option("control-file", complete.control_file, "Control JSON")->required();
  comp->add_option("fields-id", complete.fields_id, "Scenario whose fields and U are used")->required();
  comp->add_option("--bridge", bridge, "straight, two-leg or file:<path>");
  comp->add_flag("!--no-normalize", complete.normalize, "Keep the parametrization as given");
  comp->add_option("--points", complete.points, "Output grid points");
  comp->add_option("--steps", complete_steps, "RK4 steps per unit parameter");
  comp->add_option("--out", complete.out, "Output directory");

  auto* list = app.add_subcommand("list", "List built-in scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (list->parsed()) {
      for (const auto& s : builtin_scenarios()) out << s.id << "  " << s.description << '\n';
      return 0;
    }
    if (run->parsed()) {
      if (run->count("--steps")) manifest.steps = steps;
      manifest.format = format == "json" ? OutputFormat::Json : OutputFormat::Csv;
      manifest.seed = seed_from_env(manifest.seed);
      const RunResult result = cmd_run_scenario(manifest);
      for (const auto& note : result.notes) out << note << '\n';
      for (const auto& c : result.checks)
        out << (c.passed ? "[PASS] " : "[FAIL] ") << c.name << ": " << c.detail << '\n';
      for (const auto& f : result.files) out << "wrote " << f.string() << '\n';
      if (!result.passed()) {
        err << "failing checks:";
        for (const auto& c : result.checks)
          if (!c.passed) err << ' ' << c.name << ';';
        err << '\n';
      }
      return result.exit_code();
    }
    parse_bridge_flag(bridge, complete);
    if (comp->count("--steps")) complete.steps = complete_steps;
    const CompleteResult result = cmd_complete(complete);
    const Vec end = result.solution.state(result.solution.size() - 1);
    out << "endpoint x(T) =";
    for (Eigen::Index i = 0; i < end.size(); ++i) out << ' ' << format_double(end(i));
    out << '\n';
    for (const auto& f : result.files) out << "wrote " << f.string() << '\n';
    return 0;
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const Json::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace impulse
