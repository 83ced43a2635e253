// Command-line front end: geometry checks, case sweeps and VTK export.

#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "koiter/acceptance.hpp"
#include "koiter/checks.hpp"
#include "koiter/config.hpp"
#include "koiter/errors.hpp"
#include "koiter/experiments.hpp"
#include "output.hpp"

using namespace koiter;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kAcceptance = 1, kConfig = 2, kNumerical = 3 };

const std::vector<std::string> kAllCases = {"elliptic", "generalized", "flexural"};

bool is_config_error(const Error& e) {
  static const std::vector<std::string> kinds = {"ConfigError",       "InvalidPenalty", "InvalidLame",
                                                 "InvalidResolution", "OddLayerCount",  "IoError"};
  return std::find(kinds.begin(), kinds.end(), e.kind()) != kinds.end();
}

std::vector<std::string> selected(const RunConfig& cfg) { return cfg.cases.empty() ? kAllCases : cfg.cases; }

std::string eps_tag(double eps) { return fmt::format("{:.6g}", eps); }

json config_json(const RunConfig& cfg) {
  json j{{"cases", selected(cfg)}, {"out", cfg.out}, {"format", to_string(cfg.format)}, {"seed", cfg.seed}};
  if (cfg.eps) j["eps"] = *cfg.eps;
  if (cfg.mesh) j["mesh"] = *cfg.mesh;
  if (cfg.mesh_3d) j["mesh_3d"] = *cfg.mesh_3d;
  if (cfg.penalty) j["penalty"] = *cfg.penalty;
  if (cfg.solver_method) j["solver_method"] = to_string(*cfg.solver_method);
  if (cfg.solver_tol) j["solver_tol"] = *cfg.solver_tol;
  return j;
}

json report_json(const CheckReport& r) {
  json a = json::array();
  for (const auto& c : r.checks)
    a.push_back({{"name", c.name}, {"value", std::isfinite(c.value) ? json(c.value) : json(nullptr)},
                 {"limit", c.limit}, {"pass", c.pass}, {"detail", c.detail}});
  return a;
}

void print_report(const std::string& title, const CheckReport& r) {
  fmt::print("{}: {}\n", title, r.pass() ? "PASS" : "FAIL");
  for (const auto& c : r.checks)
    fmt::print("  {:<4} {:<44} {:>11} <= {:.0e}  {}\n", c.pass ? "ok" : "FAIL", c.name,
               std::isfinite(c.value) ? fmt::format("{:.3e}", c.value) : "-", c.limit, c.detail);
}

// ---------------------------------------------------------------------------

struct ChartRequest {
  std::string name;
  std::vector<double> rect;  // y1min, y1max, y2min, y2max
  int points = 100;
};

int cmd_geometry_check(const RunConfig& cfg, const ChartRequest& req) {
  std::vector<std::pair<std::string, ChartPtr>> charts;
  if (!req.name.empty()) {
    std::map<std::string, double> params;
    if (!req.rect.empty()) {
      if (req.rect.size() != 4) throw ConfigError("--rect needs y1min,y1max,y2min,y2max");
      params = {{"y1min", req.rect[0]}, {"y1max", req.rect[1]}, {"y2min", req.rect[2]}, {"y2max", req.rect[3]}};
    }
    charts.emplace_back(req.name, make_chart(req.name, params));
  } else {
    for (const auto& name : selected(cfg)) charts.emplace_back(name, cfg.shell_case(name).make_chart());
  }
  ensure_writable_dir(cfg.out);

  bool pass = true;
  json out = json::array();
  for (const auto& [label, chart] : charts) {
    const auto g = geometry_suite(*chart, req.points, cfg.seed);
    print_report(fmt::format("{} ({} chart) geometry", label, chart->name()), g);
    json entry{{"label", label}, {"chart", chart->name()}, {"geometry", report_json(g)}};
    pass = pass && g.pass();
    if (g.pass()) {
      const auto k = kinematics_suite(*chart, 20, cfg.seed);
      print_report(fmt::format("{} ({} chart) kinematics", label, chart->name()), k);
      entry["kinematics"] = report_json(k);
      pass = pass && k.pass();
    }
    out.push_back(entry);
  }
  tools::Manifest m(cfg.out);
  m.write("geometry_check.json", json{{"pass", pass}, {"charts", out}}.dump(2) + "\n");
  m.finish({{"command", "geometry-check"}, {"config", config_json(cfg)}, {"pass", pass}});
  return pass ? kOk : kAcceptance;
}

// ---------------------------------------------------------------------------

struct SweepOutcome {
  std::vector<CaseResult> results;
  json errors = json::array();
  int exit = kOk;
};

SweepOutcome sweep(const RunConfig& cfg, const std::string& command, bool csv, bool vtk,
                   const std::function<void(const CaseResult&, json&)>& per_case = {}) {
  // validate every case and the output directory before any solve
  std::vector<ShellCase> cases;
  for (const auto& name : selected(cfg)) cases.push_back(cfg.shell_case(name));
  ensure_writable_dir(cfg.out);
  std::filesystem::remove(std::filesystem::path(cfg.out) / "errors.json");  // left by an earlier run

  SweepOutcome o;
  tools::Manifest m(cfg.out);
  json case_info = json::array();
  for (const auto& c : cases) {
    spdlog::info("{}: {} eps values, Koiter mesh {}x{}, 3D mesh {}x{}x{}", c.name, c.eps_list.size(), c.mesh.n1,
                 c.mesh.n2, c.mesh.n1_3d, c.mesh.n2_3d, c.mesh.layers);
    const ChartPtr chart = c.make_chart();
    RunOptions opts;
    opts.log = [](const std::string& s) { spdlog::info("{}", s); };
    if (vtk)
      opts.on_fields = [&](const RowFields& f) {
        const std::string stem = fmt::format("{}_eps{}", c.name, eps_tag(f.eps));
        const auto& km = f.koiter->layout->space(0).tri_mesh();
        m.write(stem + "_koiter.vtk",
                export_vtk(km, *chart, vertex_displacement(*f.koiter, *chart), stem + " Koiter"));
        const auto& base = f.three_d->layout->space(0).prism_mesh().base;
        m.write(stem + "_3d.vtk",
                export_vtk(base, *chart, vertex_average(*f.three_d, *chart, f.eps), stem + " 3D average"));
        if (f.limit) {
          const auto& lm = f.limit->layout->space(0).tri_mesh();
          m.write(stem + "_limit.vtk", export_vtk(lm, *chart, vertex_displacement(*f.limit, *chart), stem + " limit"));
        }
      };
    CaseResult r = run_case(c, opts);
    if (csv) m.write(c.name + ".csv", export_table(r));
    json info{{"case", c.name},
              {"rows", r.rows.size()},
              {"limit_method", r.limit_method},
              {"penalty_scale", r.penalty_scale},
              {"wall_seconds", r.wall_seconds}};
    if (!r.penalties.empty()) info["penalty_energies"] = {{"penalties", r.penalties}, {"energies", r.penalty_energies}};
    if (r.limit_method.rfind("failed", 0) == 0) {
      o.errors.push_back({{"case", c.name}, {"stage", "limit"}, {"status", r.limit_method}});
      o.exit = kNumerical;
    }
    for (const auto& row : r.rows)
      if (row.status != "ok") {
        o.errors.push_back({{"case", c.name}, {"eps", row.eps}, {"status", row.status}});
        o.exit = kNumerical;
      }
    if (per_case) per_case(r, info);
    case_info.push_back(info);
    o.results.push_back(std::move(r));
  }
  if (!o.errors.empty()) m.write("errors.json", json{{"errors", o.errors}}.dump(2) + "\n");
  m.finish({{"command", command}, {"config", config_json(cfg)}, {"cases", case_info}});
  return o;
}

int cmd_run(const RunConfig& cfg) {
  const bool csv = cfg.format != OutputFormat::Vtk, vtk = cfg.format != OutputFormat::Csv;
  const auto o = sweep(cfg, "run", csv, vtk);
  for (const auto& e : o.errors) spdlog::warn("{}", e.dump());
  return o.exit;
}

int cmd_export_vtk(const RunConfig& cfg) {
  if (cfg.cases.size() != 1 || !cfg.eps) throw ConfigError("export-vtk needs one --case and --eps");
  return sweep(cfg, "export-vtk", false, true).exit;
}

int cmd_convergence(const RunConfig& cfg) {
  int exit = kOk;
  std::vector<std::string> lines;
  RunConfig one = cfg;
  for (const auto& name : selected(cfg)) {
    one.cases = {name};
    one.out = (std::filesystem::path(cfg.out) / name).string();
    try {
      const auto o = sweep(one, "convergence", cfg.format != OutputFormat::Vtk, cfg.format != OutputFormat::Csv,
                           [](const CaseResult& r, json& info) {
                             const auto v = trend(r);
                             info["trend_pass"] = v.pass;
                             info["trend"] = v.summary;
                           });
      const auto v = trend(o.results.front());
      lines.push_back(fmt::format("{}: {} {}", name, v.pass ? "PASS" : "FAIL", v.summary));
      if (!v.pass && exit == kOk) exit = kAcceptance;
    } catch (const Error& e) {
      if (!is_config_error(e)) throw;
      lines.push_back(fmt::format("{}: FAIL {}", name, e.what()));
      exit = kConfig;
    }
  }
  for (const auto& l : lines) fmt::print("{}\n", l);
  return exit;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Koiter, three-dimensional and limit shell models: geometry checks and eps sweeps"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, cases, eps, mesh, mesh3d, format, method, level = "info";
  double penalty = 0, tol = 0;
  std::uint64_t seed = 1;
  std::string out;
  app.add_option("--config", config_path, "INI file with [run], [mesh], [solver], [case] sections")
      ->check(CLI::ExistingFile);
  auto* o_case = app.add_option("--case", cases, "comma-separated cases: elliptic, generalized, flexural");
  auto* o_eps = app.add_option("--eps", eps, "comma-separated eps values replacing the case sweep");
  auto* o_mesh = app.add_option("--mesh", mesh, "Koiter mesh and 3D layers: n1,n2,layers");
  auto* o_mesh3 = app.add_option("--mesh3d", mesh3d, "base of the 3D mesh: n1,n2");
  auto* o_pen = app.add_option("--penalty", penalty, "flexural penalty in units of the B_F / B_M diagonal ratio");
  auto* o_out = app.add_option("--out", out, "output directory (default out)");
  auto* o_fmt = app.add_option("--format", format, "csv, vtk or both");
  auto* o_seed = app.add_option("--seed", seed, "seed of the random property probes");
  auto* o_method = app.add_option("--solver", method, "auto, cholesky or cg");
  auto* o_tol = app.add_option("--tol", tol, "solver residual tolerance");
  app.add_option("--log-level", level, "trace, debug, info, warn, error, off");

  ChartRequest chart;
  auto* geo = app.add_subcommand("geometry-check", "geometry and kinematics invariants of the configured charts");
  geo->add_option("--chart", chart.name, "check this chart instead of the cases' charts");
  geo->add_option("--rect", chart.rect, "parameter rectangle y1min,y1max,y2min,y2max")->delimiter(',');
  geo->add_option("--points", chart.points, "random probe points");
  auto* run = app.add_subcommand("run", "run the eps sweeps and write CSV and VTK");
  auto* conv = app.add_subcommand("convergence", "run the sweeps and check the error trends");
  auto* vtk = app.add_subcommand("export-vtk", "solve one case at given eps values and write VTK only");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  auto logger = spdlog::stderr_color_mt("koiter");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::from_str(level));
  spdlog::set_pattern("[%H:%M:%S] %^%l%$ %v");

  try {
    RunConfig cfg;
    if (!config_path.empty()) load_config_file(config_path, cfg);
    // flags override the file
    auto flag = [](CLI::Option* o) { return o->count() > 0; };
    if (flag(o_case)) set_config_value(cfg, "case", cases);
    if (flag(o_eps)) set_config_value(cfg, "eps", eps);
    if (flag(o_mesh)) set_config_value(cfg, "mesh", mesh);
    if (flag(o_mesh3)) {
      const auto v = parse_ints(mesh3d);
      if (v.size() != 2) throw ConfigError("--mesh3d needs n1,n2");
      cfg.mesh_3d = std::array<int, 2>{v[0], v[1]};
    }
    if (flag(o_pen)) cfg.penalty = penalty;
    if (flag(o_out)) cfg.out = out;
    if (flag(o_fmt)) cfg.format = parse_format(format);
    if (flag(o_seed)) cfg.seed = seed;
    if (flag(o_method)) cfg.solver_method = parse_solve_method(method);
    if (flag(o_tol)) cfg.solver_tol = tol;

    if (*geo) return cmd_geometry_check(cfg, chart);
    if (*run) return cmd_run(cfg);
    if (*conv) return cmd_convergence(cfg);
    if (*vtk) return cmd_export_vtk(cfg);
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return is_config_error(e) ? kConfig : kNumerical;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kNumerical;
  }
  return kOk;
}
