// Acceptance run: one PASS/FAIL line per criterion, then a summary line.
// Exit status 0 iff every criterion passes.

#include <chrono>
#include <filesystem>
#include <fstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "koiter/acceptance.hpp"
#include "koiter/checks.hpp"
#include "koiter/config.hpp"
#include "koiter/errors.hpp"
#include "koiter/experiments.hpp"

using namespace koiter;

namespace {

struct Line {
  int id;
  std::string title;
  bool pass;
  std::string detail;
};

std::string worst(const CheckReport& r) {
  const Check* w = nullptr;
  for (const auto& c : r.checks)
    if (!w || (!c.pass && w->pass) || (c.pass == w->pass && c.value / c.limit > w->value / w->limit)) w = &c;
  if (!w) return "no checks";
  return fmt::format("{}/{} checks, worst {} = {:.3g} (limit {:.0e}){}", r.checks.size() - std::count_if(r.checks.begin(), r.checks.end(), [](const Check& c) { return !c.pass; }),
                     r.checks.size(), w->name, w->value, w->limit, w->detail.empty() ? "" : " " + w->detail);
}

ShellCase coarse(ShellCase c) {
  c.mesh.n1 = c.mesh.n2 = 4;
  c.mesh.layers = 2;
  c.mesh.n1_3d = c.mesh.n2_3d = 2;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria 1-9"};
  std::string out;
  bool quick = false;
  app.add_option("--out", out, "write the case tables here");
  app.add_flag("--quick", quick, "coarse meshes for the sweeps (smoke run; trends are not meaningful)");
  CLI11_PARSE(app, argc, argv);
  if (!out.empty()) ensure_writable_dir(out);

  std::vector<Line> lines;
  auto report = [&](int id, std::string title, bool pass, std::string detail) {
    fmt::print("[{}] criterion {}: {}: {}\n", pass ? "PASS" : "FAIL", id, title, detail);
    std::fflush(stdout);
    lines.push_back({id, std::move(title), pass, std::move(detail)});
  };

  // sweeps with every solve audited
  SystemAudit audit;
  std::vector<std::string> bad_status;
  std::vector<CaseResult> results;
  for (auto c : builtin_cases()) {
    if (quick) c = coarse(c);
    RunOptions opts;
    opts.on_solve = [&](const std::string& label, const SparseSystem& s, const SolveReport& r) {
      audit.record(label, s.matrix, r);
    };
    opts.log = [](const std::string& s) { fmt::print(stderr, "{}\n", s); };
    try {
      results.push_back(run_case(c, opts));
    } catch (const Error& e) {
      fmt::print(stderr, "{}: {}\n", c.name, e.what());
      CaseResult failed;
      failed.shell = c;
      failed.limit_method = std::string("failed: ") + e.what();
      results.push_back(failed);
      bad_status.push_back(c.name + ": " + e.kind());
    }
    const auto& r = results.back();
    for (const auto& row : r.rows)
      if (row.status.find("NotPositiveDefinite") != std::string::npos || row.status.find("SingularSystem") != std::string::npos)
        bad_status.push_back(fmt::format("{} eps {:g}: {}", c.name, row.eps, row.status));
    if (r.limit_method.rfind("failed", 0) == 0) bad_status.push_back(c.name + " limit: " + r.limit_method);
    if (!out.empty()) std::ofstream(std::filesystem::path(out) / (c.name + ".csv")) << export_table(r);
  }

  const char* names[] = {"elliptic membrane trend", "generalized membrane trend", "flexural trend"};
  for (int i = 0; i < 3; ++i) {
    const auto v = trend(results[i]);
    report(i + 1, names[i], v.pass, v.summary);
  }

  {
    CheckReport all;
    std::vector<ChartPtr> charts = {make_chart("plane", {})};
    for (const auto& c : builtin_cases()) charts.push_back(c.make_chart());
    for (const auto& ch : charts)
      for (auto chk : geometry_suite(*ch, 100, 1).checks) {
        chk.name = ch->name() + " " + chk.name;
        all.checks.push_back(chk);
      }
    report(4, "geometry oracle suite", all.pass(), worst(all));
  }
  {
    const auto r = plane_reduction_suite(1);
    report(5, "plane-chart reductions", r.pass(), worst(r));
  }
  {
    const auto r = conformity_suite(32, 1);
    report(6, "reduced-HCT conformity on 32x32", r.pass(), worst(r));
  }
  {
    const bool sym = audit.worst_asymmetry < 1e-9, spd = bad_status.empty(), res = audit.worst_residual < 1e-10;
    std::string d = fmt::format(
        "{} systems; worst asymmetry {:.3g} ({}); Cholesky failures {}; worst residual {:.3g} ({}, rounding floor "
        "{:.3g})",
        audit.systems, audit.worst_asymmetry, audit.worst_asymmetry_label, bad_status.size(), audit.worst_residual,
        audit.worst_residual_label, audit.worst_floor);
    for (const auto& s : bad_status) d += "; " + s;
    report(7, "system properties", sym && spd && res && audit.systems > 0, d);
  }
  {
    const auto v = regime_energies(results[0], results[2]);
    report(8, "regime energies", v.pass, v.summary);
  }
  {
    bool same = true;
    std::string d;
    for (const auto& c0 : builtin_cases()) {
      const ShellCase c = coarse(c0);
      const std::string a = export_table(run_case(c)), b = export_table(run_case(c));
      same = same && a == b && !a.empty();
      d += fmt::format("{}{} {} bytes {}", d.empty() ? "" : ", ", c.name, a.size(), a == b ? "identical" : "DIFFER");
    }
    report(9, "determinism (coarse meshes, two runs each)", same, d);
  }

  const auto passed = std::count_if(lines.begin(), lines.end(), [](const Line& l) { return l.pass; });
  fmt::print("acceptance: {}/{} criteria passed\n", passed, lines.size());
  return passed == static_cast<long>(lines.size()) ? 0 : 1;
}
