#include "koiter/config.hpp"

#include <cerrno>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "koiter/errors.hpp"

namespace koiter {

OutputFormat parse_format(const std::string& text) {
  if (text == "csv") return OutputFormat::Csv;
  if (text == "vtk") return OutputFormat::Vtk;
  if (text == "both") return OutputFormat::Both;
  throw ConfigError("unknown format '" + text + "' (csv, vtk, both)");
}

std::string to_string(OutputFormat f) {
  switch (f) {
    case OutputFormat::Csv: return "csv";
    case OutputFormat::Vtk: return "vtk";
    case OutputFormat::Both: return "both";
  }
  return "?";
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n\"'[]");
  const auto e = s.find_last_not_of(" \t\r\n\"'[]");
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

double to_double(const std::string& s) {
  const std::string t = trim(s);
  double v = 0.0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size() || t.empty()) throw ConfigError("not a number: '" + s + "'");
  return v;
}

int to_int(const std::string& s) {
  const std::string t = trim(s);
  int v = 0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size() || t.empty()) throw ConfigError("not an integer: '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!trim(item).empty()) out.push_back(trim(item));
  return out;
}

Vec3 to_vec3(const std::string& s) {
  const auto v = parse_doubles(s);
  if (v.size() != 3) throw ConfigError("expected three components: '" + s + "'");
  return {v[0], v[1], v[2]};
}

}  // namespace

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> out;
  for (const auto& s : split(text)) out.push_back(to_double(s));
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

std::vector<int> parse_ints(const std::string& text) {
  std::vector<int> out;
  for (const auto& s : split(text)) out.push_back(to_int(s));
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  auto ints = [&](std::size_t n) {
    auto v = parse_ints(value);
    if (v.size() != n) throw ConfigError(fmt::format("expected {} integers", n));
    return v;
  };
  auto mesh = [&]() -> std::array<int, 3>& {
    if (!cfg.mesh) cfg.mesh = std::array<int, 3>{32, 32, 4};
    return *cfg.mesh;
  };
  auto mesh3 = [&]() -> std::array<int, 2>& {
    if (!cfg.mesh_3d) cfg.mesh_3d = std::array<int, 2>{16, 16};
    return *cfg.mesh_3d;
  };
  const std::string k = key.rfind("run.", 0) == 0 ? key.substr(4) : key;
  if (k == "case") cfg.cases = split(value);
  else if (k == "eps") cfg.eps = parse_doubles(value);
  else if (k == "out") cfg.out = trim(value);
  else if (k == "format") cfg.format = parse_format(trim(value));
  else if (k == "seed") cfg.seed = static_cast<std::uint64_t>(to_double(value));
  else if (k == "mesh") {
    const auto v = ints(3);
    cfg.mesh = std::array<int, 3>{v[0], v[1], v[2]};
  } else if (k == "mesh.n1") mesh()[0] = to_int(value);
  else if (k == "mesh.n2") mesh()[1] = to_int(value);
  else if (k == "mesh.layers") mesh()[2] = to_int(value);
  else if (k == "mesh.n1_3d") mesh3()[0] = to_int(value);
  else if (k == "mesh.n2_3d") mesh3()[1] = to_int(value);
  else if (k == "solver.method") cfg.solver_method = parse_solve_method(trim(value));
  else if (k == "solver.tol") cfg.solver_tol = to_double(value);
  else if (k == "solver.auto_threshold") cfg.solver_auto_threshold = to_int(value);
  else if (k == "case.penalty" || k == "penalty") cfg.penalty = to_double(value);
  else if (k == "case.young") cfg.young = to_double(value);
  else if (k == "case.poisson") cfg.poisson = to_double(value);
  else if (k == "case.lambda") cfg.lambda = to_double(value);
  else if (k == "case.mu") cfg.mu = to_double(value);
  else if (k == "case.f") cfg.f = to_vec3(value);
  else if (k == "case.h") cfg.h = to_vec3(value);
  else throw ConfigError("unknown key '" + key + "'");
}

void load_config_text(const std::string& text, const std::string& name, RunConfig& cfg) {
  std::istringstream in(text);
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigINI().from_config(in);
  } catch (const CLI::Error& e) {
    throw ConfigError(name + ": " + e.what());
  }
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;  // section markers
    std::string value;
    for (const auto& v : item.inputs) value += (value.empty() ? "" : ",") + v;
    const std::string key = item.fullname();
    try {
      set_config_value(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(fmt::format("{}: key '{}': {}", name, key, e.message()));
    }
  }
}

void load_config_file(const std::string& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  load_config_text(ss.str(), path, cfg);
}

ShellCase RunConfig::shell_case(const std::string& name) const {
  ShellCase c = builtin_case(name);
  if (eps) c.eps_list = *eps;
  if (mesh) {
    c.mesh.n1 = (*mesh)[0];
    c.mesh.n2 = (*mesh)[1];
    c.mesh.layers = (*mesh)[2];
  }
  if (mesh_3d) {
    c.mesh.n1_3d = (*mesh_3d)[0];
    c.mesh.n2_3d = (*mesh_3d)[1];
  }
  if (penalty) c.penalty = *penalty;
  if (young) c.young = *young;
  if (poisson) c.poisson = *poisson;
  if (young || poisson) c.lame = Lame::from_young_poisson(c.young, c.poisson);
  if (lambda) c.lame.lambda = *lambda;
  if (mu) c.lame.mu = *mu;
  if (f) c.f = *f;
  if (h) c.h = *h;
  if (solver_method) c.solver.method = *solver_method;
  if (solver_tol) c.solver.tol = *solver_tol;
  if (solver_auto_threshold) c.solver.auto_threshold = *solver_auto_threshold;
  c.validate();
  return c;
}

void ensure_writable_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
  const fs::path probe = fs::path(dir) / ".write_probe";
  {
    std::ofstream out(probe);
    if (!out || !(out << "ok")) throw IoError("output directory '" + dir + "' is not writable");
  }
  fs::remove(probe, ec);
}

}  // namespace koiter
