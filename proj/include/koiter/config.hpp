#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "koiter/experiments.hpp"

namespace koiter {

enum class OutputFormat { Csv, Vtk, Both };
OutputFormat parse_format(const std::string& text);
std::string to_string(OutputFormat f);

/// Settings of one CLI invocation. Unset optionals keep the built-in case
/// values.
struct RunConfig {
  std::vector<std::string> cases;  // empty: the command's default
  std::optional<std::vector<double>> eps;
  std::optional<std::array<int, 3>> mesh;    // n1, n2, layers
  std::optional<std::array<int, 2>> mesh_3d; // base of the 3D mesh
  std::optional<double> penalty;
  std::optional<double> young, poisson, lambda, mu;
  std::optional<Vec3> f, h;
  std::optional<SolveMethod> solver_method;
  std::optional<double> solver_tol;
  std::optional<int> solver_auto_threshold;
  std::string out = "out";
  OutputFormat format = OutputFormat::Csv;
  std::uint64_t seed = 1;

  /// The case with every override applied; validated.
  ShellCase shell_case(const std::string& name) const;
};

/// Reads an INI file with sections [run], [mesh], [solver] and [case] into
/// cfg. Keys outside the sections may also name [run] keys. Unknown keys and
/// unparsable values raise ConfigError naming the file and key.
void load_config_file(const std::string& path, RunConfig& cfg);
/// Same, from text (the name is used in messages).
void load_config_text(const std::string& text, const std::string& name, RunConfig& cfg);

/// Applies one key = value setting, e.g. ("solver.tol", "1e-12").
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);

/// Comma-separated lists.
std::vector<double> parse_doubles(const std::string& text);
std::vector<int> parse_ints(const std::string& text);

/// Creates dir if needed and checks that a file can be written there.
/// Throws IoError.
void ensure_writable_dir(const std::string& dir);

}  // namespace koiter
