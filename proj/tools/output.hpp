#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace koiter::tools {

/// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

/// Files written by one invocation, each with its checksum.
class Manifest {
 public:
  explicit Manifest(std::string dir) : dir_(std::move(dir)) {}

  /// Writes dir/name and records it. Throws IoError.
  void write(const std::string& name, const std::string& content);
  const std::string& dir() const { return dir_; }
  const std::vector<std::string>& files() const { return names_; }

  /// Writes manifest.json with the given extra fields.
  void finish(nlohmann::json info) const;

 private:
  std::string dir_;
  std::vector<std::string> names_;
  nlohmann::json entries_ = nlohmann::json::array();
};

}  // namespace koiter::tools
