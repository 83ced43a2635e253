#include "output.hpp"

#include <array>
#include <filesystem>
#include <fstream>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "koiter/errors.hpp"

namespace koiter::tools {

std::string sha256_hex(const std::string& bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
    throw IoError("SHA-256 digest failed");
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
  return hex;
}

void Manifest::write(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::path(dir_) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out || !out.write(content.data(), static_cast<std::streamsize>(content.size())))
    throw IoError("cannot write '" + path.string() + "'");
  names_.push_back(name);
  entries_.push_back({{"path", name}, {"bytes", content.size()}, {"sha256", sha256_hex(content)}});
}

void Manifest::finish(nlohmann::json info) const {
  info["files"] = entries_;
  const auto path = std::filesystem::path(dir_) / "manifest.json";
  std::ofstream out(path);
  if (!out || !(out << info.dump(2) << "\n")) throw IoError("cannot write '" + path.string() + "'");
}

}  // namespace koiter::tools
