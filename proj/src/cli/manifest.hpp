#pragma once

// Run manifests: the fully resolved argument list of a run plus digests of its
// inputs, enough to re-execute it exactly.

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace hyperocc::cli {

std::uint64_t fnv1a64(const std::uint8_t* data, std::size_t size, std::uint64_t h = 0xcbf29ce484222325ULL);
std::string file_digest(const std::filesystem::path& path);
std::string format_double(double v);

class Manifest {
 public:
  explicit Manifest(std::string subcommand) : subcommand_(std::move(subcommand)) {}

  void arg(const std::string& flag, const std::string& value) { args_.emplace_back(flag, value); }
  void arg(const std::string& flag, double value) { arg(flag, format_double(value)); }
  void arg(const std::string& flag, std::uint64_t value) { arg(flag, std::to_string(value)); }
  void switch_flag(const std::string& flag) { args_.emplace_back(flag, std::string{}); }
  void input(const std::string& flag, const std::filesystem::path& path);
  void output(const std::string& flag, const std::string& path);

  nlohmann::ordered_json to_json() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::string subcommand_;
  std::vector<std::pair<std::string, std::string>> args_;
  std::vector<std::pair<std::string, std::string>> inputs_;   // path, digest
  std::vector<std::pair<std::string, std::string>> outputs_;  // flag, path
};

/// Argument vector (subcommand first) reconstructed from a manifest. When
/// `out_dir` is non-empty every output path is moved into it. Throws on
/// input digest mismatch.
std::vector<std::string> replay_args(const nlohmann::json& manifest, const std::filesystem::path& out_dir);

}  // namespace hyperocc::cli
