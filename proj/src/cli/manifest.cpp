#include "manifest.hpp"

#include <cstdio>
#include <fstream>

#include "../byte_io.hpp"
#include "hyperocc/error.hpp"

namespace hyperocc::cli {

std::uint64_t fnv1a64(const std::uint8_t* data, std::size_t size, std::uint64_t h) {
  for (std::size_t i = 0; i < size; ++i) {
    h ^= data[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {
std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}
}  // namespace

std::string file_digest(const std::filesystem::path& path) {
  const auto bytes = detail::read_file(path);
  return hex64(fnv1a64(bytes.data(), bytes.size()));
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void Manifest::input(const std::string& flag, const std::filesystem::path& path) {
  arg(flag, path.string());
  inputs_.emplace_back(path.string(), file_digest(path));
}

void Manifest::output(const std::string& flag, const std::string& path) {
  arg(flag, path);
  outputs_.emplace_back(flag, path);
}

nlohmann::ordered_json Manifest::to_json() const {
  nlohmann::ordered_json j;
  j["tool"] = "hyperocc";
  j["manifest_version"] = 1;
  j["subcommand"] = subcommand_;
  auto args = nlohmann::ordered_json::array();
  for (const auto& [flag, value] : args_) {
    args.push_back(flag);
    if (!value.empty()) args.push_back(value);
  }
  j["args"] = args;
  auto inputs = nlohmann::ordered_json::array();
  for (const auto& [path, digest] : inputs_) inputs.push_back({{"path", path}, {"fnv1a64", digest}});
  j["inputs"] = inputs;
  auto outputs = nlohmann::ordered_json::object();
  for (const auto& [flag, path] : outputs_) outputs[flag] = path;
  j["outputs"] = outputs;

  // Run id: hash of everything except output locations.
  std::string identity = subcommand_;
  for (const auto& [flag, value] : args_) {
    const bool is_output = std::any_of(outputs_.begin(), outputs_.end(),
                                       [&](const auto& o) { return o.first == flag; });
    if (!is_output) identity += "\x1f" + flag + "=" + value;
  }
  for (const auto& [path, digest] : inputs_) identity += "\x1e" + digest;
  j["run_id"] = hex64(fnv1a64(reinterpret_cast<const std::uint8_t*>(identity.data()), identity.size()));
  return j;
}

void Manifest::write(const std::filesystem::path& path) const {
  const std::string text = to_json().dump(2) + "\n";
  detail::write_file(path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

std::vector<std::string> replay_args(const nlohmann::json& manifest, const std::filesystem::path& out_dir) {
  if (!manifest.contains("subcommand") || !manifest.contains("args")) {
    throw Error(ErrorCode::Config, "manifest lacks subcommand/args");
  }
  for (const auto& in : manifest.value("inputs", nlohmann::json::array())) {
    const std::string path = in.at("path");
    if (file_digest(path) != in.at("fnv1a64").get<std::string>()) {
      throw Error(ErrorCode::InvariantViolation, "input " + path + " changed since the manifest was written");
    }
  }
  std::vector<std::string> args{manifest.at("subcommand").get<std::string>()};
  const auto outputs = manifest.value("outputs", nlohmann::json::object());
  const auto& list = manifest.at("args");
  for (std::size_t i = 0; i < list.size(); ++i) {
    std::string a = list[i];
    args.push_back(a);
    if (!out_dir.empty() && outputs.contains(a) && i + 1 < list.size()) {
      std::string value = list[++i];
      std::string remapped;
      // Comma-separated output lists (synth --out a,b) are remapped element-wise.
      std::size_t start = 0;
      while (true) {
        const auto comma = value.find(',', start);
        const std::string part = value.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        if (!remapped.empty()) remapped += ',';
        remapped += (out_dir / std::filesystem::path(part).filename()).string();
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
      args.push_back(remapped);
    }
  }
  return args;
}

}  // namespace hyperocc::cli
