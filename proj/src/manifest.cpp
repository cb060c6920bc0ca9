#include "nsi/manifest.hpp"

#include "nsi/error.hpp"
#include "nsi/graph_io.hpp"

#include <openssl/evp.h>

#include <filesystem>

namespace nsi {

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw IoError("SHA-256 computation failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

std::string file_sha256(const std::string& path) { return sha256_hex(read_text_file(path)); }

void RunManifest::set(const std::string& key, const std::string& value) {
  for (auto& kv : config) {
    if (kv.first == key) {
      kv.second = value;
      return;
    }
  }
  config.emplace_back(key, value);
}

void RunManifest::add_input(const std::string& path) {
  inputs.emplace_back(std::filesystem::path(path).filename().string(), file_sha256(path));
}

void RunManifest::add_output(const std::string& path) {
  outputs.emplace_back(std::filesystem::path(path).filename().string(), file_sha256(path));
}

std::string RunManifest::format() const {
  std::string out = "nsi-manifest\t1\ncommand\t" + command + "\ntool_version\t" + tool_version + '\n';
  for (const auto& [k, v] : config) out += "config\t" + k + '\t' + v + '\n';
  for (const auto& [k, v] : inputs) out += "input\t" + k + '\t' + v + '\n';
  for (const auto& [k, v] : outputs) out += "output\t" + k + '\t' + v + '\n';
  return out;
}

std::string manifest_path(const std::string& dir, const std::string& command, const std::string& primary_output) {
  if (!dir.empty()) return (std::filesystem::path(dir) / (command + ".manifest")).string();
  return primary_output + ".manifest";
}

}  // namespace nsi
