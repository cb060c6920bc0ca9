#pragma once

// Run manifests: what a command was asked to do and what it read, enough to
// replay it. No timestamps or host data, so identical runs give identical
// manifests.
//
//   nsi-manifest<TAB>1
//   command<TAB>name
//   tool_version<TAB>version
//   config<TAB>key<TAB>value        in insertion order
//   input<TAB>file name<TAB>sha256
//   output<TAB>file name<TAB>sha256

#include <string>
#include <utility>
#include <vector>

namespace nsi {

inline constexpr const char* kToolVersion = "1.0.0";

/// Hex SHA-256 of a byte string / of a file's contents (IoError if unreadable).
std::string sha256_hex(const std::string& bytes);
std::string file_sha256(const std::string& path);

struct RunManifest {
  std::string command;
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<std::pair<std::string, std::string>> inputs;   ///< file name, digest
  std::vector<std::pair<std::string, std::string>> outputs;  ///< file name, digest
  std::string tool_version = kToolVersion;

  void set(const std::string& key, const std::string& value);
  /// Records a file by its base name and digest.
  void add_input(const std::string& path);
  void add_output(const std::string& path);

  std::string format() const;
};

/// `<dir>/<command>.manifest` when dir is nonempty, else `<primary output>.manifest`.
std::string manifest_path(const std::string& dir, const std::string& command, const std::string& primary_output);

}  // namespace nsi
