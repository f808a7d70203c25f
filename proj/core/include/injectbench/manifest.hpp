#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "injectbench/modelio.hpp"

namespace injectbench::manifest {

/// Flat key=value run configuration. `${VAR}` in a value interpolates
/// the environment at load time; secrets stay out of the file — auth
/// keys are referenced by env var *name* on the endpoint instead.
class RunManifest {
public:
  RunManifest() = default;

  static RunManifest load(const std::filesystem::path& path);
  /// Parses "key = value" lines ('#' comments, blank lines ignored).
  static RunManifest parse(const std::string& text, const std::string& origin = "<memory>");

  void set(const std::string& key, std::string value);
  bool has(const std::string& key) const;
  const std::string& required(const std::string& key) const;  // throws ValidationError
  std::string get(const std::string& key, const std::string& fallback = "") const;
  long get_long(const std::string& key, long fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;

  /// Endpoint definitions: "endpoint.<name> = <url>:<capability>", with
  /// optional "endpoint.<name>.model", ".timeout_ms", ".max_inflight",
  /// ".api_key_env" overrides.
  std::vector<modelio::ModelEndpoint> endpoints() const;

  /// FNV-1a hex digest of the sorted, interpolated "key=value" lines;
  /// stamped into artifact headers as the manifest hash.
  std::string hash() const;

  const std::map<std::string, std::string>& values() const { return values_; }

private:
  std::map<std::string, std::string> values_;
};

/// Replaces each ${NAME} with the environment value; an unset variable
/// is an error naming both the variable and the key.
std::string interpolate_env(const std::string& value, const std::string& key_for_error);

}  // namespace injectbench::manifest
