#include "injectbench/manifest.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "injectbench/errors.hpp"
#include "injectbench/util.hpp"

namespace injectbench::manifest {
namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

std::string interpolate_env(const std::string& value, const std::string& key_for_error) {
  std::string out;
  std::size_t at = 0;
  while (true) {
    std::size_t open = value.find("${", at);
    if (open == std::string::npos) {
      out += value.substr(at);
      return out;
    }
    std::size_t close = value.find('}', open + 2);
    if (close == std::string::npos) {
      throw ValidationError(key_for_error + ": unterminated ${ in '" + value + "'");
    }
    out += value.substr(at, open - at);
    const std::string var = value.substr(open + 2, close - open - 2);
    if (var.empty()) throw ValidationError(key_for_error + ": empty ${} reference");
    const char* env = std::getenv(var.c_str());
    if (!env) {
      throw ValidationError(key_for_error + ": environment variable " + var + " is not set");
    }
    out += env;
    at = close + 1;
  }
}

RunManifest RunManifest::parse(const std::string& text, const std::string& origin) {
  RunManifest m;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ValidationError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(stripped.substr(0, eq));
    std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) {
      throw ValidationError(origin + ":" + std::to_string(lineno) + ": empty key");
    }
    if (m.values_.count(key)) {
      throw ValidationError(origin + ":" + std::to_string(lineno) + ": duplicate key " + key);
    }
    m.values_[key] = interpolate_env(value, key);
  }
  return m;
}

RunManifest RunManifest::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open manifest " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path.string());
}

void RunManifest::set(const std::string& key, std::string value) {
  values_[key] = std::move(value);
}

bool RunManifest::has(const std::string& key) const { return values_.count(key) > 0; }

const std::string& RunManifest::required(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ValidationError("manifest is missing required key " + key);
  return it->second;
}

std::string RunManifest::get(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

long RunManifest::get_long(const std::string& key, long fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    return std::stol(it->second);
  } catch (const std::exception&) {
    throw ValidationError("manifest key " + key + " is not an integer: '" + it->second + "'");
  }
}

std::uint64_t RunManifest::get_u64(const std::string& key, std::uint64_t fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    return std::stoull(it->second);
  } catch (const std::exception&) {
    throw ValidationError("manifest key " + key + " is not an integer: '" + it->second + "'");
  }
}

std::vector<modelio::ModelEndpoint> RunManifest::endpoints() const {
  std::vector<modelio::ModelEndpoint> out;
  const std::string prefix = "endpoint.";
  for (const auto& [key, value] : values_) {
    if (key.rfind(prefix, 0) != 0) continue;
    const std::string rest = key.substr(prefix.size());
    if (rest.find('.') != std::string::npos) continue;  // per-endpoint overrides
    out.push_back(modelio::parse_endpoint_flag(rest + "=" + value));
    modelio::ModelEndpoint& ep = out.back();
    ep.model = get(prefix + rest + ".model", ep.model);
    ep.api_key_env = get(prefix + rest + ".api_key_env", ep.api_key_env);
    ep.timeout = std::chrono::milliseconds(
        get_long(prefix + rest + ".timeout_ms", ep.timeout.count()));
    ep.max_inflight = static_cast<int>(
        get_long(prefix + rest + ".max_inflight", ep.max_inflight));
    modelio::validate_endpoint(ep);
  }
  return out;
}

std::string RunManifest::hash() const {
  std::string canonical;
  for (const auto& [key, value] : values_) {  // std::map: sorted
    canonical += key;
    canonical += '=';
    canonical += value;
    canonical += '\n';
  }
  return util::to_hex(util::fnv1a64(canonical));
}

}  // namespace injectbench::manifest
