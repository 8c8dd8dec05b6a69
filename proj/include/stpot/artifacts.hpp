#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace stpot {

/** FNV-1a 64-bit hash; used to stamp artifacts with their configuration. */
std::uint64_t fnv1a64(const std::string& s);

std::string format_hash(std::uint64_t h);

/** Fixed shortest-roundtrip formatting for reproducible artifacts. */
std::string format_full(double v);   // %.17g, "NA" for NaN
std::string format_short(double v);  // %.10g, "NA" for NaN

/**
 * Tab-separated artifact with a commented header carrying the artifact name
 * and the configuration hash.  Layout:
 *   # stpot <name> v1
 *   # config <hex hash>
 *   # <key> <value>          (zero or more)
 *   col1\tcol2...
 *   ...rows...
 */
class ArtifactWriter {
 public:
  ArtifactWriter(std::string name, std::uint64_t config_hash);

  void meta(const std::string& key, const std::string& value);
  void meta(const std::string& key, double value);
  void columns(const std::vector<std::string>& names);
  void row(const std::vector<std::string>& fields);

  /** Writes the artifact; throws DataError when the file cannot be opened. */
  void save(const std::string& path) const;

 private:
  std::string name_;
  std::uint64_t config_hash_;
  std::vector<std::pair<std::string, std::string>> meta_;
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

struct ArtifactData {
  std::string name;
  std::uint64_t config_hash = 0;
  std::map<std::string, std::string> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

/** Reads an artifact back; `expected_name` guards against stage mixups. */
ArtifactData read_artifact(const std::string& path,
                           const std::string& expected_name);

/** Throws DataError naming the producing stage when `path` does not exist. */
void require_artifact(const std::string& path, const std::string& stage);

}  // namespace stpot
