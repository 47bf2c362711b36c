#pragma once

#include <string>
#include <utility>
#include <vector>

namespace vort {

inline constexpr const char* kArtifactVersion = "0.1.0";

// FNV-1a 64-bit, hex encoded; stable across platforms.
std::string fnv1a_hex(const std::string& bytes);

// Shortest round-trip decimal representation, '.' decimal point, no
// locale dependence.
std::string format_double(double v);

// Minimal CSV assembly; all rows through here so formatting stays
// byte-stable.
class CsvBuilder {
 public:
  explicit CsvBuilder(const std::vector<std::string>& header);
  void row(const std::vector<std::string>& cells);
  const std::string& str() const { return buf_; }

 private:
  size_t columns_;
  std::string buf_;
};

// Append-only run directory: <parent>/<command>-<UTC stamp>-NNN.
// Every output goes through write_text so the manifest can record
// checksums; finalize writes manifest.json (the one file carrying
// timestamps).
class RunDirectory {
 public:
  static RunDirectory create(const std::string& parent,
                             const std::string& command);

  const std::string& path() const { return path_; }
  void write_text(const std::string& name, const std::string& content);
  void write_bytes(const std::string& name, const void* data, size_t size);
  void finalize(const std::string& config_hash);

  const std::vector<std::pair<std::string, std::string>>& outputs() const {
    return outputs_;
  }

 private:
  std::string path_;
  std::string started_at_;
  std::vector<std::pair<std::string, std::string>> outputs_;  // name, checksum
};

std::string utc_timestamp();

}  // namespace vort
