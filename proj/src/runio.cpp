#include "vort2d/runio.hpp"

#include <json.hpp>

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>

#include "vort2d/errors.hpp"

namespace vort {

std::string fnv1a_hex(const std::string& bytes) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

CsvBuilder::CsvBuilder(const std::vector<std::string>& header)
    : columns_(header.size()) {
  row(header);
}

void CsvBuilder::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_)
    throw InvariantError("csv row width mismatch");
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i) buf_ += ',';
    buf_ += cells[i];
  }
  buf_ += '\n';
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y%m%dT%H%M%SZ", &tm);
  return std::string(buf);
}

RunDirectory RunDirectory::create(const std::string& parent,
                                  const std::string& command) {
  namespace fs = std::filesystem;
  fs::create_directories(parent);
  const std::string stamp = utc_timestamp();
  for (int seq = 0;; ++seq) {
    char name[128];
    std::snprintf(name, sizeof(name), "%s-%s-%03d", command.c_str(),
                  stamp.c_str(), seq);
    const fs::path candidate = fs::path(parent) / name;
    std::error_code ec;
    if (fs::create_directory(candidate, ec)) {
      RunDirectory dir;
      dir.path_ = candidate.string();
      dir.started_at_ = stamp;
      return dir;
    }
    if (ec && !fs::exists(candidate))
      throw InvariantError("cannot create run directory: " + candidate.string());
    if (seq > 9999)
      throw InvariantError("run directory namespace exhausted under " + parent);
  }
}

void RunDirectory::write_text(const std::string& name,
                              const std::string& content) {
  write_bytes(name, content.data(), content.size());
}

void RunDirectory::write_bytes(const std::string& name, const void* data,
                               size_t size) {
  const std::string full = path_ + "/" + name;
  std::filesystem::create_directories(
      std::filesystem::path(full).parent_path());
  std::ofstream out(full, std::ios::binary);
  if (!out) throw InvariantError("cannot open output file: " + full);
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
  if (!out) throw InvariantError("short write: " + full);
  outputs_.emplace_back(
      name, fnv1a_hex(std::string(static_cast<const char*>(data), size)));
}

void RunDirectory::finalize(const std::string& config_hash) {
  nlohmann::json j;
  j["config_hash"] = config_hash;
  j["artifact_version"] = kArtifactVersion;
  j["started_at"] = started_at_;
  j["finished_at"] = utc_timestamp();
  nlohmann::json outs;
  for (const auto& [name, checksum] : outputs_) outs[name] = checksum;
  j["outputs"] = outs;
  const std::string text = j.dump(2) + "\n";
  const std::string full = path_ + "/manifest.json";
  std::ofstream out(full, std::ios::binary);
  if (!out) throw InvariantError("cannot write manifest: " + full);
  out << text;
}

}  // namespace vort
