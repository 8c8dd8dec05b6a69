#include "stpot/artifacts.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "stpot/error.hpp"

namespace stpot {

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string format_hash(std::uint64_t h) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

std::string format_with(const char* fmt, double v) {
  if (std::isnan(v)) return "NA";
  char buf[40];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

}  // namespace

std::string format_full(double v) { return format_with("%.17g", v); }
std::string format_short(double v) { return format_with("%.10g", v); }

ArtifactWriter::ArtifactWriter(std::string name, std::uint64_t config_hash)
    : name_(std::move(name)), config_hash_(config_hash) {}

void ArtifactWriter::meta(const std::string& key, const std::string& value) {
  meta_.emplace_back(key, value);
}

void ArtifactWriter::meta(const std::string& key, double value) {
  meta_.emplace_back(key, format_short(value));
}

void ArtifactWriter::columns(const std::vector<std::string>& names) {
  columns_ = names;
}

void ArtifactWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != columns_.size()) {
    throw std::invalid_argument("artifact row width does not match columns");
  }
  rows_.push_back(fields);
}

void ArtifactWriter::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write artifact '" + path + "'");
  out << "# stpot " << name_ << " v1\n";
  out << "# config " << format_hash(config_hash_) << "\n";
  for (const auto& [k, v] : meta_) out << "# " << k << " " << v << "\n";
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    out << (c ? "\t" : "") << columns_[c];
  }
  out << "\n";
  for (const auto& r : rows_) {
    for (std::size_t c = 0; c < r.size(); ++c) {
      out << (c ? "\t" : "") << r[c];
    }
    out << "\n";
  }
  if (!out) throw DataError("failed while writing artifact '" + path + "'");
}

ArtifactData read_artifact(const std::string& path,
                           const std::string& expected_name) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open artifact '" + path + "'");
  ArtifactData data;
  std::string line;
  bool header_done = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!header_done) {
      if (line.rfind("# stpot ", 0) == 0) {
        std::istringstream ss(line.substr(8));
        ss >> data.name;
        continue;
      }
      if (line.rfind("# config ", 0) == 0) {
        data.config_hash = std::stoull(line.substr(9), nullptr, 16);
        continue;
      }
      if (line.rfind("# ", 0) == 0) {
        std::string body = line.substr(2);
        std::size_t sp = body.find(' ');
        if (sp != std::string::npos) {
          data.meta[body.substr(0, sp)] = body.substr(sp + 1);
        }
        continue;
      }
      // First non-comment line holds the column names.
      header_done = true;
      std::istringstream ss(line);
      std::string tok;
      while (std::getline(ss, tok, '\t')) data.columns.push_back(tok);
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::istringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, '\t')) fields.push_back(tok);
    while (fields.size() < data.columns.size()) fields.emplace_back();
    data.rows.push_back(std::move(fields));
  }
  if (data.name != expected_name) {
    throw DataError("artifact '" + path + "' holds '" + data.name +
                    "', expected '" + expected_name + "'");
  }
  return data;
}

void require_artifact(const std::string& path, const std::string& stage) {
  if (!std::filesystem::exists(path)) {
    throw DataError("missing input '" + path + "'; run the '" + stage +
                    "' stage first");
  }
}

}  // namespace stpot
