#pragma once

#include <string>
#include <utility>
#include <vector>

namespace spectral_embed {

/// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double value);

/// Writes `content` to `path` through a temporary file and a rename, so
/// readers never observe a partially written file.
void write_file_atomic(const std::string& path, const std::string& content);

/// Ordered `key=value` summary. Keys are lower-case snake case; values never
/// contain '='.
class KeyValueReport {
 public:
  void add(const std::string& key, const std::string& value);
  void add(const std::string& key, double value) { add(key, format_double(value)); }
  void add(const std::string& key, int value) { add(key, std::to_string(value)); }
  void add(const std::string& key, long value) { add(key, std::to_string(value)); }
  void add(const std::string& key, long long value) { add(key, std::to_string(value)); }
  void add(const std::string& key, bool value) { add(key, std::string(value ? "true" : "false")); }
  void add(const std::string& key, const char* value) { add(key, std::string(value)); }
  void append(const KeyValueReport& other);
  void append_prefixed(const std::string& prefix, const KeyValueReport& other);

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
  /// Value of the first entry with this key, or empty.
  std::string get(const std::string& key) const;
  std::string str() const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

/// Minimal CSV builder with a fixed header.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  void add_row(std::vector<std::string> cells);
  std::size_t row_count() const { return rows_.size(); }
  const std::vector<std::string>& header() const { return header_; }
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace spectral_embed
