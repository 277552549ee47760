#include "spectral_embed/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "spectral_embed/error.hpp"

namespace spectral_embed {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw Error("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, target);
}

void KeyValueReport::add(const std::string& key, const std::string& value) {
  for (char c : key) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
    if (!ok) throw InvalidArgument("report key '" + key + "' must be lower-case snake case");
  }
  if (key.empty()) throw InvalidArgument("empty report key");
  std::string v = value.empty() ? std::string("none") : value;
  for (char& c : v) {
    if (c == '=' || c == '\n') c = '_';
  }
  entries_.emplace_back(key, std::move(v));
}

void KeyValueReport::append(const KeyValueReport& other) {
  entries_.insert(entries_.end(), other.entries_.begin(), other.entries_.end());
}

void KeyValueReport::append_prefixed(const std::string& prefix, const KeyValueReport& other) {
  for (const auto& [k, v] : other.entries_) add(prefix + k, v);
}

std::string KeyValueReport::get(const std::string& key) const {
  for (const auto& [k, v] : entries_) {
    if (k == key) return v;
  }
  return {};
}

std::string KeyValueReport::str() const {
  std::ostringstream out;
  for (const auto& [k, v] : entries_) out << k << '=' << v << '\n';
  return out.str();
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) {
    throw InvalidArgument("csv row has " + std::to_string(cells.size()) + " cells, header has " +
                          std::to_string(header_.size()));
  }
  rows_.push_back(std::move(cells));
}

std::string CsvTable::str() const {
  std::ostringstream out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      out << cells[i];
    }
    out << '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out.str();
}

}  // namespace spectral_embed
