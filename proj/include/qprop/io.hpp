#pragma once

// CSV serialization helpers shared by the command-line tools.

#include "qprop/bounds.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace qprop::io {

inline constexpr const char* kVersion = "0.3.0";

/// 12 significant digits; `inf` for infinities and `invalid` for NaN.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "invalid";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";  // folds -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string format_bound(const BoundValue& b) {
  switch (b.status()) {
    case BoundValue::Status::finite: return format_number(b.value());
    case BoundValue::Status::divergent: return "inf";
    case BoundValue::Status::invalid: return "invalid";
  }
  return "invalid";
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_row(std::vector<std::string> cells) {
    if (cells.size() != header_.size()) throw DimensionError("CsvTable: row width does not match header");
    rows_.push_back(std::move(cells));
  }

  std::size_t row_count() const { return rows_.size(); }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }

  /// Header, rows, then a `# config-hash=..., seed=..., version=...` line.
  std::string render(const std::string& config_text, std::uint64_t seed,
                     const std::vector<std::string>& notes = {}) const {
    std::ostringstream os;
    write_line(os, header_);
    for (const auto& r : rows_) write_line(os, r);
    for (const auto& n : notes) os << "# " << n << "\n";
    os << "# config-hash=" << hex64(fnv1a(config_text)) << ", seed=" << seed << ", version=" << kVersion << "\n";
    return os.str();
  }

 private:
  static void write_line(std::ostringstream& os, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os << ',';
      os << cells[i];
    }
    os << "\n";
  }

  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace qprop::io
