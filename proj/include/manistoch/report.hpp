#ifndef MANISTOCH_REPORT_HPP
#define MANISTOCH_REPORT_HPP

#include <charconv>
#include <cmath>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "manistoch/errors.hpp"

namespace manistoch {

inline constexpr std::string_view tool_version = "1.0.0";

struct Metric {
  std::string name;
  double value = 0.0;
  double se = 0.0;
};

struct Verdict {
  std::string criterion;
  bool passed = false;
  std::string detail;
};

/// A CSV file: fixed header, rows of preformatted cells.
struct CsvTable {
  std::string name;  // file name
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  template <class... Cells>
  void add(const Cells&... cells) {
    rows.push_back({cell(cells)...});
  }

  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  static std::string cell(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
  }
  static std::string cell(bool b) { return b ? "true" : "false"; }
  template <class I>
    requires std::is_integral_v<I>
  static std::string cell(I i) {
    return std::to_string(i);
  }
};

struct ExperimentReport {
  std::string id;
  std::string manifold;
  std::vector<Metric> metrics;
  std::vector<Verdict> verdicts;
  std::deque<CsvTable> tables;  // deque: table() hands out stable references
  std::vector<std::string> notes;
  std::vector<Metric> timings;  // wall-clock seconds; kept out of report.json

  void metric(std::string name, double value, double se = 0.0) { metrics.push_back({std::move(name), value, se}); }
  void timing(std::string name, double seconds) { timings.push_back({std::move(name), seconds, 0.0}); }
  double total_seconds() const {
    double s = 0.0;
    for (const auto& t : timings) s += t.value;
    return s;
  }
  bool verdict(std::string criterion, bool passed, std::string detail = {}) {
    verdicts.push_back({std::move(criterion), passed, std::move(detail)});
    return passed;
  }
  CsvTable& table(std::string name, std::vector<std::string> header) {
    tables.push_back({std::move(name), std::move(header), {}});
    return tables.back();
  }
  const Metric* find_metric(std::string_view name) const {
    for (const auto& m : metrics) {
      if (m.name == name) return &m;
    }
    return nullptr;
  }
  const Verdict* find_verdict(std::string_view name) const {
    for (const auto& v : verdicts) {
      if (v.criterion == name) return &v;
    }
    return nullptr;
  }
  /// No verdict counts as a failure.
  bool passed() const {
    if (verdicts.empty()) return false;
    for (const auto& v : verdicts) {
      if (!v.passed) return false;
    }
    return true;
  }
};

/// 64-bit FNV-1a, printed as 16 hex digits.
inline std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  static constexpr char digits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = digits[h & 0xf];
    h >>= 4;
  }
  return s;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string to_csv(const CsvTable& t) {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += csv_escape(cells[i]);
    }
    out += "\r\n";
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
  return out;
}

/// JSON number, or a string for non-finite values.
inline nlohmann::ordered_json json_number(double x) {
  if (std::isfinite(x)) return x;
  return CsvTable::cell(x);
}

inline nlohmann::ordered_json to_json(const ExperimentReport& r, const std::string& config_hash, std::uint64_t seed) {
  nlohmann::ordered_json j;
  j["experiment"] = r.id;
  j["manifold"] = r.manifold;
  j["tool_version"] = std::string(tool_version);
  j["config_hash"] = config_hash;
  j["seed"] = seed;
  j["passed"] = r.passed();
  auto& metrics = j["metrics"];
  metrics = nlohmann::ordered_json::object();
  for (const auto& m : r.metrics) metrics[m.name] = {{"value", json_number(m.value)}, {"se", json_number(m.se)}};
  auto& verdicts = j["verdicts"];
  verdicts = nlohmann::ordered_json::array();
  for (const auto& v : r.verdicts) verdicts.push_back({{"criterion", v.criterion}, {"passed", v.passed}, {"detail", v.detail}});
  auto& files = j["files"];
  files = nlohmann::ordered_json::array();
  for (const auto& t : r.tables) files.push_back(t.name);
  if (!r.notes.empty()) j["notes"] = r.notes;
  return j;
}

/// Writes via a temporary file in the same directory and renames it.
inline void write_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::create_directories(path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

/// report.json plus one CSV per table in `dir`.
inline void write_report(const std::filesystem::path& dir, const ExperimentReport& r, const std::string& config_hash,
                         std::uint64_t seed) {
  for (const auto& t : r.tables) write_atomic(dir / t.name, to_csv(t));
  write_atomic(dir / "report.json", to_json(r, config_hash, seed).dump(2) + "\n");
}

}  // namespace manistoch

#endif  // MANISTOCH_REPORT_HPP
