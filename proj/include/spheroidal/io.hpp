// Copyright (c) 2026, the spheroidal authors.
// SPDX-License-Identifier: Apache-2.0
//
// Text formats: suspension description files, key = value experiment
// configuration, and deterministic CSV output.
//
// Suspension file: one particle per line,
//   <prolate|oblate> u0 a cx cy cz qw qx qy qz
// with '#' comments and blank lines ignored.

#ifndef SPHEROIDAL_IO_HPP
#define SPHEROIDAL_IO_HPP

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "spheroidal/errors.hpp"
#include "spheroidal/geometry.hpp"

namespace spheroidal {

inline std::vector<SpheroidShape> parse_suspension(std::istream& in,
                                                   const std::string& name = "<suspension>") {
  std::vector<SpheroidShape> shapes;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string kind_word;
    if (!(ls >> kind_word)) continue;  // blank line
    SpheroidKind kind;
    if (kind_word == "prolate")
      kind = SpheroidKind::Prolate;
    else if (kind_word == "oblate")
      kind = SpheroidKind::Oblate;
    else
      throw ConfigError(name + ":" + std::to_string(lineno) +
                        ": expected 'prolate' or 'oblate', got '" + kind_word + "'");
    double u0, a, cx, cy, cz, qw, qx, qy, qz;
    if (!(ls >> u0 >> a >> cx >> cy >> cz >> qw >> qx >> qy >> qz))
      throw ConfigError(name + ":" + std::to_string(lineno) +
                        ": expected 9 numbers after the kind");
    std::string extra;
    if (ls >> extra)
      throw ConfigError(name + ":" + std::to_string(lineno) + ": trailing token '" + extra + "'");
    try {
      shapes.emplace_back(kind, u0, a, vec3{cx, cy, cz}, quat{qw, qx, qy, qz});
    } catch (const std::invalid_argument& e) {
      throw ConfigError(name + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (shapes.empty()) throw ConfigError(name + ": no particles");
  return shapes;
}

inline std::vector<SpheroidShape> load_suspension(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open suspension file '" + path + "'");
  return parse_suspension(in, path);
}

inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline void write_suspension(std::ostream& out, const std::vector<SpheroidShape>& shapes) {
  out << "# kind u0 a cx cy cz qw qx qy qz\n";
  for (const auto& s : shapes) {
    out << (s.kind() == SpheroidKind::Prolate ? "prolate" : "oblate");
    const quat q = s.orientation();
    for (double v : {s.u0(), s.focal(), s.center().x, s.center().y, s.center().z, q.w, q.x, q.y,
                     q.z})
      out << ' ' << format_double(v);
    out << '\n';
  }
}

/// Flat key = value configuration with '#' comments. Every key that is read
/// gets marked; reject_unknown() then flags typos.
class ConfigMap {
 public:
  ConfigMap() = default;

  static ConfigMap from_stream(std::istream& in, const std::string& name = "<config>") {
    ConfigMap cfg;
    cfg.name_ = name;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        if (line.find_first_not_of(" \t\r") != std::string::npos)
          throw ConfigError(name + ":" + std::to_string(lineno) + ": expected 'key = value'");
        continue;
      }
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty())
        throw ConfigError(name + ":" + std::to_string(lineno) + ": empty key");
      cfg.values_[key] = value;
    }
    return cfg;
  }

  static ConfigMap from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return from_stream(in, path);
  }

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string get_string(const std::string& key, const std::string& fallback) const {
    used_.insert(key);
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  double get_double(const std::string& key, double fallback) const {
    used_.insert(key);
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    return parse_double(key, it->second);
  }

  long get_long(const std::string& key, long fallback) const {
    used_.insert(key);
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
      return std::stol(it->second);
    } catch (...) {
      throw ConfigError(name_ + ": key '" + key + "': expected an integer, got '" + it->second +
                        "'");
    }
  }

  std::vector<double> get_doubles(const std::string& key,
                                  const std::vector<double>& fallback) const {
    used_.insert(key);
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<double> out;
    for (const auto& tok : split_list(it->second)) out.push_back(parse_double(key, tok));
    return out;
  }

  std::vector<int> get_ints(const std::string& key, const std::vector<int>& fallback) const {
    used_.insert(key);
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<int> out;
    for (const auto& tok : split_list(it->second)) out.push_back(int(std::stol(tok)));
    return out;
  }

  std::vector<std::string> get_strings(const std::string& key,
                                       const std::vector<std::string>& fallback) const {
    used_.insert(key);
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    return split_list(it->second);
  }

  /// Throws if the file contained keys that were never consumed.
  void reject_unknown() const {
    for (const auto& [key, value] : values_)
      if (!used_.count(key))
        throw ConfigError(name_ + ": unknown key '" + key + "'");
  }

  /// FNV-1a hash over the stored key = value pairs, for output metadata.
  std::uint64_t content_hash() const {
    std::uint64_t h = 1469598103934665603ull;
    auto feed = [&](const std::string& s) {
      for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
      }
    };
    for (const auto& [key, value] : values_) {
      feed(key);
      feed("=");
      feed(value);
      feed(";");
    }
    return h;
  }

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

  static std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
      if (c == ',' || c == ' ' || c == '\t') {
        if (!cur.empty()) out.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
  }

  double parse_double(const std::string& key, const std::string& tok) const {
    try {
      std::size_t pos = 0;
      const double v = std::stod(tok, &pos);
      if (pos != tok.size()) throw std::invalid_argument(tok);
      return v;
    } catch (...) {
      throw ConfigError(name_ + ": key '" + key + "': expected a number, got '" + tok + "'");
    }
  }

  std::string name_ = "<config>";
  std::map<std::string, std::string> values_;
  mutable std::set<std::string> used_;
};

/// CSV table with '#' metadata header lines; doubles are written with 17
/// significant digits so identical runs are byte-identical.
class CsvWriter {
 public:
  CsvWriter(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void add_meta(const std::string& key, const std::string& value) {
    meta_.emplace_back(key, value);
  }

  void add_row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_.size()) throw std::logic_error("CsvWriter: cell count mismatch");
    rows_.push_back(cells);
  }

  void add_row_values(const std::vector<double>& vals) {
    std::vector<std::string> cells;
    cells.reserve(vals.size());
    for (double v : vals) cells.push_back(format_double(v));
    add_row(cells);
  }

  void write(std::ostream& out) const {
    for (const auto& [k, v] : meta_) out << "# " << k << "=" << v << "\n";
    for (std::size_t c = 0; c < columns_.size(); ++c)
      out << columns_[c] << (c + 1 < columns_.size() ? "," : "\n");
    for (const auto& row : rows_) {
      for (std::size_t c = 0; c < row.size(); ++c)
        out << row[c] << (c + 1 < row.size() ? "," : "\n");
    }
  }

  void write_file(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open output file '" + path + "'");
    write(out);
  }

  std::string to_string() const {
    std::ostringstream ss;
    write(ss);
    return ss.str();
  }

 private:
  std::vector<std::string> columns_;
  std::vector<std::pair<std::string, std::string>> meta_;
  std::vector<std::vector<std::string>> rows_;
};

inline constexpr const char* library_version = "0.1.0";

}  // namespace spheroidal

#endif  // SPHEROIDAL_IO_HPP
