#pragma once
// CSV and JSON artifacts. CSV files carry a "# key=value" preamble followed
// by a header row; numbers are written in shortest round-trip form, so
// reading a file and writing it back reproduces it byte for byte.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "fpcs/engine.hpp"
#include "fpcs/error.hpp"
#include "fpcs/overlap.hpp"

namespace fpcs {

inline constexpr std::string_view kToolVersion = "fpcs 0.1.0";

using Json = nlohmann::ordered_json;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest decimal form that parses back to the same double.
inline std::string format_number(double v) { return fmt::format("{}", v); }
inline std::string format_number(std::int64_t v) { return fmt::format("{}", v); }
inline std::string format_number(int v) { return fmt::format("{}", v); }

struct CsvDocument {
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_meta(std::string key, std::string value) { meta.emplace_back(std::move(key), std::move(value)); }

  const std::string* find_meta(std::string_view key) const {
    for (const auto& [k, v] : meta)
      if (k == key) return &v;
    return nullptr;
  }

  std::size_t column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw IoError("csv: no column named '" + std::string(name) + "'");
  }

  void write(std::ostream& out) const {
    auto check = [](std::string_view cell) {
      if (cell.find_first_of(",\n\r\"") != std::string_view::npos)
        throw IoError("csv: cell '" + std::string(cell) + "' contains a separator or quote");
    };
    for (const auto& [k, v] : meta) {
      if (k.find('=') != std::string::npos || v.find('\n') != std::string::npos) throw IoError("csv: malformed metadata entry");
      out << "# " << k << '=' << v << '\n';
    }
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        check(cells[i]);
        if (i) out << ',';
        out << cells[i];
      }
      out << '\n';
    };
    line(header);
    for (const auto& r : rows) {
      if (r.size() != header.size()) throw IoError("csv: row width does not match header");
      line(r);
    }
  }

  std::string str() const {
    std::ostringstream os;
    write(os);
    return os.str();
  }

  static CsvDocument parse(std::istream& in) {
    CsvDocument doc;
    std::string line;
    bool have_header = false;
    auto split = [](const std::string& s) {
      std::vector<std::string> cells;
      std::size_t start = 0;
      for (;;) {
        const std::size_t comma = s.find(',', start);
        cells.push_back(s.substr(start, comma - start));
        if (comma == std::string::npos) return cells;
        start = comma + 1;
      }
    };
    while (std::getline(in, line)) {
      if (!have_header && line.rfind("# ", 0) == 0) {
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) throw IoError("csv: metadata line without '=': " + line);
        doc.add_meta(line.substr(2, eq - 2), line.substr(eq + 1));
        continue;
      }
      if (!have_header) {
        doc.header = split(line);
        have_header = true;
        continue;
      }
      auto cells = split(line);
      if (cells.size() != doc.header.size()) throw IoError("csv: row width does not match header: " + line);
      doc.rows.push_back(std::move(cells));
    }
    if (!have_header) throw IoError("csv: missing header row");
    return doc;
  }

  static CsvDocument parse(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
  }

  /// {"meta": {...}, "columns": [...], "rows": [[...]]}; numeric cells become numbers.
  Json to_json() const {
    Json j;
    Json m = Json::object();
    for (const auto& [k, v] : meta) m[k] = v;
    j["meta"] = std::move(m);
    j["columns"] = header;
    Json rs = Json::array();
    for (const auto& r : rows) {
      Json row = Json::array();
      for (const std::string& cell : r) {
        char* end = nullptr;
        const long long i = std::strtoll(cell.c_str(), &end, 10);
        if (!cell.empty() && end == cell.c_str() + cell.size()) {
          row.push_back(static_cast<std::int64_t>(i));
          continue;
        }
        const double v = std::strtod(cell.c_str(), &end);
        if (!cell.empty() && end == cell.c_str() + cell.size()) row.push_back(v);
        else row.push_back(cell);
      }
      rs.push_back(std::move(row));
    }
    j["rows"] = std::move(rs);
    return j;
  }
};

inline double parse_double(std::string_view cell) {
  const std::string s(cell);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw IoError("csv: not a number: '" + s + "'");
  return v;
}

// ---- traces ---------------------------------------------------------------

inline CsvDocument trace_to_csv(const Trace& t) {
  CsvDocument doc;
  doc.add_meta("version", std::string(kToolVersion));
  doc.add_meta("lambda", format_number(t.lambda));
  doc.add_meta("delta", t.delta ? format_number(*t.delta) : "none");
  doc.add_meta("mode", std::string(to_string(t.mode)));
  doc.add_meta("depol", t.depol ? format_number(*t.depol) : "none");
  doc.header = {"q", "p"};
  for (const TracePoint& pt : t.points) doc.rows.push_back({format_number(pt.q), format_number(pt.p)});
  return doc;
}

inline Trace trace_from_csv(const CsvDocument& doc) {
  auto need = [&](std::string_view key) -> const std::string& {
    const std::string* v = doc.find_meta(key);
    if (!v) throw IoError("trace csv: missing metadata '" + std::string(key) + "'");
    return *v;
  };
  Trace t;
  t.lambda = parse_double(need("lambda"));
  if (need("delta") != "none") t.delta = parse_double(need("delta"));
  t.mode = trace_mode_from_string(need("mode"));
  if (need("depol") != "none") t.depol = parse_double(need("depol"));
  const std::size_t qc = doc.column("q"), pc = doc.column("p");
  for (const auto& r : doc.rows) t.points.push_back({static_cast<std::int64_t>(parse_double(r[qc])), parse_double(r[pc])});
  return t;
}

// ---- JSON -----------------------------------------------------------------

inline std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

inline Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("json: ") + e.what());
  }
}

inline Json to_json(const OverlapEstimate& e) {
  Json j;
  j["lambda"] = e.lambda;
  j["std_error"] = e.std_error;
  j["method"] = to_string(e.method);
  j["samples_or_cells"] = e.samples_or_cells;
  if (e.seed) j["seed"] = *e.seed;
  else j["seed"] = nullptr;
  return j;
}

inline OverlapEstimate overlap_from_json(const Json& j) {
  OverlapEstimate e;
  e.lambda = j.at("lambda").get<double>();
  e.std_error = j.at("std_error").get<double>();
  e.method = overlap_method_from_string(j.at("method").get<std::string>());
  e.samples_or_cells = j.at("samples_or_cells").get<std::int64_t>();
  if (!j.at("seed").is_null()) e.seed = j.at("seed").get<std::uint64_t>();
  return e;
}

// ---- files ----------------------------------------------------------------

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

/// Writes to `path`, or to standard output when the path is empty or "-".
inline void write_text(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace fpcs
