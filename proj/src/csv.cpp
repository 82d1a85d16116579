#include "osgood/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

#include "osgood/errors.hpp"

namespace osgood::csv {

const std::vector<Schema>& registry() {
  static const std::vector<Schema> schemas = {
      {"family_samples", 1, {"s", "f", "f_tilde", "block"}},
      {"family_sums", 1, {"blocks", "term", "partial_sum", "height"}},
      {"ode_trajectory", 1, {"time", "level", "block"}},
      {"ode_times", 1, {"target", "closed_form_time", "numeric_time", "rel_diff"}},
      {"semigroup_profile", 1, {"r", "value", "time"}},
      {"semigroup_constants", 1, {"n", "omega_n", "kernel", "M", "t_argmin"}},
      {"scaling_check", 1, {"t", "beta", "left", "right", "margin", "holds"}},
      {"picard_runs", 1, {"level", "m", "t", "rho", "local_l1", "saturated_flag"}},
      {"picard_verdict", 1, {"verdict", "rho", "t_probe", "factor_threshold", "growth_factor", "reason"}},
      {"certificates", 1, {"i", "log_phi_i", "log_t_i", "log_lower_bound", "admissible", "height"}},
      {"certificate_summary", 1, {"verdict", "binding", "alpha", "beta", "M", "first_admissible"}},
      {"regimes", 1, {"n", "q", "k", "verdict"}},
      {"plot_data", 1, {"x", "y", "series"}},
  };
  return schemas;
}

const Schema& schema(std::string_view name) {
  for (const Schema& s : registry()) {
    if (s.name == name) return s;
  }
  throw DomainError("unknown CSV schema '" + std::string(name) + "'");
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

double parse_double(std::string_view text) {
  if (text == "inf") return INFINITY;
  if (text == "-inf") return -INFINITY;
  if (text == "nan") return NAN;
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw DomainError("not a number: '" + std::string(text) + "'");
  }
  return v;
}

namespace {

void write_cells(std::ostream& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out << ',';
    const std::string& c = cells[i];
    if (c.find_first_of(",\"\n") != std::string::npos) {
      out << '"';
      for (char ch : c) {
        if (ch == '"') out << '"';
        out << ch;
      }
      out << '"';
    } else {
      out << c;
    }
  }
  out << '\n';
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      cells.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  cells.push_back(cur);
  return cells;
}

}  // namespace

void Writer::begin(std::string_view schema_name) {
  current_ = &schema(schema_name);
  *out_ << "# schema=" << current_->name << " version=" << current_->version << '\n';
  write_cells(*out_, current_->columns);
}

void Writer::row(const std::vector<std::string>& cells) {
  if (!current_) throw DomainError("CSV row written before any table header");
  if (cells.size() != current_->columns.size()) {
    throw DomainError("CSV row has " + std::to_string(cells.size()) + " cells, schema " +
                      current_->name + " expects " + std::to_string(current_->columns.size()));
  }
  write_cells(*out_, cells);
}

std::size_t Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw DomainError("table " + schema + " has no column '" + std::string(name) + "'");
}

std::vector<Table> parse(std::istream& in) {
  std::vector<Table> tables;
  std::string line;
  bool want_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.rfind("# schema=", 0) == 0) {
      Table t;
      std::istringstream meta(line.substr(2));
      std::string tok;
      while (meta >> tok) {
        if (tok.rfind("schema=", 0) == 0) t.schema = tok.substr(7);
        if (tok.rfind("version=", 0) == 0) t.version = std::stoi(tok.substr(8));
      }
      const Schema& s = schema(t.schema);
      if (t.version != s.version) {
        throw DomainError("schema " + t.schema + " version " + std::to_string(t.version) +
                          " is not supported");
      }
      tables.push_back(std::move(t));
      want_header = true;
      continue;
    }
    if (line[0] == '#') continue;
    if (tables.empty()) throw DomainError("CSV data before any schema line");
    Table& t = tables.back();
    std::vector<std::string> cells = split_line(line);
    if (want_header) {
      if (cells != schema(t.schema).columns) {
        throw DomainError("header of table " + t.schema + " does not match its schema");
      }
      t.header = std::move(cells);
      want_header = false;
    } else {
      if (cells.size() != t.header.size()) {
        throw DomainError("row width mismatch in table " + t.schema);
      }
      t.rows.push_back(std::move(cells));
    }
  }
  if (want_header) throw DomainError("table without header row");
  return tables;
}

}  // namespace osgood::csv
