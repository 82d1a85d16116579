#pragma once

// Versioned CSV tables. Every table starts with a comment line
//   # schema=<name> version=<n>
// followed by the header row; a stream may carry several tables.

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace osgood::csv {

struct Schema {
  std::string name;
  int version = 1;
  std::vector<std::string> columns;
};

/// Registered schema by name; DomainError if unknown.
[[nodiscard]] const Schema& schema(std::string_view name);
[[nodiscard]] const std::vector<Schema>& registry();

/// Shortest round-trip text for a double ("inf", "-inf", "nan" for specials).
[[nodiscard]] std::string fmt(double v);
[[nodiscard]] double parse_double(std::string_view text);

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(&out) {}

  void begin(std::string_view schema_name);
  void row(const std::vector<std::string>& cells);

 private:
  std::ostream* out_;
  const Schema* current_ = nullptr;
};

struct Table {
  std::string schema;
  int version = 0;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by name; DomainError if absent.
  [[nodiscard]] std::size_t column(std::string_view name) const;
};

/// Reads every table in the stream and checks each against the registry.
[[nodiscard]] std::vector<Table> parse(std::istream& in);

}  // namespace osgood::csv
