#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

// Tabular results shared by every subcommand, with CSV and JSON encodings
// that read back to identical values.
namespace statmech::cli {

using Cell = std::variant<double, long long, std::string>;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  Table(std::string n, std::vector<std::string> cols) : name(std::move(n)), columns(std::move(cols)) {}
  Table() = default;

  void add(std::vector<Cell> row);
  bool operator==(const Table&) const = default;
};

struct Output {
  std::string version;
  std::string command;
  std::string config_hash;  ///< 16 hex digits
  std::uint64_t seed = 0;
  std::vector<Table> tables;

  Table& table(const std::string& name, std::vector<std::string> columns);
  const Table& find(const std::string& name) const;
  bool operator==(const Output&) const = default;
};

/// Header lines start with '#'; each table is preceded by "# table: <name>"
/// and separated from the next by a blank line. Reals use 17 significant digits.
void write_csv(std::ostream& out, const Output& o);
/// Non-finite reals are written as the strings "NaN", "Infinity" and "-Infinity".
void write_json(std::ostream& out, const Output& o);

Output read_csv(std::istream& in);
Output read_json(std::istream& in);

/// 17 significant digits, with ".0" appended to integral values so the text
/// still reads back as a real.
std::string format_real(double x);

/// 64-bit FNV-1a, printed as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

}  // namespace statmech::cli
