#include "output.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "statmech/error.hpp"

namespace statmech::cli {

namespace {

std::string quote(const std::string& s) {
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::string cell_text(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_real(*d);
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  return quote(std::get<std::string>(c));
}

/// Splits one CSV line, honouring double-quoted fields; quoted fields come back as strings.
std::vector<Cell> parse_line(const std::string& line) {
  std::vector<Cell> cells;
  std::size_t i = 0;
  while (i <= line.size()) {
    if (i < line.size() && line[i] == '"') {
      std::string s;
      ++i;
      while (i < line.size()) {
        if (line[i] == '"') {
          if (i + 1 < line.size() && line[i + 1] == '"') {
            s += '"';
            i += 2;
            continue;
          }
          ++i;
          break;
        }
        s += line[i++];
      }
      cells.emplace_back(s);
      if (i < line.size() && line[i] == ',') ++i;
      else break;
    } else {
      const std::size_t end = std::min(line.find(',', i), line.size());
      const std::string tok = line.substr(i, end - i);
      if (tok.find_first_of(".eEnN") != std::string::npos) {
        cells.emplace_back(std::strtod(tok.c_str(), nullptr));
      } else {
        cells.emplace_back(std::stoll(tok));
      }
      if (end == line.size()) break;
      i = end + 1;
    }
  }
  return cells;
}

std::vector<std::string> parse_header(const std::string& line) {
  std::vector<std::string> cols;
  std::stringstream ss(line);
  std::string c;
  while (std::getline(ss, c, ',')) cols.push_back(c);
  return cols;
}

bool starts_with(const std::string& s, const std::string& p) { return s.rfind(p, 0) == 0; }

}  // namespace

void Table::add(std::vector<Cell> row) {
  require(row.size() == columns.size(), ErrorKind::Domain, "table '" + name + "': row width does not match columns");
  rows.push_back(std::move(row));
}

Table& Output::table(const std::string& name, std::vector<std::string> columns) {
  tables.emplace_back(name, std::move(columns));
  return tables.back();
}

const Table& Output::find(const std::string& name) const {
  for (const auto& t : tables)
    if (t.name == name) return t;
  throw Error(ErrorKind::Domain, "no table named '" + name + "'");
}

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string s = buf;
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_csv(std::ostream& out, const Output& o) {
  out << "# statmech " << o.version << '\n';
  out << "# command: " << o.command << '\n';
  out << "# config_hash: " << o.config_hash << '\n';
  out << "# seed: " << o.seed << '\n';
  for (std::size_t t = 0; t < o.tables.size(); ++t) {
    const Table& tab = o.tables[t];
    if (t) out << '\n';
    out << "# table: " << tab.name << '\n';
    for (std::size_t c = 0; c < tab.columns.size(); ++c) out << (c ? "," : "") << tab.columns[c];
    out << '\n';
    for (const auto& row : tab.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << cell_text(row[c]);
      out << '\n';
    }
  }
}

Output read_csv(std::istream& in) {
  Output o;
  std::string line;
  Table* current = nullptr;
  bool want_header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (starts_with(line, "# statmech ")) {
      o.version = line.substr(11);
    } else if (starts_with(line, "# command: ")) {
      o.command = line.substr(11);
    } else if (starts_with(line, "# config_hash: ")) {
      o.config_hash = line.substr(15);
    } else if (starts_with(line, "# seed: ")) {
      o.seed = std::stoull(line.substr(8));
    } else if (starts_with(line, "# table: ")) {
      o.tables.emplace_back(line.substr(9), std::vector<std::string>{});
      current = &o.tables.back();
      want_header = true;
    } else if (line[0] == '#') {
      continue;
    } else {
      require(current != nullptr, ErrorKind::Config, "CSV data before any table marker");
      if (want_header) {
        current->columns = parse_header(line);
        want_header = false;
      } else {
        current->add(parse_line(line));
      }
    }
  }
  return o;
}

void write_json(std::ostream& out, const Output& o) {
  nlohmann::ordered_json j;
  j["version"] = o.version;
  j["command"] = o.command;
  j["config_hash"] = o.config_hash;
  j["seed"] = o.seed;
  j["tables"] = nlohmann::ordered_json::array();
  for (const auto& t : o.tables) {
    nlohmann::ordered_json jt;
    jt["name"] = t.name;
    jt["columns"] = t.columns;
    jt["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
      nlohmann::ordered_json jr = nlohmann::ordered_json::array();
      for (const auto& c : row) {
        if (const auto* d = std::get_if<double>(&c)) {
          if (std::isnan(*d)) jr.push_back("NaN");
          else if (std::isinf(*d)) jr.push_back(*d > 0 ? "Infinity" : "-Infinity");
          else jr.push_back(*d);
        } else if (const auto* i = std::get_if<long long>(&c)) {
          jr.push_back(*i);
        } else {
          jr.push_back(std::get<std::string>(c));
        }
      }
      jt["rows"].push_back(jr);
    }
    j["tables"].push_back(jt);
  }
  out << j.dump(1) << '\n';
}

Output read_json(std::istream& in) {
  const auto j = nlohmann::json::parse(in);
  Output o;
  o.version = j.at("version").get<std::string>();
  o.command = j.at("command").get<std::string>();
  o.config_hash = j.at("config_hash").get<std::string>();
  o.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& jt : j.at("tables")) {
    Table& t = o.table(jt.at("name").get<std::string>(), jt.at("columns").get<std::vector<std::string>>());
    for (const auto& jr : jt.at("rows")) {
      std::vector<Cell> row;
      for (const auto& c : jr) {
        if (c.is_number_float()) {
          row.emplace_back(c.get<double>());
        } else if (c.is_number_integer()) {
          row.emplace_back(c.get<long long>());
        } else {
          const auto s = c.get<std::string>();
          if (s == "NaN") row.emplace_back(std::nan(""));
          else if (s == "Infinity") row.emplace_back(std::numeric_limits<double>::infinity());
          else if (s == "-Infinity") row.emplace_back(-std::numeric_limits<double>::infinity());
          else row.emplace_back(s);
        }
      }
      t.add(std::move(row));
    }
  }
  return o;
}

}  // namespace statmech::cli
