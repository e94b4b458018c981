#include "io.hpp"

#include <fstream>
#include <sstream>

#include "statmech/error.hpp"

namespace statmech::cli {

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::Config, "cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Config, "'" + path + "' is not valid JSON: " + e.what());
  }
}

Eigen::MatrixXcd complex_matrix(const nlohmann::json& j, const std::string& what) {
  require(j.is_array() && !j.empty(), ErrorKind::Config, what + " must be a nonempty array of rows");
  const auto rows = static_cast<long>(j.size());
  const auto cols = static_cast<long>(j[0].size());
  Eigen::MatrixXcd m(rows, cols);
  for (long r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    require(row.is_array() && static_cast<long>(row.size()) == cols, ErrorKind::Config,
            what + ": rows must be arrays of equal length");
    for (long c = 0; c < cols; ++c) {
      const auto& v = row[static_cast<std::size_t>(c)];
      if (v.is_number()) {
        m(r, c) = v.get<double>();
      } else if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
        m(r, c) = {v[0].get<double>(), v[1].get<double>()};
      } else {
        throw Error(ErrorKind::Config, what + ": entries must be numbers or [re, im] pairs");
      }
    }
  }
  return m;
}

Eigen::MatrixXd read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::Config, "cannot open '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        throw Error(ErrorKind::Config, "'" + path + "': cannot read number '" + cell + "'");
      }
    }
    require(rows.empty() || row.size() == rows[0].size(), ErrorKind::Config,
            "'" + path + "': rows must have equal length");
    rows.push_back(std::move(row));
  }
  require(!rows.empty(), ErrorKind::Config, "'" + path + "' holds no rows");
  Eigen::MatrixXd m(rows.size(), rows[0].size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
  return m;
}

const nlohmann::json& member(const nlohmann::json& j, const std::string& key) {
  require(j.is_object() && j.contains(key), ErrorKind::Config, "missing key '" + key + "'");
  return j.at(key);
}

std::vector<double> linspace(double lo, double hi, long n) {
  require(n >= 1, ErrorKind::Config, "a sweep needs at least one point");
  std::vector<double> x(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i)
    x[static_cast<std::size_t>(i)] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return x;
}

}  // namespace statmech::cli
