#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

// Reading model files referenced from the command line. Every failure here is
// a configuration problem and is reported as ConfigError.
namespace statmech::cli {

nlohmann::json load_json(const std::string& path);

/// Rows of numbers, each entry either a real or a [re, im] pair.
Eigen::MatrixXcd complex_matrix(const nlohmann::json& j, const std::string& what);

/// Comma-separated rows of reals; blank lines and '#' lines are skipped.
Eigen::MatrixXd read_matrix_csv(const std::string& path);

/// Required member of a JSON object, with a message naming the key.
const nlohmann::json& member(const nlohmann::json& j, const std::string& key);

/// n equally spaced values from lo to hi inclusive; n = 1 gives lo.
std::vector<double> linspace(double lo, double hi, long n);

}  // namespace statmech::cli
