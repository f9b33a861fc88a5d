#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cosparse::io {

// Shortest round-trip decimal form of a double (%.17g trimmed by parsing
// rules is overkill; %.17g itself round-trips exactly and keeps files diffable).
std::string format_double(double value);

// Dense numeric CSV, no header: one row per line, comma separated, %.17g
// cells. A vector is a single-column matrix.
void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& matrix);
Eigen::MatrixXd read_matrix_csv(const std::string& path);

void write_vector_csv(const std::string& path, const Eigen::VectorXd& vector);
Eigen::VectorXd read_vector_csv(const std::string& path);

// Headered CSV for experiment tables.
void write_table_csv(const std::string& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows);

void write_text_file(const std::string& path, const std::string& contents);
std::string read_text_file(const std::string& path);

}  // namespace cosparse::io
