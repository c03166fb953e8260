#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <iosfwd>

namespace rgd {

/// "index,value" CSV with a header row and 17 significant digits.
void write_scalar_csv(const std::filesystem::path& path, const Eigen::VectorXd& values);
Eigen::VectorXd read_scalar_csv(const std::filesystem::path& path);

/// Per-face vector CSV: header "face,x,y,z".
void write_vector_csv(const std::filesystem::path& path, const Eigen::MatrixX3d& values);
Eigen::MatrixX3d read_vector_csv(const std::filesystem::path& path);

/// Binary square matrix: magic "RGDMAT01", u64 little-endian n, then n*n
/// little-endian doubles in row-major order.
void write_matrix_binary(const std::filesystem::path& path, const Eigen::MatrixXd& D);
Eigen::MatrixXd read_matrix_binary(const std::filesystem::path& path);
void write_matrix_binary(std::ostream& out, const Eigen::MatrixXd& D);
Eigen::MatrixXd read_matrix_binary(std::istream& in);

/// Dense matrix CSV, one row per line, no header.
void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& D);
Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path);

/// Dispatches on extension: ".csv" is text, anything else RGDMAT01.
Eigen::MatrixXd read_matrix(const std::filesystem::path& path);

} // namespace rgd
