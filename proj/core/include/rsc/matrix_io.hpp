#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <vector>

#include "rsc/errors.hpp"

namespace rsc {

/// CSV layout: one row per ambient coordinate, one column per sample, no
/// header. Values are written with 17 significant digits. NaN/Inf and
/// ragged rows are rejected with the offending line number.
Eigen::MatrixXd load_matrix_csv(const std::filesystem::path& path);
void save_matrix_csv(const std::filesystem::path& path,
                     const Eigen::MatrixXd& m);

/// Binary layout: magic "SSCM", u32 rows, u32 cols, little-endian f64
/// column-major payload. Round-trips bitwise.
Eigen::MatrixXd load_matrix_binary(const std::filesystem::path& path);
void save_matrix_binary(const std::filesystem::path& path,
                        const Eigen::MatrixXd& m);

/// Dispatch on extension: ".csv" -> CSV, anything else -> binary.
Eigen::MatrixXd load_matrix(const std::filesystem::path& path);
void save_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m);

std::vector<int> load_labels(const std::filesystem::path& path);
void save_labels(const std::filesystem::path& path,
                 const std::vector<int>& labels);

}  // namespace rsc
