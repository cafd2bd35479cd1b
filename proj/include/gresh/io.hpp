#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "gresh/solver.hpp"

namespace gresh {

using Json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "0.1.0";

/// Largest p for which Phi is written densely; above it, as (j, k, value)
/// triplets of the nonzero entries.
inline constexpr Index kDensePhiLimit = 200;

struct CsvTable {
  MatrixXd data;
  std::vector<std::string> header;  // empty when the file has no header row
};

/// Comma-separated numbers, one observation per row. The first row is taken
/// as a header when any of its fields is not a number. Throws kInvalidInput
/// on unreadable files, ragged rows or non-numeric cells.
CsvTable read_csv(const std::string& path);
VectorXd read_vector_csv(const std::string& path);

void write_csv(const std::string& path, const MatrixXd& data,
               const std::vector<std::string>& header = {});

Json coef_to_json(const CoefMatrix& omega);
/// Inverse of coef_to_json.
CoefMatrix coef_from_json(const Json& j);

Json kkt_to_json(const KktReport& kkt);
Json penalty_to_json(const PenaltySpec& pen);
/// Coefficients (raw and working), trace, KKT report and counters.
Json fit_to_json(const FitResult& fit);

void write_json(const std::string& path, const Json& doc);
Json read_json(const std::string& path);

}  // namespace gresh
