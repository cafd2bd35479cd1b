#include "gresh/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace gresh {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    const auto b = field.find_first_not_of(" \t\r\"");
    const auto e = field.find_last_not_of(" \t\r\"");
    out.push_back(b == std::string::npos ? std::string() : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool parse_double(const std::string& s, double& v) {
  if (s.empty()) return false;
  const char* first = s.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw GreshError(ErrorCode::kInvalidInput, "cannot open " + path);
  CsvTable t;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split_fields(line);
    std::vector<double> row(fields.size());
    bool numeric = true;
    for (std::size_t i = 0; i < fields.size() && numeric; ++i)
      numeric = parse_double(fields[i], row[i]);
    if (!numeric) {
      if (rows.empty() && t.header.empty()) {
        t.header = fields;
        continue;
      }
      throw GreshError(ErrorCode::kInvalidInput,
                       path + ":" + std::to_string(line_no) + ": non-numeric field");
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw GreshError(ErrorCode::kInvalidInput,
                       path + ":" + std::to_string(line_no) + ": ragged row");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw GreshError(ErrorCode::kInvalidInput, path + " has no data rows");
  if (!t.header.empty() && t.header.size() != rows.front().size())
    throw GreshError(ErrorCode::kInvalidInput, path + ": header width differs from data");
  t.data.resize(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < t.data.rows(); ++i)
    for (Index j = 0; j < t.data.cols(); ++j) t.data(i, j) = rows[i][j];
  if (!t.data.allFinite()) throw GreshError(ErrorCode::kInvalidInput, path + " has non-finite values");
  return t;
}

VectorXd read_vector_csv(const std::string& path) {
  const CsvTable t = read_csv(path);
  if (t.data.cols() == 1) return t.data.col(0);
  if (t.data.rows() == 1) return t.data.row(0).transpose();
  throw GreshError(ErrorCode::kInvalidInput, path + " must hold a single column");
}

void write_csv(const std::string& path, const MatrixXd& data,
               const std::vector<std::string>& header) {
  std::ofstream out(path);
  if (!out) throw GreshError(ErrorCode::kInvalidInput, "cannot write " + path);
  out.precision(17);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  if (!header.empty()) out << '\n';
  for (Index i = 0; i < data.rows(); ++i) {
    for (Index j = 0; j < data.cols(); ++j) out << (j ? "," : "") << data(i, j);
    out << '\n';
  }
}

Json coef_to_json(const CoefMatrix& omega) {
  const Index p = omega.p();
  Json j;
  j["p"] = p;
  j["scaled"] = omega.scaled;
  j["intercept"] = omega.has_intercept ? Json(omega.b0) : Json(nullptr);
  std::vector<double> b;
  for (Index k = 0; k < p; ++k) b.push_back(omega.omega(0, k));
  j["b"] = b;
  if (p <= kDensePhiLimit) {
    Json rows = Json::array();
    for (Index r = 0; r < p; ++r) {
      std::vector<double> row(p);
      for (Index c = 0; c < p; ++c) row[c] = omega.omega(1 + r, c);
      rows.push_back(row);
    }
    j["phi"] = rows;
  } else {
    Json trip = Json::array();
    for (Index c = 0; c < p; ++c)
      for (Index r = 0; r < p; ++r)
        if (omega.omega(1 + r, c) != 0.0) trip.push_back({r, c, omega.omega(1 + r, c)});
    j["phi_triplets"] = trip;
  }
  return j;
}

CoefMatrix coef_from_json(const Json& j) {
  try {
    const Index p = j.at("p").get<Index>();
    const bool has_b0 = !j.at("intercept").is_null();
    CoefMatrix om(p, has_b0);
    om.scaled = j.at("scaled").get<bool>();
    if (has_b0) om.b0 = j.at("intercept").get<double>();
    const auto b = j.at("b").get<std::vector<double>>();
    if (static_cast<Index>(b.size()) != p)
      throw GreshError(ErrorCode::kInvalidInput, "coefficient vector b has the wrong length");
    for (Index k = 0; k < p; ++k) om.omega(0, k) = b[k];
    if (j.contains("phi")) {
      const auto rows = j.at("phi").get<std::vector<std::vector<double>>>();
      if (static_cast<Index>(rows.size()) != p)
        throw GreshError(ErrorCode::kInvalidInput, "Phi has the wrong shape");
      for (Index r = 0; r < p; ++r) {
        if (static_cast<Index>(rows[r].size()) != p)
          throw GreshError(ErrorCode::kInvalidInput, "Phi has the wrong shape");
        for (Index c = 0; c < p; ++c) om.omega(1 + r, c) = rows[r][c];
      }
    } else {
      for (const auto& t : j.at("phi_triplets")) {
        const Index r = t.at(0).get<Index>(), c = t.at(1).get<Index>();
        if (r < 0 || c < 0 || r >= p || c >= p)
          throw GreshError(ErrorCode::kInvalidInput, "Phi triplet out of range");
        om.omega(1 + r, c) = t.at(2).get<double>();
      }
    }
    return om;
  } catch (const nlohmann::json::exception& e) {
    throw GreshError(ErrorCode::kInvalidInput, std::string("malformed coefficients: ") + e.what());
  }
}

Json kkt_to_json(const KktReport& kkt) {
  Json j;
  j["max_residual_b"] = kkt.max_residual_b;
  j["max_residual_phi"] = kkt.max_residual_phi;
  j["max_residual_zero"] = kkt.max_residual_zero;
  j["max_residual"] = kkt.max_residual();
  j["scale"] = kkt.scale;
  j["hierarchy_ok"] = kkt.hierarchy_ok;
  j["support_groups"] = kkt.support_groups;
  Json e = Json::array();
  for (const auto& [r, c] : kkt.support_phi) e.push_back({r, c});
  j["support_phi"] = e;
  return j;
}

Json penalty_to_json(const PenaltySpec& pen) {
  Json j;
  j["mode"] = std::string(to_string(pen.mode));
  j["type"] = std::string(to_string(pen.type));
  const bool uniform = pen.lambda_b.isZero(0.0) &&
                       (pen.lambda_phi.array() == pen.lambda_phi(0, 0)).all() &&
                       (pen.lambda_omega.array() == pen.lambda_omega[0]).all();
  if (uniform) {
    j["lambda1"] = pen.lambda_phi(0, 0);
    j["lambda2"] = pen.lambda_omega[0];
  } else {
    j["lambda_b"] = std::vector<double>(pen.lambda_b.data(), pen.lambda_b.data() + pen.p());
    j["lambda_omega"] =
        std::vector<double>(pen.lambda_omega.data(), pen.lambda_omega.data() + pen.p());
  }
  return j;
}

Json fit_to_json(const FitResult& fit) {
  Json j;
  j["coefficients"] = coef_to_json(fit.omega_hat);
  j["working_coefficients"] = coef_to_json(fit.omega_working);
  j["objective"] = fit.final_objective;
  j["objective_trace"] = fit.objective_trace;
  j["outer_iterations"] = fit.outer_iterations;
  j["inner_sweeps"] = fit.inner_sweeps;
  j["converged"] = fit.converged;
  j["tau"] = fit.tau_used;
  j["wall_time_s"] = fit.wall_time;
  j["loss"] = std::string(to_string(fit.loss));
  j["penalty"] = penalty_to_json(fit.penalty);
  j["kkt"] = kkt_to_json(fit.kkt);
  return j;
}

void write_json(const std::string& path, const Json& doc) {
  std::ofstream out(path);
  if (!out) throw GreshError(ErrorCode::kInvalidInput, "cannot write " + path);
  out << doc.dump(2) << '\n';
}

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw GreshError(ErrorCode::kInvalidInput, "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw GreshError(ErrorCode::kInvalidInput, path + ": " + e.what());
  }
}

}  // namespace gresh
