#include "gresh/path.hpp"

#include <chrono>
#include <cmath>

#include "gresh/admm.hpp"

namespace gresh {

double mean_squared_error(const VectorXd& a, const VectorXd& b) {
  if (a.size() != b.size() || a.size() == 0)
    throw GreshError(ErrorCode::kDimensionMismatch, "MSE needs equal, nonempty lengths");
  return (a - b).squaredNorm() / static_cast<double>(a.size());
}

Support extract_support(const CoefMatrix& omega, double tol) {
  Support s;
  const Index p = omega.p();
  for (Index j = 0; j < p; ++j)
    if (std::abs(omega.omega(0, j)) > tol) s.mains.push_back(j);
  for (Index k = 0; k < p; ++k)
    for (Index j = 0; j <= k; ++j) {
      const double v = j == k ? omega.omega(1 + k, k)
                              : (omega.omega(1 + j, k) + omega.omega(1 + k, j)) / 2.0;
      if (std::abs(v) > tol) s.pairs.emplace_back(j, k);
    }
  return s;
}

namespace {

// Root of ||(g_b, soft(g_phi, lambda))||_2 = c * lambda; the left side is
// nonincreasing and the right side increasing in lambda.
double column_root(double gb, const VectorXd& gphi, double c) {
  auto excess = [&](double lam) {
    double sq = gb * gb;
    for (Index j = 0; j < gphi.size(); ++j) {
      const double v = soft_threshold(gphi[j], lam);
      sq += v * v;
    }
    return std::sqrt(sq) - c * lam;
  };
  double lo = 0.0;
  double hi = std::sqrt(gb * gb + gphi.squaredNorm()) / c;
  if (hi == 0.0) return 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) > 0.0 ? lo : hi) = mid;
  }
  return hi;
}

PenaltySpec node_penalty(Index p, double lambda1, double c, Hierarchy mode, GreshType type) {
  return PenaltySpec::from_lambdas(p, lambda1, c * lambda1, mode, type);
}

}  // namespace

double lambda_max(const QuadraticDesign& design, const VectorXd& y, double ratio_c,
                  Hierarchy mode, GreshType type, bool verify, const SolverOptions& opts) {
  if (y.size() != design.n())
    throw GreshError(ErrorCode::kDimensionMismatch, "y must have n entries");
  if (!(ratio_c > 0.0)) throw GreshError(ErrorCode::kInvalidInput, "ratio c must be positive");
  const Index p = design.p();
  VectorXd r = y;
  if (design.intercept()) r.array() -= y.mean();
  if (opts.loss == Loss::kLogistic) {
    const double ybar = y.mean();
    r = y.array() - (design.intercept() ? ybar : 0.5);
  }
  const CoefMatrix g = apply_xbreve_adjoint(design, r);
  double lmax = 0.0;
  for (Index k = 0; k < p; ++k)
    lmax = std::max(lmax, column_root(g.omega(0, k), g.omega.col(k).tail(p), ratio_c));
  if (lmax == 0.0 || !verify) return lmax;

  for (int attempt = 0; attempt < 40; ++attempt) {
    const FitResult fit = gresh_fit(design, y, node_penalty(p, lmax, ratio_c, mode, type), opts);
    if (fit.omega_working.omega.isZero(0.0)) return lmax;
    lmax *= 1.01;
  }
  return lmax;
}

MatrixXd support_design(const QuadraticDesign& design, const Support& support) {
  MatrixXd a(design.n(), static_cast<Index>(support.size()));
  Index c = 0;
  for (Index j : support.mains) a.col(c++) = design.x().col(j) / design.div_b()[j];
  for (const auto& [j, k] : support.pairs)
    a.col(c++) = design.z().col(j).cwiseProduct(design.z().col(k)) / design.div_phi()(j, k);
  return a;
}

CoefMatrix ridge_refit(const QuadraticDesign& design, const VectorXd& y, const Support& support,
                       double gamma) {
  if (y.size() != design.n())
    throw GreshError(ErrorCode::kDimensionMismatch, "y must have n entries");
  if (!(gamma >= 0.0)) throw GreshError(ErrorCode::kInvalidInput, "ridge gamma must be >= 0");
  const Index p = design.p();
  const bool intercept = design.intercept();
  CoefMatrix out(p, intercept);
  out.scaled = true;
  const double ybar = intercept ? y.mean() : 0.0;
  if (support.empty()) {
    out.b0 = ybar;
    return design.to_raw(out);
  }

  MatrixXd a = support_design(design, support);
  VectorXd means = VectorXd::Zero(a.cols());
  if (intercept) {
    means = a.colwise().mean().transpose();
    a.rowwise() -= means.transpose();
  }
  const VectorXd yc = y.array() - ybar;
  VectorXd beta;
  if (gamma == 0.0) {
    beta = a.completeOrthogonalDecomposition().solve(yc);
  } else if (a.cols() <= a.rows()) {
    MatrixXd k = a.transpose() * a;
    k.diagonal().array() += gamma;
    beta = k.llt().solve(a.transpose() * yc);
  } else {
    MatrixXd k = a * a.transpose();
    k.diagonal().array() += gamma;
    beta = a.transpose() * k.llt().solve(yc);
  }

  Index c = 0;
  for (Index j : support.mains) out.omega(0, j) = beta[c++];
  for (const auto& [j, k] : support.pairs) {
    const double v = beta[c++];
    if (j == k) {
      out.omega(1 + j, k) = v;
    } else {
      out.omega(1 + j, k) = v / 2.0;
      out.omega(1 + k, j) = v / 2.0;
    }
  }
  if (intercept) out.b0 = ybar - means.dot(beta);
  return design.to_raw(out);
}

int tune(const PathResult& path) {
  int best = -1;
  for (int i = 0; i < static_cast<int>(path.nodes.size()); ++i) {
    const PathNode& node = path.nodes[i];
    if (node.failed || std::isnan(node.validation_mse)) continue;
    if (best < 0) {
      best = i;
      continue;
    }
    const PathNode& b = path.nodes[best];
    if (node.validation_mse < b.validation_mse ||
        (node.validation_mse == b.validation_mse && node.lambda1 > b.lambda1))
      best = i;
  }
  return best;
}

PathResult solution_path(const QuadraticDesign& design, const VectorXd& y, const PathSpec& spec,
                         Hierarchy mode, GreshType type) {
  const auto t0 = std::chrono::steady_clock::now();
  if (spec.n_lambda < 1) throw GreshError(ErrorCode::kInvalidInput, "n_lambda must be >= 1");
  if (!(spec.lambda_min_frac > 0.0 && spec.lambda_min_frac <= 1.0))
    throw GreshError(ErrorCode::kInvalidInput, "lambda_min_frac must lie in (0, 1]");
  if (spec.use_admm && spec.solver.loss != Loss::kSquared)
    throw GreshError(ErrorCode::kInvalidInput, "the ADMM baseline supports squared loss only");
  if (spec.validation && (spec.validation->x.cols() != design.p() ||
                          spec.validation->x.rows() != spec.validation->y.size()))
    throw GreshError(ErrorCode::kDimensionMismatch, "validation data do not match the design");

  const Index p = design.p();
  PathResult path;
  path.lambda_max =
      lambda_max(design, y, spec.ratio_c, mode, type, !spec.use_admm, spec.solver);
  if (path.lambda_max == 0.0) path.lambda_max = 1e-12;

  std::optional<CoefMatrix> warm;
  for (int i = 0; i < spec.n_lambda; ++i) {
    PathNode node;
    const double t = spec.n_lambda == 1 ? 0.0 : static_cast<double>(i) / (spec.n_lambda - 1);
    node.lambda1 = path.lambda_max * std::pow(spec.lambda_min_frac, t);
    node.lambda2 = spec.ratio_c * node.lambda1;
    const PenaltySpec pen = node_penalty(p, node.lambda1, spec.ratio_c, mode, type);
    try {
      if (spec.use_admm) {
        AdmmOptions ao;
        ao.tol = spec.admm_tol;
        ao.threads = spec.solver.threads;
        node.fit = admm_fit(design, y, pen, ao, warm);
      } else {
        node.fit = gresh_fit(design, y, pen, spec.solver, warm);
      }
    } catch (const GreshError& e) {
      node.failed = true;
      node.error = e.what();
      path.nodes.push_back(std::move(node));
      continue;
    }
    warm = node.fit.omega_working;
    node.support_groups = static_cast<Index>(node.fit.kkt.support_groups.size());
    node.support_phi = static_cast<Index>(node.fit.kkt.support_phi.size());

    const Support s = extract_support(node.fit.omega_working);
    double trace = 0.0;
    if (!s.empty()) {
      MatrixXd a = support_design(design, s);
      if (design.intercept()) a.rowwise() -= a.colwise().mean();
      trace = a.squaredNorm() / static_cast<double>(s.size());
    }
    const std::vector<double> grid =
        spec.ridge_gamma.empty() ? std::vector<double>{0.0} : spec.ridge_gamma;
    for (double mult : grid) {
      const double gamma = mult * trace;
      CoefMatrix refit = ridge_refit(design, y, s, gamma);
      if (!spec.validation) {
        node.refit = std::move(refit);
        node.refit_gamma = gamma;
        break;
      }
      const VectorXd pred = predict_raw(spec.validation->x, refit, spec.solver.threads);
      const double mse = mean_squared_error(pred, spec.validation->y);
      if (std::isnan(node.validation_mse) || mse < node.validation_mse) {
        node.validation_mse = mse;
        node.refit = std::move(refit);
        node.refit_gamma = gamma;
      }
    }
    path.nodes.push_back(std::move(node));
  }
  path.selected = tune(path);
  path.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return path;
}

}  // namespace gresh
