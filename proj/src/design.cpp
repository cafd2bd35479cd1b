#include "gresh/design.hpp"

#include <cmath>

#include "gresh/kernels.hpp"

namespace gresh {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidInput: return "InvalidInput";
    case ErrorCode::kZeroNormColumn: return "ZeroNormColumn";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kInvalidPenalty: return "InvalidPenalty";
    case ErrorCode::kInvalidStepSize: return "InvalidStepSize";
  }
  return "Unknown";
}

std::string_view to_string(Hierarchy mode) { return mode == Hierarchy::kStrong ? "sh" : "wh"; }
std::string_view to_string(GreshType type) { return type == GreshType::kA ? "a" : "b"; }
std::string_view to_string(Loss loss) { return loss == Loss::kSquared ? "squared" : "logistic"; }

MatrixXd hadamard_norms(const MatrixXd& z) {
  const MatrixXd sq = z.array().square().matrix();
  MatrixXd g = sq.transpose() * sq;
  g = g.cwiseMax(0.0).cwiseSqrt();
  // the product is symmetric in exact arithmetic; make it so bitwise
  for (Index k = 0; k < g.cols(); ++k)
    for (Index j = k + 1; j < g.rows(); ++j) g(j, k) = g(k, j);
  return g;
}

namespace {

void require_finite(const MatrixXd& m, const char* name) {
  if (!m.allFinite())
    throw GreshError(ErrorCode::kInvalidInput, std::string(name) + " contains non-finite entries");
}

}  // namespace

QuadraticDesign QuadraticDesign::make(const MatrixXd& x, DesignScaling scaling, bool intercept) {
  return make(x, x, scaling, intercept);
}

QuadraticDesign QuadraticDesign::make(const MatrixXd& x, const MatrixXd& z, DesignScaling scaling,
                                      bool intercept) {
  if (x.rows() < 1 || x.cols() < 1)
    throw GreshError(ErrorCode::kInvalidInput, "design needs n >= 1 and p >= 1");
  if (z.rows() != x.rows() || z.cols() != x.cols())
    throw GreshError(ErrorCode::kDimensionMismatch, "Z must have the shape of X");
  require_finite(x, "X");
  require_finite(z, "Z");

  const Index p = x.cols();
  QuadraticDesign d;
  d.scaling_ = scaling;
  d.intercept_ = intercept;
  d.x_norm_raw_ = VectorXd::Ones(p);

  if (scaling == DesignScaling::kTypeA) {
    VectorXd xn = x.colwise().norm().transpose();
    VectorXd zn = z.colwise().norm().transpose();
    // all-zero columns stay as they are
    for (Index j = 0; j < p; ++j) {
      if (xn[j] == 0.0) xn[j] = 1.0;
      if (zn[j] == 0.0) zn[j] = 1.0;
    }
    d.x_ = x * xn.cwiseInverse().asDiagonal();
    d.z_ = z * zn.cwiseInverse().asDiagonal();
    d.x_norm_raw_ = xn;
    d.raw_div_b_ = xn;
    d.raw_div_phi_ = zn * zn.transpose();
  } else {
    d.x_ = x;
    d.z_ = z;
  }
  d.s_b_ = d.x_.colwise().norm().transpose();
  d.s_phi_ = hadamard_norms(d.z_);

  if (scaling == DesignScaling::kTypeB) {
    for (Index j = 0; j < p; ++j)
      if (!(d.s_b_[j] > 0.0))
        throw GreshError(ErrorCode::kZeroNormColumn,
                         "column " + std::to_string(j + 1) + " of X has zero norm");
    for (Index k = 0; k < p; ++k)
      for (Index j = 0; j < p; ++j)
        if (!(d.s_phi_(j, k) > 0.0))
          throw GreshError(ErrorCode::kZeroNormColumn,
                           "interaction " + std::to_string(j + 1) + "x" + std::to_string(k + 1) +
                               " has zero norm");
    d.div_b_ = d.s_b_;
    d.div_phi_ = d.s_phi_;
    d.raw_div_b_ = d.s_b_;
    d.raw_div_phi_ = d.s_phi_;
  } else {
    d.div_b_ = VectorXd::Ones(p);
    d.div_phi_ = MatrixXd::Ones(p, p);
    if (scaling == DesignScaling::kNone) {
      d.raw_div_b_ = VectorXd::Ones(p);
      d.raw_div_phi_ = MatrixXd::Ones(p, p);
    }
  }

  const SpectralNormEstimate est = spectral_norm_xbreve(d, 1e-4);
  d.tau_hat_ = est.value;
  d.tau_certified_ = est.converged;
  return d;
}

CoefMatrix QuadraticDesign::to_raw(const CoefMatrix& working) const {
  CoefMatrix out = working;
  out.omega.row(0) = working.omega.row(0).cwiseQuotient(raw_div_b_.transpose());
  out.omega.bottomRows(p()) = working.omega.bottomRows(p()).cwiseQuotient(raw_div_phi_);
  out.scaled = false;
  return out;
}

CoefMatrix QuadraticDesign::to_working(const CoefMatrix& raw) const {
  CoefMatrix out = raw;
  out.omega.row(0) = raw.omega.row(0).cwiseProduct(raw_div_b_.transpose());
  out.omega.bottomRows(p()) = raw.omega.bottomRows(p()).cwiseProduct(raw_div_phi_);
  out.scaled = true;
  return out;
}

double QuadraticDesign::frobenius_sq() const {
  double total = s_b_.cwiseQuotient(div_b_).squaredNorm();
  total += s_phi_.cwiseQuotient(div_phi_).squaredNorm();
  if (intercept_) total += static_cast<double>(n());
  return total;
}

MatrixXd QuadraticDesign::materialize() const {
  const Index n = this->n(), p = this->p();
  if (p > kMaterializeLimit)
    throw GreshError(ErrorCode::kInvalidInput,
                     "materialization is limited to p <= " + std::to_string(kMaterializeLimit));
  MatrixXd m(n, p * (p + 1) + (intercept_ ? 1 : 0));
  for (Index k = 0; k < p; ++k) {
    m.col(k * (p + 1)) = x_.col(k) / div_b_[k];
    for (Index j = 0; j < p; ++j)
      m.col(k * (p + 1) + 1 + j) = z_.col(j).cwiseProduct(z_.col(k)) / div_phi_(j, k);
  }
  if (intercept_) m.col(m.cols() - 1).setOnes();
  return m;
}

VectorXd apply_xbreve(const QuadraticDesign& design, const CoefMatrix& omega, int threads) {
  const Index p = design.p();
  if (omega.omega.rows() != p + 1 || omega.omega.cols() != p)
    throw GreshError(ErrorCode::kDimensionMismatch, "Omega must be (p+1) x p");
  VectorXd out(design.n());
  if (design.scaled()) {
    const VectorXd b = omega.omega.row(0).transpose().cwiseQuotient(design.div_b());
    const MatrixXd phi = omega.omega.bottomRows(p).cwiseQuotient(design.div_phi());
    kernels::row_quadratic_forms(design.z(), phi, out, threads);
    out.noalias() += design.x() * b;
  } else {
    const MatrixXd phi = omega.omega.bottomRows(p);
    kernels::row_quadratic_forms(design.z(), phi, out, threads);
    out.noalias() += design.x() * omega.omega.row(0).transpose();
  }
  if (design.intercept()) out.array() += omega.b0;
  return out;
}

CoefMatrix apply_xbreve_adjoint(const QuadraticDesign& design, const VectorXd& r, int threads) {
  if (r.size() != design.n())
    throw GreshError(ErrorCode::kDimensionMismatch, "residual length must equal n");
  const Index p = design.p();
  CoefMatrix g(p, design.intercept());
  g.scaled = true;
  VectorXd xr = kernels::transpose_times(design.x(), r, threads);
  MatrixXd zz = kernels::weighted_gram(design.z(), r, threads);
  if (design.scaled()) {
    xr = xr.cwiseQuotient(design.div_b());
    zz = zz.cwiseQuotient(design.div_phi());
  }
  g.omega.row(0) = xr.transpose();
  g.omega.bottomRows(p) = zz;
  if (design.intercept()) g.b0 = r.sum();
  return g;
}

SpectralNormEstimate spectral_norm_xbreve(const QuadraticDesign& design, double tol, int max_iter) {
  if (!(tol > 0.0)) throw GreshError(ErrorCode::kInvalidInput, "tol must be positive");
  const Index p = design.p();
  const double frob = std::sqrt(design.frobenius_sq());
  SpectralNormEstimate est;
  if (frob == 0.0) return est;

  CoefMatrix v(p, design.intercept());
  const double count = static_cast<double>(p * (p + 1) + (design.intercept() ? 1 : 0));
  v.omega.setConstant(1.0 / std::sqrt(count));
  if (design.intercept()) v.b0 = 1.0 / std::sqrt(count);

  for (int it = 1; it <= max_iter; ++it) {
    const VectorXd u = apply_xbreve(design, v);
    CoefMatrix w = apply_xbreve_adjoint(design, u);
    const double mu = u.squaredNorm();
    est.iterations = it;
    if (mu == 0.0) {
      // start vector is in the null space; only possible for degenerate designs
      break;
    }
    const double res_b0 = design.intercept() ? (w.b0 - mu * v.b0) : 0.0;
    const double res = std::sqrt((w.omega - mu * v.omega).squaredNorm() + res_b0 * res_b0);
    if (res <= tol * mu) {
      est.value = std::min(frob, std::sqrt(mu + res));
      est.converged = true;
      return est;
    }
    const double wn = std::sqrt(w.omega.squaredNorm() + w.b0 * w.b0);
    v.omega = w.omega / wn;
    v.b0 = w.b0 / wn;
  }
  est.value = frob;
  est.converged = false;
  return est;
}

VectorXd predict_raw(const MatrixXd& x, const CoefMatrix& raw, int threads) {
  const Index p = x.cols();
  if (raw.omega.rows() != p + 1 || raw.omega.cols() != p)
    throw GreshError(ErrorCode::kDimensionMismatch, "coefficients do not match X");
  VectorXd out(x.rows());
  const MatrixXd phi = raw.omega.bottomRows(p);
  kernels::row_quadratic_forms(x, phi, out, threads);
  out.noalias() += x * raw.omega.row(0).transpose();
  if (raw.has_intercept) out.array() += raw.b0;
  return out;
}

}  // namespace gresh
