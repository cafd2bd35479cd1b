#include <cmath>

#include "gresh/solver.hpp"

namespace gresh {

namespace {

double sgn(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

KktReport kkt_check(const QuadraticDesign& design, const CoefMatrix& working,
                    const PenaltySpec& pen, const VectorXd& y, Loss loss, double zero_tol) {
  pen.validate();
  const Index p = design.p();
  if (working.omega.rows() != p + 1 || working.omega.cols() != p || pen.p() != p)
    throw GreshError(ErrorCode::kDimensionMismatch, "coefficients do not match the design");

  const bool sh = pen.mode == Hierarchy::kStrong;
  const MatrixXd& om = working.omega;
  const VectorXd r = loss_residual(apply_xbreve(design, working), y, loss);
  // negative loss gradient
  const CoefMatrix g = apply_xbreve_adjoint(design, r);
  const MatrixXd& gm = g.omega;

  KktReport rep;
  rep.scale = std::max({pen.lambda_b.maxCoeff(), pen.lambda_phi.maxCoeff(),
                        pen.lambda_omega.maxCoeff()});
  auto nz = [&](double v) { return std::abs(v) > zero_tol; };

  VectorXd col_norm(p);
  std::vector<bool> active(p);
  for (Index k = 0; k < p; ++k) {
    col_norm[k] = om.col(k).norm();
    active[k] = col_norm[k] > zero_tol;
    if (active[k]) rep.support_groups.push_back(k);
  }
  for (Index k = 0; k < p; ++k)
    for (Index j = 0; j < p; ++j)
      if (nz(om(1 + j, k))) rep.support_phi.emplace_back(j, k);

  double rb = design.intercept() ? std::abs(g.b0) : 0.0;
  double rphi = 0.0;
  double rzero = 0.0;

  for (Index k = 0; k < p; ++k) {
    if (!active[k]) continue;
    const double b = om(0, k);
    const double lam_k = pen.lambda_omega[k] / col_norm[k];
    if (nz(b))
      rb = std::max(rb, std::abs(pen.lambda_b[k] * sgn(b) + lam_k * b - gm(0, k)));
    else
      rb = std::max(rb, std::max(0.0, std::abs(gm(0, k)) - pen.lambda_b[k]));

    for (Index j = 0; j < p; ++j) {
      const double phi = om(1 + j, k);
      if (!sh || j == k) {
        const double lam = pen.lambda_phi(j, k);
        if (nz(phi))
          rphi = std::max(rphi, std::abs(lam * sgn(phi) + lam_k * phi - gm(1 + j, k)));
        else
          rphi = std::max(rphi, std::max(0.0, std::abs(gm(1 + j, k)) - lam));
        continue;
      }
      // SH off-diagonal: add the (j,k) and (k,j) equations so the symmetry
      // multiplier cancels; handled once per pair with both columns active
      if (j > k || !active[j]) continue;
      const double lam = pen.lambda_phi(j, k) + pen.lambda_phi(k, j);
      const double gsum = gm(1 + j, k) + gm(1 + k, j);
      const double pair = (om(1 + j, k) + om(1 + k, j)) / 2.0;
      if (nz(pair)) {
        const double lam_j = pen.lambda_omega[j] / col_norm[j];
        rphi = std::max(rphi, std::abs(lam * sgn(pair) + lam_k * pair + lam_j * pair - gsum));
      } else {
        rphi = std::max(rphi, std::max(0.0, std::abs(gsum) - lam));
      }
    }
  }

  // Zero columns: the group subgradient must absorb what the l1 terms (and,
  // under SH, the symmetry multipliers) leave over.
  for (Index k = 0; k < p; ++k) {
    if (active[k]) continue;
    VectorXd v(p + 1);
    v[0] = soft_threshold(gm(0, k), pen.lambda_b[k]);
    for (Index j = 0; j < p; ++j) {
      double gjk = gm(1 + j, k);
      if (sh && j != k) {
        const double gsum = gm(1 + j, k) + gm(1 + k, j);
        if (active[j]) {
          // column j holds a zero entry at (k,j) and can absorb up to Lambda_kj
          gjk = soft_threshold(gsum, pen.lambda_phi(k, j));
        } else {
          gjk = gsum / 2.0;
        }
      }
      v[1 + j] = soft_threshold(gjk, pen.lambda_phi(j, k));
    }
    rzero = std::max(rzero, std::max(0.0, v.norm() - pen.lambda_omega[k]));
  }

  rep.max_residual_b = rb / rep.scale;
  rep.max_residual_phi = rphi / rep.scale;
  rep.max_residual_zero = rzero / rep.scale;
  rep.hierarchy_ok = hierarchy_check(working, pen.mode);
  return rep;
}

}  // namespace gresh
