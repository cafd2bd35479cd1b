#include "gresh/sim.hpp"

#include <algorithm>
#include <cmath>

#include <omp.h>

#include "gresh/kernels.hpp"

namespace gresh {

namespace {

enum Purpose : std::uint64_t { kTrain = 0, kValidation = 1, kTest = 2 };

constexpr std::uint64_t kPurposes = 4;

MatrixXd toeplitz_cholesky(Index p, double rho) {
  MatrixXd sigma(p, p);
  for (Index i = 0; i < p; ++i)
    for (Index j = 0; j < p; ++j) sigma(i, j) = std::pow(rho, static_cast<double>(std::abs(i - j)));
  Eigen::LLT<MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success)
    throw GreshError(ErrorCode::kInvalidInput, "correlation matrix is not positive definite");
  return llt.matrixL();
}

CoefMatrix signal_matrix(const VectorXd& b, const MatrixXd& phi) {
  CoefMatrix om(b.size(), false);
  om.omega.row(0) = b.transpose();
  om.omega.bottomRows(b.size()) = phi;
  return om;
}

double group_l21(const MatrixXd& m, const std::vector<bool>& in_g, bool want) {
  double s = 0.0;
  for (Index k = 0; k < m.cols(); ++k)
    if (in_g[k] == want) s += m.col(k).norm();
  return s;
}

}  // namespace

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

ExampleSignal example_signal(int id, Index p) {
  ExampleSignal s;
  const Index need = id == 1 ? 6 : id == 2 ? 9 : id == 3 ? 7 : -1;
  if (need < 0) throw GreshError(ErrorCode::kInvalidInput, "example id must be 1, 2 or 3");
  if (p < need)
    throw GreshError(ErrorCode::kInvalidInput,
                     "example " + std::to_string(id) + " needs p >= " + std::to_string(need));
  s.b_star = VectorXd::Zero(p);
  s.phi_star = MatrixXd::Zero(p, p);
  s.sigma2 = 1.0;
  auto set_pair = [&](Index j, Index k, double v) {  // 1-based, stored symmetrically
    s.phi_star(j - 1, k - 1) = v;
    s.phi_star(k - 1, j - 1) = v;
  };
  switch (id) {
    case 1:
      s.n_default = 40;
      s.b_star.head(6) << 3.0, 1.5, 0.0, 0.0, 2.0, 2.0;
      break;
    case 2:
      s.n_default = 150;
      s.b_star.head(9).setConstant(3.0);
      for (auto [j, k] : {std::pair{1, 2}, {1, 3}, {4, 5}, {4, 6}, {7, 8}, {7, 9}})
        set_pair(j, k, 3.0);
      break;
    default:
      s.n_default = 100;
      s.b_star.head(7).setConstant(1.0);
      for (Index j = 1; j <= 5; ++j)
        for (Index k = j + 1; k <= 5; ++k) set_pair(j, k, 5.0);
      set_pair(4, 6, 5.0);
      set_pair(4, 7, 5.0);
      break;
  }
  return s;
}

SimScenario make_scenario(int example_id, Index p, std::uint64_t seed) {
  const ExampleSignal sig = example_signal(example_id, p);
  SimScenario scn;
  scn.n = sig.n_default;
  scn.p = p;
  scn.b_star = sig.b_star;
  scn.phi_star = sig.phi_star;
  scn.sigma2 = sig.sigma2;
  scn.example_id = example_id;
  scn.seed = seed;
  return scn;
}

SimData gen_data(const SimScenario& scn, std::uint64_t stream, Index n_override) {
  const Index n = n_override > 0 ? n_override : scn.n;
  const Index p = scn.p;
  if (n < 1 || p < 1) throw GreshError(ErrorCode::kInvalidInput, "scenario needs n, p >= 1");
  if (scn.b_star.size() != p || scn.phi_star.rows() != p || scn.phi_star.cols() != p)
    throw GreshError(ErrorCode::kDimensionMismatch, "signal does not match p");
  if (!(scn.rho_corr >= 0.0 && scn.rho_corr < 1.0))
    throw GreshError(ErrorCode::kInvalidInput, "rho_corr must lie in [0, 1)");
  if (!(scn.sigma2 >= 0.0)) throw GreshError(ErrorCode::kInvalidInput, "sigma2 must be >= 0");

  std::normal_distribution<double> normal(0.0, 1.0);
  auto xs = make_stream(scn.seed, stream, 0);
  MatrixXd g(n, p);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) g(i, j) = normal(xs);
  SimData d;
  d.x = g * toeplitz_cholesky(p, scn.rho_corr).transpose();
  d.mean = predict_raw(d.x, signal_matrix(scn.b_star, scn.phi_star));
  auto es = make_stream(scn.seed, stream, 1);
  const double sd = std::sqrt(scn.sigma2);
  d.y = d.mean;
  for (Index i = 0; i < n; ++i) d.y[i] += sd * normal(es);
  return d;
}

SparsityProfile sparsity_profile(const CoefMatrix& omega, double tol) {
  const Index p = omega.p();
  SparsityProfile s;
  auto nz = [&](double v) { return std::abs(v) > tol; };
  const MatrixXd phi = omega.omega.bottomRows(p);
  MatrixXd phi_w = MatrixXd::Zero(p, p);  // phi'_kj = phi_kj + phi_jk for k >= j
  for (Index j = 0; j < p; ++j)
    for (Index k = j; k < p; ++k) phi_w(k, j) = k == j ? phi(k, j) : phi(k, j) + phi(j, k);
  for (Index j = 0; j < p; ++j) {
    const bool b = nz(omega.omega(0, j));
    bool f = false, fw = false;
    for (Index i = 0; i < p; ++i) {
      f = f || nz(phi(i, j));
      fw = fw || nz(phi_w(i, j));
      s.je += nz(phi(i, j));
      s.je_w += nz(phi_w(i, j));
    }
    if (b && f) ++s.j11;
    else if (b) ++s.j10;
    else if (f) ++s.j01;
    else ++s.j00;
    s.jg_w += (b || fw);
  }
  s.jg = s.j11 + s.j10 + s.j01;
  return s;
}

SimMetrics eval_metrics(const VectorXd& true_mean_test, const VectorXd& pred_test,
                        const CoefMatrix& omega_star, const CoefMatrix& omega_hat, double tol) {
  if (omega_star.omega.rows() != omega_hat.omega.rows() ||
      omega_star.omega.cols() != omega_hat.omega.cols())
    throw GreshError(ErrorCode::kDimensionMismatch, "coefficient shapes differ");
  SimMetrics m;
  m.err = mean_squared_error(true_mean_test, pred_test);
  Index true_nz = 0, true_zero = 0, missed = 0, false_alarm = 0;
  for (Index k = 0; k < omega_star.omega.cols(); ++k)
    for (Index j = 0; j < omega_star.omega.rows(); ++j) {
      const bool t = std::abs(omega_star.omega(j, k)) > tol;
      const bool e = std::abs(omega_hat.omega(j, k)) > tol;
      if (t) {
        ++true_nz;
        missed += !e;
      } else {
        ++true_zero;
        false_alarm += e;
      }
    }
  m.m_rate = true_nz ? static_cast<double>(missed) / true_nz : 0.0;
  m.fa_rate = true_zero ? static_cast<double>(false_alarm) / true_zero : 0.0;
  m.jd = missed == 0 ? 1.0 : 0.0;
  return m;
}

double prediction_gap(const QuadraticDesign& design, const CoefMatrix& a, const CoefMatrix& b) {
  if (a.omega.rows() != b.omega.rows() || a.omega.cols() != b.omega.cols())
    throw GreshError(ErrorCode::kDimensionMismatch, "coefficient shapes differ");
  CoefMatrix diff(a.p(), design.intercept());
  diff.omega = a.omega - b.omega;
  return apply_xbreve(design, diff).squaredNorm();
}

MatrixXd sample_cone_direction(Index p, const RestrictedSet& set, double vartheta,
                               std::uint64_t seed, std::uint64_t index) {
  auto rng = make_stream(seed, 0x6b617070, index);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  MatrixXd full(p + 1, p);
  for (Index k = 0; k < p; ++k)
    for (Index j = 0; j <= p; ++j) full(j, k) = normal(rng);
  full.bottomRows(p) = symmetrize(full.bottomRows(p));

  std::vector<bool> in_g(p, false);
  for (Index k : set.jg) in_g[k] = true;
  MatrixXd on_e = MatrixXd::Zero(p, p);
  for (auto [j, k] : set.je) on_e(j, k) = 1.0;

  // support part: main effects of J_G columns and the J_e interaction cells
  MatrixXd a = MatrixXd::Zero(p + 1, p);
  for (Index k = 0; k < p; ++k) {
    if (in_g[k]) a(0, k) = full(0, k);
    for (Index j = 0; j < p; ++j)
      if (on_e(j, k) != 0.0) a(1 + j, k) = full(1 + j, k);
  }
  const MatrixXd b = full - a;

  auto slack = [&](double t) {
    const MatrixXd d = a + t * b;
    const MatrixXd dphi = d.bottomRows(p);
    const double off = dphi.cwiseProduct((1.0 - on_e.array()).matrix()).lpNorm<1>() +
                       group_l21(d, in_g, false);
    const double on = dphi.cwiseProduct(on_e).lpNorm<1>() + group_l21(d, in_g, true);
    return (1.0 + vartheta) * on - off;
  };
  // largest t in [0, t_hi] on the cone, then a uniform fraction of it
  double lo = 0.0, hi = 1.0;
  while (slack(hi) >= 0.0 && hi < 1e6) hi *= 2.0;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    (slack(mid) >= 0.0 ? lo : hi) = mid;
  }
  double t = unif(rng) * lo;
  if (slack(t) < 0.0) t = 0.0;
  return a + t * b;
}

double kappa_ratio(const QuadraticDesign& design, const MatrixXd& delta, const RestrictedSet& set) {
  const Index p = design.p();
  double den = 0.0;
  for (auto [j, k] : set.je) den += delta(1 + j, k) * delta(1 + j, k);
  for (Index k : set.jg) den += delta.col(k).squaredNorm();
  const double norm_sq = design.tau_hat() * design.tau_hat();
  if (!(den > 0.0) || !(norm_sq > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  CoefMatrix d(p, design.intercept());
  d.omega = delta;
  return apply_xbreve(design, d).squaredNorm() / (norm_sq * den);
}

AssumptionEstimate estimate_kappa(const MatrixXd& x, const RestrictedSet& set, double vartheta,
                                  Index n_samples, std::uint64_t seed) {
  if (n_samples < 1) throw GreshError(ErrorCode::kInvalidInput, "n_samples must be >= 1");
  const Index p = x.cols();
  for (auto [j, k] : set.je)
    if (j < 0 || k < 0 || j >= p || k >= p)
      throw GreshError(ErrorCode::kInvalidInput, "J_e index out of range");
  for (Index k : set.jg)
    if (k < 0 || k >= p) throw GreshError(ErrorCode::kInvalidInput, "J_G index out of range");
  const QuadraticDesign da = QuadraticDesign::make(x, DesignScaling::kTypeA, false);
  const QuadraticDesign db = QuadraticDesign::make(x, DesignScaling::kTypeB, false);
  AssumptionEstimate est;
  est.vartheta = vartheta;
  est.kappa_hat = std::numeric_limits<double>::infinity();
  est.kappa_prime_hat = std::numeric_limits<double>::infinity();
  for (Index s = 0; s < n_samples; ++s) {
    const MatrixXd delta = sample_cone_direction(p, set, vartheta, seed, s);
    const double ra = kappa_ratio(da, delta, set);
    const double rb = kappa_ratio(db, delta, set);
    if (std::isnan(ra) || std::isnan(rb)) {
      ++est.skipped;
      continue;
    }
    ++est.samples;
    est.kappa_hat = std::min(est.kappa_hat, ra);
    est.kappa_prime_hat = std::min(est.kappa_prime_hat, rb);
  }
  if (est.samples == 0) est.kappa_hat = est.kappa_prime_hat = 0.0;
  return est;
}

std::vector<Index> support_recovery_threshold(const CoefMatrix& omega, double lambda1,
                                              double lambda2, double zeta) {
  if (!(zeta >= 0.0)) throw GreshError(ErrorCode::kInvalidInput, "zeta must be >= 0");
  const double thr = std::sqrt(1.0 + zeta * zeta) * std::min(lambda1, lambda2);
  std::vector<Index> out;
  for (Index i = 0; i < omega.omega.size(); ++i)
    if (std::abs(omega.omega.data()[i]) > thr) out.push_back(i);
  return out;
}

double rate_lambda(double a, double sigma, Index p) {
  return a * sigma * std::sqrt(std::log(std::exp(1.0) * static_cast<double>(p)));
}

std::vector<Index> flat_support(const CoefMatrix& omega, double tol) {
  std::vector<Index> out;
  for (Index i = 0; i < omega.omega.size(); ++i)
    if (std::abs(omega.omega.data()[i]) > tol) out.push_back(i);
  return out;
}

ReplicationResult run_replication(const BenchmarkConfig& cfg, int rep) {
  ReplicationResult rr;
  const SimScenario scn = make_scenario(cfg.example_id, cfg.p, cfg.seed);
  const std::uint64_t base = static_cast<std::uint64_t>(rep) * kPurposes;
  const SimData train = gen_data(scn, base + kTrain);
  const SimData val = gen_data(scn, base + kValidation, cfg.n_validation);
  const SimData test = gen_data(scn, base + kTest, cfg.n_test);

  const QuadraticDesign design =
      QuadraticDesign::make(train.x, scaling_for(cfg.type), cfg.intercept);
  PathSpec spec;
  spec.validation = Validation{val.x, val.y};
  spec.solver.accelerate = cfg.accelerate;
  spec.use_admm = cfg.use_admm;
  const PathResult path = solution_path(design, train.y, spec, cfg.mode, cfg.type);
  rr.path_time = path.wall_time;
  for (const PathNode& node : path.nodes) {
    rr.outer_iterations += node.fit.outer_iterations;
    ++rr.path_nodes;
    rr.hierarchy_failures += node.failed || !hierarchy_check(node.fit.omega_working, cfg.mode);
  }
  if (path.selected < 0) throw GreshError(ErrorCode::kInvalidInput, "no path node could be tuned");
  const PathNode& node = path.nodes[path.selected];
  rr.selected = path.selected;
  rr.lambda1 = node.lambda1;

  const VectorXd pred = predict_raw(test.x, node.refit);
  const CoefMatrix star = signal_matrix(scn.b_star, scn.phi_star);
  rr.metrics = eval_metrics(test.mean, pred, star, node.fit.omega_hat);
  rr.metrics.wall_time = path.wall_time;

  if (cfg.check_recovery) {
    // The rate levels refer to the loss scaled by 1 / ||X-breve||^2, so the
    // working weights are lambda_i * tau_hat and the threshold is min(lambda1, lambda2).
    const double l1 = rate_lambda(cfg.rate_a1, cfg.sigma, cfg.p);
    const double l2 = rate_lambda(cfg.rate_a2, cfg.sigma, cfg.p);
    const double tau = design.tau_hat();
    const PenaltySpec pen = PenaltySpec::from_lambdas(cfg.p, l1 * tau, l2 * tau, cfg.mode, cfg.type);
    SolverOptions opts;
    opts.accelerate = cfg.accelerate;
    const FitResult fit = gresh_fit(design, train.y, pen, opts);
    const CoefMatrix star_working = design.to_working(star);
    rr.support_recovered = support_recovery_threshold(fit.omega_working, l1, l2, cfg.zeta) ==
                           flat_support(star_working);
  }
  return rr;
}

BenchmarkSummary run_benchmark(const BenchmarkConfig& cfg) {
  if (cfg.reps < 1) throw GreshError(ErrorCode::kInvalidInput, "reps must be >= 1");
  example_signal(cfg.example_id, cfg.p);  // validates the configuration up front
  BenchmarkSummary sum;
  sum.config = cfg;
  sum.reps.resize(cfg.reps);
  const int threads = kernels::resolve_threads(cfg.threads);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads) if (threads > 1)
  for (int r = 0; r < cfg.reps; ++r) {
    try {
      sum.reps[r] = run_replication(cfg, r);
    } catch (const std::exception& e) {
      sum.reps[r].failed = true;
      sum.reps[r].error = e.what();
    }
  }

  std::vector<double> errs;
  double jd = 0, m = 0, fa = 0, t = 0, rec = 0;
  for (const ReplicationResult& r : sum.reps) {
    if (r.failed) {
      ++sum.failures;
      continue;
    }
    errs.push_back(r.metrics.err);
    jd += r.metrics.jd;
    m += r.metrics.m_rate;
    fa += r.metrics.fa_rate;
    t += r.path_time;
    rec += r.support_recovered;
  }
  const double ok = static_cast<double>(errs.size());
  if (ok > 0) {
    std::sort(errs.begin(), errs.end());
    const std::size_t h = errs.size() / 2;
    const double median = errs.size() % 2 ? errs[h] : 0.5 * (errs[h - 1] + errs[h]);
    sum.median_err100 = 100.0 * median;
    sum.jd100 = 100.0 * jd / ok;
    sum.m100 = 100.0 * m / ok;
    sum.fa100 = 100.0 * fa / ok;
    sum.mean_path_time = t / ok;
    sum.recovery_rate = rec / ok;
  }
  return sum;
}

}  // namespace gresh
