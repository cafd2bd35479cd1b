// Command-line front end: fit, path, simulate, kkt, bench, assumptions.
//
// Exit codes: 0 success, 2 invalid flags, 3 data errors, 4 solver errors.

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "gresh/admm.hpp"
#include "gresh/io.hpp"
#include "gresh/kernels.hpp"
#include "gresh/path.hpp"
#include "gresh/sim.hpp"

using namespace gresh;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFlags = 2;
constexpr int kExitData = 3;
constexpr int kExitSolver = 4;

struct FlagError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Where an error surfaced decides its exit code.
enum class Stage { kData, kSolve };

int exit_code_for(const GreshError& e, Stage stage) {
  if (e.code() == ErrorCode::kInvalidPenalty || e.code() == ErrorCode::kInvalidStepSize)
    return kExitFlags;
  return stage == Stage::kData ? kExitData : kExitSolver;
}

Hierarchy parse_mode(const std::string& s) { return s == "wh" ? Hierarchy::kWeak : Hierarchy::kStrong; }
GreshType parse_type(const std::string& s) { return s == "a" ? GreshType::kA : GreshType::kB; }
Loss parse_loss(const std::string& s) { return s == "logistic" ? Loss::kLogistic : Loss::kSquared; }

// --- shared option groups -------------------------------------------------

struct ModelFlags {
  std::string mode = "sh";
  std::string type = "b";
  bool intercept = false;
  double tau = 0.0;
  double outer_tol = 1e-5;
  int max_outer = 20000;
  int inner_iters = 10;
  bool accelerate = false;
  int threads = 1;

  void add(CLI::App* app) {
    app->add_option("--mode", mode, "Hierarchy: sh (strong) or wh (weak)")
        ->check(CLI::IsMember({"sh", "wh"}))
        ->capture_default_str();
    app->add_option("--type", type, "Penalty type: a (normalized predictors) or b (scaled terms)")
        ->check(CLI::IsMember({"a", "b"}))
        ->capture_default_str();
    app->add_flag("--intercept", intercept, "Fit an unpenalized intercept");
    app->add_option("--tau", tau, "Step parameter (default: automatic)");
    app->add_option("--outer-tol", outer_tol, "Relative iterate-change tolerance")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app->add_option("--max-outer", max_outer, "Outer iteration cap")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app->add_option("--inner-iters", inner_iters, "Minimum Dykstra sweeps per step")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app->add_flag("--accelerate", accelerate, "Use the momentum step");
    app->add_option("--threads", threads, "Kernel threads (< 1: GRESH_THREADS or all cores)")
        ->capture_default_str();
  }

  SolverOptions solver_options(Loss loss) const {
    SolverOptions o;
    o.tau = tau;
    o.outer_tol = outer_tol;
    o.max_outer = max_outer;
    o.inner_iters = inner_iters;
    o.accelerate = accelerate;
    o.loss = loss;
    o.threads = kernels::resolve_threads(threads);
    return o;
  }

  Json to_json() const {
    Json j;
    j["mode"] = mode;
    j["type"] = type;
    j["intercept"] = intercept;
    j["tau"] = tau > 0.0 ? Json(tau) : Json("auto");
    j["outer_tol"] = outer_tol;
    j["max_outer"] = max_outer;
    j["inner_iters"] = inner_iters;
    j["accelerate"] = accelerate;
    j["threads"] = threads;
    return j;
  }
};

struct LoadedData {
  MatrixXd x;
  VectorXd y;
};

LoadedData load_xy(const std::string& x_path, const std::string& y_path) {
  LoadedData d;
  d.x = read_csv(x_path).data;
  d.y = read_vector_csv(y_path);
  if (d.y.size() != d.x.rows())
    throw GreshError(ErrorCode::kDimensionMismatch,
                     "X has " + std::to_string(d.x.rows()) + " rows but y has " +
                         std::to_string(d.y.size()) + " entries");
  return d;
}

Json document_header(const std::string& command, std::uint64_t seed, Json config) {
  Json doc;
  doc["tool"] = "gresh";
  doc["version"] = kVersion;
  doc["command"] = command;
  doc["seed"] = seed;
  doc["config"] = std::move(config);
  return doc;
}

void emit(const Json& doc, const std::string& out) {
  if (out.empty())
    std::cout << doc.dump(2) << '\n';
  else
    write_json(out, doc);
}

// --- fit --------------------------------------------------------------------

struct FitFlags {
  std::string x, y, out, solver = "gresh", loss = "squared";
  std::optional<double> lambda1, lambda2, ratio, sigma;
  double a1 = 2.0, a2 = 1.0;
  std::uint64_t seed = 0;
  ModelFlags model;
};

void add_fit(CLI::App& app, FitFlags& f) {
  auto* cmd = app.add_subcommand("fit", "Fit one penalized quadratic model");
  cmd->add_option("--x", f.x, "CSV of predictors (n x p)")->required();
  cmd->add_option("--y", f.y, "CSV of responses (n x 1)")->required();
  cmd->add_option("--lambda1", f.lambda1, "l1 weight on interactions");
  cmd->add_option("--lambda2", f.lambda2, "Group weight on columns of Omega");
  cmd->add_option("--ratio", f.ratio, "lambda2 = ratio * lambda1")->excludes("--lambda2");
  cmd->add_option("--sigma", f.sigma,
                  "Noise level; sets lambda_i = A_i sigma sqrt(log(e p)) ||X-breve|| when no "
                  "lambda1 is given");
  cmd->add_option("--A1", f.a1, "Rate constant for lambda1")->capture_default_str();
  cmd->add_option("--A2", f.a2, "Rate constant for lambda2")->capture_default_str();
  cmd->add_option("--loss", f.loss, "squared or logistic")
      ->check(CLI::IsMember({"squared", "logistic"}))
      ->capture_default_str();
  cmd->add_option("--solver", f.solver, "gresh or admm")
      ->check(CLI::IsMember({"gresh", "admm"}))
      ->capture_default_str();
  cmd->add_option("--seed", f.seed, "Recorded in the output for provenance");
  cmd->add_option("--out", f.out, "Output JSON (default: stdout)");
  f.model.add(cmd);
}

int run_fit(const FitFlags& f) {
  if (!f.lambda1 && !f.sigma) throw FlagError("fit needs --lambda1 or --sigma");
  if (!f.lambda1 && (f.lambda2 || f.ratio))
    throw FlagError("--lambda2/--ratio need --lambda1");
  const Loss loss = parse_loss(f.loss);
  if (f.solver == "admm" && loss != Loss::kSquared)
    throw FlagError("the ADMM solver supports squared loss only");

  LoadedData data;
  std::optional<QuadraticDesign> design;
  try {
    data = load_xy(f.x, f.y);
    design = QuadraticDesign::make(data.x, scaling_for(parse_type(f.model.type)), f.model.intercept);
  } catch (const GreshError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e, Stage::kData);
  }

  const Index p = design->p();
  double l1 = 0.0, l2 = 0.0;
  if (f.lambda1) {
    l1 = *f.lambda1;
    l2 = f.lambda2 ? *f.lambda2 : (f.ratio ? *f.ratio : 1.0) * l1;
  } else {
    // the rate levels refer to the loss scaled by 1 / ||X-breve||^2
    l1 = rate_lambda(f.a1, *f.sigma, p) * design->tau_hat();
    l2 = rate_lambda(f.a2, *f.sigma, p) * design->tau_hat();
  }

  Json config = f.model.to_json();
  config["x"] = f.x;
  config["y"] = f.y;
  config["lambda1"] = l1;
  config["lambda2"] = l2;
  config["loss"] = f.loss;
  config["solver"] = f.solver;
  if (f.sigma) config["sigma"] = *f.sigma;

  FitResult fit;
  try {
    const PenaltySpec pen =
        PenaltySpec::from_lambdas(p, l1, l2, parse_mode(f.model.mode), parse_type(f.model.type));
    if (f.solver == "admm") {
      AdmmOptions ao;
      ao.tol = f.model.outer_tol;
      ao.threads = kernels::resolve_threads(f.model.threads);
      fit = admm_fit(*design, data.y, pen, ao);
    } else {
      fit = gresh_fit(*design, data.y, pen, f.model.solver_options(loss));
    }
  } catch (const GreshError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e, Stage::kSolve);
  }

  Json doc = document_header("fit", f.seed, config);
  doc["result"] = fit_to_json(fit);
  emit(doc, f.out);
  return kExitOk;
}

// --- kkt --------------------------------------------------------------------

struct KktFlags {
  std::string fit, x, y;
};

void add_kkt(CLI::App& app, KktFlags& f) {
  auto* cmd = app.add_subcommand("kkt", "Recompute optimality residuals of a fit document");
  cmd->add_option("--fit", f.fit, "JSON document written by `fit`")->required();
  cmd->add_option("--x", f.x, "Predictor CSV (default: the path stored in the document)");
  cmd->add_option("--y", f.y, "Response CSV (default: the path stored in the document)");
}

int run_kkt(const KktFlags& f) {
  try {
    const Json doc = read_json(f.fit);
    const Json& cfg = doc.at("config");
    const std::string x_path = f.x.empty() ? cfg.at("x").get<std::string>() : f.x;
    const std::string y_path = f.y.empty() ? cfg.at("y").get<std::string>() : f.y;
    const LoadedData data = load_xy(x_path, y_path);
    const GreshType type = parse_type(cfg.at("type").get<std::string>());
    const Hierarchy mode = parse_mode(cfg.at("mode").get<std::string>());
    const QuadraticDesign design =
        QuadraticDesign::make(data.x, scaling_for(type), cfg.at("intercept").get<bool>());
    const CoefMatrix working = coef_from_json(doc.at("result").at("working_coefficients"));
    if (working.p() != design.p())
      throw GreshError(ErrorCode::kDimensionMismatch, "fit document does not match X");
    const PenaltySpec pen = PenaltySpec::from_lambdas(
        design.p(), cfg.at("lambda1").get<double>(), cfg.at("lambda2").get<double>(), mode, type);
    const KktReport rep =
        kkt_check(design, working, pen, data.y, parse_loss(cfg.value("loss", "squared")));
    Json out;
    out["fit"] = f.fit;
    out["kkt"] = kkt_to_json(rep);
    const Json& stored = doc.at("result").at("kkt");
    out["stored_max_residual"] = stored.at("max_residual");
    out["difference"] = std::abs(rep.max_residual() - stored.at("max_residual").get<double>());
    std::cout << out.dump(2) << '\n';
  } catch (const GreshError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: malformed fit document: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

// --- path -------------------------------------------------------------------

struct PathFlags {
  std::string x, y, x_val, y_val, out, table, solver = "gresh";
  int nlambda = 20;
  double ratio = 0.5, min_frac = 1e-3;
  std::uint64_t seed = 0;
  ModelFlags model;
};

void add_path(CLI::App& app, PathFlags& f) {
  auto* cmd = app.add_subcommand("path", "Warm-started solution path with validation tuning");
  cmd->add_option("--x", f.x, "CSV of predictors")->required();
  cmd->add_option("--y", f.y, "CSV of responses")->required();
  cmd->add_option("--x-val", f.x_val, "Validation predictors (default: training data)");
  cmd->add_option("--y-val", f.y_val, "Validation responses")->needs("--x-val");
  cmd->get_option("--x-val")->needs("--y-val");
  cmd->add_option("--nlambda", f.nlambda, "Grid size")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--ratio", f.ratio, "lambda2 = ratio * lambda1")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--min-frac", f.min_frac, "Smallest lambda1 as a fraction of lambda_max")
      ->check(CLI::Range(1e-12, 1.0))
      ->capture_default_str();
  cmd->add_option("--solver", f.solver, "gresh or admm")
      ->check(CLI::IsMember({"gresh", "admm"}))
      ->capture_default_str();
  cmd->add_option("--seed", f.seed, "Recorded in the output for provenance");
  cmd->add_option("--out", f.out, "Output JSON (default: stdout)");
  cmd->add_option("--table", f.table, "Per-node CSV table");
  f.model.add(cmd);
}

int run_path(const PathFlags& f) {
  LoadedData data, val;
  std::optional<QuadraticDesign> design;
  try {
    data = load_xy(f.x, f.y);
    val = f.x_val.empty() ? data : load_xy(f.x_val, f.y_val);
    if (val.x.cols() != data.x.cols())
      throw GreshError(ErrorCode::kDimensionMismatch, "validation X has a different p");
    design = QuadraticDesign::make(data.x, scaling_for(parse_type(f.model.type)), f.model.intercept);
  } catch (const GreshError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e, Stage::kData);
  }

  PathSpec spec;
  spec.n_lambda = f.nlambda;
  spec.ratio_c = f.ratio;
  spec.lambda_min_frac = f.min_frac;
  spec.validation = Validation{val.x, val.y};
  spec.solver = f.model.solver_options(Loss::kSquared);
  spec.use_admm = f.solver == "admm";
  spec.admm_tol = f.model.outer_tol;

  PathResult path;
  try {
    path = solution_path(*design, data.y, spec, parse_mode(f.model.mode), parse_type(f.model.type));
  } catch (const GreshError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e, Stage::kSolve);
  }

  Json config = f.model.to_json();
  config["x"] = f.x;
  config["y"] = f.y;
  config["x_val"] = f.x_val.empty() ? Json(nullptr) : Json(f.x_val);
  config["y_val"] = f.y_val.empty() ? Json(nullptr) : Json(f.y_val);
  config["nlambda"] = f.nlambda;
  config["ratio"] = f.ratio;
  config["min_frac"] = f.min_frac;
  config["solver"] = f.solver;
  config["ridge_gamma_multipliers"] = spec.ridge_gamma;

  Json doc = document_header("path", f.seed, config);
  doc["lambda_max"] = path.lambda_max;
  Json nodes = Json::array();
  MatrixXd table(static_cast<Index>(path.nodes.size()), 8);
  for (std::size_t i = 0; i < path.nodes.size(); ++i) {
    const PathNode& n = path.nodes[i];
    Json j;
    j["index"] = i;
    j["lambda1"] = n.lambda1;
    j["lambda2"] = n.lambda2;
    j["failed"] = n.failed;
    if (n.failed) j["error"] = n.error;
    j["support_groups"] = n.support_groups;
    j["support_phi"] = n.support_phi;
    j["objective"] = n.fit.final_objective;
    j["outer_iterations"] = n.fit.outer_iterations;
    j["hierarchy_ok"] = n.fit.kkt.hierarchy_ok;
    j["kkt_max_residual"] = n.fit.kkt.max_residual();
    j["refit_gamma"] = n.refit_gamma;
    j["validation_mse"] = std::isnan(n.validation_mse) ? Json(nullptr) : Json(n.validation_mse);
    nodes.push_back(j);
    table.row(static_cast<Index>(i)) << static_cast<double>(i), n.lambda1, n.lambda2,
        static_cast<double>(n.support_groups), static_cast<double>(n.support_phi),
        n.validation_mse, n.refit_gamma, n.fit.kkt.hierarchy_ok ? 1.0 : 0.0;
  }
  doc["nodes"] = nodes;
  doc["selected"] = path.selected;
  if (path.selected >= 0) {
    const PathNode& sel = path.nodes[path.selected];
    doc["selected_model"] = {{"coefficients", coef_to_json(sel.fit.omega_hat)},
                             {"refit_coefficients", coef_to_json(sel.refit)}};
  }
  try {
    if (!f.table.empty())
      write_csv(f.table, table,
                {"node", "lambda1", "lambda2", "J_G", "J_e", "validation_mse", "ridge_gamma",
                 "hierarchy_ok"});
    emit(doc, f.out);
  } catch (const GreshError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

// --- simulate / bench -------------------------------------------------------

struct SimFlags {
  int example = 2;
  Index p = 50;
  int reps = 10;
  std::uint64_t seed = 1;
  std::string solver = "gresh", mode = "sh", type = "b", out_csv, out_json, algo = "both";
  bool full_scale = false, no_accelerate = false;
  int threads = 0;
};

void add_sim_options(CLI::App* cmd, SimFlags& f, bool bench) {
  cmd->add_option("--example", f.example, "Benchmark example: 1, 2 or 3")
      ->check(CLI::IsMember({1, 2, 3}))
      ->capture_default_str();
  cmd->add_option("--p", f.p, "Number of predictors")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--reps", f.reps, "Replications")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--seed", f.seed, "Base seed")->capture_default_str();
  cmd->add_option("--mode", f.mode, "sh or wh")->check(CLI::IsMember({"sh", "wh"}))->capture_default_str();
  cmd->add_option("--type", f.type, "a or b")->check(CLI::IsMember({"a", "b"}))->capture_default_str();
  cmd->add_flag("--full-scale", f.full_scale, "Use 50 replications");
  cmd->add_flag("--no-accelerate", f.no_accelerate, "Disable the momentum step");
  cmd->add_option("--threads", f.threads, "Parallel replications (< 1: GRESH_THREADS or all cores)")
      ->capture_default_str();
  cmd->add_option("--out-csv", f.out_csv, "Metrics table (CSV)");
  cmd->add_option("--out-json", f.out_json, "Metrics (JSON); default: stdout");
  if (bench)
    cmd->add_option("--algo", f.algo, "gresh, admm or both")
        ->check(CLI::IsMember({"gresh", "admm", "both"}))
        ->capture_default_str();
  else
    cmd->add_option("--solver", f.solver, "gresh or admm")
        ->check(CLI::IsMember({"gresh", "admm"}))
        ->capture_default_str();
}

BenchmarkConfig bench_config(const SimFlags& f, bool admm) {
  BenchmarkConfig c;
  c.example_id = f.example;
  c.p = f.p;
  c.reps = f.full_scale ? 50 : f.reps;
  c.seed = f.seed;
  c.use_admm = admm;
  c.mode = parse_mode(f.mode);
  c.type = parse_type(f.type);
  c.accelerate = !f.no_accelerate;
  c.threads = f.threads;
  return c;
}

Json sim_config_json(const SimFlags& f, const BenchmarkConfig& c) {
  Json j;
  j["example"] = f.example;
  j["p"] = f.p;
  j["reps"] = c.reps;
  j["mode"] = f.mode;
  j["type"] = f.type;
  j["intercept"] = c.intercept;
  j["accelerate"] = c.accelerate;
  j["n_validation"] = c.n_validation;
  j["n_test"] = c.n_test;
  return j;
}

// Rates and errors use the x100 reporting convention.
Json summary_json(const BenchmarkSummary& s, bool timing) {
  Json j;
  j["reporting"] = "err, JD, M and FA are multiplied by 100";
  j["median_err_x100"] = s.median_err100;
  j["jd_x100"] = s.jd100;
  j["m_x100"] = s.m100;
  j["fa_x100"] = s.fa100;
  j["failures"] = s.failures;
  if (timing) j["mean_path_time_s"] = s.mean_path_time;
  Json reps = Json::array();
  for (std::size_t i = 0; i < s.reps.size(); ++i) {
    const ReplicationResult& r = s.reps[i];
    Json rj;
    rj["rep"] = i;
    if (r.failed) {
      rj["error"] = r.error;
    } else {
      rj["err_x100"] = 100.0 * r.metrics.err;
      rj["jd"] = r.metrics.jd;
      rj["m_x100"] = 100.0 * r.metrics.m_rate;
      rj["fa_x100"] = 100.0 * r.metrics.fa_rate;
      rj["selected_node"] = r.selected;
      rj["lambda1"] = r.lambda1;
      if (timing) rj["path_time_s"] = r.path_time;
    }
    reps.push_back(rj);
  }
  j["replications"] = reps;
  return j;
}

void write_sim_csv(const std::string& path, const BenchmarkSummary& s, bool timing) {
  const Index cols = timing ? 7 : 6;
  MatrixXd t(static_cast<Index>(s.reps.size()), cols);
  for (std::size_t i = 0; i < s.reps.size(); ++i) {
    const ReplicationResult& r = s.reps[i];
    const double nan = std::numeric_limits<double>::quiet_NaN();
    t(i, 0) = static_cast<double>(i);
    t(i, 1) = r.failed ? nan : 100.0 * r.metrics.err;
    t(i, 2) = r.failed ? nan : 100.0 * r.metrics.jd;
    t(i, 3) = r.failed ? nan : 100.0 * r.metrics.m_rate;
    t(i, 4) = r.failed ? nan : 100.0 * r.metrics.fa_rate;
    t(i, 5) = r.lambda1;
    if (timing) t(i, 6) = r.path_time;
  }
  std::vector<std::string> header = {"rep", "err_x100", "jd_x100", "m_x100", "fa_x100", "lambda1"};
  if (timing) header.push_back("path_time_s");
  write_csv(path, t, header);
}

int run_simulate(const SimFlags& f) {
  const BenchmarkConfig c = bench_config(f, f.solver == "admm");
  BenchmarkSummary s;
  try {
    s = run_benchmark(c);
  } catch (const GreshError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFlags;
  }
  Json cfg = sim_config_json(f, c);
  cfg["solver"] = f.solver;
  Json doc = document_header("simulate", f.seed, cfg);
  doc["summary"] = summary_json(s, false);
  try {
    if (!f.out_csv.empty()) write_sim_csv(f.out_csv, s, false);
    emit(doc, f.out_json);
  } catch (const GreshError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return s.failures == static_cast<int>(s.reps.size()) ? kExitSolver : kExitOk;
}

int run_bench(const SimFlags& f) {
  Json cfg;
  Json doc;
  std::optional<BenchmarkSummary> g, a;
  try {
    if (f.algo != "admm") g = run_benchmark(bench_config(f, false));
    if (f.algo != "gresh") a = run_benchmark(bench_config(f, true));
  } catch (const GreshError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFlags;
  }
  cfg = sim_config_json(f, bench_config(f, false));
  cfg["algo"] = f.algo;
  doc = document_header("bench", f.seed, cfg);
  if (g) doc["gresh"] = summary_json(*g, true);
  if (a) doc["admm"] = summary_json(*a, true);
  if (g && a && g->mean_path_time > 0.0)
    doc["admm_over_gresh_time"] = a->mean_path_time / g->mean_path_time;
  try {
    if (!f.out_csv.empty()) {
      MatrixXd t(1, 3);
      t << (g ? g->mean_path_time : std::nan("")), (a ? a->mean_path_time : std::nan("")),
          (g && a && g->mean_path_time > 0.0 ? a->mean_path_time / g->mean_path_time
                                             : std::nan(""));
      write_csv(f.out_csv, t, {"gresh_path_time_s", "admm_path_time_s", "ratio"});
    }
    emit(doc, f.out_json);
  } catch (const GreshError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

// --- assumptions ------------------------------------------------------------

struct AssumptionFlags {
  std::string x, je = "1:2,2:1", jg = "1,2";
  Index n = 100, p = 10;
  double vartheta = 1.0;
  Index samples = 2000;
  std::uint64_t seed = 1;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

RestrictedSet parse_sets(const AssumptionFlags& f) {
  RestrictedSet set;
  try {
    for (const auto& tok : split(f.jg, ',')) set.jg.push_back(std::stol(tok) - 1);
    for (const auto& tok : split(f.je, ',')) {
      const auto jk = split(tok, ':');
      if (jk.size() != 2) throw FlagError("--je entries look like j:k");
      set.je.emplace_back(std::stol(jk[0]) - 1, std::stol(jk[1]) - 1);
    }
  } catch (const std::logic_error&) {
    throw FlagError("cannot parse --je/--jg");
  }
  return set;
}

void add_assumptions(CLI::App& app, AssumptionFlags& f) {
  auto* cmd = app.add_subcommand("assumptions", "Monte-Carlo restricted-eigenvalue constants");
  cmd->add_option("--x", f.x, "Predictor CSV (default: a Gaussian design)");
  cmd->add_option("--n", f.n, "Rows of the Gaussian design")->capture_default_str();
  cmd->add_option("--p", f.p, "Columns of the Gaussian design")->capture_default_str();
  cmd->add_option("--je", f.je, "Interaction cells j:k (1-based, comma separated)")->capture_default_str();
  cmd->add_option("--jg", f.jg, "Column groups (1-based, comma separated)")->capture_default_str();
  cmd->add_option("--vartheta", f.vartheta, "Cone parameter")->check(CLI::NonNegativeNumber)->capture_default_str();
  cmd->add_option("--samples", f.samples, "Sampled directions")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--seed", f.seed, "Seed")->capture_default_str();
}

int run_assumptions(const AssumptionFlags& f) {
  const RestrictedSet set = parse_sets(f);
  MatrixXd x;
  try {
    if (!f.x.empty()) {
      x = read_csv(f.x).data;
    } else {
      auto rng = make_stream(f.seed, 0x78, 0);
      std::normal_distribution<double> normal(0.0, 1.0);
      x.resize(f.n, f.p);
      for (Index i = 0; i < x.size(); ++i) x.data()[i] = normal(rng);
    }
  } catch (const GreshError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  AssumptionEstimate est;
  try {
    est = estimate_kappa(x, set, f.vartheta, f.samples, f.seed);
  } catch (const GreshError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::kZeroNormColumn ? kExitData : kExitFlags;
  }
  Json cfg;
  cfg["x"] = f.x.empty() ? Json("gaussian") : Json(f.x);
  cfg["n"] = x.rows();
  cfg["p"] = x.cols();
  cfg["je"] = f.je;
  cfg["jg"] = f.jg;
  Json doc = document_header("assumptions", f.seed, cfg);
  doc["vartheta"] = est.vartheta;
  doc["kappa_hat"] = est.kappa_hat;
  doc["kappa_prime_hat"] = est.kappa_prime_hat;
  doc["samples"] = est.samples;
  doc["skipped"] = est.skipped;
  std::cout << doc.dump(2) << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse quadratic-interaction regression under strong or weak hierarchy"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  FitFlags fit;
  KktFlags kkt;
  PathFlags path;
  SimFlags sim, bench;
  AssumptionFlags assumptions;
  add_fit(app, fit);
  add_kkt(app, kkt);
  add_path(app, path);
  add_sim_options(app.add_subcommand("simulate", "Benchmark replications (metrics table)"), sim,
                  false);
  add_sim_options(app.add_subcommand("bench", "Path timing of GRESH against ADMM"), bench, true);
  add_assumptions(app, assumptions);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    const CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    std::cerr << sub->help();
    return kExitFlags;
  }

  try {
    if (app.got_subcommand("fit")) return run_fit(fit);
    if (app.got_subcommand("kkt")) return run_kkt(kkt);
    if (app.got_subcommand("path")) return run_path(path);
    if (app.got_subcommand("simulate")) return run_simulate(sim);
    if (app.got_subcommand("bench")) return run_bench(bench);
    if (app.got_subcommand("assumptions")) return run_assumptions(assumptions);
  } catch (const FlagError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help() << '\n';
    return kExitFlags;
  }
  return kExitFlags;
}
