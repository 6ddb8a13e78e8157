#include "rrs/cli.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "rrs/errors.hpp"
#include "rrs/experiments.hpp"
#include "rrs/math.hpp"
#include "rrs/parallel.hpp"

namespace rrs {

namespace {

constexpr std::uint32_t kPurposeSample = 70;
constexpr std::uint32_t kPurposeEstimate = 71;

std::vector<double> parse_grid(const std::string& csv) {
  std::vector<double> grid;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) grid.push_back(std::stod(tok));
  }
  if (grid.empty()) throw CLI::ValidationError("--t-grid", "empty grid");
  return grid;
}

struct Common {
  std::uint64_t seed = 42;
  int workers = 0;
  std::string out;
  std::string format = "csv";
};

void add_common(CLI::App* cmd, Common& common) {
  cmd->add_option("--seed", common.seed, "base RNG seed");
  cmd->add_option("--workers", common.workers,
                  "worker threads (0 = hardware)");
  cmd->add_option("--out", common.out, "output path");
  cmd->add_option("--format", common.format, "csv|json")
      ->check(CLI::IsMember({"csv", "json"}));
}

//! Resolved-config header: everything that determines the output bytes.
//! --workers and --out are execution details and deliberately excluded.
Meta base_meta(const std::string& subcommand, const Common& common,
               const std::vector<std::pair<std::string, std::string>>& extra) {
  Meta meta;
  meta.emplace_back("tool", std::string("rrs ") + kVersion);
  meta.emplace_back("subcommand", subcommand);
  meta.emplace_back("seed", std::to_string(common.seed));
  meta.emplace_back("format", common.format);
  for (const auto& kv : extra) meta.push_back(kv);
  return meta;
}

std::string fmt(double v) { return format_cell(Cell{v}); }

int run_renewal_verify(const Common& common, const RenewalVerifyOptions& opts) {
  const auto rows = renewal_verify(opts, common.seed, common.workers);
  Table table;
  table.schema = {{"check_name", ColumnType::text}, {"t", ColumnType::real},
                  {"empirical", ColumnType::real},  {"oracle", ColumnType::real},
                  {"abs_error", ColumnType::real},  {"tolerance", ColumnType::real},
                  {"pass", ColumnType::boolean}};
  bool all_pass = true;
  for (const auto& r : rows) {
    table.add_row({r.check, r.t, r.empirical, r.oracle,
                   std::abs(r.empirical - r.oracle), r.tolerance, r.pass});
    all_pass = all_pass && r.pass;
  }
  Meta meta = base_meta("renewal-verify", common,
                        {{"traces_tv", std::to_string(opts.traces_tv)},
                         {"traces_ks", std::to_string(opts.traces_ks)}});
  meta.emplace_back("all_pass", all_pass ? "true" : "false");
  emit_table(table, meta, common.out, common.format);
  return all_pass ? 0 : 1;
}

int run_coupling(const Common& common, const std::string& family, double lambda,
                 double A, double b, long runs, const std::vector<double>& grid) {
  const CouplingFamily fam = family == "exp" ? CouplingFamily::exponential
                                             : CouplingFamily::gamma2;
  const auto rows = coupling_inequality_check(fam, lambda, A, b, grid, runs,
                                              common.seed, common.workers);
  Table table;
  table.schema = {{"t", ColumnType::real},
                  {"p_tail", ColumnType::real},
                  {"p_tail_stderr", ColumnType::real},
                  {"tv_oracle", ColumnType::real},
                  {"pass", ColumnType::boolean}};
  bool all_pass = true;
  for (const auto& r : rows) {
    table.add_row({r.t, r.p_tail, r.p_stderr, r.tv_oracle, r.pass});
    all_pass = all_pass && r.pass;
  }
  Meta meta = base_meta("coupling", common,
                        {{"family", family},
                         {"lambda", fmt(lambda)},
                         {"A", fmt(A)},
                         {"b", fmt(b)},
                         {"runs", std::to_string(runs)}});
  meta.emplace_back("all_pass", all_pass ? "true" : "false");
  emit_table(table, meta, common.out, common.format);
  return all_pass ? 0 : 1;
}

int run_sample(const Common& common, const std::string& method,
               const std::string& target_name, double t, long steps, long n,
               long burnin, int emit_acf_lags) {
  if (method == "rs" && target_name != "gamma-exp")
    throw CLI::ValidationError(
        "--method", "rs is wired only for gamma-exp (known constant C)");
  const SamplingPair pair = make_pair(
      method == "rs" ? target_name + "-rs" : target_name);
  const int dim = pair.target.dim;
  std::vector<double> points;
  RandomStream stream = make_stream(common.seed, kPurposeSample, 0);
  if (method == "rs") {
    if (!pair.rs_constant)
      throw CLI::ValidationError("--method",
                                 "rs needs a pair with a known constant C");
    for (long i = 0; i < n; ++i) {
      const auto draw =
          rejection_sample(pair.target, pair.prop, *pair.rs_constant, stream);
      points.insert(points.end(), draw.x.begin(), draw.x.end());
    }
  } else if (method == "rrs") {
    for (long i = 0; i < n; ++i) {
      const auto draw = rrs_terminal(pair.target, pair.prop, t, stream);
      points.insert(points.end(), draw.x.begin(), draw.x.end());
    }
  } else if (method == "rrs-sub") {
    points = rrs_subsampled(pair.target, pair.prop, t, n, stream);
  } else if (method == "imh") {
    std::vector<double> x0(static_cast<std::size_t>(dim), 0.5);
    const ChainTrace trace =
        imh_chain(pair.target, pair.prop, burnin + steps, x0, stream);
    points.assign(
        trace.states.begin() + static_cast<std::ptrdiff_t>(burnin) * dim,
        trace.states.end());
  } else if (method == "rwm") {
    const StepSampler step = [](RandomStream& rs, std::span<double> dx) {
      for (auto& v : dx) v = laplace_draw(rs, 4.0);
    };
    std::vector<double> x0(static_cast<std::size_t>(dim), 0.5);
    const ChainTrace trace =
        rwm_chain(pair.target, step, burnin + steps, x0, stream);
    points.assign(
        trace.states.begin() + static_cast<std::ptrdiff_t>(burnin) * dim,
        trace.states.end());
  } else {
    throw CLI::ValidationError("--method", "unknown method " + method);
  }

  Table table;
  for (int j = 0; j < dim; ++j)
    table.schema.push_back({"x" + std::to_string(j + 1), ColumnType::real});
  const long rows = static_cast<long>(points.size()) / dim;
  for (long i = 0; i < rows; ++i) {
    std::vector<Cell> row;
    for (int j = 0; j < dim; ++j)
      row.emplace_back(points[static_cast<std::size_t>(i * dim + j)]);
    table.add_row(std::move(row));
  }
  Meta meta = base_meta("sample", common,
                        {{"method", method},
                         {"target", target_name},
                         {"t", fmt(t)},
                         {"steps", std::to_string(steps)},
                         {"n", std::to_string(n)},
                         {"burnin", std::to_string(burnin)}});
  emit_table(table, meta, common.out, common.format);

  if (emit_acf_lags > 0) {
    Table acf_table;
    acf_table.schema.push_back({"lag", ColumnType::integer});
    std::vector<std::vector<double>> rho(static_cast<std::size_t>(dim));
    for (int j = 0; j < dim; ++j) {
      acf_table.schema.push_back({"acf_x" + std::to_string(j + 1), ColumnType::real});
      std::vector<double> series(static_cast<std::size_t>(rows));
      for (long i = 0; i < rows; ++i)
        series[static_cast<std::size_t>(i)] =
            points[static_cast<std::size_t>(i * dim + j)];
      rho[static_cast<std::size_t>(j)] = acf(series, emit_acf_lags);
    }
    for (int lag = 0; lag <= emit_acf_lags; ++lag) {
      std::vector<Cell> row{static_cast<std::int64_t>(lag)};
      for (int j = 0; j < dim; ++j)
        row.emplace_back(rho[static_cast<std::size_t>(j)][static_cast<std::size_t>(lag)]);
      acf_table.add_row(std::move(row));
    }
    Meta acf_meta = base_meta("sample-acf", common, {{"lags", std::to_string(emit_acf_lags)}});
    emit_table(acf_table, acf_meta, common.out + ".acf.csv", "csv");
  }
  return 0;
}

int run_moments(const Common& common, const std::string& target_name, long M,
                const std::string& dump_path) {
  const SamplingPair pair = make_pair(target_name);
  std::vector<double> w;
  const CycleMoments cm = cycle_moments_parallel(
      pair.target, pair.prop, M, common.seed, kPurposeEstimate, common.workers,
      dump_path.empty() ? nullptr : &w);
  nlohmann::ordered_json doc;
  doc["meta"] = {{"tool", std::string("rrs ") + kVersion},
                 {"subcommand", "moments"},
                 {"seed", std::to_string(common.seed)},
                 {"target", target_name},
                 {"M", M}};
  doc["mu"] = cm.mu;
  doc["mu2"] = cm.mu2;
  doc["mu3"] = cm.mu3;
  doc["n_samples"] = cm.n;
  doc["stderr"] = {{"mu", cm.se_mu}, {"mu2", cm.se_mu2}, {"mu3", cm.se_mu3}};
  write_text_atomic(common.out, doc.dump(2) + "\n");
  if (!dump_path.empty()) {
    Table table;
    table.schema = {{"w", ColumnType::real}};
    for (double v : w) table.add_row({v});
    emit_table(table, base_meta("moments-dump", common, {{"M", std::to_string(M)}}),
               dump_path, "csv");
  }
  return 0;
}

PointFn named_h(const std::string& name) {
  if (name == "tanh")
    return [](std::span<const double> x) { return std::tanh(x[0]); };
  if (name == "logistic")
    return [](std::span<const double> x) { return 1.0 / (1.0 + std::exp(-x[0])); };
  if (name == "tail1")
    return [](std::span<const double> x) { return x[0] >= 1.0 ? 1.0 : 0.0; };
  if (name == "id")
    return [](std::span<const double> x) { return x[0]; };
  throw CLI::ValidationError("--h", "unknown test function " + name);
}

//! E_target[h] for the Gamma(2,1) target by quadrature (never by MC).
double quadrature_q_ref(const PointFn& h) {
  const double num = integrate_semi_inf(
      [&](double x) { return h({&x, 1}) * x * std::exp(-x); }, 0.0, 1e-12);
  return num;  // normalizing mass is Gamma(2) = 1
}

int run_bias_sweep(const Common& common, const std::string& h_name,
                   const std::vector<double>& t_grid, long M) {
  const SamplingPair pair = make_pair("gamma-exp");
  const PointFn h = named_h(h_name);
  const double q_ref = quadrature_q_ref(h);
  const auto rows = bias_sweep(pair.target, pair.prop, h, 1.0, t_grid, M, q_ref,
                               common.seed, common.workers);
  Table table;
  table.schema = {{"t", ColumnType::real},
                  {"bias_qt", ColumnType::real},
                  {"bias_drop", ColumnType::real},
                  {"bound", ColumnType::real},
                  {"stderr", ColumnType::real},
                  {"pass", ColumnType::boolean}};
  bool all_pass = true;
  for (const auto& r : rows) {
    table.add_row({r.t, r.bias_fixed_time, r.bias_drop_last, r.bound,
                   r.stderr_fixed, r.pass});
    all_pass = all_pass && r.pass;
  }
  Meta meta = base_meta("bias-sweep", common,
                        {{"h", h_name},
                         {"M", std::to_string(M)},
                         {"q_ref", fmt(q_ref)}});
  meta.emplace_back("all_pass", all_pass ? "true" : "false");
  emit_table(table, meta, common.out, common.format);
  return all_pass ? 0 : 1;
}

int run_estimate(const Common& common, const std::string& h_name, double t,
                 double level, long m_moments) {
  const SamplingPair pair = make_pair("gamma-exp");
  const PointFn h = named_h(h_name);
  const CycleMoments moments = cycle_moments_parallel(
      pair.target, pair.prop, m_moments, common.seed, kPurposeEstimate,
      common.workers);
  RandomStream stream = make_stream(common.seed, kPurposeEstimate + 1, 0);
  const RatioEstimate est = estimate_quantity(pair.target, pair.prop, h, t,
                                              level, 1.0, moments, stream);
  nlohmann::ordered_json doc;
  doc["meta"] = {{"tool", std::string("rrs ") + kVersion},
                 {"subcommand", "estimate"},
                 {"seed", std::to_string(common.seed)},
                 {"h", h_name},
                 {"t", t},
                 {"level", level}};
  doc["value"] = est.value;
  doc["n_cycles"] = est.n_cycles;
  doc["t"] = est.t;
  doc["tavc"] = {{"eta2", est.eta2}, {"sigma2", est.sigma2}};
  doc["ci"] = {{"lo", est.ci_lo}, {"hi", est.ci_hi}, {"level", est.level}};
  if (est.bias_bound_value) doc["bias_bound"] = *est.bias_bound_value;
  write_text_atomic(common.out, doc.dump(2) + "\n");
  return 0;
}

int run_probit(const Common& common, const ProbitOptions& opts) {
  const ProbitResult result = probit_run(opts, common.seed, common.workers);
  Table table;
  for (int j = 0; j < result.dim; ++j)
    table.schema.push_back({"beta" + std::to_string(j), ColumnType::real});
  const long rows = static_cast<long>(result.samples.size()) / result.dim;
  for (long i = 0; i < rows; ++i) {
    std::vector<Cell> row;
    for (int j = 0; j < result.dim; ++j)
      row.emplace_back(result.samples[static_cast<std::size_t>(i * result.dim + j)]);
    table.add_row(std::move(row));
  }
  Meta meta = base_meta(
      "probit", common,
      {{"method", opts.method},
       {"prior_inv_var", fmt(opts.prior_inv_var)},
       {"xi", fmt(opts.xi)},
       {"alpha2", fmt(opts.alpha2)},
       {"N", std::to_string(opts.n_samples)},
       {"t", opts.t ? fmt(*opts.t) : std::string("auto")},
       {"t_used", fmt(result.t_used)}});
  emit_table(table, meta, common.out, common.format);

  nlohmann::ordered_json doc;
  doc["meta"] = {{"tool", std::string("rrs ") + kVersion},
                 {"subcommand", "probit"},
                 {"seed", std::to_string(common.seed)},
                 {"method", opts.method}};
  doc["map"] = std::vector<double>(result.map.data(),
                                   result.map.data() + result.map.size());
  doc["grad_inf_norm"] = result.grad_norm;
  doc["t_used"] = result.t_used;
  if (result.mu_w > 0.0) doc["mu_w"] = result.mu_w;
  doc["n_samples"] = rows;
  doc["summary"] = nlohmann::json::array();
  for (const auto& cs : result.summary) {
    doc["summary"].push_back({{"mean", cs.mean},
                              {"sd", cs.sd},
                              {"q1", cs.q1},
                              {"median", cs.median},
                              {"q3", cs.q3},
                              {"whisker_lo", cs.whisker_lo},
                              {"whisker_hi", cs.whisker_hi},
                              {"outliers", cs.outliers}});
  }
  write_text_atomic(common.out + ".summary.json", doc.dump(2) + "\n");

  // Timing lives in a sidecar so the primary outputs stay byte-reproducible.
  nlohmann::ordered_json timing;
  timing["wall_seconds"] = result.wall_seconds;
  timing["proposal_draws"] = result.proposal_draws;
  timing["samples_emitted"] = rows;
  timing["samples_per_second"] = result.samples_per_second;
  write_text_atomic(common.out + ".timing.json", timing.dump(2) + "\n");
  return 0;
}

int run_bench(const Common& common, const std::string& methods_csv, long reps,
              long n_samples) {
  std::vector<std::string> methods;
  std::stringstream ss(methods_csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) methods.push_back(tok);
  const auto reports =
      bench_probit(methods, reps, n_samples, common.seed, common.workers);

  nlohmann::ordered_json doc;
  doc["meta"] = {{"tool", std::string("rrs ") + kVersion},
                 {"subcommand", "bench"},
                 {"seed", std::to_string(common.seed)},
                 {"task", "probit"},
                 {"reps", reps},
                 {"N", n_samples}};
  doc["reports"] = nlohmann::json::array();
  for (const auto& r : reports)
    doc["reports"].push_back({{"method", r.method},
                              {"reps", r.reps},
                              {"samples_per_rep", r.samples_per_rep},
                              {"proposal_draws", r.proposal_draws}});
  double rrs_rate = -1.0, gibbs_rate = -1.0;
  nlohmann::ordered_json timing;
  timing["reports"] = nlohmann::json::array();
  for (const auto& r : reports) {
    timing["reports"].push_back({{"method", r.method},
                                 {"wall_seconds", r.wall_seconds},
                                 {"samples_per_second", r.samples_per_second}});
    if (r.method == "rrs") rrs_rate = r.samples_per_second;
    if (r.method == "gibbs") gibbs_rate = r.samples_per_second;
  }
  int exit_code = 0;
  if (rrs_rate > 0.0 && gibbs_rate > 0.0) {
    const bool ordering = rrs_rate > gibbs_rate;
    timing["rrs_faster_than_gibbs"] = ordering;
    exit_code = ordering ? 0 : 1;
  }
  write_text_atomic(common.out, doc.dump(2) + "\n");
  write_text_atomic(common.out + ".timing.json", timing.dump(2) + "\n");
  return exit_code;
}

}  // namespace

int dispatch(const std::vector<std::string>& argv) {
  CLI::App app{"regenerative rejection sampling experiments"};
  app.require_subcommand(1);
  // Goes before the subcommand: rrs --config run.ini sample ...; values live
  // in a [subcommand] section, flags given on the command line win.
  app.set_config("--config", "", "key=value config file with [subcommand] sections");

  Common common;

  auto* c_renewal = app.add_subcommand("renewal-verify",
                                       "renewal-theory oracle checks");
  RenewalVerifyOptions renewal_opts;
  add_common(c_renewal, common);
  c_renewal->add_option("--traces-tv", renewal_opts.traces_tv);
  c_renewal->add_option("--traces-ks", renewal_opts.traces_ks);
  c_renewal->add_option("--traces-en", renewal_opts.traces_en);

  auto* c_coupling = app.add_subcommand("coupling", "coupling-time tails");
  std::string family = "gamma2";
  double lambda = 1.0, A = 4.0, b = 1.0;
  long runs = 100'000;
  std::string t_grid_csv = "1,2,3,4,5,6,7,8,9,10";
  add_common(c_coupling, common);
  c_coupling->add_option("--family", family)->check(CLI::IsMember({"gamma2", "exp"}));
  c_coupling->add_option("--lambda", lambda, "interarrival rate");
  c_coupling->add_option("--A", A, "warm-up offset");
  c_coupling->add_option("--b", b, "uniform-component width");
  c_coupling->add_option("--runs", runs, "coupled simulations");
  c_coupling->add_option("--t-grid", t_grid_csv, "comma-separated times");

  auto* c_sample = app.add_subcommand("sample", "draw points");
  std::string method = "rrs", target_name = "gamma-exp";
  double sample_t = 10.0;
  long steps = 10'000, n_points = 1'000, burnin = 1'000;
  int emit_acf_lags = 0;
  add_common(c_sample, common);
  c_sample->add_option("--method", method)
      ->check(CLI::IsMember({"rs", "rrs", "rrs-sub", "imh", "rwm"}));
  c_sample->add_option("--target", target_name)
      ->check(CLI::IsMember({"gamma-exp", "synthetic-bounded", "synthetic-unbounded"}));
  c_sample->add_option("--t", sample_t, "time threshold (rrs, rrs-sub)");
  c_sample->add_option("--steps", steps, "chain steps (imh, rwm)");
  c_sample->add_option("--n", n_points, "points to draw (rs, rrs, rrs-sub)");
  c_sample->add_option("--burnin", burnin, "discarded chain prefix");
  c_sample->add_option("--emit-acf", emit_acf_lags,
                        "also write <out>.acf.csv up to this lag");

  auto* c_moments = app.add_subcommand("moments", "cycle-length moments");
  long m_draws = 100'000;
  std::string dump_path;
  add_common(c_moments, common);
  c_moments->add_option("--target", target_name)
      ->check(CLI::IsMember({"gamma-exp", "synthetic-bounded", "synthetic-unbounded"}));
  c_moments->add_option("--M", m_draws, "cycle draws");
  c_moments->add_option("--dump", dump_path, "raw W sample CSV");

  auto* c_bias = app.add_subcommand("bias-sweep", "ratio-estimator bias");
  c_bias->set_help_flag("--help", "print help");  // frees -h for --h
  std::string h_name = "tanh";
  std::string bias_grid_csv = "1,5,10,20,50,100";
  long sweep_m = 100'000;
  add_common(c_bias, common);
  c_bias->add_option("--h", h_name, "test function")
      ->check(CLI::IsMember({"tanh", "logistic", "tail1", "id"}));
  c_bias->add_option("--t-grid", bias_grid_csv, "comma-separated thresholds");
  c_bias->add_option("--M", sweep_m, "replicates per grid point");

  auto* c_estimate = app.add_subcommand("estimate", "single ratio estimate");
  c_estimate->set_help_flag("--help", "print help");
  double est_t = 200.0, level = 0.95;
  long m_moments = 100'000;
  add_common(c_estimate, common);
  c_estimate->add_option("--h", h_name, "test function")
      ->check(CLI::IsMember({"tanh", "logistic", "tail1", "id"}));
  c_estimate->add_option("--t", est_t, "time threshold");
  c_estimate->add_option("--level", level, "confidence level");
  c_estimate->add_option("--M-moments", m_moments,
                          "independent draws behind the bias bound");

  auto* c_probit = app.add_subcommand("probit", "lupus probit regression");
  ProbitOptions probit_opts;
  std::string prior = "flat";
  double probit_t = -1.0;
  bool auto_t = false;
  add_common(c_probit, common);
  c_probit->add_option("--method", probit_opts.method)
      ->check(CLI::IsMember({"rrs", "gibbs"}));
  c_probit->add_option("--prior", prior, "flat | gauss:<sigma2>");
  c_probit->add_option("--xi", probit_opts.xi, "weight scaling constant");
  c_probit->add_option("--alpha2", probit_opts.alpha2, "proposal covariance scale");
  c_probit->add_option("--N", probit_opts.n_samples, "posterior samples");
  c_probit->add_option("--burnin", probit_opts.burnin, "gibbs burn-in");
  c_probit->add_option("--t", probit_t, "fixed time threshold");
  c_probit->add_flag("--auto-t", auto_t, "select t from cycle moments");
  c_probit->add_option("--moment-draws", probit_opts.moment_draws,
                        "cycle draws behind --auto-t");
  c_probit->add_option("--data", probit_opts.data_path, "cell-grid data file");

  auto* c_bench = app.add_subcommand("bench", "samples/sec comparison");
  std::string methods_csv = "rrs,gibbs";
  std::string task = "probit";
  long reps = 100, bench_n = 10'000;
  add_common(c_bench, common);
  c_bench->add_option("--method", methods_csv, "comma-separated methods");
  c_bench->add_option("--task", task)->check(CLI::IsMember({"probit"}));
  c_bench->add_option("--reps", reps, "independent runs per method");
  c_bench->add_option("--N", bench_n, "samples per run");

  std::vector<std::string> args(argv.rbegin(), argv.rend());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (common.out.empty()) {
    if (c_renewal->parsed()) common.out = "renewal_verify.csv";
    else if (c_coupling->parsed()) common.out = "coupling.csv";
    else if (c_sample->parsed()) common.out = "sample.csv";
    else if (c_moments->parsed()) common.out = "moments.json";
    else if (c_bias->parsed()) common.out = "bias_sweep.csv";
    else if (c_estimate->parsed()) common.out = "estimate.json";
    else if (c_probit->parsed()) common.out = "probit.csv";
    else if (c_bench->parsed()) common.out = "bench.json";
  }

  try {
    if (c_renewal->parsed()) return run_renewal_verify(common, renewal_opts);
    if (c_coupling->parsed())
      return run_coupling(common, family, lambda, A, b, runs,
                          parse_grid(t_grid_csv));
    if (c_sample->parsed())
      return run_sample(common, method, target_name, sample_t, steps, n_points,
                        burnin, emit_acf_lags);
    if (c_moments->parsed())
      return run_moments(common, target_name, m_draws, dump_path);
    if (c_bias->parsed())
      return run_bias_sweep(common, h_name, parse_grid(bias_grid_csv), sweep_m);
    if (c_estimate->parsed())
      return run_estimate(common, h_name, est_t, level, m_moments);
    if (c_probit->parsed()) {
      if (prior == "flat") {
        probit_opts.prior_inv_var = 0.0;
      } else if (prior.rfind("gauss:", 0) == 0) {
        const double sigma2 = std::stod(prior.substr(6));
        if (!(sigma2 > 0.0))
          throw CLI::ValidationError("--prior", "prior variance must be positive");
        probit_opts.prior_inv_var = 1.0 / sigma2;
      } else {
        throw CLI::ValidationError("--prior", "expected flat or gauss:<sigma2>");
      }
      if (probit_t > 0.0 && auto_t)
        throw CLI::ValidationError("--t", "--t and --auto-t are mutually exclusive");
      if (probit_t > 0.0) probit_opts.t = probit_t;
      return run_probit(common, probit_opts);
    }
    if (c_bench->parsed()) return run_bench(common, methods_csv, reps, bench_n);
  } catch (const CLI::ValidationError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}

}  // namespace rrs
