#include "cli.hpp"

#include <chrono>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "mrfsl/dataset_io.hpp"
#include "mrfsl/eval.hpp"
#include "mrfsl/learners.hpp"
#include "mrfsl/synthgen.hpp"

namespace mrfsl::cli {
namespace fs = std::filesystem;

namespace {

struct GeneratorFlags {
  std::string kind = "ising";
  std::size_t n = 100;
  std::uint64_t seed = 0;
  IsingParams ising;
  int t_steps = 3;
  double stay1 = 0.8, stay2 = 0.8;
  std::vector<double> obs_p1{0.1, 0.5, 0.5, 0.9};
  GaussianParams gaussian;
  HmmContinuousParams hmm_c;

  GeneratorSpec spec() const {
    GeneratorSpec s;
    s.kind = parse_generator_kind(kind);
    s.n_samples = n;
    s.seed = seed;
    s.ising = ising;
    s.hmm_discrete.t_steps = t_steps;
    s.hmm_discrete.trans1 << stay1, 1 - stay1, 1 - stay1, stay1;
    s.hmm_discrete.trans2 << stay2, 1 - stay2, 1 - stay2, stay2;
    if (obs_p1.size() != 4) throw ValidationError("--obs-p1 needs four values p00,p01,p10,p11");
    s.hmm_discrete.obs_p1 << obs_p1[0], obs_p1[1], obs_p1[2], obs_p1[3];
    s.gaussian = gaussian;
    s.hmm_continuous = hmm_c;
    s.hmm_continuous.t_steps = t_steps;
    return s;
  }
};

void add_generator_options(CLI::App* app, GeneratorFlags& g) {
  app->add_option("--kind", g.kind, "ising | hmm-discrete | gaussian | hmm-continuous")
      ->check(CLI::IsMember({"ising", "hmm-discrete", "gaussian", "hmm-continuous"}))
      ->capture_default_str();
  app->add_option("--n", g.n, "Samples per dataset")->capture_default_str();
  app->add_option("--beta", g.ising.beta, "Ising coupling")->capture_default_str();
  app->add_option("--burnin", g.ising.burnin, "Ising Gibbs burn-in sweeps")->capture_default_str();
  app->add_option("--thin", g.ising.thin, "Ising Gibbs sweeps per kept sample")->capture_default_str();
  app->add_option("--t-steps", g.t_steps, "HMM time steps (D = 3 t)")->capture_default_str();
  app->add_option("--stay1", g.stay1, "Discrete HMM chain-1 stay probability")->capture_default_str();
  app->add_option("--stay2", g.stay2, "Discrete HMM chain-2 stay probability")->capture_default_str();
  app->add_option("--obs-p1", g.obs_p1, "P(O=1|s1,s2) as p00,p01,p10,p11")
      ->delimiter(',')
      ->expected(4)
      ->capture_default_str();
  app->add_option("--d", g.gaussian.d, "Gaussian dimension")->capture_default_str();
  app->add_option("--edge-prob", g.gaussian.edge_prob, "Gaussian edge probability")->capture_default_str();
  app->add_option("--min-eig", g.gaussian.min_eig, "Gaussian precision min eigenvalue")->capture_default_str();
  app->add_option("--weight-lo", g.gaussian.weight_lo)->capture_default_str();
  app->add_option("--weight-hi", g.gaussian.weight_hi)->capture_default_str();
  app->add_option("--a1", g.hmm_c.a1, "Continuous HMM chain-1 coefficient")->capture_default_str();
  app->add_option("--a2", g.hmm_c.a2, "Continuous HMM chain-2 coefficient")->capture_default_str();
  app->add_option("--noise-sd1", g.hmm_c.noise_sd1)->capture_default_str();
  app->add_option("--noise-sd2", g.hmm_c.noise_sd2)->capture_default_str();
  app->add_option("--init-sd1", g.hmm_c.init_sd1)->capture_default_str();
  app->add_option("--init-sd2", g.hmm_c.init_sd2)->capture_default_str();
  app->add_option("--sd-gain", g.hmm_c.sd_gain, "Observation log-sd gain on S2")->capture_default_str();
}

struct EstimatorFlags {
  std::string method = "knn";
  int k = 3;
  bool rank = false;

  EstimatorConfig config() const {
    EstimatorConfig c;
    c.method = method == "plugin" ? EstimatorMethod::PlugIn : EstimatorMethod::KnnMixed;
    c.k = k;
    c.rank_transform = rank;
    return c;
  }
};

void add_estimator_options(CLI::App* app, EstimatorFlags& e) {
  app->add_option("--estimator", e.method, "plugin | knn")
      ->check(CLI::IsMember({"plugin", "knn"}))
      ->capture_default_str();
  app->add_option("--k", e.k, "k-NN neighbour count")->capture_default_str();
  app->add_flag("--rank-transform", e.rank, "Rank-transform continuous columns");
}

void write_config_echo(const CLI::App& sub, const fs::path& out) {
  write_file_atomic(out / "config.toml",
                    fmt::format("[{}]\n{}", sub.get_name(), sub.config_to_str(true, false)));
}

int cmd_generate(const CLI::App& root, const GeneratorFlags& g, const fs::path& out,
                 std::ostream& os) {
  const auto spec = g.spec();
  const auto [data, truth] = generate(spec);
  fs::create_directories(out);
  save_dataset(out / "data.csv", data);
  save_edge_set(out / "truth.edges", truth.edge_set);
  write_file_atomic(out / "generator.json", to_json(spec).dump(2) + "\n");
  write_config_echo(root, out);
  os << fmt::format("wrote {} samples x {} variables ({} true edges) to {}\n", data.n_samples(),
                    data.n_vars(), truth.edge_set.size(), out.string());
  return kOk;
}

struct LearnFlags {
  std::string data;
  std::string algo = "gs-mple";
  double lambda = 0.0;
  std::optional<std::size_t> max_edges;
  bool timing = false;
};

int cmd_learn(const CLI::App& root, const LearnFlags& l, const EstimatorFlags& e,
              const fs::path& out, std::ostream& os) {
  const Dataset raw = load_dataset(l.data);
  const Algorithm algo = parse_algorithm(l.algo);
  const LearnerConfig cfg{l.lambda, e.config(), l.max_edges};
  validate(cfg);
  const Dataset data = prepare_dataset(raw, cfg.estimator);
  validate(cfg.estimator, data);
  MiCache cache(data, cfg.estimator);

  const auto start = std::chrono::steady_clock::now();
  EdgeSet learned;
  LearnTrace trace;
  if (algo == Algorithm::GsMple) {
    auto r = gs_mple(cache, cfg);
    learned = std::move(r.edges);
    trace = std::move(r.trace);
  } else {
    learned = learn(algo, cache, cfg);
  }
  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

  fs::create_directories(out);
  save_edge_set(out / "learned.edges", learned);
  if (algo == Algorithm::GsMple) write_file_atomic(out / "trace.log", format_trace(trace));
  if (l.timing)
    write_file_atomic(out / "timing.txt",
                      fmt::format("wall_ms {:.3f}\nmi_evaluations {}\n", ms, cache.evaluations()));
  write_config_echo(root, out);
  os << to_string(learned);
  return kOk;
}

struct SweepFlags {
  std::vector<std::string> learners{"gs-mple", "iamb", "gsmn", "chow-liu"};
  std::vector<double> lambdas{0.0, 0.01, 0.02, 0.05, 0.1, 0.2};
  std::size_t runs = 10;
  std::optional<std::size_t> max_edges;
  unsigned jobs = 1;
  bool timing = false;
};

int cmd_sweep(const CLI::App& root, const GeneratorFlags& g, const SweepFlags& s,
              const EstimatorFlags& e, const fs::path& out, std::ostream& os, std::ostream& es) {
  SweepConfig cfg;
  cfg.generator = g.spec();
  for (const auto& name : s.learners) cfg.learners.push_back(standard_learner(parse_algorithm(name)));
  cfg.lambda_grid = s.lambdas;
  cfg.n_runs = s.runs;
  cfg.base_seed = g.seed;
  cfg.estimator = e.config();
  cfg.max_edges = s.max_edges;
  cfg.jobs = s.jobs;

  SweepResult result;
  bool too_many = false;
  try {
    result = roc_sweep(cfg);
  } catch (const SweepError& err) {
    result = err.result;
    too_many = true;
    es << "error: " << err.what() << "\n";
  }

  fs::create_directories(out);
  write_file_atomic(out / "cells.csv", cells_csv(result, s.timing));
  write_file_atomic(out / "curves.csv", curves_csv(result));
  auto summary = summary_json(result);
  summary["config"] = to_json(cfg);
  write_file_atomic(out / "summary.json", summary.dump(2) + "\n");
  write_config_echo(root, out);

  for (const auto& [name, auc] : result.auc) os << fmt::format("{:10s} AUC {:.4f}\n", name, auc);
  if (!result.sparsity_violations.empty())
    os << fmt::format("{} monotone-sparsity violations logged in summary.json\n",
                      result.sparsity_violations.size());
  if (too_many) return kFailure;
  if (result.failed_cells > 0) {
    es << fmt::format("warning: {} of {} cells failed\n", result.failed_cells, result.cells.size());
    return kCellsFailed;
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Markov random field structure learning (grow-shrink pseudolikelihood search)"};
  app.name(args.empty() ? "mrfsl" : args.front());
  app.set_config("--config", "", "Read options from a TOML/INI config file; flags override it");
  app.require_subcommand(1);

  std::string out_dir = "out";

  GeneratorFlags gen_flags;
  auto* gen = app.add_subcommand("generate", "Sample a synthetic dataset and its true graph");
  add_generator_options(gen, gen_flags);
  gen->add_option("--seed", gen_flags.seed, "Random seed")->capture_default_str();
  gen->add_option("--out", out_dir, "Output directory")->capture_default_str();

  LearnFlags learn_flags;
  EstimatorFlags learn_est;
  auto* lrn = app.add_subcommand("learn", "Learn an edge set from a dataset CSV");
  lrn->add_option("--data", learn_flags.data, "Dataset CSV")->required();
  lrn->add_option("--algo", learn_flags.algo, "gs-mple | iamb | gsmn | chow-liu")
      ->check(CLI::IsMember({"gs-mple", "iamb", "gsmn", "chow-liu"}))
      ->capture_default_str();
  lrn->add_option("--lambda", learn_flags.lambda, "Threshold lambda >= 0")->capture_default_str();
  lrn->add_option("--max-edges", learn_flags.max_edges, "Cap on grown edges");
  add_estimator_options(lrn, learn_est);
  lrn->add_option("--out", out_dir, "Output directory")->capture_default_str();
  lrn->add_flag("--timing", learn_flags.timing, "Also write timing.txt");

  GeneratorFlags sweep_gen;
  SweepFlags sweep_flags;
  EstimatorFlags sweep_est;
  auto* swp = app.add_subcommand("sweep", "ROC sweep over lambda for several learners");
  add_generator_options(swp, sweep_gen);
  add_estimator_options(swp, sweep_est);
  swp->add_option("--seed", sweep_gen.seed, "Base seed; run r uses seed + r")->capture_default_str();
  swp->add_option("--runs", sweep_flags.runs, "Independent runs")->capture_default_str();
  swp->add_option("--lambdas", sweep_flags.lambdas, "Ascending lambda grid")
      ->delimiter(',')
      ->capture_default_str();
  swp->add_option("--learners", sweep_flags.learners, "Learners to compare")
      ->delimiter(',')
      ->check(CLI::IsMember({"gs-mple", "iamb", "gsmn", "chow-liu"}))
      ->capture_default_str();
  swp->add_option("--max-edges", sweep_flags.max_edges, "Cap on grown edges");
  swp->add_option("--jobs", sweep_flags.jobs, "Worker threads")->capture_default_str();
  swp->add_option("--out", out_dir, "Output directory")->capture_default_str();
  swp->add_flag("--timing", sweep_flags.timing, "Record wall_ms in cells.csv");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (gen->parsed()) return cmd_generate(*gen, gen_flags, out_dir, out);
    if (lrn->parsed()) return cmd_learn(*lrn, learn_flags, learn_est, out_dir, out);
    if (swp->parsed()) return cmd_sweep(*swp, sweep_gen, sweep_flags, sweep_est, out_dir, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}

}  // namespace mrfsl::cli
