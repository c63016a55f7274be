#include "mrfsl/eval.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <thread>

#include <fmt/format.h>

namespace mrfsl {

RecoveryMetrics recovery(const EdgeSet& predicted, const EdgeSet& truth) {
  if (predicted.d() != truth.d())
    throw ArgumentError(fmt::format("predicted D = {} but truth D = {}", predicted.d(), truth.d()));
  std::size_t hits = 0;
  for (auto [i, j] : predicted.edges())
    if (truth.contains(i, j)) ++hits;
  const std::size_t false_pos = predicted.size() - hits;
  const std::size_t negatives = EdgeSet::max_edges(truth.d()) - truth.size();

  RecoveryMetrics m;
  m.n_true_edges = truth.size();
  m.n_predicted = predicted.size();
  if (truth.empty())
    m.tpr = predicted.empty() ? 1.0 : 0.0;
  else
    m.tpr = static_cast<double>(hits) / static_cast<double>(truth.size());
  m.fpr = negatives == 0 ? 0.0 : static_cast<double>(false_pos) / static_cast<double>(negatives);
  return m;
}

double roc_auc(std::vector<std::pair<double, double>> fpr_tpr) {
  fpr_tpr.emplace_back(0.0, 0.0);
  fpr_tpr.emplace_back(1.0, 1.0);
  std::sort(fpr_tpr.begin(), fpr_tpr.end());
  double area = 0;
  for (std::size_t k = 1; k < fpr_tpr.size(); ++k) {
    const auto [x0, y0] = fpr_tpr[k - 1];
    const auto [x1, y1] = fpr_tpr[k];
    area += 0.5 * (x1 - x0) * (y0 + y1);
  }
  return area;
}

SweepLearner standard_learner(Algorithm algo) {
  return {std::string(to_string(algo)),
          [algo](const Generated&, MiCache& cache, const LearnerConfig& cfg) {
            return learn(algo, cache, cfg);
          }};
}

SweepResult roc_sweep(const SweepConfig& cfg) {
  if (cfg.lambda_grid.empty()) throw ArgumentError("lambda grid is empty");
  if (!std::is_sorted(cfg.lambda_grid.begin(), cfg.lambda_grid.end()))
    throw ArgumentError("lambda grid must be sorted ascending");
  if (cfg.n_runs < 1) throw ArgumentError("n_runs must be >= 1");
  if (cfg.learners.empty()) throw ArgumentError("no learners given");
  validate(cfg.generator);
  for (double l : cfg.lambda_grid) validate(LearnerConfig{l, cfg.estimator, cfg.max_edges});

  const std::size_t n_learners = cfg.learners.size();
  const std::size_t n_lambdas = cfg.lambda_grid.size();
  auto index = [&](std::size_t l, std::size_t g, std::size_t r) {
    return (l * n_lambdas + g) * cfg.n_runs + r;
  };
  std::vector<SweepCell> cells(n_learners * n_lambdas * cfg.n_runs);

  auto run_one = [&](std::size_t r) {
    GeneratorSpec spec = cfg.generator;
    spec.seed = cfg.base_seed + r;
    std::optional<Generated> sample;
    std::optional<Dataset> prepared;
    std::string gen_error;
    try {
      sample = generate(spec);
      prepared = prepare_dataset(sample->first, cfg.estimator);
      validate(cfg.estimator, *prepared);
    } catch (const std::exception& e) {
      gen_error = fmt::format("generation failed: {}", e.what());
    }
    std::optional<MiCache> cache;
    if (gen_error.empty()) cache.emplace(*prepared, cfg.estimator);

    for (std::size_t l = 0; l < n_learners; ++l)
      for (std::size_t g = 0; g < n_lambdas; ++g) {
        SweepCell& cell = cells[index(l, g, r)];
        cell.learner = cfg.learners[l].name;
        cell.lambda = cfg.lambda_grid[g];
        cell.seed = spec.seed;
        if (!gen_error.empty()) {
          cell.error = gen_error;
          continue;
        }
        const auto start = std::chrono::steady_clock::now();
        try {
          const LearnerConfig lc{cell.lambda, cfg.estimator, cfg.max_edges};
          const EdgeSet predicted = cfg.learners[l].run(*sample, *cache, lc);
          cell.metrics = recovery(predicted, sample->second.edge_set);
        } catch (const std::exception& e) {
          cell.error = e.what();
        }
        cell.wall_ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - start)
                           .count();
      }
  };

  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(std::max(1u, cfg.jobs), cfg.n_runs));
  if (workers == 1) {
    for (std::size_t r = 0; r < cfg.n_runs; ++r) run_one(r);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t r = next++; r < cfg.n_runs; r = next++) run_one(r);
      });
    for (auto& t : pool) t.join();
  }

  SweepResult out;
  out.cells = std::move(cells);
  for (std::size_t l = 0; l < n_learners; ++l) {
    std::vector<std::pair<double, double>> points;
    for (std::size_t g = 0; g < n_lambdas; ++g) {
      CurvePoint p{cfg.learners[l].name, cfg.lambda_grid[g], 0, 0, 0};
      for (std::size_t r = 0; r < cfg.n_runs; ++r) {
        const auto& cell = out.cells[index(l, g, r)];
        if (!cell.metrics) {
          ++out.failed_cells;
          continue;
        }
        p.mean_tpr += cell.metrics->tpr;
        p.mean_fpr += cell.metrics->fpr;
        ++p.n_runs;
      }
      if (p.n_runs > 0) {
        p.mean_tpr /= static_cast<double>(p.n_runs);
        p.mean_fpr /= static_cast<double>(p.n_runs);
        points.emplace_back(p.mean_fpr, p.mean_tpr);
      }
      out.curves.push_back(p);
    }
    out.auc[cfg.learners[l].name] = roc_auc(points);

    for (std::size_t r = 0; r < cfg.n_runs; ++r)
      for (std::size_t g = 1; g < n_lambdas; ++g) {
        const auto& lo = out.cells[index(l, g - 1, r)];
        const auto& hi = out.cells[index(l, g, r)];
        if (lo.metrics && hi.metrics && hi.metrics->n_predicted > lo.metrics->n_predicted)
          out.sparsity_violations.push_back({lo.learner, lo.seed, lo.lambda, hi.lambda,
                                             lo.metrics->n_predicted, hi.metrics->n_predicted});
      }
  }

  if (out.failure_fraction() > kMaxFailedCellFraction)
    throw SweepError(fmt::format("{} of {} sweep cells failed", out.failed_cells, out.cells.size()),
                     std::move(out));
  return out;
}

std::string cells_csv(const SweepResult& r, bool include_timing) {
  fmt::memory_buffer buf;
  fmt::format_to(std::back_inserter(buf), "learner,lambda,seed,tpr,fpr,n_predicted,wall_ms\n");
  for (const auto& c : r.cells) {
    const std::string ms = include_timing ? fmt::format("{:.3f}", c.wall_ms) : "NA";
    if (c.metrics)
      fmt::format_to(std::back_inserter(buf), "{},{},{},{},{},{},{}\n", c.learner, c.lambda,
                     c.seed, c.metrics->tpr, c.metrics->fpr, c.metrics->n_predicted, ms);
    else
      fmt::format_to(std::back_inserter(buf), "{},{},{},NA,NA,NA,{}\n", c.learner, c.lambda,
                     c.seed, ms);
  }
  return fmt::to_string(buf);
}

std::string curves_csv(const SweepResult& r) {
  fmt::memory_buffer buf;
  fmt::format_to(std::back_inserter(buf), "learner,lambda,mean_tpr,mean_fpr\n");
  for (const auto& p : r.curves) {
    if (p.n_runs == 0)
      fmt::format_to(std::back_inserter(buf), "{},{},NA,NA\n", p.learner, p.lambda);
    else
      fmt::format_to(std::back_inserter(buf), "{},{},{},{}\n", p.learner, p.lambda, p.mean_tpr,
                     p.mean_fpr);
  }
  return fmt::to_string(buf);
}

nlohmann::json summary_json(const SweepResult& r) {
  nlohmann::json j;
  j["auc"] = r.auc;
  j["failed_cells"] = r.failed_cells;
  j["total_cells"] = r.cells.size();
  j["tpr_convention"] = "tpr = 1 when truth and prediction are both empty, 0 when only truth is empty";
  j["auc_method"] = "trapezoid over mean (fpr, tpr) sorted by fpr with (0,0) and (1,1) anchors";
  auto& v = j["sparsity_violations"] = nlohmann::json::array();
  for (const auto& s : r.sparsity_violations)
    v.push_back({{"learner", s.learner},
                 {"seed", s.seed},
                 {"lambda_lo", s.lambda_lo},
                 {"lambda_hi", s.lambda_hi},
                 {"edges_lo", s.edges_lo},
                 {"edges_hi", s.edges_hi}});
  return j;
}

namespace {
nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
  auto rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    auto row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}
}  // namespace

nlohmann::json to_json(const GeneratorSpec& spec) {
  nlohmann::json j;
  j["kind"] = std::string(to_string(spec.kind));
  j["n_samples"] = spec.n_samples;
  j["seed"] = spec.seed;
  switch (spec.kind) {
    case GeneratorKind::Ising3x3:
      j["beta"] = spec.ising.beta;
      j["burnin"] = spec.ising.burnin;
      j["thin"] = spec.ising.thin;
      break;
    case GeneratorKind::HmmDiscrete: {
      const auto& p = spec.hmm_discrete;
      j["t_steps"] = p.t_steps;
      j["init1"] = {p.init1(0), p.init1(1)};
      j["init2"] = {p.init2(0), p.init2(1)};
      j["trans1"] = matrix_json(p.trans1);
      j["trans2"] = matrix_json(p.trans2);
      j["obs_p1"] = matrix_json(p.obs_p1);
      break;
    }
    case GeneratorKind::Gaussian: {
      const auto& p = spec.gaussian;
      j["d"] = p.d;
      j["edge_prob"] = p.edge_prob;
      j["min_eig"] = p.min_eig;
      j["weight_lo"] = p.weight_lo;
      j["weight_hi"] = p.weight_hi;
      break;
    }
    case GeneratorKind::HmmContinuous: {
      const auto& p = spec.hmm_continuous;
      j["t_steps"] = p.t_steps;
      j["a1"] = p.a1;
      j["a2"] = p.a2;
      j["noise_sd1"] = p.noise_sd1;
      j["noise_sd2"] = p.noise_sd2;
      j["init_sd1"] = p.init_sd1;
      j["init_sd2"] = p.init_sd2;
      j["sd_gain"] = p.sd_gain;
      break;
    }
  }
  return j;
}

nlohmann::json to_json(const EstimatorConfig& cfg) {
  return {{"method", cfg.method == EstimatorMethod::PlugIn ? "plugin" : "knn"},
          {"k", cfg.k},
          {"rank_transform", cfg.rank_transform}};
}

nlohmann::json to_json(const SweepConfig& cfg) {
  nlohmann::json j;
  j["generator"] = to_json(cfg.generator);
  j["generator"].erase("seed");
  auto names = nlohmann::json::array();
  for (const auto& l : cfg.learners) names.push_back(l.name);
  j["learners"] = names;
  j["lambda_grid"] = cfg.lambda_grid;
  j["n_runs"] = cfg.n_runs;
  j["base_seed"] = cfg.base_seed;
  j["estimator"] = to_json(cfg.estimator);
  j["max_edges"] = cfg.max_edges ? nlohmann::json(*cfg.max_edges) : nlohmann::json(nullptr);
  return j;
}

}  // namespace mrfsl
