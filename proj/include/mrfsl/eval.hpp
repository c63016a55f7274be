#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mrfsl/core.hpp"
#include "mrfsl/estimators.hpp"
#include "mrfsl/learners.hpp"
#include "mrfsl/synthgen.hpp"

namespace mrfsl {

struct RecoveryMetrics {
  double tpr = 0;
  double fpr = 0;
  std::size_t n_true_edges = 0;
  std::size_t n_predicted = 0;
};

/// TPR = |P & T| / |T|, FPR = |P \ T| / (D(D-1)/2 - |T|). With an empty truth
/// TPR is 1 if the prediction is also empty and 0 otherwise; with a complete
/// truth FPR is 0.
RecoveryMetrics recovery(const EdgeSet& predicted, const EdgeSet& truth);

/// Trapezoid area under (fpr, tpr) points after adding the (0,0) and (1,1)
/// anchors and sorting by fpr (then tpr).
double roc_auc(std::vector<std::pair<double, double>> fpr_tpr);

/// A learner as seen by the sweep: gets the generated sample (including its
/// ground truth), a cache over the prepared dataset, and the per-cell config.
struct SweepLearner {
  std::string name;
  std::function<EdgeSet(const Generated&, MiCache&, const LearnerConfig&)> run;
};

SweepLearner standard_learner(Algorithm algo);

struct SweepConfig {
  GeneratorSpec generator;
  std::vector<SweepLearner> learners;
  std::vector<double> lambda_grid;
  std::size_t n_runs = 1;
  std::uint64_t base_seed = 0;
  EstimatorConfig estimator;
  std::optional<std::size_t> max_edges;
  unsigned jobs = 1;
};

struct SweepCell {
  std::string learner;
  double lambda = 0;
  std::uint64_t seed = 0;
  std::optional<RecoveryMetrics> metrics;  // empty when the cell failed
  std::string error;
  double wall_ms = 0;
};

struct CurvePoint {
  std::string learner;
  double lambda = 0;
  double mean_tpr = 0;
  double mean_fpr = 0;
  std::size_t n_runs = 0;  // successful runs averaged
};

/// Run seed for which |E| grew while lambda increased.
struct SparsityViolation {
  std::string learner;
  std::uint64_t seed;
  double lambda_lo, lambda_hi;
  std::size_t edges_lo, edges_hi;
};

struct SweepResult {
  std::vector<SweepCell> cells;    // ordered by (learner, lambda, run)
  std::vector<CurvePoint> curves;  // ordered by (learner, lambda)
  std::map<std::string, double> auc;
  std::vector<SparsityViolation> sparsity_violations;
  std::size_t failed_cells = 0;

  double failure_fraction() const {
    return cells.empty() ? 0.0 : static_cast<double>(failed_cells) / static_cast<double>(cells.size());
  }
};

struct SweepError : std::runtime_error {
  SweepError(const std::string& what, SweepResult partial)
      : std::runtime_error(what), result(std::move(partial)) {}
  SweepResult result;
};

inline constexpr double kMaxFailedCellFraction = 0.05;

/// For run r = 0..n_runs-1, generates a dataset with seed base_seed + r and runs
/// every learner at every lambda. Runs are distributed over `jobs` threads;
/// the result does not depend on the thread count. Throws SweepError (with
/// the assembled result) when more than 5% of cells fail.
SweepResult roc_sweep(const SweepConfig& cfg);

std::string cells_csv(const SweepResult& r, bool include_timing);
std::string curves_csv(const SweepResult& r);
nlohmann::json summary_json(const SweepResult& r);

nlohmann::json to_json(const GeneratorSpec& spec);
nlohmann::json to_json(const EstimatorConfig& cfg);
nlohmann::json to_json(const SweepConfig& cfg);

}  // namespace mrfsl
