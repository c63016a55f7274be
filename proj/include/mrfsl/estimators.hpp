#pragma once

#include <map>
#include <stdexcept>
#include <utility>

#include "mrfsl/core.hpp"

namespace mrfsl {

/// Information quantity in nats. k-NN estimates may be negative.
using Nats = double;

struct EstimatorMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

enum class EstimatorMethod { PlugIn, KnnMixed };

struct EstimatorConfig {
  EstimatorMethod method = EstimatorMethod::KnnMixed;
  int k = 3;
  /// Rank-transform continuous columns before estimation (see prepare_dataset).
  bool rank_transform = false;
};

void validate(const EstimatorConfig& cfg, const Dataset& data);

/// Applies the preprocessing requested by `cfg` (currently the optional rank
/// transform). Learners call this once on entry.
Dataset prepare_dataset(const Dataset& data, const EstimatorConfig& cfg);

/// Empirical (plug-in) joint entropy of a group of discrete columns.
Nats entropy_plugin(const Dataset& data, const VarSet& vars);

/// Empirical MI over the joint contingency table. Exactly 0 when the
/// empirical joint factorizes; never negative.
Nats mi_plugin(const Dataset& data, const VarSet& xs, const VarSet& ys);

/// k-NN MI estimator for discrete-continuous mixtures. Distances use the
/// max-norm with |a - b| on continuous coordinates and the 0/1 metric on
/// discrete ones. Points whose k-th neighbor sits at distance 0 use the count
/// of zero-distance duplicates in place of k. Brute force, O(N^2).
Nats mi_knn_mixed(const Dataset& data, const VarSet& xs, const VarSet& ys, int k);

Nats mutual_information(const Dataset& data, const VarSet& xs, const VarSet& ys,
                        const EstimatorConfig& cfg);

/// I(x; y | zs) = I({x} u zs; {y}) - I({y}; zs); the second term is 0 when zs
/// is empty.
Nats cmi(const Dataset& data, VariableId x, VariableId y, const VarSet& zs,
         const EstimatorConfig& cfg);

/// Group version: I(xs; ys | zs) = I(xs u zs; ys) - I(ys; zs).
Nats group_cmi(const Dataset& data, const VarSet& xs, const VarSet& ys, const VarSet& zs,
               const EstimatorConfig& cfg);

/// Memoizes mutual_information over (xs, ys) for one dataset and config.
/// Not thread-safe; give each worker its own cache.
class MiCache {
 public:
  MiCache(const Dataset& data, EstimatorConfig cfg) : data_(data), cfg_(cfg) {}

  Nats mi(const VarSet& xs, const VarSet& ys);
  Nats cmi(VariableId x, VariableId y, const VarSet& zs);
  Nats group_cmi(const VarSet& xs, const VarSet& ys, const VarSet& zs);

  const Dataset& data() const { return data_; }
  const EstimatorConfig& config() const { return cfg_; }
  std::size_t evaluations() const { return evaluations_; }

 private:
  const Dataset& data_;
  EstimatorConfig cfg_;
  std::map<std::pair<VarSet, VarSet>, Nats> memo_;
  std::size_t evaluations_ = 0;
};

}  // namespace mrfsl
