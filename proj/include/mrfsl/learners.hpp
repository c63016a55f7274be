#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mrfsl/core.hpp"
#include "mrfsl/estimators.hpp"

namespace mrfsl {

struct LearnerConfig {
  double lambda = 0.0;
  EstimatorConfig estimator;
  /// Caps the number of edges added during the grow phase; unset = D(D-1)/2.
  std::optional<std::size_t> max_edges;
};

void validate(const LearnerConfig& cfg);

enum class Phase { Grow, Shrink };

struct TraceStep {
  Phase phase;
  VariableId i;
  VariableId j;
  Nats score;
  bool accepted;
};

using LearnTrace = std::vector<TraceStep>;

/// One line per step: `phase edge_i edge_j score accepted`.
std::string format_trace(const LearnTrace& trace);

// Local term of node `focal` when `other` joins (or leaves) its neighborhood
// `conditioning`: I(X_focal; X_other | X_conditioning), estimated as
// I({other} u conditioning; {focal}) - I({focal}; conditioning). With this
// orientation the local terms telescope against objective_j.
Nats local_term(MiCache& cache, VariableId focal, VariableId other, const VarSet& conditioning);

/// Variable part of the negative expected log pseudolikelihood of an edge set:
/// sum over i of I(X_i; X_{V \ N[i]} | X_{N(i)}). Terms with an empty
/// complement contribute 0.
Nats objective_j(const Dataset& data, const EdgeSet& es, const EstimatorConfig& cfg);
Nats objective_j(MiCache& cache, const EdgeSet& es);

/// I(i; j | N(i)) + I(i; j | N(j)) for a non-adjacent pair.
Nats grow_score(const Dataset& data, const EdgeSet& es, VariableId i, VariableId j,
                const EstimatorConfig& cfg);
Nats grow_score(MiCache& cache, const Neighborhood& nb, VariableId i, VariableId j);

/// I(i; j | N(i) \ {j}) + I(i; j | N(j) \ {i}) for an adjacent pair.
Nats shrink_score(const Dataset& data, const EdgeSet& es, VariableId i, VariableId j,
                  const EstimatorConfig& cfg);
Nats shrink_score(MiCache& cache, const Neighborhood& nb, VariableId i, VariableId j);

struct GsMpleResult {
  EdgeSet edges;
  LearnTrace trace;
};

/// Grow-shrink maximum pseudolikelihood structure search over edge sets.
///
/// Grow: from the empty graph, add the non-adjacent pair with the largest
/// grow_score until that maximum is <= lambda. Shrink: remove the adjacent
/// pair with the smallest shrink_score while that minimum is <= lambda.
/// Ties go to the lexicographically smallest (i, j).
GsMpleResult gs_mple(const Dataset& data, const LearnerConfig& cfg);
/// Uses an existing cache; the cached dataset must already be prepared.
GsMpleResult gs_mple(MiCache& cache, const LearnerConfig& cfg);

/// Per-node Markov-blanket grow/shrink with a CMI threshold. Grow adds the
/// candidate with the largest local term while it exceeds lambda; shrink then
/// drops members (in index order) whose local term given the rest is <= lambda.
std::vector<VarSet> markov_blankets(MiCache& cache, const LearnerConfig& cfg);

/// OR-symmetrized Markov blankets: {i, j} is an edge iff j is in i's blanket
/// or i is in j's.
EdgeSet iamb(const Dataset& data, const LearnerConfig& cfg);
EdgeSet iamb(MiCache& cache, const LearnerConfig& cfg);

/// Same per-node grow as iamb; the shrink drops an edge as soon as either
/// endpoint's CMI is <= lambda.
EdgeSet gsmn(const Dataset& data, const LearnerConfig& cfg);
EdgeSet gsmn(MiCache& cache, const LearnerConfig& cfg);
/// The min-rule shrink on its own, starting from `es`.
EdgeSet gsmn_shrink(MiCache& cache, EdgeSet es, double lambda);

/// Maximum-weight spanning tree with pairwise MI weights (skeleton only).
EdgeSet chow_liu(const Dataset& data, const EstimatorConfig& cfg);
EdgeSet chow_liu(MiCache& cache);

enum class Algorithm { GsMple, Iamb, Gsmn, ChowLiu };

std::string_view to_string(Algorithm a);
Algorithm parse_algorithm(std::string_view name);

/// Dispatches to one of the learners above.
EdgeSet learn(Algorithm algo, MiCache& cache, const LearnerConfig& cfg);

}  // namespace mrfsl
