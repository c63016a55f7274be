#include "mrfsl/learners.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

namespace mrfsl {
namespace {

void check_finite(Nats score, Phase phase, VariableId i, VariableId j, const LearnTrace& trace) {
  if (!std::isfinite(score))
    throw NumericError(fmt::format("non-finite {} score for edge ({}, {}) after {} trace steps",
                                   phase == Phase::Grow ? "grow" : "shrink", i, j, trace.size()));
}

void check_dims(const Dataset& data, const EdgeSet& es) {
  if (es.d() != data.n_vars())
    throw ArgumentError(
        fmt::format("edge set has D = {} but dataset has {} variables", es.d(), data.n_vars()));
}

MiCache make_cache(const Dataset& prepared, const EstimatorConfig& cfg) {
  validate(cfg, prepared);
  return MiCache(prepared, cfg);
}

/// Markov-blanket grow/shrink for one node, thresholding the local CMI.
VarSet blanket_grow(MiCache& cache, VariableId i, double lambda) {
  const std::size_t d = cache.data().n_vars();
  VarSet blanket;
  while (blanket.size() + 1 < d) {
    std::optional<VariableId> best;
    Nats best_score = 0;
    for (VariableId j = 0; j < d; ++j) {
      if (j == i || std::binary_search(blanket.begin(), blanket.end(), j)) continue;
      const Nats s = local_term(cache, i, j, blanket);
      if (!std::isfinite(s))
        throw NumericError(fmt::format("non-finite CMI for node {} candidate {}", i, j));
      if (!best || s > best_score) {
        best = j;
        best_score = s;
      }
    }
    if (!best || best_score <= lambda) break;
    blanket = set_with(blanket, *best);
  }
  return blanket;
}

EdgeSet or_symmetrize(std::size_t d, const std::vector<VarSet>& blankets) {
  EdgeSet es(d);
  for (VariableId i = 0; i < d; ++i)
    for (auto j : blankets[i]) es.insert(i, j);
  return es;
}

}  // namespace

void validate(const LearnerConfig& cfg) {
  if (!std::isfinite(cfg.lambda) || cfg.lambda < 0)
    throw ArgumentError(fmt::format("lambda must be finite and >= 0 (got {})", cfg.lambda));
}

std::string format_trace(const LearnTrace& trace) {
  fmt::memory_buffer buf;
  for (const auto& s : trace)
    fmt::format_to(std::back_inserter(buf), "{} {} {} {} {}\n",
                   s.phase == Phase::Grow ? "grow" : "shrink", s.i, s.j, s.score,
                   s.accepted ? 1 : 0);
  return fmt::to_string(buf);
}

Nats local_term(MiCache& cache, VariableId focal, VariableId other, const VarSet& conditioning) {
  return cache.cmi(other, focal, conditioning);
}

Nats objective_j(const Dataset& data, const EdgeSet& es, const EstimatorConfig& cfg) {
  check_dims(data, es);
  MiCache cache(data, cfg);
  return objective_j(cache, es);
}

Nats objective_j(MiCache& cache, const EdgeSet& es) {
  check_dims(cache.data(), es);
  const Neighborhood nb(es);
  Nats total = 0;
  for (VariableId i = 0; i < es.d(); ++i) {
    const VarSet rest = complement_of_closed(es.d(), nb.open(i), i);
    if (rest.empty()) continue;
    total += cache.group_cmi(rest, VarSet{i}, nb.open(i));
  }
  return total;
}

Nats grow_score(const Dataset& data, const EdgeSet& es, VariableId i, VariableId j,
                const EstimatorConfig& cfg) {
  check_dims(data, es);
  MiCache cache(data, cfg);
  return grow_score(cache, Neighborhood(es), i, j);
}

Nats grow_score(MiCache& cache, const Neighborhood& nb, VariableId i, VariableId j) {
  if (i >= nb.size() || j >= nb.size())
    throw IndexError(fmt::format("pair ({}, {}) out of range", i, j));
  if (i == j || nb.adjacent(i, j))
    throw ArgumentError(fmt::format("grow_score needs a non-adjacent pair, got ({}, {})", i, j));
  const auto a = std::min(i, j), b = std::max(i, j);
  return local_term(cache, a, b, nb.open(a)) + local_term(cache, b, a, nb.open(b));
}

Nats shrink_score(const Dataset& data, const EdgeSet& es, VariableId i, VariableId j,
                  const EstimatorConfig& cfg) {
  check_dims(data, es);
  MiCache cache(data, cfg);
  return shrink_score(cache, Neighborhood(es), i, j);
}

Nats shrink_score(MiCache& cache, const Neighborhood& nb, VariableId i, VariableId j) {
  if (i >= nb.size() || j >= nb.size())
    throw IndexError(fmt::format("pair ({}, {}) out of range", i, j));
  if (i == j || !nb.adjacent(i, j))
    throw ArgumentError(fmt::format("shrink_score needs an adjacent pair, got ({}, {})", i, j));
  const auto a = std::min(i, j), b = std::max(i, j);
  return local_term(cache, a, b, set_without(nb.open(a), b)) +
         local_term(cache, b, a, set_without(nb.open(b), a));
}

GsMpleResult gs_mple(const Dataset& data, const LearnerConfig& cfg) {
  validate(cfg);
  const Dataset prepared = prepare_dataset(data, cfg.estimator);
  MiCache cache = make_cache(prepared, cfg.estimator);
  return gs_mple(cache, cfg);
}

GsMpleResult gs_mple(MiCache& cache, const LearnerConfig& cfg) {
  validate(cfg);
  const std::size_t d = cache.data().n_vars();
  const std::size_t cap = cfg.max_edges.value_or(EdgeSet::max_edges(d));
  GsMpleResult out{EdgeSet(d), {}};
  auto& es = out.edges;
  auto& trace = out.trace;

  while (es.size() < cap) {
    const Neighborhood nb(es);
    std::optional<EdgeSet::Edge> best;
    Nats best_score = 0;
    for (VariableId i = 0; i < d; ++i)
      for (VariableId j = i + 1; j < d; ++j) {
        if (nb.adjacent(i, j)) continue;
        const Nats s = grow_score(cache, nb, i, j);
        check_finite(s, Phase::Grow, i, j, trace);
        if (!best || s > best_score) {
          best = {i, j};
          best_score = s;
        }
      }
    if (!best) break;
    const bool accept = best_score > cfg.lambda;
    trace.push_back({Phase::Grow, best->first, best->second, best_score, accept});
    if (!accept) break;
    es.insert(best->first, best->second);
  }

  while (!es.empty()) {
    const Neighborhood nb(es);
    std::optional<EdgeSet::Edge> best;
    Nats best_score = 0;
    for (auto [i, j] : es.edges()) {
      const Nats s = shrink_score(cache, nb, i, j);
      check_finite(s, Phase::Shrink, i, j, trace);
      if (!best || s < best_score) {
        best = {i, j};
        best_score = s;
      }
    }
    const bool accept = best_score <= cfg.lambda;
    trace.push_back({Phase::Shrink, best->first, best->second, best_score, accept});
    if (!accept) break;
    es.erase(best->first, best->second);
  }
  return out;
}

EdgeSet iamb(const Dataset& data, const LearnerConfig& cfg) {
  validate(cfg);
  const Dataset prepared = prepare_dataset(data, cfg.estimator);
  MiCache cache = make_cache(prepared, cfg.estimator);
  return iamb(cache, cfg);
}

std::vector<VarSet> markov_blankets(MiCache& cache, const LearnerConfig& cfg) {
  validate(cfg);
  const std::size_t d = cache.data().n_vars();
  std::vector<VarSet> blankets(d);
  for (VariableId i = 0; i < d; ++i) {
    VarSet blanket = blanket_grow(cache, i, cfg.lambda);
    const VarSet grown = blanket;
    for (auto j : grown) {
      const Nats s = local_term(cache, i, j, set_without(blanket, j));
      if (!std::isfinite(s))
        throw NumericError(fmt::format("non-finite CMI for node {} member {}", i, j));
      if (s <= cfg.lambda) blanket = set_without(blanket, j);
    }
    blankets[i] = std::move(blanket);
  }
  return blankets;
}

EdgeSet iamb(MiCache& cache, const LearnerConfig& cfg) {
  return or_symmetrize(cache.data().n_vars(), markov_blankets(cache, cfg));
}

EdgeSet gsmn(const Dataset& data, const LearnerConfig& cfg) {
  validate(cfg);
  const Dataset prepared = prepare_dataset(data, cfg.estimator);
  MiCache cache = make_cache(prepared, cfg.estimator);
  return gsmn(cache, cfg);
}

EdgeSet gsmn(MiCache& cache, const LearnerConfig& cfg) {
  validate(cfg);
  const std::size_t d = cache.data().n_vars();
  std::vector<VarSet> blankets(d);
  for (VariableId i = 0; i < d; ++i) blankets[i] = blanket_grow(cache, i, cfg.lambda);
  return gsmn_shrink(cache, or_symmetrize(d, blankets), cfg.lambda);
}

EdgeSet gsmn_shrink(MiCache& cache, EdgeSet es, double lambda) {
  // Passes in canonical edge order until no edge is removed.
  for (bool changed = true; changed;) {
    changed = false;
    const auto snapshot = es.edges();
    for (auto [i, j] : snapshot) {
      const Neighborhood nb(es);
      const Nats ti = local_term(cache, i, j, set_without(nb.open(i), j));
      const Nats tj = local_term(cache, j, i, set_without(nb.open(j), i));
      if (!std::isfinite(ti) || !std::isfinite(tj))
        throw NumericError(fmt::format("non-finite CMI for edge ({}, {})", i, j));
      if (std::min(ti, tj) <= lambda) {
        es.erase(i, j);
        changed = true;
      }
    }
  }
  return es;
}

EdgeSet chow_liu(const Dataset& data, const EstimatorConfig& cfg) {
  const Dataset prepared = prepare_dataset(data, cfg);
  MiCache cache = make_cache(prepared, cfg);
  return chow_liu(cache);
}

EdgeSet chow_liu(MiCache& cache) {
  const std::size_t d = cache.data().n_vars();
  if (d < 2) throw ArgumentError("chow_liu needs at least two variables");

  struct Weighted {
    Nats w;
    VariableId i, j;
  };
  std::vector<Weighted> candidates;
  for (VariableId i = 0; i < d; ++i)
    for (VariableId j = i + 1; j < d; ++j) {
      const Nats w = cache.mi(VarSet{i}, VarSet{j});
      if (!std::isfinite(w)) throw NumericError(fmt::format("non-finite MI for ({}, {})", i, j));
      candidates.push_back({w, i, j});
    }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Weighted& a, const Weighted& b) { return a.w > b.w; });

  std::vector<VariableId> parent(d);
  std::iota(parent.begin(), parent.end(), VariableId{0});
  auto find = [&](VariableId v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };

  EdgeSet tree(d);
  for (const auto& c : candidates) {
    const auto ri = find(c.i), rj = find(c.j);
    if (ri == rj) continue;
    parent[ri] = rj;
    tree.insert(c.i, c.j);
    if (tree.size() + 1 == d) break;
  }
  return tree;
}

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::GsMple:
      return "gs-mple";
    case Algorithm::Iamb:
      return "iamb";
    case Algorithm::Gsmn:
      return "gsmn";
    case Algorithm::ChowLiu:
      return "chow-liu";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view name) {
  for (auto a : {Algorithm::GsMple, Algorithm::Iamb, Algorithm::Gsmn, Algorithm::ChowLiu})
    if (to_string(a) == name) return a;
  throw ArgumentError(fmt::format("unknown learner '{}'", name));
}

EdgeSet learn(Algorithm algo, MiCache& cache, const LearnerConfig& cfg) {
  switch (algo) {
    case Algorithm::GsMple:
      return gs_mple(cache, cfg).edges;
    case Algorithm::Iamb:
      return iamb(cache, cfg);
    case Algorithm::Gsmn:
      return gsmn(cache, cfg);
    case Algorithm::ChowLiu:
      return chow_liu(cache);
  }
  throw ArgumentError("unknown learner");
}

}  // namespace mrfsl
