#include "mrfsl/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/core.h>

namespace mrfsl {

Dataset::Dataset(Eigen::MatrixXd values, std::vector<ColumnInfo> columns)
    : values_(std::move(values)), columns_(std::move(columns)) {
  if (values_.rows() < 1 || values_.cols() < 1)
    throw ValidationError("dataset needs N >= 1 and D >= 1");
  if (static_cast<std::size_t>(values_.cols()) != columns_.size())
    throw ValidationError(fmt::format("dataset has {} columns but {} column descriptors",
                                      values_.cols(), columns_.size()));
  for (std::size_t v = 0; v < columns_.size(); ++v) {
    const auto& c = columns_[v];
    const auto col = values_.col(static_cast<Eigen::Index>(v));
    if (c.kind == ColumnKind::Discrete) {
      if (c.cardinality < 1)
        throw ValidationError(fmt::format("column {} has cardinality {}", v, c.cardinality));
      for (Eigen::Index r = 0; r < col.size(); ++r) {
        const double x = col(r);
        if (!(x >= 0) || x != std::floor(x) || x >= c.cardinality)
          throw ValidationError(fmt::format("column {} row {}: {} is not a code in [0, {})", v,
                                            r, x, c.cardinality));
      }
    } else {
      for (Eigen::Index r = 0; r < col.size(); ++r)
        if (!std::isfinite(col(r)))
          throw ValidationError(fmt::format("column {} row {}: non-finite value", v, r));
    }
  }
}

const ColumnInfo& Dataset::column(VariableId v) const {
  if (v >= columns_.size())
    throw IndexError(fmt::format("variable {} out of range [0, {})", v, columns_.size()));
  return columns_[v];
}

Dataset rank_transform(const Dataset& data) {
  Eigen::MatrixXd out = data.values();
  const auto n = static_cast<Eigen::Index>(data.n_samples());
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (VariableId v = 0; v < data.n_vars(); ++v) {
    if (data.is_discrete(v)) continue;
    const auto col = data.values().col(static_cast<Eigen::Index>(v));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return col(a) < col(b); });
    for (Eigen::Index lo = 0; lo < n;) {
      Eigen::Index hi = lo;
      while (hi + 1 < n && col(order[hi + 1]) == col(order[lo])) ++hi;
      const double rank = 0.5 * static_cast<double>(lo + hi) + 1.0;
      for (Eigen::Index k = lo; k <= hi; ++k) out(order[k], static_cast<Eigen::Index>(v)) = rank;
      lo = hi + 1;
    }
  }
  return Dataset(std::move(out), data.columns());
}

EdgeSet::EdgeSet(std::size_t d, std::initializer_list<Edge> edges) : d_(d) {
  for (auto [i, j] : edges) insert(i, j);
}

EdgeSet::Edge EdgeSet::canonical(VariableId i, VariableId j) const {
  if (i >= d_ || j >= d_)
    throw IndexError(fmt::format("edge ({}, {}) out of range for D = {}", i, j, d_));
  if (i == j) throw SelfLoopError(fmt::format("self-loop at node {}", i));
  return {std::min(i, j), std::max(i, j)};
}

bool EdgeSet::contains(VariableId i, VariableId j) const {
  if (i == j) return false;
  return edges_.count(canonical(i, j)) > 0;
}

void EdgeSet::insert(VariableId i, VariableId j) { edges_.insert(canonical(i, j)); }

void EdgeSet::erase(VariableId i, VariableId j) {
  if (i >= d_ || j >= d_)
    throw IndexError(fmt::format("edge ({}, {}) out of range for D = {}", i, j, d_));
  if (i == j) return;
  edges_.erase({std::min(i, j), std::max(i, j)});
}

EdgeSet add_edge(const EdgeSet& es, VariableId i, VariableId j) {
  EdgeSet out = es;
  out.insert(i, j);
  return out;
}

EdgeSet remove_edge(const EdgeSet& es, VariableId i, VariableId j) {
  EdgeSet out = es;
  out.erase(i, j);
  return out;
}

VarSet neighborhood(const EdgeSet& es, VariableId i) {
  if (i >= es.d()) throw IndexError(fmt::format("node {} out of range for D = {}", i, es.d()));
  VarSet out;
  for (auto [a, b] : es.edges()) {
    if (a == i) out.push_back(b);
    if (b == i) out.push_back(a);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Neighborhood::Neighborhood(const EdgeSet& es) : open_(es.d()) {
  for (auto [a, b] : es.edges()) {
    open_[a].push_back(b);
    open_[b].push_back(a);
  }
  for (auto& n : open_) std::sort(n.begin(), n.end());
}

VarSet Neighborhood::closed(VariableId i) const { return set_with(open(i), i); }

bool Neighborhood::adjacent(VariableId i, VariableId j) const {
  const auto& n = open(i);
  return std::binary_search(n.begin(), n.end(), j);
}

VarSet set_without(const VarSet& s, VariableId v) {
  VarSet out;
  out.reserve(s.size());
  for (auto x : s)
    if (x != v) out.push_back(x);
  return out;
}

VarSet set_with(const VarSet& s, VariableId v) {
  VarSet out = s;
  auto it = std::lower_bound(out.begin(), out.end(), v);
  if (it == out.end() || *it != v) out.insert(it, v);
  return out;
}

VarSet complement_of_closed(std::size_t d, const VarSet& open, VariableId i) {
  VarSet out;
  for (VariableId v = 0; v < d; ++v)
    if (v != i && !std::binary_search(open.begin(), open.end(), v)) out.push_back(v);
  return out;
}

}  // namespace mrfsl
