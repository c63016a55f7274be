#pragma once

#include <cstddef>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace mrfsl {

using VariableId = std::size_t;
/// Sorted, duplicate-free list of variable indices.
using VarSet = std::vector<VariableId>;

struct IndexError : std::out_of_range {
  using std::out_of_range::out_of_range;
};
struct SelfLoopError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct ArgumentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ColumnKind { Discrete, Continuous };

struct ColumnInfo {
  std::string name;
  ColumnKind kind = ColumnKind::Continuous;
  int cardinality = 0;  // discrete only
};

/// N samples x D variables. Discrete columns hold integer codes in
/// [0, cardinality) stored as doubles; continuous columns hold finite reals.
class Dataset {
 public:
  Dataset() = default;
  /// Validates every invariant; throws ValidationError on violation.
  Dataset(Eigen::MatrixXd values, std::vector<ColumnInfo> columns);

  std::size_t n_samples() const { return static_cast<std::size_t>(values_.rows()); }
  std::size_t n_vars() const { return static_cast<std::size_t>(values_.cols()); }
  const Eigen::MatrixXd& values() const { return values_; }
  const ColumnInfo& column(VariableId v) const;
  const std::vector<ColumnInfo>& columns() const { return columns_; }
  bool is_discrete(VariableId v) const { return column(v).kind == ColumnKind::Discrete; }

  /// Integer code of a discrete cell.
  int code(std::size_t row, VariableId v) const { return static_cast<int>(values_(row, v)); }

 private:
  Eigen::MatrixXd values_;
  std::vector<ColumnInfo> columns_;
};

/// Replaces every continuous column by its 1-based ranks (ties get the
/// average rank). Discrete columns pass through unchanged.
Dataset rank_transform(const Dataset& data);

/// Undirected simple graph over {0, ..., d-1}; edges stored as (i, j), i < j.
class EdgeSet {
 public:
  using Edge = std::pair<VariableId, VariableId>;

  EdgeSet() = default;
  explicit EdgeSet(std::size_t d) : d_(d) {}
  EdgeSet(std::size_t d, std::initializer_list<Edge> edges);

  std::size_t d() const { return d_; }
  std::size_t size() const { return edges_.size(); }
  bool empty() const { return edges_.empty(); }
  bool contains(VariableId i, VariableId j) const;
  const std::set<Edge>& edges() const { return edges_; }

  /// In-place mutation for builders; the free functions below return copies.
  void insert(VariableId i, VariableId j);
  void erase(VariableId i, VariableId j);

  static std::size_t max_edges(std::size_t d) { return d * (d - 1) / 2; }

  friend bool operator==(const EdgeSet&, const EdgeSet&) = default;

 private:
  Edge canonical(VariableId i, VariableId j) const;

  std::size_t d_ = 0;
  std::set<Edge> edges_;
};

EdgeSet add_edge(const EdgeSet& es, VariableId i, VariableId j);
EdgeSet remove_edge(const EdgeSet& es, VariableId i, VariableId j);

/// Open neighborhood N(i).
VarSet neighborhood(const EdgeSet& es, VariableId i);

/// N(i) and N[i] for every node, computed once from an EdgeSet.
class Neighborhood {
 public:
  explicit Neighborhood(const EdgeSet& es);

  const VarSet& open(VariableId i) const { return open_.at(i); }
  VarSet closed(VariableId i) const;
  bool adjacent(VariableId i, VariableId j) const;
  std::size_t size() const { return open_.size(); }

 private:
  std::vector<VarSet> open_;
};

struct GroundTruth {
  EdgeSet edge_set;
  std::string label;
};

/// Set helpers over sorted VarSets.
VarSet set_without(const VarSet& s, VariableId v);
VarSet set_with(const VarSet& s, VariableId v);
VarSet complement_of_closed(std::size_t d, const VarSet& open, VariableId i);

}  // namespace mrfsl
