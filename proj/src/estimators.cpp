#include "mrfsl/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include <boost/math/special_functions/digamma.hpp>
#include <fmt/core.h>
#include <fmt/ranges.h>

namespace mrfsl {
namespace {

void check_groups(const Dataset& data, const VarSet& xs, const VarSet& ys) {
  if (xs.empty() || ys.empty()) throw ArgumentError("MI needs non-empty variable groups");
  for (auto v : xs) {
    data.column(v);
    if (std::find(ys.begin(), ys.end(), v) != ys.end())
      throw ArgumentError(fmt::format("groups {} and {} overlap", xs, ys));
  }
  for (auto v : ys) data.column(v);
}

void require_discrete(const Dataset& data, const VarSet& vars) {
  for (auto v : vars)
    if (!data.is_discrete(v))
      throw EstimatorMismatch(
          fmt::format("plug-in estimator needs discrete columns; column {} is continuous", v));
}

/// Relabels arbitrary keys to dense ids 0..levels-1 in key order.
std::size_t densify(std::vector<std::uint64_t>& keys) {
  std::vector<std::uint64_t> uniq = keys;
  std::sort(uniq.begin(), uniq.end());
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
  for (auto& k : keys)
    k = static_cast<std::uint64_t>(std::lower_bound(uniq.begin(), uniq.end(), k) - uniq.begin());
  return uniq.size();
}

/// Dense joint code per row for a group of discrete columns.
std::vector<std::uint64_t> joint_codes(const Dataset& data, const VarSet& vars,
                                       std::size_t& levels) {
  const std::size_t n = data.n_samples();
  std::vector<std::uint64_t> keys(n, 0);
  levels = 1;
  for (auto v : vars) {
    const auto card = static_cast<std::uint64_t>(data.column(v).cardinality);
    for (std::size_t r = 0; r < n; ++r)
      keys[r] = keys[r] * card + static_cast<std::uint64_t>(data.code(r, v));
    levels = densify(keys);
  }
  return keys;
}

std::vector<std::size_t> counts_of(const std::vector<std::uint64_t>& codes, std::size_t levels) {
  std::vector<std::size_t> counts(levels, 0);
  for (auto c : codes) ++counts[c];
  return counts;
}

/// Per-row distance to every other row within a group of columns.
void group_distances(const Dataset& data, const VarSet& vars, Eigen::Index row,
                     Eigen::ArrayXd& out) {
  out.setZero();
  const auto& x = data.values();
  for (auto v : vars) {
    const auto c = static_cast<Eigen::Index>(v);
    const double xi = x(row, c);
    if (data.is_discrete(v))
      out = out.max((x.col(c).array() != xi).cast<double>());
    else
      out = out.max((x.col(c).array() - xi).abs());
  }
}

}  // namespace

void validate(const EstimatorConfig& cfg, const Dataset& data) {
  if (cfg.method == EstimatorMethod::KnnMixed &&
      (cfg.k < 1 || static_cast<std::size_t>(cfg.k) >= data.n_samples()))
    throw ArgumentError(fmt::format("k = {} must satisfy 1 <= k < N = {}", cfg.k,
                                    data.n_samples()));
  if (cfg.method == EstimatorMethod::PlugIn)
    for (VariableId v = 0; v < data.n_vars(); ++v)
      if (!data.is_discrete(v))
        throw EstimatorMismatch(
            fmt::format("plug-in estimator needs discrete columns; column {} is continuous", v));
}

Dataset prepare_dataset(const Dataset& data, const EstimatorConfig& cfg) {
  return cfg.rank_transform ? rank_transform(data) : data;
}

Nats entropy_plugin(const Dataset& data, const VarSet& vars) {
  require_discrete(data, vars);
  if (vars.empty()) return 0.0;
  std::size_t levels = 0;
  const auto codes = joint_codes(data, vars, levels);
  auto counts = counts_of(codes, levels);
  std::sort(counts.begin(), counts.end());
  const double n = static_cast<double>(data.n_samples());
  double acc = 0.0;
  for (auto c : counts) acc += static_cast<double>(c) * std::log(static_cast<double>(c));
  return std::log(n) - acc / n;
}

Nats mi_plugin(const Dataset& data, const VarSet& xs, const VarSet& ys) {
  check_groups(data, xs, ys);
  require_discrete(data, xs);
  require_discrete(data, ys);

  std::size_t lx = 0, ly = 0;
  const auto cx = joint_codes(data, xs, lx);
  const auto cy = joint_codes(data, ys, ly);
  const auto nx = counts_of(cx, lx);
  const auto ny = counts_of(cy, ly);

  const std::size_t n = data.n_samples();
  std::vector<std::uint64_t> cxy(n);
  for (std::size_t r = 0; r < n; ++r) cxy[r] = cx[r] * ly + cy[r];
  std::vector<std::uint64_t> order = cxy;
  std::sort(order.begin(), order.end());

  // Each cell contributes a function of (n_xy, n_x * n_y) only; summing in
  // sorted order of that pair makes the result independent of argument order.
  std::vector<std::pair<std::uint64_t, std::uint64_t>> cells;
  for (std::size_t a = 0; a < n;) {
    std::size_t b = a;
    while (b < n && order[b] == order[a]) ++b;
    const auto key = order[a];
    cells.emplace_back(b - a, static_cast<std::uint64_t>(nx[key / ly]) * ny[key % ly]);
    a = b;
  }
  std::sort(cells.begin(), cells.end());

  const double nd = static_cast<double>(n);
  double acc = 0.0;
  for (auto [nxy, prod] : cells) {
    const double c = static_cast<double>(nxy);
    acc += c * std::log(c * nd / static_cast<double>(prod));
  }
  return std::max(0.0, acc / nd);
}

Nats mi_knn_mixed(const Dataset& data, const VarSet& xs, const VarSet& ys, int k) {
  check_groups(data, xs, ys);
  const std::size_t n = data.n_samples();
  if (k < 1 || static_cast<std::size_t>(k) >= n)
    throw ArgumentError(fmt::format("k = {} must satisfy 1 <= k < N = {}", k, n));

  const auto ni = static_cast<Eigen::Index>(n);
  Eigen::ArrayXd dx(ni), dy(ni), joint(ni);
  std::vector<double> scratch(n);
  const double log_n = std::log(static_cast<double>(n));
  double acc = 0.0;

  for (Eigen::Index i = 0; i < ni; ++i) {
    group_distances(data, xs, i, dx);
    group_distances(data, ys, i, dy);
    joint = dx.max(dy);
    joint(i) = std::numeric_limits<double>::infinity();

    std::copy(joint.begin(), joint.end(), scratch.begin());
    std::nth_element(scratch.begin(), scratch.begin() + (k - 1), scratch.end());
    const double rho = scratch[static_cast<std::size_t>(k - 1)];

    double k_eff = k;
    if (rho == 0.0) k_eff = static_cast<double>((joint == 0.0).count());

    // Self is at distance 0 in both marginals and is excluded from the counts.
    const auto n_x = static_cast<double>((dx <= rho).count() - 1);
    const auto n_y = static_cast<double>((dy <= rho).count() - 1);
    acc += boost::math::digamma(k_eff) + log_n - std::log(n_x + 1.0) - std::log(n_y + 1.0);
  }
  return acc / static_cast<double>(n);
}

Nats mutual_information(const Dataset& data, const VarSet& xs, const VarSet& ys,
                        const EstimatorConfig& cfg) {
  switch (cfg.method) {
    case EstimatorMethod::PlugIn:
      return mi_plugin(data, xs, ys);
    case EstimatorMethod::KnnMixed:
      return mi_knn_mixed(data, xs, ys, cfg.k);
  }
  throw ArgumentError("unknown estimator method");
}

Nats cmi(const Dataset& data, VariableId x, VariableId y, const VarSet& zs,
         const EstimatorConfig& cfg) {
  if (x == y) throw ArgumentError(fmt::format("cmi needs x != y (got {})", x));
  return group_cmi(data, VarSet{x}, VarSet{y}, zs, cfg);
}

Nats group_cmi(const Dataset& data, const VarSet& xs, const VarSet& ys, const VarSet& zs,
               const EstimatorConfig& cfg) {
  for (auto z : zs)
    if (std::binary_search(xs.begin(), xs.end(), z) || std::binary_search(ys.begin(), ys.end(), z))
      throw ArgumentError(fmt::format("conditioning variable {} also appears in x or y", z));
  if (zs.empty()) return mutual_information(data, xs, ys, cfg);
  VarSet xz = xs;
  xz.insert(xz.end(), zs.begin(), zs.end());
  std::sort(xz.begin(), xz.end());
  return mutual_information(data, xz, ys, cfg) - mutual_information(data, ys, zs, cfg);
}

Nats MiCache::mi(const VarSet& xs, const VarSet& ys) {
  // MI is symmetric; one orientation per unordered pair keeps repeated
  // lookups bit-identical.
  auto key = ys < xs ? std::make_pair(ys, xs) : std::make_pair(xs, ys);
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  const Nats value = mutual_information(data_, key.first, key.second, cfg_);
  ++evaluations_;
  memo_.emplace(std::move(key), value);
  return value;
}

Nats MiCache::cmi(VariableId x, VariableId y, const VarSet& zs) {
  if (x == y) throw ArgumentError(fmt::format("cmi needs x != y (got {})", x));
  return group_cmi(VarSet{x}, VarSet{y}, zs);
}

Nats MiCache::group_cmi(const VarSet& xs, const VarSet& ys, const VarSet& zs) {
  for (auto z : zs)
    if (std::binary_search(xs.begin(), xs.end(), z) || std::binary_search(ys.begin(), ys.end(), z))
      throw ArgumentError(fmt::format("conditioning variable {} also appears in x or y", z));
  if (zs.empty()) return mi(xs, ys);
  VarSet xz = xs;
  xz.insert(xz.end(), zs.begin(), zs.end());
  std::sort(xz.begin(), xz.end());
  return mi(xz, ys) - mi(ys, zs);
}

}  // namespace mrfsl
