#include "mrfsl/synthgen.hpp"

#include <array>
#include <cmath>
#include <random>

#include <fmt/format.h>

namespace mrfsl {
namespace {

using Rng = std::mt19937_64;

constexpr int kGrid = 3;

std::vector<ColumnInfo> binary_columns(const std::vector<std::string>& names) {
  std::vector<ColumnInfo> cols;
  for (const auto& n : names) cols.push_back({n, ColumnKind::Discrete, 2});
  return cols;
}

std::vector<ColumnInfo> continuous_columns(const std::vector<std::string>& names) {
  std::vector<ColumnInfo> cols;
  for (const auto& n : names) cols.push_back({n, ColumnKind::Continuous, 0});
  return cols;
}

std::vector<std::string> hmm_names(int t_steps) {
  std::vector<std::string> names;
  for (int t = 1; t <= t_steps; ++t) {
    names.push_back(fmt::format("S1_{}", t));
    names.push_back(fmt::format("S2_{}", t));
    names.push_back(fmt::format("O_{}", t));
  }
  return names;
}

void check_stochastic_row(double a, double b, std::string_view what) {
  if (a < 0 || b < 0 || std::abs(a + b - 1.0) > 1e-9)
    throw ValidationError(fmt::format("{}: ({}, {}) is not a probability row", what, a, b));
}

int draw_binary(Rng& rng, double p1) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p1 ? 1 : 0;
}

Generated sample_gaussian_with(Rng& rng, std::size_t n, const Eigen::MatrixXd& precision) {
  const Eigen::Index d = precision.rows();
  if (d < 1 || precision.cols() != d) throw ValidationError("precision matrix must be square");
  Eigen::LLT<Eigen::MatrixXd> llt(precision);
  if (llt.info() != Eigen::Success)
    throw ValidationError("precision matrix is not positive definite");

  // precision = L L^T, so x = L^{-T} z has covariance precision^{-1}.
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd z(d, static_cast<Eigen::Index>(n));
  for (Eigen::Index c = 0; c < z.cols(); ++c)
    for (Eigen::Index r = 0; r < d; ++r) z(r, c) = normal(rng);
  const Eigen::MatrixXd x = llt.matrixU().solve(z);

  std::vector<std::string> names;
  EdgeSet truth(static_cast<std::size_t>(d));
  for (Eigen::Index i = 0; i < d; ++i) {
    names.push_back(fmt::format("x{}", i));
    for (Eigen::Index j = i + 1; j < d; ++j)
      if (precision(i, j) != 0.0)
        truth.insert(static_cast<VariableId>(i), static_cast<VariableId>(j));
  }
  return {Dataset(x.transpose(), continuous_columns(names)), {std::move(truth), "gaussian"}};
}

Eigen::MatrixXd random_precision_with(Rng& rng, const GaussianParams& p) {
  const Eigen::Index d = p.d;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> magnitude(p.weight_lo, p.weight_hi);
  Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = i + 1; j < d; ++j) {
      if (unit(rng) >= p.edge_prob) continue;
      const double w = magnitude(rng) * (unit(rng) < 0.5 ? -1.0 : 1.0);
      theta(i, j) = theta(j, i) = w;
    }
  const double lo = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(theta, Eigen::EigenvaluesOnly)
                        .eigenvalues()
                        .minCoeff();
  theta.diagonal().array() += p.min_eig - lo;
  return theta;
}

}  // namespace

std::string_view to_string(GeneratorKind k) {
  switch (k) {
    case GeneratorKind::Ising3x3:
      return "ising";
    case GeneratorKind::HmmDiscrete:
      return "hmm-discrete";
    case GeneratorKind::Gaussian:
      return "gaussian";
    case GeneratorKind::HmmContinuous:
      return "hmm-continuous";
  }
  return "?";
}

GeneratorKind parse_generator_kind(std::string_view name) {
  for (auto k : {GeneratorKind::Ising3x3, GeneratorKind::HmmDiscrete, GeneratorKind::Gaussian,
                 GeneratorKind::HmmContinuous})
    if (to_string(k) == name) return k;
  throw ArgumentError(fmt::format("unknown generator kind '{}'", name));
}

void validate(const GeneratorSpec& spec) {
  if (spec.n_samples < 1) throw ValidationError("n_samples must be >= 1");
  switch (spec.kind) {
    case GeneratorKind::Ising3x3: {
      const auto& p = spec.ising;
      if (!std::isfinite(p.beta)) throw ValidationError("beta must be finite");
      if (p.burnin < 0) throw ValidationError("burn-in must be >= 0");
      if (p.thin < 1) throw ValidationError("thinning must be >= 1");
      break;
    }
    case GeneratorKind::HmmDiscrete: {
      const auto& p = spec.hmm_discrete;
      if (p.t_steps < 1) throw ValidationError("t_steps must be >= 1");
      check_stochastic_row(p.init1(0), p.init1(1), "init1");
      check_stochastic_row(p.init2(0), p.init2(1), "init2");
      for (int s = 0; s < 2; ++s) {
        check_stochastic_row(p.trans1(s, 0), p.trans1(s, 1), "trans1");
        check_stochastic_row(p.trans2(s, 0), p.trans2(s, 1), "trans2");
        for (int u = 0; u < 2; ++u)
          check_stochastic_row(1.0 - p.obs_p1(s, u), p.obs_p1(s, u), "obs");
      }
      break;
    }
    case GeneratorKind::Gaussian: {
      const auto& p = spec.gaussian;
      if (p.d < 1) throw ValidationError("d must be >= 1");
      if (!(p.edge_prob > 0 && p.edge_prob < 1)) throw ValidationError("edge_prob must be in (0, 1)");
      if (!(p.min_eig > 0)) throw ValidationError("min_eig must be > 0");
      if (!(p.weight_lo > 0 && p.weight_lo <= p.weight_hi))
        throw ValidationError("weights need 0 < lo <= hi");
      break;
    }
    case GeneratorKind::HmmContinuous: {
      const auto& p = spec.hmm_continuous;
      if (p.t_steps < 1) throw ValidationError("t_steps must be >= 1");
      if (!(p.noise_sd1 > 0 && p.noise_sd2 > 0 && p.init_sd1 > 0 && p.init_sd2 > 0))
        throw ValidationError("noise and initial standard deviations must be > 0");
      if (!std::isfinite(p.a1) || !std::isfinite(p.a2) || !std::isfinite(p.sd_gain))
        throw ValidationError("transition coefficients must be finite");
      break;
    }
  }
}

EdgeSet ising_lattice() {
  EdgeSet es(kGrid * kGrid);
  for (int r = 0; r < kGrid; ++r)
    for (int c = 0; c < kGrid; ++c) {
      const auto v = static_cast<VariableId>(kGrid * r + c);
      if (c + 1 < kGrid) es.insert(v, v + 1);
      if (r + 1 < kGrid) es.insert(v, v + kGrid);
    }
  return es;
}

EdgeSet hmm_moral_graph(int t_steps) {
  EdgeSet es(static_cast<std::size_t>(3 * t_steps));
  for (int t = 0; t < t_steps; ++t) {
    const auto s1 = static_cast<VariableId>(3 * t), s2 = s1 + 1, o = s1 + 2;
    es.insert(s1, o);
    es.insert(s2, o);
    es.insert(s1, s2);
    if (t + 1 < t_steps) {
      es.insert(s1, s1 + 3);
      es.insert(s2, s2 + 3);
    }
  }
  return es;
}

Generated gen_ising(std::size_t n, std::uint64_t seed, const IsingParams& p) {
  GeneratorSpec spec;
  spec.kind = GeneratorKind::Ising3x3;
  spec.n_samples = n;
  spec.ising = p;
  validate(spec);

  constexpr int kSites = kGrid * kGrid;
  std::array<std::vector<int>, kSites> nbrs;
  const EdgeSet lattice = ising_lattice();
  for (auto [a, b] : lattice.edges()) {
    nbrs[a].push_back(static_cast<int>(b));
    nbrs[b].push_back(static_cast<int>(a));
  }

  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::array<int, kSites> spin{};
  for (auto& s : spin) s = unit(rng) < 0.5 ? -1 : 1;
  auto sweep = [&] {
    for (int v = 0; v < kSites; ++v) {
      int field = 0;
      for (int u : nbrs[v]) field += spin[u];
      const double p_up = 1.0 / (1.0 + std::exp(-2.0 * p.beta * field));
      spin[v] = unit(rng) < p_up ? 1 : -1;
    }
  };

  for (int s = 0; s < p.burnin; ++s) sweep();
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), kSites);
  for (std::size_t r = 0; r < n; ++r) {
    for (int s = 0; s < p.thin; ++s) sweep();
    for (int v = 0; v < kSites; ++v) x(static_cast<Eigen::Index>(r), v) = spin[v] > 0 ? 1.0 : 0.0;
  }

  std::vector<std::string> names;
  for (int r = 0; r < kGrid; ++r)
    for (int c = 0; c < kGrid; ++c) names.push_back(fmt::format("s{}{}", r, c));
  return {Dataset(std::move(x), binary_columns(names)), {lattice, "ising"}};
}

Generated gen_hmm_discrete(std::size_t n, std::uint64_t seed, const HmmDiscreteParams& p) {
  GeneratorSpec spec;
  spec.kind = GeneratorKind::HmmDiscrete;
  spec.n_samples = n;
  spec.hmm_discrete = p;
  validate(spec);

  Rng rng(seed);
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), 3 * p.t_steps);
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    int s1 = draw_binary(rng, p.init1(1));
    int s2 = draw_binary(rng, p.init2(1));
    for (int t = 0; t < p.t_steps; ++t) {
      if (t > 0) {
        s1 = draw_binary(rng, p.trans1(s1, 1));
        s2 = draw_binary(rng, p.trans2(s2, 1));
      }
      const int o = draw_binary(rng, p.obs_p1(s1, s2));
      x(r, 3 * t) = s1;
      x(r, 3 * t + 1) = s2;
      x(r, 3 * t + 2) = o;
    }
  }
  return {Dataset(std::move(x), binary_columns(hmm_names(p.t_steps))),
          {hmm_moral_graph(p.t_steps), "hmm-discrete"}};
}

Eigen::MatrixXd random_precision(std::uint64_t seed, const GaussianParams& p) {
  Rng rng(seed);
  return random_precision_with(rng, p);
}

Generated sample_gaussian(std::size_t n, std::uint64_t seed, const Eigen::MatrixXd& precision) {
  if (n < 1) throw ValidationError("n_samples must be >= 1");
  Rng rng(seed);
  return sample_gaussian_with(rng, n, precision);
}

Generated gen_gaussian(std::size_t n, std::uint64_t seed, const GaussianParams& p) {
  GeneratorSpec spec;
  spec.kind = GeneratorKind::Gaussian;
  spec.n_samples = n;
  spec.gaussian = p;
  validate(spec);
  Rng rng(seed);
  const Eigen::MatrixXd theta = random_precision_with(rng, p);
  return sample_gaussian_with(rng, n, theta);
}

Generated gen_hmm_continuous(std::size_t n, std::uint64_t seed, const HmmContinuousParams& p) {
  GeneratorSpec spec;
  spec.kind = GeneratorKind::HmmContinuous;
  spec.n_samples = n;
  spec.hmm_continuous = p;
  validate(spec);

  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), 3 * p.t_steps);
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    double s1 = p.init_sd1 * normal(rng);
    double s2 = p.init_sd2 * normal(rng);
    for (int t = 0; t < p.t_steps; ++t) {
      if (t > 0) {
        s1 = p.a1 * s1 + p.noise_sd1 * normal(rng);
        s2 = p.a2 * s2 + p.noise_sd2 * normal(rng);
      }
      const double sd = std::exp(p.sd_gain * s2 / 2.0);
      x(r, 3 * t) = s1;
      x(r, 3 * t + 1) = s2;
      x(r, 3 * t + 2) = s1 + sd * normal(rng);
    }
  }
  return {Dataset(std::move(x), continuous_columns(hmm_names(p.t_steps))),
          {hmm_moral_graph(p.t_steps), "hmm-continuous"}};
}

Generated generate(const GeneratorSpec& spec) {
  switch (spec.kind) {
    case GeneratorKind::Ising3x3:
      return gen_ising(spec.n_samples, spec.seed, spec.ising);
    case GeneratorKind::HmmDiscrete:
      return gen_hmm_discrete(spec.n_samples, spec.seed, spec.hmm_discrete);
    case GeneratorKind::Gaussian:
      return gen_gaussian(spec.n_samples, spec.seed, spec.gaussian);
    case GeneratorKind::HmmContinuous:
      return gen_hmm_continuous(spec.n_samples, spec.seed, spec.hmm_continuous);
  }
  throw ArgumentError("unknown generator kind");
}

}  // namespace mrfsl
