#pragma once

#include <cstdint>
#include <string_view>
#include <utility>

#include <Eigen/Dense>

#include "mrfsl/core.hpp"

namespace mrfsl {

struct IsingParams {
  double beta = 0.5;
  int burnin = 1000;  // sweeps
  int thin = 10;      // sweeps between kept samples
};

/// Twin-chain HMM with binary states and observations. Transition matrices
/// are row-stochastic (row = current state). `obs_p1(s1, s2)` is P(O = 1 | s1, s2).
struct HmmDiscreteParams {
  int t_steps = 3;
  Eigen::Vector2d init1{0.5, 0.5};
  Eigen::Vector2d init2{0.5, 0.5};
  Eigen::Matrix2d trans1 = (Eigen::Matrix2d() << 0.8, 0.2, 0.2, 0.8).finished();
  Eigen::Matrix2d trans2 = (Eigen::Matrix2d() << 0.8, 0.2, 0.2, 0.8).finished();
  Eigen::Matrix2d obs_p1 = (Eigen::Matrix2d() << 0.1, 0.5, 0.5, 0.9).finished();
};

struct GaussianParams {
  int d = 9;
  double edge_prob = 0.3;
  double min_eig = 0.5;
  double weight_lo = 0.2;
  double weight_hi = 0.6;
};

/// Linear-Gaussian twin chains; O_t ~ N(s1_t, exp(sd_gain * s2_t / 2)^2).
/// sd_gain = 0 gives a constant unit observation noise.
struct HmmContinuousParams {
  int t_steps = 3;
  double a1 = 0.5;
  double a2 = 0.5;
  double noise_sd1 = 1.0;
  double noise_sd2 = 1.0;
  double init_sd1 = 1.0;
  double init_sd2 = 1.0;
  double sd_gain = 1.0;
};

enum class GeneratorKind { Ising3x3, HmmDiscrete, Gaussian, HmmContinuous };

std::string_view to_string(GeneratorKind k);
GeneratorKind parse_generator_kind(std::string_view name);

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::Ising3x3;
  std::size_t n_samples = 100;
  std::uint64_t seed = 0;
  IsingParams ising;
  HmmDiscreteParams hmm_discrete;
  GaussianParams gaussian;
  HmmContinuousParams hmm_continuous;
};

void validate(const GeneratorSpec& spec);

using Generated = std::pair<Dataset, GroundTruth>;

/// 4-neighbour 3x3 lattice, node index = 3 * row + col.
EdgeSet ising_lattice();
/// Moralized twin-chain HMM; columns ordered (S1_1, S2_1, O_1, S1_2, ...).
EdgeSet hmm_moral_graph(int t_steps);

/// Single-site Gibbs sampling of the zero-field 3x3 Ising model with
/// coupling beta. Codes 0/1 stand for spins -1/+1.
Generated gen_ising(std::size_t n, std::uint64_t seed, const IsingParams& p = {});
Generated gen_hmm_discrete(std::size_t n, std::uint64_t seed, const HmmDiscreteParams& p = {});
Generated gen_gaussian(std::size_t n, std::uint64_t seed, const GaussianParams& p = {});
Generated gen_hmm_continuous(std::size_t n, std::uint64_t seed,
                             const HmmContinuousParams& p = {});

/// Random sparse precision matrix as used by gen_gaussian.
Eigen::MatrixXd random_precision(std::uint64_t seed, const GaussianParams& p);
/// N rows from N(0, precision^-1); ground truth = off-diagonal support.
Generated sample_gaussian(std::size_t n, std::uint64_t seed, const Eigen::MatrixXd& precision);

Generated generate(const GeneratorSpec& spec);

}  // namespace mrfsl
