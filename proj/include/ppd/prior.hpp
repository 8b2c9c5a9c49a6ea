#ifndef PPD_PRIOR_HPP
#define PPD_PRIOR_HPP

#include <cstdint>

#include <Eigen/Dense>

namespace ppd {

// Multivariate normal prior N(mean, covariance) over model parameters.
struct PriorSpec {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;

  int dim() const { return static_cast<int>(mean.size()); }
};

// Throws kInvalidPrior unless the covariance is symmetric within 1e-12 and
// its eigenvalues are >= -1e-10.
void check_prior(const PriorSpec& prior);

enum class SamplingMethod {
  kQuasiMonteCarlo,  // scrambled Halton points through the normal quantile
  kPseudoRandom,     // counter-based SplitMix64 stream
};

inline constexpr int kDefaultNumDraws = 128;

// Frozen prior sample: one row per draw.
struct PriorDraws {
  Eigen::MatrixXd draws;
  std::uint64_t seed = 0;
  SamplingMethod method = SamplingMethod::kQuasiMonteCarlo;

  int num_draws() const { return static_cast<int>(draws.rows()); }
  int dim() const { return static_cast<int>(draws.cols()); }
};

// Rank-revealing factor L with L L' = covariance; rows of zero-variance
// coordinates are exactly zero.
Eigen::MatrixXd covariance_factor(const Eigen::MatrixXd& covariance);

// R x dim matrix of standard-normal variates, deterministic in the seed.
Eigen::MatrixXd standard_normal_points(int num_draws, int dim, std::uint64_t seed,
                                       SamplingMethod method);

// draws = mean + L z. Deterministic in (prior, num_draws, seed, method).
PriorDraws sample_prior(const PriorSpec& prior, int num_draws, std::uint64_t seed,
                        SamplingMethod method = SamplingMethod::kQuasiMonteCarlo);

// A single draw row repeated; handy for locally optimal designs.
PriorDraws point_prior(const Eigen::VectorXd& beta);

}  // namespace ppd

#endif  // PPD_PRIOR_HPP
