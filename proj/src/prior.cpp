#include "ppd/prior.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "ppd/error.hpp"
#include "ppd/rng.hpp"

namespace ppd {

void check_prior(const PriorSpec& prior) {
  const Eigen::Index m = prior.mean.size();
  if (prior.covariance.rows() != m || prior.covariance.cols() != m)
    throw Error(ErrorKind::kInvalidPrior, "covariance shape does not match mean");
  if (!prior.mean.allFinite() || !prior.covariance.allFinite())
    throw Error(ErrorKind::kInvalidPrior, "prior contains non-finite values");
  if (m == 0) return;
  if ((prior.covariance - prior.covariance.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw Error(ErrorKind::kInvalidPrior, "covariance is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(prior.covariance,
                                                     Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-10)
    throw Error(ErrorKind::kInvalidPrior, "covariance is not positive semidefinite");
}

Eigen::MatrixXd covariance_factor(const Eigen::MatrixXd& covariance) {
  const Eigen::Index m = covariance.rows();
  if (m == 0) return Eigen::MatrixXd(0, 0);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(covariance);
  Eigen::VectorXd root_d = ldlt.vectorD().cwiseMax(0.0).cwiseSqrt();
  Eigen::MatrixXd lower = ldlt.matrixL();
  Eigen::MatrixXd scaled = lower * root_d.asDiagonal();
  return ldlt.transpositionsP().transpose() * scaled;
}

namespace {

std::vector<int> first_primes(int count) {
  std::vector<int> primes;
  for (int n = 2; static_cast<int>(primes.size()) < count; ++n) {
    bool prime = true;
    for (int p : primes) {
      if (p * p > n) break;
      if (n % p == 0) {
        prime = false;
        break;
      }
    }
    if (prime) primes.push_back(n);
  }
  return primes;
}

// Halton coordinate of point `index` in base `base` with a random digit
// permutation per digit position.
double scrambled_radical_inverse(std::uint64_t index, int base,
                                 const std::vector<std::vector<int>>& perms) {
  double value = 0.0;
  double scale = 1.0 / base;
  for (const auto& perm : perms) {
    const int digit = static_cast<int>(index % base);
    index /= base;
    value += perm[digit] * scale;
    scale /= base;
  }
  // Centre the truncated tail so the point never sits on 0.
  value += 0.5 * scale * base;
  return std::clamp(value, 0x1.0p-60, 1.0 - 0x1.0p-53);
}

}  // namespace

Eigen::MatrixXd standard_normal_points(int num_draws, int dim, std::uint64_t seed,
                                       SamplingMethod method) {
  if (num_draws < 1) throw Error(ErrorKind::kInvalidInput, "num_draws must be >= 1");
  Eigen::MatrixXd z(num_draws, dim);
  if (method == SamplingMethod::kPseudoRandom) {
    for (int r = 0; r < num_draws; ++r)
      for (int c = 0; c < dim; ++c) {
        const std::uint64_t counter = static_cast<std::uint64_t>(r) * dim + c;
        z(r, c) = normal_quantile(bits_to_open_unit(derive_seed(seed, counter)));
      }
    return z;
  }
  const std::vector<int> primes = first_primes(dim);
  for (int c = 0; c < dim; ++c) {
    const int base = primes[c];
    const int depth = static_cast<int>(std::ceil(53.0 / std::log2(base)));
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(c)));
    std::vector<std::vector<int>> perms(depth, std::vector<int>(base));
    for (auto& perm : perms) {
      std::iota(perm.begin(), perm.end(), 0);
      for (int i = base - 1; i > 0; --i) std::swap(perm[i], perm[rng.uniform_int(0, i)]);
    }
    for (int r = 0; r < num_draws; ++r)
      z(r, c) = normal_quantile(
          scrambled_radical_inverse(static_cast<std::uint64_t>(r), base, perms));
  }
  return z;
}

PriorDraws sample_prior(const PriorSpec& prior, int num_draws, std::uint64_t seed,
                        SamplingMethod method) {
  check_prior(prior);
  const int m = prior.dim();
  const Eigen::MatrixXd factor = covariance_factor(prior.covariance);
  const Eigen::MatrixXd z = standard_normal_points(num_draws, m, seed, method);
  PriorDraws out;
  out.seed = seed;
  out.method = method;
  out.draws = z * factor.transpose();
  out.draws.rowwise() += prior.mean.transpose();
  // Zero-variance coordinates are reproduced exactly.
  for (int c = 0; c < m; ++c)
    if (factor.row(c).isZero(0.0)) out.draws.col(c).setConstant(prior.mean(c));
  return out;
}

PriorDraws point_prior(const Eigen::VectorXd& beta) {
  PriorDraws out;
  out.draws = beta.transpose();
  return out;
}

}  // namespace ppd
