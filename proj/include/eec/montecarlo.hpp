#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "eec/linalg.hpp"
#include "eec/matrix.hpp"

namespace eec {

/// Which quantity the threshold x is compared against.
enum class ThresholdScale {
  Singular,  // sigma_i >= x
  Eigen,     // lambda_i = sigma_i^2 >= x
};

struct McConfig {
  std::size_t n_samples = 100000;
  std::uint64_t seed = 0;
  std::size_t chunk_size = 4096;
  unsigned workers = 0;  // 0: hardware concurrency
  ThresholdScale scale = ThresholdScale::Singular;

  void validate() const;
};

struct TailEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
};

struct RatioEstimate {
  double value = 0.0;  // NaN when the denominator count is zero
  double stderr_ = 0.0;
  std::size_t numerator_count = 0;
  std::size_t denominator_count = 0;
  bool defined = false;
};

/// Counter-based stream: the sequence depends only on (seed, stream id).
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();
  /// Uniform on (0, 1), never 0 or 1.
  double uniform();
  /// Standard normal by inverse CDF.
  double normal();

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// A = D V + M with D = diag(1/sqrt(s_i)) and V standard Gaussian.
Matrix sample_matrix(const WishartParams& p, RandomStream& stream);

/// result[k][i] estimates Pr(sigma_{i+1} >= xs[k]) (or lambda on the eigen scale).
std::vector<std::vector<TailEstimate>> estimate_eigen_tails(const WishartParams& p, std::span<const double> xs,
                                                            const McConfig& cfg);

/// Alternating sum sum_i (-1)^{i-1} 1(sigma_i >= x), averaged per sample.
std::vector<TailEstimate> estimate_expected_euler(const WishartParams& p, std::span<const double> xs,
                                                  const McConfig& cfg);

/// Pr(lambda_2 >= x) / Pr(lambda_1 >= x) with a conditional-binomial standard error.
std::vector<RatioEstimate> lemma1_ratio_curve(const WishartParams& p, std::span<const double> xs,
                                              const McConfig& cfg);

}  // namespace eec
