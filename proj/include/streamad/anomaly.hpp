#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "streamad/sdr.hpp"

namespace streamad {

/// Fraction of the current code that went unpredicted:
///   score = 1 - |predicted_prev ∩ actual| / |actual|
/// 0 when the input was perfectly predicted, 1 when completely unpredicted.
/// An empty actual code carries no evidence of surprise and scores 0 (the
/// caller may count these occurrences for diagnostics).
double raw_score(const Sdr& predicted_prev, const Sdr& actual);

/// Gaussian upper-tail probability Q(x) = P(Z > x) for standard normal Z,
/// computed as erfc(x/sqrt(2))/2. Monotone decreasing; Q(-x) = 1 - Q(x).
double q_function(double x);

struct LikelihoodConfig {
  size_t long_window = 8000;   // W, raw-score distribution window
  size_t short_window = 10;    // W', short-term average window
  double epsilon = 1e-5;       // detection threshold on 1 - L
  double min_variance_floor = 1e-4;
  size_t warmup_min = 2;       // samples before L is meaningful

  void validate() const;
};

struct DistributionEstimate {
  double mean = 0.0;
  double variance = 0.0;  // floored at min_variance_floor
  size_t count = 0;
};

struct LikelihoodUpdate {
  double likelihood = 0.5;   // L = 1 - Q(z)
  double tail_probability = 0.5;  // q = Q(z), fed to the multi-model combiner
  double zscore = 0.0;       // signed deviation (mu_short - mu) / sigma
  double short_mean = 0.0;
  DistributionEstimate dist;
};

/// Rolling estimate of the raw-score distribution over the last W scores,
/// plus a short-term average over the last W' scores. The incremental sums
/// use Neumaier compensation and are recomputed from the ring buffer every W
/// pushes so drift stays bounded on unbounded streams.
class AnomalyLikelihood {
 public:
  explicit AnomalyLikelihood(LikelihoodConfig cfg);

  /// Pushes one raw score (must be finite, in [0,1]) and returns the
  /// likelihood of the current short-term average under the rolling
  /// distribution. Returns likelihood 0.5 until warmup_min samples are seen.
  LikelihoodUpdate update(double score);

  DistributionEstimate distribution() const;
  size_t count() const { return total_count_; }
  const LikelihoodConfig& config() const { return cfg_; }

 private:
  void recompute_sums();

  LikelihoodConfig cfg_;
  std::vector<double> long_ring_;
  std::vector<double> short_ring_;
  size_t total_count_ = 0;
  size_t pushes_since_recompute_ = 0;
  // Neumaier-compensated running sums over the long window.
  double sum_ = 0.0, sum_c_ = 0.0;
  double sumsq_ = 0.0, sumsq_c_ = 0.0;
  double short_sum_ = 0.0, short_sum_c_ = 0.0;
};

/// Eq-style detection test: true iff L >= 1 - epsilon and the stream is out
/// of its probationary period.
bool likelihood_flag(double likelihood, const LikelihoodConfig& cfg,
                     bool in_probation);

}  // namespace streamad
