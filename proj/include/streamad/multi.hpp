#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace streamad {

struct MultiConfig {
  double sigma = 6.0;      // temporal kernel width, in steps
  int kernel_span = 24;    // K: truncation lag; kernel covers lags 0..K
  double epsilon = 1e-5;   // threshold on 1 - L

  void validate() const;
};

/// Discrete causal smoothing kernel: half-normal weights 2*G(j; sigma) over
/// lags j = 0..span (past only), renormalized to sum exactly 1 so smoothed
/// tail probabilities stay probabilities. Strictly decreasing in j.
/// span == 0 yields the degenerate kernel {1}, which makes the combiner
/// reproduce the single-model likelihood exactly.
std::vector<double> kernel_weights(double sigma, int span);

/// Sum of the raw half-normal weights before renormalization; exposed for
/// diagnostics of the discretization error.
double kernel_raw_mass(double sigma, int span);

/// Per-model history of recent tail probabilities q = Q((mu_short-mu)/sigma).
/// Missing history is padded with the neutral value 0.5; stored values are
/// clamped into (0,1).
class ModelChannel {
 public:
  explicit ModelChannel(int kernel_span);

  void push(double tail_probability);

  /// q at the given lag (0 = most recent).
  double at_lag(int lag) const;
  int span() const { return static_cast<int>(ring_.size()) - 1; }

 private:
  std::vector<double> ring_;  // length span+1, ring_[head] = lag 0
  size_t head_ = 0;
};

/// Kernel-smoothed tail probability of one channel under the given weights.
double smoothed_tail(const ModelChannel& channel,
                     std::span<const double> weights);

/// System-level likelihood L = 1 - prod_i smoothed_i, evaluated as a sum of
/// log probabilities with the smoothed values clamped at 1e-300.
double combined_likelihood(std::span<const ModelChannel> channels,
                           const MultiConfig& cfg);

/// As above, also reporting each channel's smoothed value.
double combined_likelihood(std::span<const ModelChannel> channels,
                           const MultiConfig& cfg,
                           std::vector<double>& smoothed_out);

bool multi_flag(double likelihood, const MultiConfig& cfg);

}  // namespace streamad
