#include "streamad/anomaly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace streamad {
namespace {

inline void neumaier_add(double& sum, double& comp, double v) {
  const double t = sum + v;
  if (std::abs(sum) >= std::abs(v)) {
    comp += (sum - t) + v;
  } else {
    comp += (v - t) + sum;
  }
  sum = t;
}

}  // namespace

double raw_score(const Sdr& predicted_prev, const Sdr& actual) {
  if (actual.empty()) return 0.0;
  const size_t hits = overlap(predicted_prev, actual);
  return 1.0 - static_cast<double>(hits) / static_cast<double>(actual.size());
}

double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

void LikelihoodConfig::validate() const {
  if (long_window < 2 || short_window == 0 ||
      short_window > long_window / 10) {
    throw std::invalid_argument(
        "likelihood: need short_window <= long_window/10");
  }
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw std::invalid_argument("likelihood: epsilon must be in (0,1)");
  }
  if (!(min_variance_floor > 0.0)) {
    throw std::invalid_argument("likelihood: variance floor must be > 0");
  }
}

AnomalyLikelihood::AnomalyLikelihood(LikelihoodConfig cfg) : cfg_(cfg) {
  cfg_.validate();
  long_ring_.reserve(cfg_.long_window);
  short_ring_.reserve(cfg_.short_window);
}

void AnomalyLikelihood::recompute_sums() {
  sum_ = sum_c_ = sumsq_ = sumsq_c_ = 0.0;
  for (double v : long_ring_) {
    neumaier_add(sum_, sum_c_, v);
    neumaier_add(sumsq_, sumsq_c_, v * v);
  }
  short_sum_ = short_sum_c_ = 0.0;
  for (double v : short_ring_) neumaier_add(short_sum_, short_sum_c_, v);
  pushes_since_recompute_ = 0;
}

LikelihoodUpdate AnomalyLikelihood::update(double score) {
  if (!std::isfinite(score)) {
    throw std::invalid_argument("likelihood: non-finite raw score");
  }

  if (long_ring_.size() == cfg_.long_window) {
    const size_t slot = total_count_ % cfg_.long_window;
    const double old = long_ring_[slot];
    neumaier_add(sum_, sum_c_, -old);
    neumaier_add(sumsq_, sumsq_c_, -old * old);
    long_ring_[slot] = score;
  } else {
    long_ring_.push_back(score);
  }
  neumaier_add(sum_, sum_c_, score);
  neumaier_add(sumsq_, sumsq_c_, score * score);

  if (short_ring_.size() == cfg_.short_window) {
    const size_t slot = total_count_ % cfg_.short_window;
    neumaier_add(short_sum_, short_sum_c_, -short_ring_[slot]);
    short_ring_[slot] = score;
  } else {
    short_ring_.push_back(score);
  }
  neumaier_add(short_sum_, short_sum_c_, score);

  ++total_count_;
  if (++pushes_since_recompute_ >= cfg_.long_window) recompute_sums();

  const auto k = static_cast<double>(long_ring_.size());
  const double sum = sum_ + sum_c_;
  const double sumsq = sumsq_ + sumsq_c_;
  const double mean = sum / k;

  LikelihoodUpdate out;
  out.dist.count = long_ring_.size();
  out.dist.mean = mean;
  out.short_mean =
      (short_sum_ + short_sum_c_) / static_cast<double>(short_ring_.size());

  if (long_ring_.size() < std::max<size_t>(cfg_.warmup_min, 2)) {
    out.dist.variance = cfg_.min_variance_floor;
    return out;  // undefined-variance regime: neutral 0.5
  }

  double variance = (sumsq - sum * mean) / (k - 1.0);
  variance = std::max(variance, cfg_.min_variance_floor);
  out.dist.variance = variance;

  out.zscore = (out.short_mean - mean) / std::sqrt(variance);
  out.tail_probability = q_function(out.zscore);
  out.likelihood = 1.0 - out.tail_probability;
  return out;
}

DistributionEstimate AnomalyLikelihood::distribution() const {
  DistributionEstimate d;
  d.count = long_ring_.size();
  if (d.count == 0) return d;
  const double sum = sum_ + sum_c_;
  const auto k = static_cast<double>(d.count);
  d.mean = sum / k;
  if (d.count >= 2) {
    d.variance = std::max(((sumsq_ + sumsq_c_) - sum * d.mean) / (k - 1.0),
                          cfg_.min_variance_floor);
  } else {
    d.variance = cfg_.min_variance_floor;
  }
  return d;
}

bool likelihood_flag(double likelihood, const LikelihoodConfig& cfg,
                     bool in_probation) {
  return !in_probation && likelihood >= 1.0 - cfg.epsilon;
}

}  // namespace streamad
