#include "streamad/multi.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace streamad {
namespace {

constexpr double kNeutralQ = 0.5;
constexpr double kLogClamp = 1e-300;

double gaussian(double x, double sigma) {
  return std::exp(-x * x / (2.0 * sigma * sigma)) /
         (std::sqrt(2.0 * M_PI) * sigma);
}

}  // namespace

void MultiConfig::validate() const {
  if (!(sigma > 0.0)) {
    throw std::invalid_argument("multi: sigma must be > 0");
  }
  if (kernel_span < static_cast<int>(std::ceil(3.0 * sigma)) &&
      kernel_span != 0) {
    // span 0 is the documented degenerate kernel used to recover the
    // single-model likelihood.
    throw std::invalid_argument("multi: kernel_span must be >= ceil(3*sigma)");
  }
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw std::invalid_argument("multi: epsilon must be in (0,1)");
  }
}

double kernel_raw_mass(double sigma, int span) {
  double mass = 0.0;
  for (int j = 0; j <= span; ++j) mass += 2.0 * gaussian(j, sigma);
  return mass;
}

std::vector<double> kernel_weights(double sigma, int span) {
  if (!(sigma > 0.0) || span < 0) {
    throw std::invalid_argument("kernel_weights: need sigma > 0, span >= 0");
  }
  std::vector<double> w(static_cast<size_t>(span) + 1);
  for (int j = 0; j <= span; ++j) w[j] = 2.0 * gaussian(j, sigma);
  const double mass = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& x : w) x /= mass;
  return w;
}

ModelChannel::ModelChannel(int kernel_span) {
  if (kernel_span < 0) {
    throw std::invalid_argument("channel: kernel_span must be >= 0");
  }
  ring_.assign(static_cast<size_t>(kernel_span) + 1, kNeutralQ);
}

void ModelChannel::push(double tail_probability) {
  head_ = (head_ + ring_.size() - 1) % ring_.size();
  ring_[head_] = std::clamp(tail_probability, kLogClamp, 1.0 - 1e-16);
}

double ModelChannel::at_lag(int lag) const {
  return ring_[(head_ + static_cast<size_t>(lag)) % ring_.size()];
}

double smoothed_tail(const ModelChannel& channel,
                     std::span<const double> weights) {
  double acc = 0.0;
  for (size_t j = 0; j < weights.size(); ++j) {
    acc += weights[j] * channel.at_lag(static_cast<int>(j));
  }
  return acc;
}

double combined_likelihood(std::span<const ModelChannel> channels,
                           const MultiConfig& cfg,
                           std::vector<double>& smoothed_out) {
  if (channels.empty()) {
    throw std::invalid_argument("combined_likelihood: no model channels");
  }
  const auto weights = kernel_weights(cfg.sigma, cfg.kernel_span);
  smoothed_out.clear();
  smoothed_out.reserve(channels.size());
  double log_product = 0.0;
  for (const ModelChannel& ch : channels) {
    if (ch.span() != cfg.kernel_span) {
      throw std::invalid_argument(
          "combined_likelihood: channel span does not match kernel_span");
    }
    const double smoothed = smoothed_tail(ch, weights);
    smoothed_out.push_back(smoothed);
    log_product += std::log(std::max(smoothed, kLogClamp));
  }
  return 1.0 - std::exp(log_product);
}

double combined_likelihood(std::span<const ModelChannel> channels,
                           const MultiConfig& cfg) {
  std::vector<double> smoothed;
  return combined_likelihood(channels, cfg, smoothed);
}

bool multi_flag(double likelihood, const MultiConfig& cfg) {
  return likelihood >= 1.0 - cfg.epsilon;
}

}  // namespace streamad
