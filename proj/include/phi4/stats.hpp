#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace phi4 {

struct SampleSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased; 0 for a single sample
  std::vector<double> sorted;
  std::size_t censored_count = 0;

  double quantile(double q) const;  // linear interpolation between order statistics
  double median() const { return quantile(0.5); }
};

SampleSummary summarize(const std::vector<double>& values, std::size_t censored_count = 0);

// sup |F_n - F| with the empirical CDF evaluated on both sides of each jump.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

// Asymptotic 95% critical value 1.36 / sqrt(n).
double ks_critical_95(std::size_t n);

std::function<double(double)> exponential_cdf(double rate);

struct Dispersion {
  double value = 0.0;
  bool defined = false;  // false when the mean is zero
  double mean = 0.0;
  double variance = 0.0;
};

// Sample variance over sample mean.
Dispersion poisson_dispersion(const std::vector<std::size_t>& counts);

struct RateFit {
  double rate = 0.0;
  double lower = 0.0;  // bootstrap percentile interval
  double upper = 0.0;
  std::size_t events = 0;
  double exposure = 0.0;
  bool defined = false;  // false without events
};

struct RateFitOptions {
  std::size_t resamples = 1000;
  double level = 0.95;
  std::uint64_t seed = 12345;
};

// Exponential MLE with right censoring: events / total exposure.
// censored[i] != 0 marks times[i] as a censoring time. Times may be zero
// (an event at the start) as long as the total exposure is positive.
RateFit exp_rate_fit(const std::vector<double>& times, const std::vector<char>& censored,
                     const RateFitOptions& opts = {});
RateFit exp_rate_fit(const std::vector<double>& times, const RateFitOptions& opts = {});

}  // namespace phi4
