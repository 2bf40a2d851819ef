#include "phi4/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "phi4/error.hpp"
#include "phi4/rng.hpp"

namespace phi4 {

double SampleSummary::quantile(double q) const {
  if (sorted.empty()) throw DomainError("quantile of an empty sample");
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(sorted.size() - 1);
  const auto i = static_cast<std::size_t>(pos);
  if (i + 1 >= sorted.size()) return sorted.back();
  const double f = pos - static_cast<double>(i);
  return (1.0 - f) * sorted[i] + f * sorted[i + 1];
}

SampleSummary summarize(const std::vector<double>& values, std::size_t censored_count) {
  if (values.empty()) throw DomainError("summary of an empty sample");
  SampleSummary s;
  s.count = values.size();
  s.censored_count = censored_count;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.count);
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.variance = s.count > 1 ? ss / static_cast<double>(s.count - 1) : 0.0;
  s.sorted = values;
  std::sort(s.sorted.begin(), s.sorted.end());
  return s;
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw DomainError("KS statistic of an empty sample");
  for (double v : samples) {
    if (!std::isfinite(v)) throw DomainError("KS statistic needs finite samples");
  }
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, static_cast<double>(i + 1) / n - f);
    d = std::max(d, f - static_cast<double>(i) / n);
  }
  return d;
}

double ks_critical_95(std::size_t n) { return 1.36 / std::sqrt(static_cast<double>(n)); }

std::function<double(double)> exponential_cdf(double rate) {
  return [rate](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-rate * x); };
}

Dispersion poisson_dispersion(const std::vector<std::size_t>& counts) {
  if (counts.empty()) throw DomainError("dispersion of an empty sample");
  Dispersion d;
  const double n = static_cast<double>(counts.size());
  double sum = 0.0;
  for (auto c : counts) sum += static_cast<double>(c);
  d.mean = sum / n;
  double ss = 0.0;
  for (auto c : counts) ss += (static_cast<double>(c) - d.mean) * (static_cast<double>(c) - d.mean);
  d.variance = counts.size() > 1 ? ss / (n - 1.0) : 0.0;
  if (d.mean > 0.0) {
    d.defined = true;
    d.value = d.variance / d.mean;
  }
  return d;
}

namespace {

void rate_from(const std::vector<double>& times, const std::vector<char>& censored,
               std::size_t& events, double& exposure) {
  events = 0;
  exposure = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    exposure += times[i];
    if (!censored[i]) ++events;
  }
}

}  // namespace

RateFit exp_rate_fit(const std::vector<double>& times, const std::vector<char>& censored,
                     const RateFitOptions& opts) {
  if (times.empty()) throw DomainError("rate fit of an empty sample");
  if (censored.size() != times.size()) throw DomainError("censoring flags do not match the sample");
  for (double t : times) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("rate fit needs nonnegative finite times");
  }
  RateFit fit;
  rate_from(times, censored, fit.events, fit.exposure);
  if (fit.events == 0 || !(fit.exposure > 0.0)) return fit;
  fit.defined = true;
  fit.rate = static_cast<double>(fit.events) / fit.exposure;
  if (opts.resamples == 0) {
    fit.lower = fit.upper = fit.rate;
    return fit;
  }
  Rng rng = replica_rng(opts.seed, 0);
  std::uniform_int_distribution<std::size_t> pick(0, times.size() - 1);
  std::vector<double> rates;
  rates.reserve(opts.resamples);
  std::vector<double> t(times.size());
  std::vector<char> c(times.size());
  for (std::size_t b = 0; b < opts.resamples; ++b) {
    for (std::size_t i = 0; i < times.size(); ++i) {
      const auto j = pick(rng);
      t[i] = times[j];
      c[i] = censored[j];
    }
    std::size_t ev;
    double ex;
    rate_from(t, c, ev, ex);
    rates.push_back(ex > 0.0 ? static_cast<double>(ev) / ex : 0.0);
  }
  const auto s = summarize(rates);
  const double tail = 0.5 * (1.0 - opts.level);
  fit.lower = s.quantile(tail);
  fit.upper = s.quantile(1.0 - tail);
  return fit;
}

RateFit exp_rate_fit(const std::vector<double>& times, const RateFitOptions& opts) {
  return exp_rate_fit(times, std::vector<char>(times.size(), 0), opts);
}

}  // namespace phi4
