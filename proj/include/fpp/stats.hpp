#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace fpp::stats {

inline constexpr double kZ95 = 1.959963984540054;

struct MeanEstimate {
  std::size_t count = 0;
  double mean = 0.0;
  double stddev = 0.0;    // sample standard deviation
  double half_width = 0.0;  // 95% normal-approximation half width

  double lower() const { return mean - half_width; }
  double upper() const { return mean + half_width; }
};

inline MeanEstimate mean_ci(std::span<const double> xs) {
  MeanEstimate e;
  e.count = xs.size();
  if (xs.empty()) {
    e.mean = std::numeric_limits<double>::quiet_NaN();
    return e;
  }
  // Welford, summed in input order so results are reproducible bit for bit
  double mean = 0.0, m2 = 0.0;
  std::size_t k = 0;
  for (double x : xs) {
    ++k;
    const double d = x - mean;
    mean += d / static_cast<double>(k);
    m2 += d * (x - mean);
  }
  e.mean = mean;
  if (xs.size() > 1) {
    e.stddev = std::sqrt(m2 / static_cast<double>(xs.size() - 1));
    e.half_width = kZ95 * e.stddev / std::sqrt(static_cast<double>(xs.size()));
  }
  return e;
}

struct Proportion {
  std::size_t successes = 0;
  std::size_t trials = 0;

  double value() const { return trials ? static_cast<double>(successes) / static_cast<double>(trials) : 0.0; }
  double standard_error() const {
    if (!trials) return 0.0;
    const double f = value();
    return std::sqrt(f * (1.0 - f) / static_cast<double>(trials));
  }
};

struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  std::size_t points = 0;
};

// Weighted least squares for y = intercept + slope * x.
inline LineFit weighted_line_fit(std::span<const double> x, std::span<const double> y, std::span<const double> w) {
  if (x.size() != y.size() || x.size() != w.size()) throw std::invalid_argument("weighted_line_fit: size mismatch");
  if (x.size() < 2) throw std::invalid_argument("weighted_line_fit: need at least two points");
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
  }
  const double mx = sx / sw, my = sy / sw;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += w[i] * (x[i] - mx) * (x[i] - mx);
    sxy += w[i] * (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0) throw std::invalid_argument("weighted_line_fit: degenerate abscissae");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.points = x.size();
  return f;
}

struct ExponentialFit {
  double alpha1 = 0.0;  // prefactor
  double alpha2 = 0.0;  // decay rate
  std::size_t points = 0;
};

// Fits freq ~ alpha1 * exp(-alpha2 * norm) by weighted least squares on log
// frequencies. Weights are inverse delta-method variances of log(freq),
// Var ~ (1 - f) / (N f), with (1 - f) floored at 1/(2N) so that rows with
// f = 1 keep a finite weight. Zero-frequency rows must be removed by the caller.
inline ExponentialFit fit_exponential_tail(std::span<const double> norms, std::span<const Proportion> freqs) {
  std::vector<double> x, y, w;
  for (std::size_t i = 0; i < norms.size(); ++i) {
    const double f = freqs[i].value();
    if (f <= 0.0) continue;
    const double n = static_cast<double>(freqs[i].trials);
    const double var = std::max(1.0 - f, 0.5 / n) / (n * f);
    x.push_back(norms[i]);
    y.push_back(std::log(f));
    w.push_back(1.0 / var);
  }
  const LineFit lf = weighted_line_fit(x, y, w);
  return ExponentialFit{std::exp(lf.intercept), -lf.slope, lf.points};
}

}  // namespace fpp::stats
