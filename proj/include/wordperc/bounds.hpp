#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "wordperc/common.hpp"

// Closed-form bounds used to sanity-check Monte Carlo output, plus a
// least-squares decay-rate fit.  Everything here is a pure function.

namespace wordperc {

// ((1 - beta + beta e^t)^8 / e^{4t})^m, an upper bound on the probability
// that a Bin(8m, beta) variable exceeds 4m, for any t >= 0.
inline double chernoff(double beta, double t, std::uint64_t m) {
  if (beta < 0.0 || beta > 1.0) throw std::invalid_argument("chernoff: beta must be a probability");
  if (m == 0) throw std::invalid_argument("chernoff: m must be positive");
  const double base = std::pow(1.0 - beta + beta * std::exp(t), 8.0) / std::exp(4.0 * t);
  return std::pow(base, double(m));
}

// P(Bin(n, beta) > k), strict tail, by stable per-term log-space summation.
inline double exact_binom_tail(std::uint64_t n, double beta, std::uint64_t k) {
  if (n > 10'000) throw std::invalid_argument("exact_binom_tail: n must be <= 10^4");
  if (k > n) return 0.0;
  if (beta < 0.0 || beta > 1.0) throw std::invalid_argument("exact_binom_tail: beta must be a probability");
  if (beta <= 0.0) return 0.0;
  if (beta >= 1.0) return k < n ? 1.0 : 0.0;
  const double lb = std::log(beta), l1b = std::log1p(-beta), lnf = std::lgamma(double(n) + 1.0);
  double sum = 0.0;
  for (std::uint64_t j = k + 1; j <= n; ++j) {
    const double lt = lnf - std::lgamma(double(j) + 1.0) - std::lgamma(double(n - j) + 1.0) + double(j) * lb +
                      double(n - j) * l1b;
    sum += std::exp(lt);
  }
  return std::min(sum, 1.0);
}

// Bond density q with 1 - gamma = (1 - q)^2.
inline double q_of_gamma(double gamma) {
  if (gamma < 0.0 || gamma > 1.0) throw std::invalid_argument("q_of_gamma: gamma must be a probability");
  return 1.0 - std::sqrt(1.0 - gamma);
}

// (c (1 - q))^{m/2}; c stays a free parameter.
inline double contour_bound_shape(double c, double q, std::uint64_t m) {
  if (c <= 0.0) throw std::invalid_argument("contour_bound_shape: c must be positive");
  if (q < 0.0 || q > 1.0) throw std::invalid_argument("contour_bound_shape: q must be a probability");
  if (m == 0) throw std::invalid_argument("contour_bound_shape: m must be positive");
  return std::pow(c * (1.0 - q), double(m) / 2.0);
}

// Total failure budget sum_{m >= 1} (2^32 a)^m.  Divergence is an outcome,
// not an error.
struct UnionBudget {
  bool divergent = false;
  double value = 0.0;  // meaningful only when finite
};

inline UnionBudget union_budget(double a) {
  if (a <= 0.0) throw std::invalid_argument("union_budget: a must be positive");
  const double x = std::ldexp(a, 32);
  if (x >= 1.0) return {true, 0.0};
  return {false, x / (1.0 - x)};
}

// Least-squares line through (m, log estimate); a_hat = exp(slope).
// Zero estimates carry no log and are dropped, and the drop is reported.
struct DecayFit {
  std::vector<std::pair<double, double>> points;  // the points actually fitted
  std::vector<double> dropped_ms;                 // m values whose estimate was zero
  double a_hat = 0.0;
  double r2 = 0.0;
};

inline DecayFit fit_decay(const std::vector<std::pair<double, double>>& points) {
  DecayFit fit;
  for (const auto& [m, est] : points) {
    if (est < 0.0) throw std::invalid_argument("fit_decay: negative estimate");
    if (est == 0.0)
      fit.dropped_ms.push_back(m);
    else
      fit.points.push_back({m, est});
  }
  if (fit.points.empty()) throw ConfigError("fit_decay: rate indistinguishable from 0");
  if (fit.points.size() < 2) throw ConfigError("fit_decay: need at least 2 nonzero estimates");
  double sx = 0, sy = 0;
  for (const auto& [x, y] : fit.points) {
    sx += x;
    sy += std::log(y);
  }
  const double n = double(fit.points.size());
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& [x, y] : fit.points) {
    const double dx = x - mx, dy = std::log(y) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw ConfigError("fit_decay: all points share one m value");
  const double slope = sxy / sxx;
  fit.a_hat = std::exp(slope);
  double ss_res = 0;
  for (const auto& [x, y] : fit.points) {
    const double r = std::log(y) - (my + slope * (x - mx));
    ss_res += r * r;
  }
  fit.r2 = syy == 0.0 ? 1.0 : 1.0 - ss_res / syy;
  return fit;
}

}  // namespace wordperc
