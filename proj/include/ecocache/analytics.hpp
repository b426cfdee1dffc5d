// Analytic successful-transmission probabilities and ergodic service rates.
//
// The SBS cluster expressions condition on the vector of serving distances;
// the remaining distance integral has dimension equal to the cluster size, so
// it is evaluated by Monte Carlo with inverse-CDF annulus sampling.  The MBS
// expressions reduce to one- and two-dimensional quadrature.
#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ecocache/geometry.hpp"
#include "ecocache/quadrature.hpp"
#include "ecocache/rng.hpp"
#include "ecocache/threading.hpp"

namespace ecocache {

struct McSettings {
  std::uint64_t seed = 1;
  std::size_t samples = 20000;
};

struct QuadSettings {
  double tol_outer = 1e-8;
  double tol_inner = 1e-9;
};

namespace detail {

// pi * lambda * (k1 s)^{2/a} * G_a(d_out^2 * (k1 s)^{-2/a}): the exponent of
// the interference Laplace transform seen by a cluster with outer radius
// d_out, evaluated at SIR threshold s.
inline double sbs_laplace_exponent(double k1_times_s, double d_out,
                                   double lambda, double alpha) {
  if (k1_times_s <= 0.0) return 0.0;
  const double z = std::pow(k1_times_s, 2.0 / alpha);
  return std::numbers::pi * lambda * z * g_tail(alpha, d_out * d_out / z);
}

// g(t) = t^{2/a} G_a(t^{-2/a}); the MBS interference exponent per unit
// pi*lambda*x^2.  Closed form at a = 4, memoized quadrature otherwise (the
// adaptive rules revisit dyadic nodes, so the cache hits are real).
class MbsExponent {
 public:
  explicit MbsExponent(double alpha) : alpha_(alpha) {}

  double operator()(double t) {
    if (t <= 0.0) return 0.0;
    if (alpha_ == 4.0) {
      const double s = std::sqrt(t);
      return s * std::atan(s);
    }
    const std::uint64_t key = std::bit_cast<std::uint64_t>(t);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    const double z = std::pow(t, 2.0 / alpha_);
    const double v = z * g_tail(alpha_, 1.0 / z);
    cache_.emplace(key, v);
    return v;
  }

 private:
  double alpha_;
  std::unordered_map<std::uint64_t, double> cache_;
};

// Inverse-CDF draw from the annulus distance density 2x/(d_out^2 - d_in^2),
// u in (0,1].  Distances of exactly zero are clamped away from the path-loss
// singularity.
inline double annulus_distance(double u, double d_in, double d_out) {
  const double x =
      std::sqrt(d_in * d_in + u * (d_out * d_out - d_in * d_in));
  return x > 1e-9 ? x : 1e-9;
}

inline McEstimate reduce_mc(const std::vector<double>& sums,
                            const std::vector<double>& sq_sums,
                            std::size_t n) {
  double sum = 0.0;
  double sq = 0.0;
  for (std::size_t c = 0; c < sums.size(); ++c) {
    sum += sums[c];
    sq += sq_sums[c];
  }
  McEstimate est;
  est.samples = n;
  est.mean = sum / static_cast<double>(n);
  if (n > 1) {
    const double var =
        (sq - sum * sum / static_cast<double>(n)) / static_cast<double>(n - 1);
    est.half_width_95 = 1.96 * std::sqrt(std::max(0.0, var) / static_cast<double>(n));
  }
  return est;
}

}  // namespace detail

// Conditional STP of a cooperative SBS cluster given its serving distances.
// The cluster is identified as the innermost annulus containing all of them.
inline double conditional_stp_sbs(std::span<const double> distances,
                                  double gamma, const NetworkGeometry& geo) {
  if (distances.empty()) {
    throw std::invalid_argument("conditional_stp_sbs: no distances");
  }
  double max_d = 0.0;
  double inv_sum = 0.0;
  for (double x : distances) {
    if (!(x > 0.0)) {
      throw std::invalid_argument("conditional_stp_sbs: distances must be > 0");
    }
    max_d = std::max(max_d, x);
    inv_sum += std::pow(x, -geo.sbs_pathloss);
  }
  std::size_t k = geo.cluster_count();
  for (std::size_t i = 0; i < geo.cluster_count(); ++i) {
    if (max_d <= geo.cluster_radii[i]) {
      k = i;
      break;
    }
  }
  if (k == geo.cluster_count()) {
    throw std::invalid_argument(
        "conditional_stp_sbs: distance beyond the outermost cluster radius");
  }
  if (gamma <= 0.0) return 1.0;
  const double k1 = 1.0 / inv_sum;
  return std::exp(-detail::sbs_laplace_exponent(
      k1 * gamma, geo.outer_radius(k), geo.sbs_density, geo.sbs_pathloss));
}

// Closed-form MBS STP; the MBS density cancels out.
inline double stp_mbs(double gamma_m, double alpha_m) {
  if (!(alpha_m > 2.0)) {
    throw std::invalid_argument("stp_mbs: path loss exponent must be > 2");
  }
  if (gamma_m <= 0.0) return 1.0;
  const double z = std::pow(gamma_m, 2.0 / alpha_m);
  return 1.0 / (z * g_tail(alpha_m, 1.0 / z) + 1.0);
}

// STP of cluster k (0-based): Monte Carlo over the serving distances.
inline McEstimate stp_sbs_cluster(std::size_t k, double gamma_s,
                                  const NetworkGeometry& geo, McSettings mc) {
  if (k >= geo.cluster_count()) {
    throw std::invalid_argument("stp_sbs_cluster: cluster index out of range");
  }
  if (mc.samples < 1000) {
    throw std::invalid_argument("stp_sbs_cluster: needs >= 1000 samples");
  }
  const std::size_t n = mc.samples;
  const int size = geo.cluster_size(k);
  const double d_in = geo.inner_radius(k);
  const double d_out = geo.outer_radius(k);
  const std::uint64_t base = derive_seed(mc.seed, "stp_sbs_cluster", k);

  const std::size_t chunk = 4096;
  const std::size_t chunks = chunk_count(n, chunk);
  std::vector<double> sums(chunks, 0.0), sqs(chunks, 0.0);
  for_each_chunk(n, chunk, [&](std::size_t c, std::size_t b, std::size_t e) {
    double s = 0.0, s2 = 0.0;
    std::vector<double> x(size);
    for (std::size_t i = b; i < e; ++i) {
      SplitMix64 rng(derive_seed(base, "sample", i));
      double inv_sum = 0.0;
      for (int j = 0; j < size; ++j) {
        x[j] = detail::annulus_distance(uniform01_open(rng), d_in, d_out);
        inv_sum += std::pow(x[j], -geo.sbs_pathloss);
      }
      const double v =
          gamma_s <= 0.0
              ? 1.0
              : std::exp(-detail::sbs_laplace_exponent(
                    gamma_s / inv_sum, d_out, geo.sbs_density, geo.sbs_pathloss));
      s += v;
      s2 += v * v;
    }
    sums[c] = s;
    sqs[c] = s2;
  });
  return detail::reduce_mc(sums, sqs, n);
}

namespace detail {

// Conditional-rate tail integrals \int_gamma^inf ratio(t)/(1+t) dt are
// integrated in the rate variable y = log2(1+t): the integrand becomes the
// CCDF ratio itself, a smooth monotone decay from 1, and the substitution
// Jacobian cancels the 1/(1+t) factor up to ln 2.  (The rational map
// s = (t-gamma)/(1+t-gamma) squeezes the slowly decaying tail into a tall
// spike at s -> 1 that bisection-based rules cannot see.)  `y_max` must be
// chosen so the ratio is negligible beyond it.
template <typename Ratio>
double rate_tail_integral(double gamma, double y_max, double tol,
                          const Ratio& ratio) {
  const double y0 = std::log2(1.0 + gamma);
  if (y_max <= y0) return 0.0;
  const auto f = [&](double y) { return ratio(std::exp2(y) - 1.0); };
  const double abs_tol = tol * std::max(1.0, y_max - y0);
  return std::numbers::ln2 * adaptive_simpson(f, y0, y_max, abs_tol);
}

}  // namespace detail

// Ergodic service rate of the nearest MBS as the nested conditional-rate integral.
// Outer variable u = pi*lambda*x^2 (standard exponential by the void
// probability), integrated on a log grid because the inner integral grows
// like log(1/u) as u -> 0; inner variable as in rate_tail_integral.
inline double esr_mbs(const NetworkGeometry& geo, QuadSettings quad = {}) {
  const double gamma = geo.qos_mbs;
  const double alpha = geo.mbs_pathloss;
  const double w = geo.mbs_bandwidth_hz;
  detail::MbsExponent g(geo.mbs_pathloss);
  const double g_gamma = g(gamma);
  const double g_at_1 = g_tail(alpha, 1.0);  // g(t) >= G_a(1) t^{2/a}, t >= 1

  const double u_min = 1e-12;  // neglected head is below u_min * log(1/u_min)
  const double u_max = 50.0;
  // One shared inner domain keeps the adaptive nodes (and the g memo) aligned
  // across outer evaluations; past each u's own cutoff the ratio is ~e^{-46}.
  const double t_global =
      std::max(gamma + 1.0,
               std::pow((g_gamma + 46.0 / u_min) / g_at_1, 0.5 * alpha));
  const double y_global = std::log2(1.0 + t_global);

  const auto inner = [&](double u) {
    return detail::rate_tail_integral(
        gamma, y_global, quad.tol_inner,
        [&](double t) { return std::exp(-u * (g(t) - g_gamma)); });
  };
  const auto outer_log = [&](double z) {
    const double u = std::exp(z);
    return u * std::exp(-u) * inner(u);
  };
  const double integral = adaptive_simpson(
      outer_log, std::log(u_min), std::log(u_max), quad.tol_outer);
  return w * std::log2(1.0 + gamma) + w / std::numbers::ln2 * integral;
}

// Ergodic service rate of cluster k (0-based): Monte Carlo over distances of
// the inner conditional-rate integral.
inline McEstimate esr_sbs_cluster(std::size_t k, const NetworkGeometry& geo,
                                  McSettings mc, QuadSettings quad = {}) {
  if (k >= geo.cluster_count()) {
    throw std::invalid_argument("esr_sbs_cluster: cluster index out of range");
  }
  if (mc.samples < 1000) {
    throw std::invalid_argument("esr_sbs_cluster: needs >= 1000 samples");
  }
  const double gamma = geo.qos_sbs;
  const double w = geo.sbs_bandwidth_hz;
  const double scale = w / std::numbers::ln2;
  const double base_rate = w * std::log2(1.0 + gamma);
  const std::size_t n = mc.samples;
  const int size = geo.cluster_size(k);
  const double d_in = geo.inner_radius(k);
  const double d_out = geo.outer_radius(k);
  const std::uint64_t base = derive_seed(mc.seed, "esr_sbs_cluster", k);

  const std::size_t chunk = 1024;
  const std::size_t chunks = chunk_count(n, chunk);
  std::vector<double> sums(chunks, 0.0), sqs(chunks, 0.0);
  for_each_chunk(n, chunk, [&](std::size_t c, std::size_t b, std::size_t e) {
    double s = 0.0, s2 = 0.0;
    std::vector<double> x(size);
    for (std::size_t i = b; i < e; ++i) {
      SplitMix64 rng(derive_seed(base, "sample", i));
      double inv_sum = 0.0;
      for (int j = 0; j < size; ++j) {
        x[j] = detail::annulus_distance(uniform01_open(rng), d_in, d_out);
        inv_sum += std::pow(x[j], -geo.sbs_pathloss);
      }
      const double k1 = 1.0 / inv_sum;
      const double alpha = geo.sbs_pathloss;
      const double e_gamma = detail::sbs_laplace_exponent(
          k1 * gamma, d_out, geo.sbs_density, geo.sbs_pathloss);
      // Truncation: for k1 t >= d_out^alpha the Laplace exponent is at least
      // pi*lambda*G_a(1)*(k1 t)^{2/a}, so the ratio is ~e^{-46} past t_max.
      const double floor_coeff =
          std::numbers::pi * geo.sbs_density * g_tail(alpha, 1.0) *
          std::pow(k1, 2.0 / alpha);
      const double t_max = std::max(
          std::pow(d_out, alpha) / k1,
          std::pow((46.0 + e_gamma) / floor_coeff, 0.5 * alpha));
      const double v =
          scale * detail::rate_tail_integral(
                      gamma, std::log2(1.0 + t_max), quad.tol_inner,
                      [&](double t) {
                        const double e_t = detail::sbs_laplace_exponent(
                            k1 * t, d_out, geo.sbs_density, geo.sbs_pathloss);
                        return std::exp(-(e_t - e_gamma));
                      });
      s += v;
      s2 += v * v;
    }
    sums[c] = s;
    sqs[c] = s2;
  });
  McEstimate est = detail::reduce_mc(sums, sqs, n);
  est.mean += base_rate;
  return est;
}

// Rates consumed by the economics: one ESR per cluster plus the nearest-MBS
// ESR (quadrature, so its half-width is zero).
struct RateTable {
  std::vector<McEstimate> cluster_rates;
  McEstimate mbs_rate;
};

inline RateTable build_rate_table(const NetworkGeometry& geo, McSettings mc,
                                  QuadSettings quad = {}) {
  RateTable t;
  t.cluster_rates.reserve(geo.cluster_count());
  for (std::size_t k = 0; k < geo.cluster_count(); ++k) {
    t.cluster_rates.push_back(esr_sbs_cluster(k, geo, mc, quad));
  }
  t.mbs_rate.mean = esr_mbs(geo, quad);
  t.mbs_rate.half_width_95 = 0.0;
  t.mbs_rate.samples = 1;
  return t;
}

}  // namespace ecocache
