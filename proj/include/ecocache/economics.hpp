// The economic model: four-part power consumption, logarithmic revenue,
// monetary cost, and the economical efficiency (ECE) they combine into.
//
// Conventions shared with the optimizer:
//  - layer caching indicators live in a flat F x L x K tensor, f-major;
//  - the l0-norm of an aggregate is indicator(value > kL0Threshold);
//  - an uncached layer pays backhaul once per cluster (the K-fold sum is in
//    the model and is kept literally).
#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ecocache/analytics.hpp"
#include "ecocache/catalog.hpp"
#include "ecocache/geometry.hpp"

namespace ecocache {

inline constexpr double kL0Threshold = 1e-9;

struct EconomicModel {
  double zeta_s = 4.0;  // amplifier inefficiency, SBS
  double zeta_m = 4.0;  // amplifier inefficiency, MBS
  double p_fix_s_w = 6.8;
  double p_fix_m_w = 30.0;
  double cache_coeff_w_per_bit = 6.25e-12;    // c_ca
  double backhaul_coeff_w_per_bit = 5e-4;     // c_bh
  double price_energy = 3.87e-4;              // k_c, CNY/J
  double price_rate = 1.41e-8;                // k_r, CNY/bit
};

class Placement {
 public:
  Placement(std::size_t files, std::size_t layers, std::size_t clusters)
      : files_(files),
        layers_(layers),
        clusters_(clusters),
        x_(files * layers * clusters, 0) {}

  std::size_t file_count() const { return files_; }
  std::size_t layer_count() const { return layers_; }
  std::size_t cluster_count() const { return clusters_; }

  bool cached(std::size_t f, std::size_t l, std::size_t k) const {
    return x_[index(f, l, k)] != 0;
  }
  void set(std::size_t f, std::size_t l, std::size_t k, bool value) {
    x_[index(f, l, k)] = value ? 1 : 0;
  }
  // Cluster holding layer (f, l), or npos.
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t cluster_of(std::size_t f, std::size_t l) const {
    for (std::size_t k = 0; k < clusters_; ++k) {
      if (cached(f, l, k)) return k;
    }
    return npos;
  }

  std::size_t cached_count() const {
    std::size_t n = 0;
    for (auto v : x_) n += v;
    return n;
  }

  std::vector<double> cluster_budgets;  // bits per SBS, one per cluster
  double total_budget = 0.0;            // bits, network-wide

  std::size_t index(std::size_t f, std::size_t l, std::size_t k) const {
    return (f * layers_ + l) * clusters_ + k;
  }

 private:
  std::size_t files_, layers_, clusters_;
  std::vector<std::uint8_t> x_;
};

struct PowerBreakdown {
  double transmit_w = 0.0;
  double caching_w = 0.0;
  double backhaul_w = 0.0;
  double fixed_w = 0.0;
  double total_w = 0.0;
};

namespace detail {
inline void check_shapes(const Placement& p, const Catalog& cat,
                         const NetworkGeometry& geo) {
  if (p.file_count() != cat.file_count() ||
      p.layer_count() != cat.layer_count() ||
      p.cluster_count() != geo.cluster_count()) {
    throw std::invalid_argument("economics: placement/catalog/geometry shapes differ");
  }
}
}  // namespace detail

inline PowerBreakdown power_breakdown(const Placement& p, const Catalog& cat,
                                      const NetworkGeometry& geo,
                                      const EconomicModel& econ) {
  detail::check_shapes(p, cat, geo);
  const std::size_t F = cat.file_count();
  const std::size_t L = cat.layer_count();
  const std::size_t K = geo.cluster_count();

  PowerBreakdown out;
  out.transmit_w = econ.zeta_m * geo.mbs_power_w;
  out.fixed_w = econ.p_fix_m_w;
  for (std::size_t k = 0; k < K; ++k) {
    const double sk = static_cast<double>(geo.cluster_size(k));
    double mass = 0.0;  // sum_f sum_l p_f(l) x_{f,l,k}
    for (std::size_t f = 0; f < F; ++f) {
      for (std::size_t l = 0; l < L; ++l) {
        if (!p.cached(f, l, k)) continue;
        mass += cat.layer_probability(f, l);
        out.caching_w += econ.cache_coeff_w_per_bit * cat.layer_size(f, l) * sk;
      }
    }
    if (mass > kL0Threshold) {
      out.transmit_w += sk * econ.zeta_s * geo.sbs_power_w;
      out.fixed_w += sk * econ.p_fix_s_w;
    }
    for (std::size_t f = 0; f < F; ++f) {
      for (std::size_t l = 0; l < L; ++l) {
        if (p.cached(f, l, k)) continue;
        out.backhaul_w += cat.layer_probability(f, l) *
                          econ.backhaul_coeff_w_per_bit * cat.layer_size(f, l);
      }
    }
  }
  out.total_w = out.transmit_w + out.caching_w + out.backhaul_w + out.fixed_w;
  return out;
}

// Revenue constant R_0: the MBS serves every layer of every cluster slot.
inline double revenue_constant(const NetworkGeometry& geo,
                               const EconomicModel& econ,
                               const RateTable& rates) {
  const double ref_m = geo.ref_rate_mbs();
  return static_cast<double>(geo.cluster_count()) * econ.price_rate * ref_m *
         std::log2(1.0 + rates.mbs_rate.mean / ref_m);
}

inline double revenue(const Placement& p, const Catalog& cat,
                      const RateTable& rates, const EconomicModel& econ,
                      const NetworkGeometry& geo) {
  detail::check_shapes(p, cat, geo);
  if (rates.cluster_rates.size() != geo.cluster_count() ||
      rates.mbs_rate.samples == 0) {
    throw std::invalid_argument("revenue: rate table is missing entries");
  }
  const double ref_s = geo.ref_rate_sbs();
  const double ref_m = geo.ref_rate_mbs();
  const double mbs_term = ref_m * std::log2(1.0 + rates.mbs_rate.mean / ref_m);

  double acc = 0.0;
  for (std::size_t k = 0; k < geo.cluster_count(); ++k) {
    const double sbs_term =
        ref_s * std::log2(1.0 + rates.cluster_rates[k].mean / ref_s);
    for (std::size_t f = 0; f < cat.file_count(); ++f) {
      for (std::size_t l = 0; l < cat.layer_count(); ++l) {
        if (p.cached(f, l, k)) {
          acc += cat.layer_probability(f, l) * (sbs_term - mbs_term);
        }
      }
    }
  }
  return econ.price_rate * acc + revenue_constant(geo, econ, rates);
}

// Cost constant C_0: power drawn with nothing cached anywhere.
inline double cost_constant(const Catalog& cat, const NetworkGeometry& geo,
                            const EconomicModel& econ) {
  double backhaul = 0.0;
  for (std::size_t f = 0; f < cat.file_count(); ++f) {
    for (std::size_t l = 0; l < cat.layer_count(); ++l) {
      backhaul += cat.layer_probability(f, l) * econ.backhaul_coeff_w_per_bit *
                  cat.layer_size(f, l);
    }
  }
  return econ.price_energy *
         (static_cast<double>(geo.cluster_count()) * backhaul +
          econ.zeta_m * geo.mbs_power_w + econ.p_fix_m_w);
}

inline double total_cost(const Placement& p, const Catalog& cat,
                         const NetworkGeometry& geo,
                         const EconomicModel& econ) {
  return econ.price_energy * power_breakdown(p, cat, geo, econ).total_w;
}

inline double ece(const Placement& p, const Catalog& cat,
                  const NetworkGeometry& geo, const EconomicModel& econ,
                  const RateTable& rates) {
  return revenue(p, cat, rates, econ, geo) - total_cost(p, cat, geo, econ);
}

// Marginal economical gain z_{f,l,k} of caching layer (f, l) in cluster k,
// evaluated at the relaxed indicator x_tilde in [0, 1].
inline double marginal_ece(std::size_t f, std::size_t l, std::size_t k,
                           double x_tilde, const Catalog& cat,
                           const NetworkGeometry& geo,
                           const EconomicModel& econ, const RateTable& rates) {
  if (x_tilde < 0.0 || x_tilde > 1.0) {
    throw std::invalid_argument("marginal_ece: x_tilde must lie in [0, 1]");
  }
  const double p = cat.layer_probability(f, l);
  const double c = cat.layer_size(f, l);
  const double sk = static_cast<double>(geo.cluster_size(k));
  const double ref_s = geo.ref_rate_sbs();
  const double ref_m = geo.ref_rate_mbs();
  const double a_k = ref_s * std::log2(1.0 + rates.cluster_rates[k].mean / ref_s);
  const double b = ref_m * std::log2(1.0 + rates.mbs_rate.mean / ref_m);

  const double gain = econ.price_rate * p * (x_tilde * (a_k - b) + b);
  const double active = (p * x_tilde > kL0Threshold) ? 1.0 : 0.0;
  const double cost =
      econ.price_energy *
      (active * sk * (econ.zeta_s * geo.sbs_power_w + econ.p_fix_s_w) +
       x_tilde * c *
           (econ.cache_coeff_w_per_bit * sk - p * econ.backhaul_coeff_w_per_bit) +
       c * p * econ.backhaul_coeff_w_per_bit);
  return gain - cost;
}

}  // namespace ecocache
