// Two-tier network geometry: SBS/MBS Poisson densities, path loss, the
// cooperative cluster annuli, and radio parameters shared by the analytics,
// the simulator and the economics.
#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace ecocache {

struct McEstimate {
  double mean = 0.0;
  double half_width_95 = 0.0;  // 1.96 * sample std / sqrt(samples)
  std::size_t samples = 0;     // 0 marks an undefined estimate
};

struct NetworkGeometry {
  double sbs_density = 0.0;   // points / m^2
  double mbs_density = 0.0;   // points / m^2
  double sbs_pathloss = 4.0;  // > 2
  double mbs_pathloss = 4.0;  // > 2

  std::vector<double> cluster_radii;  // d_1..d_K, strictly increasing, m
  std::vector<int> cluster_cum;       // cumulative S_1..S_K

  double sbs_power_w = 0.0;
  double mbs_power_w = 0.0;
  double sbs_bandwidth_hz = 0.0;
  double mbs_bandwidth_hz = 0.0;
  double qos_sbs = 1.0;  // linear SIR threshold
  double qos_mbs = 1.0;  // linear SIR threshold

  std::size_t cluster_count() const { return cluster_radii.size(); }

  // Inner/outer radius of the annulus of cluster k (0-based), d_0 = 0.
  double inner_radius(std::size_t k) const {
    return k == 0 ? 0.0 : cluster_radii[k - 1];
  }
  double outer_radius(std::size_t k) const { return cluster_radii[k]; }

  int cluster_size(std::size_t k) const {
    return k == 0 ? cluster_cum[0] : cluster_cum[k] - cluster_cum[k - 1];
  }

  double ref_rate_sbs() const {
    return sbs_bandwidth_hz * std::log2(1.0 + qos_sbs);
  }
  double ref_rate_mbs() const {
    return mbs_bandwidth_hz * std::log2(1.0 + qos_mbs);
  }

  void validate() const {
    if (!(sbs_density > 0.0) || !(mbs_density > 0.0)) {
      throw std::invalid_argument("geometry: densities must be > 0");
    }
    if (!(sbs_pathloss > 2.0) || !(mbs_pathloss > 2.0)) {
      throw std::invalid_argument(
          "geometry: path loss exponents must be > 2 (tail integral diverges)");
    }
    if (cluster_radii.empty() || cluster_radii.size() != cluster_cum.size()) {
      throw std::invalid_argument("geometry: need matching radii and counts");
    }
    double prev_r = 0.0;
    int prev_c = 0;
    for (std::size_t k = 0; k < cluster_radii.size(); ++k) {
      if (!(cluster_radii[k] > prev_r)) {
        throw std::invalid_argument(
            "geometry: cluster radii must be strictly increasing and > 0");
      }
      if (cluster_cum[k] <= prev_c) {
        throw std::invalid_argument(
            "geometry: cumulative cluster counts must be strictly increasing");
      }
      prev_r = cluster_radii[k];
      prev_c = cluster_cum[k];
    }
    if (!(sbs_power_w > 0.0) || !(mbs_power_w > 0.0) ||
        !(sbs_bandwidth_hz > 0.0) || !(mbs_bandwidth_hz > 0.0)) {
      throw std::invalid_argument("geometry: powers and bandwidths must be > 0");
    }
    if (!(qos_sbs > 0.0) || !(qos_mbs > 0.0)) {
      throw std::invalid_argument("geometry: QoS thresholds must be > 0");
    }
  }
};

// Build the cumulative counts from per-cluster sizes (the configuration
// convention) and validate.
inline std::vector<int> cumulative_counts(const std::vector<int>& per_cluster) {
  std::vector<int> cum;
  cum.reserve(per_cluster.size());
  int total = 0;
  for (int c : per_cluster) {
    if (c <= 0) {
      throw std::invalid_argument("geometry: per-cluster counts must be >= 1");
    }
    total += c;
    cum.push_back(total);
  }
  return cum;
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

}  // namespace ecocache
