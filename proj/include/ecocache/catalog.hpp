// Video catalog: Zipf request popularity, SDV/HDV quality preference, and the
// per-layer request probabilities driving all caching economics.
//
// Indices are 0-based throughout the code; the rank that enters the Zipf and
// preference formulas is (file index + 1).
#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace ecocache {

struct infeasible_catalog : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// p(f) = (f+1)^{-alpha} / sum_n (n+1)^{-alpha}, descending in f.
inline std::vector<double> zipf_probabilities(std::size_t file_count,
                                              double alpha) {
  if (file_count == 0) {
    throw std::invalid_argument("zipf_probabilities: file_count must be >= 1");
  }
  if (alpha < 0.0) {
    throw std::invalid_argument("zipf_probabilities: alpha must be >= 0");
  }
  std::vector<double> p(file_count);
  double denom = 0.0;
  for (std::size_t f = 0; f < file_count; ++f) {
    p[f] = std::pow(static_cast<double>(f + 1), -alpha);
    denom += p[f];
  }
  for (double& v : p) v /= denom;
  return p;
}

// SDV preference grows linearly with file rank: the most popular file is
// never requested in standard definition, the least popular always is.
inline double g_sdv(std::size_t f, std::size_t file_count) {
  if (file_count < 2) {
    throw std::invalid_argument("g_sdv: needs file_count >= 2");
  }
  return static_cast<double>(f) / static_cast<double>(file_count - 1);
}

inline double g_hdv(std::size_t f, std::size_t file_count) {
  return 1.0 - g_sdv(f, file_count);
}

// Request probability of layer l of file f.  Layer 0 is the base layer,
// requested by SDV users; enhancement layers split the HDV demand equally.
inline double layer_request_probability(std::size_t f, std::size_t l,
                                        std::size_t file_count,
                                        std::size_t layer_count,
                                        double alpha) {
  if (file_count < 2 || layer_count < 2) {
    throw std::invalid_argument(
        "layer_request_probability: needs file_count >= 2 and layer_count >= "
        "2 (preference denominators vanish otherwise)");
  }
  if (f >= file_count || l >= layer_count) {
    throw std::invalid_argument("layer_request_probability: index out of range");
  }
  const std::vector<double> p = zipf_probabilities(file_count, alpha);
  if (l == 0) return p[f] * g_sdv(f, file_count);
  return p[f] * g_hdv(f, file_count) / static_cast<double>(layer_count - 1);
}

struct CatalogConfig {
  std::size_t file_count = 100;
  std::size_t layer_count = 5;
  double zipf_alpha = 1.0;
  // Scalar file size replicated when per-file sizes are not given.
  double file_size_bits = 50e6;
  std::vector<double> file_sizes_bits;      // optional, per file
  std::vector<double> layer_min_sizes_bits; // optional, per layer
};

class Catalog {
 public:
  explicit Catalog(const CatalogConfig& cfg) {
    if (cfg.file_count < 2 || cfg.layer_count < 2) {
      throw std::invalid_argument("Catalog: needs F >= 2 and L >= 2");
    }
    file_count_ = cfg.file_count;
    layer_count_ = cfg.layer_count;
    zipf_alpha_ = cfg.zipf_alpha;

    file_sizes_ = cfg.file_sizes_bits;
    if (file_sizes_.empty()) {
      file_sizes_.assign(file_count_, cfg.file_size_bits);
    }
    if (file_sizes_.size() != file_count_) {
      throw std::invalid_argument("Catalog: file size list length != F");
    }
    for (double c : file_sizes_) {
      if (!(c > 0.0)) throw std::invalid_argument("Catalog: file sizes must be > 0");
    }

    double min_file_size = file_sizes_[0];
    for (double c : file_sizes_) min_file_size = std::min(min_file_size, c);

    layer_min_sizes_ = cfg.layer_min_sizes_bits;
    if (layer_min_sizes_.empty()) {
      // Half the equal split of the smallest file keeps every file feasible.
      layer_min_sizes_.assign(layer_count_,
                              min_file_size / (2.0 * layer_count_));
    }
    if (layer_min_sizes_.size() != layer_count_) {
      throw std::invalid_argument("Catalog: layer_min_sizes length != L");
    }
    double th_sum = 0.0;
    for (double t : layer_min_sizes_) {
      if (!(t > 0.0)) throw std::invalid_argument("Catalog: layer minimums must be > 0");
      th_sum += t;
    }
    if (th_sum > min_file_size) {
      throw infeasible_catalog(
          "Catalog: sum of layer minimum sizes exceeds a file size");
    }

    // Equal split by default; the joint optimizer may install other sizes.
    layer_sizes_.assign(file_count_ * layer_count_, 0.0);
    for (std::size_t f = 0; f < file_count_; ++f) {
      const double per_layer = file_sizes_[f] / static_cast<double>(layer_count_);
      for (std::size_t l = 0; l < layer_count_; ++l) {
        layer_sizes_[f * layer_count_ + l] = per_layer;
      }
    }
    check_layer_sizes(layer_sizes_);

    popularity_ = zipf_probabilities(file_count_, zipf_alpha_);
    layer_prob_.assign(file_count_ * layer_count_, 0.0);
    for (std::size_t f = 0; f < file_count_; ++f) {
      const double sdv = g_sdv(f, file_count_);
      const double per_el = g_hdv(f, file_count_) / static_cast<double>(layer_count_ - 1);
      layer_prob_[f * layer_count_] = popularity_[f] * sdv;
      for (std::size_t l = 1; l < layer_count_; ++l) {
        layer_prob_[f * layer_count_ + l] = popularity_[f] * per_el;
      }
    }
  }

  std::size_t file_count() const { return file_count_; }
  std::size_t layer_count() const { return layer_count_; }
  double zipf_alpha() const { return zipf_alpha_; }

  double file_size(std::size_t f) const { return file_sizes_[f]; }
  double layer_size(std::size_t f, std::size_t l) const {
    return layer_sizes_[f * layer_count_ + l];
  }
  double layer_min_size(std::size_t l) const { return layer_min_sizes_[l]; }
  double popularity(std::size_t f) const { return popularity_[f]; }
  double layer_probability(std::size_t f, std::size_t l) const {
    return layer_prob_[f * layer_count_ + l];
  }

  const std::vector<double>& layer_sizes_flat() const { return layer_sizes_; }

  // Copy with replacement layer sizes (row-major F x L); used by the joint
  // cache/layer-size optimizer.
  Catalog with_layer_sizes(const std::vector<double>& sizes) const {
    Catalog out = *this;
    if (sizes.size() != layer_sizes_.size()) {
      throw std::invalid_argument("with_layer_sizes: wrong table size");
    }
    out.check_layer_sizes(sizes);
    out.layer_sizes_ = sizes;
    return out;
  }

 private:
  void check_layer_sizes(const std::vector<double>& sizes) const {
    for (std::size_t f = 0; f < file_count_; ++f) {
      double sum = 0.0;
      for (std::size_t l = 0; l < layer_count_; ++l) {
        const double c = sizes[f * layer_count_ + l];
        if (c + 1e-9 < layer_min_sizes_[l]) {
          throw infeasible_catalog("Catalog: layer size below its minimum");
        }
        sum += c;
      }
      if (sum > file_sizes_[f] * (1.0 + 1e-12) + 1e-9) {
        throw infeasible_catalog("Catalog: layer sizes exceed file size");
      }
    }
  }

  std::size_t file_count_ = 0;
  std::size_t layer_count_ = 0;
  double zipf_alpha_ = 0.0;
  std::vector<double> file_sizes_;
  std::vector<double> layer_sizes_;      // F x L
  std::vector<double> layer_min_sizes_;  // L
  std::vector<double> popularity_;       // F
  std::vector<double> layer_prob_;       // F x L
};

inline Catalog build_catalog(const CatalogConfig& cfg) { return Catalog(cfg); }

}  // namespace ecocache
