// Flat key-value experiment configuration.  Every key has a documented
// default (the reference parameter set); unknown keys and malformed values
// are rejected with the offending line.  dB quantities are converted to
// linear exactly once, inside the derived-object builders.
#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ecocache/catalog.hpp"
#include "ecocache/economics.hpp"
#include "ecocache/geometry.hpp"

namespace ecocache {

struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  // geometry
  int K = 3;
  double P_s_dBm = 23.0;
  double P_m_dBm = 33.0;
  double lambda_s = 1.0 / (100.0 * 100.0 * std::numbers::pi);
  double lambda_m = 1.0 / (500.0 * 500.0 * std::numbers::pi);
  std::vector<double> d = {10.0, 20.0, 50.0};
  std::vector<double> S_per_cluster = {3.0, 3.0, 3.0};
  double alpha_s = 4.0;
  double alpha_m = 4.0;
  double W_s_Hz = 10e6;
  double W_m_Hz = 50e6;
  double gamma_s_dB = 10.0;
  double gamma_m_dB = 5.0;
  // catalog
  double M_bits = 1000e6;
  std::vector<double> C_f_bits = {50e6};  // scalar or one value per file
  std::vector<double> C_l_TH_bits;        // optional layer floors
  int F = 100;
  int L = 5;
  double zipf_alpha = 1.0;
  // economics
  double P_fix_s_W = 6.8;
  double P_fix_m_W = 30.0;
  double zeta_s = 4.0;
  double zeta_m = 4.0;
  double c_ca_W_per_bit = 6.25e-12;
  double c_bh_W_per_bit = 5e-4;
  double k_c = 3.87e-4;
  double k_r = 1.41e-8;
  double tau = 1e-11;
  // run
  std::uint64_t seed = 1;
  std::uint64_t mc_samples = 20000;
  std::string sweep;
  std::vector<double> grid;
  std::vector<std::string> algorithms = {"mplp", "alg1", "relaxed", "alg2"};
};

namespace config_detail {

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string fmt_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += fmt(v[i]);
  }
  return out;
}

inline std::vector<double> parse_list(const std::string& s, int line) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      const double v = std::stod(item, &pos);
      while (pos < item.size() && std::isspace(static_cast<unsigned char>(item[pos]))) ++pos;
      if (pos != item.size()) throw std::invalid_argument("trailing");
      out.push_back(v);
    } catch (const std::exception&) {
      throw config_error("config line " + std::to_string(line) +
                         ": cannot parse number '" + item + "'");
    }
  }
  if (out.empty()) {
    throw config_error("config line " + std::to_string(line) + ": empty list");
  }
  return out;
}

inline double parse_num(const std::string& s, int line) {
  const auto v = parse_list(s, line);
  if (v.size() != 1) {
    throw config_error("config line " + std::to_string(line) +
                       ": expected a single number");
  }
  return v[0];
}

inline std::vector<std::string> parse_names(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::string t;
    for (char c : item) {
      if (!std::isspace(static_cast<unsigned char>(c))) t += c;
    }
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

}  // namespace config_detail

inline std::string dump_config(const ExperimentConfig& c) {
  using config_detail::fmt;
  using config_detail::fmt_list;
  std::string out;
  auto kv = [&](const std::string& k, const std::string& v) {
    out += k + " = " + v + "\n";
  };
  kv("K", std::to_string(c.K));
  kv("P_s_dBm", fmt(c.P_s_dBm));
  kv("P_m_dBm", fmt(c.P_m_dBm));
  kv("lambda_s", fmt(c.lambda_s));
  kv("lambda_m", fmt(c.lambda_m));
  kv("d", fmt_list(c.d));
  kv("S_per_cluster", fmt_list(c.S_per_cluster));
  kv("alpha_s", fmt(c.alpha_s));
  kv("alpha_m", fmt(c.alpha_m));
  kv("W_s_Hz", fmt(c.W_s_Hz));
  kv("W_m_Hz", fmt(c.W_m_Hz));
  kv("gamma_s_dB", fmt(c.gamma_s_dB));
  kv("gamma_m_dB", fmt(c.gamma_m_dB));
  kv("M_bits", fmt(c.M_bits));
  kv("C_f_bits", fmt_list(c.C_f_bits));
  if (!c.C_l_TH_bits.empty()) kv("C_l_TH_bits", fmt_list(c.C_l_TH_bits));
  kv("F", std::to_string(c.F));
  kv("L", std::to_string(c.L));
  kv("zipf_alpha", fmt(c.zipf_alpha));
  kv("P_fix_s_W", fmt(c.P_fix_s_W));
  kv("P_fix_m_W", fmt(c.P_fix_m_W));
  kv("zeta_s", fmt(c.zeta_s));
  kv("zeta_m", fmt(c.zeta_m));
  kv("c_ca_W_per_bit", fmt(c.c_ca_W_per_bit));
  kv("c_bh_W_per_bit", fmt(c.c_bh_W_per_bit));
  kv("k_c", fmt(c.k_c));
  kv("k_r", fmt(c.k_r));
  kv("tau", fmt(c.tau));
  kv("seed", std::to_string(c.seed));
  kv("mc_samples", std::to_string(c.mc_samples));
  if (!c.sweep.empty()) kv("sweep", c.sweep);
  if (!c.grid.empty()) kv("grid", fmt_list(c.grid));
  {
    std::string a;
    for (std::size_t i = 0; i < c.algorithms.size(); ++i) {
      if (i) a += ",";
      a += c.algorithms[i];
    }
    kv("algorithms", a);
  }
  return out;
}

inline void validate_config(const ExperimentConfig& c) {
  if (c.K < 1) throw config_error("config: K must be >= 1");
  if (c.d.size() != static_cast<std::size_t>(c.K) ||
      c.S_per_cluster.size() != static_cast<std::size_t>(c.K)) {
    throw config_error("config: d and S_per_cluster must have K entries");
  }
  double prev = 0.0;
  for (double r : c.d) {
    if (!(r > prev)) {
      throw config_error("config key d: cluster radii must be strictly increasing");
    }
    prev = r;
  }
  for (double s : c.S_per_cluster) {
    if (!(s >= 1.0) || s != std::floor(s)) {
      throw config_error("config key S_per_cluster: integer counts >= 1");
    }
  }
  if (!(c.lambda_s > 0.0) || !(c.lambda_m > 0.0)) {
    throw config_error("config: densities must be positive");
  }
  if (!(c.alpha_s > 2.0) || !(c.alpha_m > 2.0)) {
    throw config_error("config: path loss exponents must exceed 2");
  }
  if (c.F < 2 || c.L < 2) throw config_error("config: needs F >= 2 and L >= 2");
  if (c.C_f_bits.size() != 1 &&
      c.C_f_bits.size() != static_cast<std::size_t>(c.F)) {
    throw config_error("config key C_f_bits: scalar or one entry per file");
  }
  if (!c.C_l_TH_bits.empty() &&
      c.C_l_TH_bits.size() != static_cast<std::size_t>(c.L)) {
    throw config_error("config key C_l_TH_bits: one entry per layer");
  }
  if (!(c.M_bits > 0.0)) throw config_error("config: M_bits must be positive");
  if (!(c.zipf_alpha >= 0.0)) throw config_error("config: zipf_alpha must be >= 0");
  if (!(c.tau > 0.0)) throw config_error("config: tau must be positive");
  if (c.mc_samples < 1000) throw config_error("config: mc_samples must be >= 1000");
  for (const auto& a : c.algorithms) {
    if (a != "mplp" && a != "alg1" && a != "relaxed" && a != "alg2") {
      throw config_error("config key algorithms: unknown algorithm '" + a + "'");
    }
  }
}

inline ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  std::vector<std::string> seen;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    std::string s = hash == std::string::npos ? raw : raw.substr(0, hash);
    const auto eq = s.find('=');
    std::string key, value;
    if (eq != std::string::npos) {
      key = s.substr(0, eq);
      value = s.substr(eq + 1);
    } else {
      key = s;
    }
    auto trim = [](std::string& t) {
      while (!t.empty() && std::isspace(static_cast<unsigned char>(t.front()))) t.erase(t.begin());
      while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.pop_back();
    };
    trim(key);
    trim(value);
    if (key.empty()) {
      if (!value.empty()) {
        throw config_error("config line " + std::to_string(line) + ": missing key");
      }
      continue;
    }
    if (eq == std::string::npos) {
      throw config_error("config line " + std::to_string(line) +
                         ": expected 'key = value'");
    }
    for (const auto& k : seen) {
      if (k == key) {
        throw config_error("config line " + std::to_string(line) +
                           ": duplicate key '" + key + "'");
      }
    }
    seen.push_back(key);

    using config_detail::parse_list;
    using config_detail::parse_num;
    if (key == "K") c.K = static_cast<int>(parse_num(value, line));
    else if (key == "P_s_dBm") c.P_s_dBm = parse_num(value, line);
    else if (key == "P_m_dBm") c.P_m_dBm = parse_num(value, line);
    else if (key == "lambda_s") c.lambda_s = parse_num(value, line);
    else if (key == "lambda_m") c.lambda_m = parse_num(value, line);
    else if (key == "d") c.d = parse_list(value, line);
    else if (key == "S_per_cluster") c.S_per_cluster = parse_list(value, line);
    else if (key == "alpha_s") c.alpha_s = parse_num(value, line);
    else if (key == "alpha_m") c.alpha_m = parse_num(value, line);
    else if (key == "W_s_Hz") c.W_s_Hz = parse_num(value, line);
    else if (key == "W_m_Hz") c.W_m_Hz = parse_num(value, line);
    else if (key == "gamma_s_dB") c.gamma_s_dB = parse_num(value, line);
    else if (key == "gamma_m_dB") c.gamma_m_dB = parse_num(value, line);
    else if (key == "M_bits") c.M_bits = parse_num(value, line);
    else if (key == "C_f_bits") c.C_f_bits = parse_list(value, line);
    else if (key == "C_l_TH_bits") c.C_l_TH_bits = parse_list(value, line);
    else if (key == "F") c.F = static_cast<int>(parse_num(value, line));
    else if (key == "L") c.L = static_cast<int>(parse_num(value, line));
    else if (key == "zipf_alpha") c.zipf_alpha = parse_num(value, line);
    else if (key == "P_fix_s_W") c.P_fix_s_W = parse_num(value, line);
    else if (key == "P_fix_m_W") c.P_fix_m_W = parse_num(value, line);
    else if (key == "zeta_s") c.zeta_s = parse_num(value, line);
    else if (key == "zeta_m") c.zeta_m = parse_num(value, line);
    else if (key == "c_ca_W_per_bit") c.c_ca_W_per_bit = parse_num(value, line);
    else if (key == "c_bh_W_per_bit") c.c_bh_W_per_bit = parse_num(value, line);
    else if (key == "k_c") c.k_c = parse_num(value, line);
    else if (key == "k_r") c.k_r = parse_num(value, line);
    else if (key == "tau") c.tau = parse_num(value, line);
    else if (key == "seed") c.seed = static_cast<std::uint64_t>(parse_num(value, line));
    else if (key == "mc_samples") c.mc_samples = static_cast<std::uint64_t>(parse_num(value, line));
    else if (key == "sweep") c.sweep = value;
    else if (key == "grid") c.grid = parse_list(value, line);
    else if (key == "algorithms") c.algorithms = config_detail::parse_names(value);
    else {
      throw config_error("config line " + std::to_string(line) +
                         ": unknown key '" + key + "'");
    }
  }
  validate_config(c);
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

// Stable content digest for provenance columns (FNV-1a over the canonical
// dump, hex encoded).
inline std::string config_hash(const ExperimentConfig& c) {
  const std::string text = dump_config(c);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline NetworkGeometry to_geometry(const ExperimentConfig& c) {
  NetworkGeometry g;
  g.sbs_density = c.lambda_s;
  g.mbs_density = c.lambda_m;
  g.sbs_pathloss = c.alpha_s;
  g.mbs_pathloss = c.alpha_m;
  g.cluster_radii = c.d;
  std::vector<int> per;
  per.reserve(c.S_per_cluster.size());
  for (double s : c.S_per_cluster) per.push_back(static_cast<int>(s));
  g.cluster_cum = cumulative_counts(per);
  g.sbs_power_w = dbm_to_watt(c.P_s_dBm);
  g.mbs_power_w = dbm_to_watt(c.P_m_dBm);
  g.sbs_bandwidth_hz = c.W_s_Hz;
  g.mbs_bandwidth_hz = c.W_m_Hz;
  g.qos_sbs = db_to_linear(c.gamma_s_dB);
  g.qos_mbs = db_to_linear(c.gamma_m_dB);
  g.validate();
  return g;
}

inline Catalog to_catalog(const ExperimentConfig& c) {
  CatalogConfig cc;
  cc.file_count = static_cast<std::size_t>(c.F);
  cc.layer_count = static_cast<std::size_t>(c.L);
  cc.zipf_alpha = c.zipf_alpha;
  if (c.C_f_bits.size() == 1) {
    cc.file_size_bits = c.C_f_bits[0];
  } else {
    cc.file_sizes_bits = c.C_f_bits;
  }
  cc.layer_min_sizes_bits = c.C_l_TH_bits;
  return Catalog(cc);
}

inline EconomicModel to_econ(const ExperimentConfig& c) {
  EconomicModel e;
  e.zeta_s = c.zeta_s;
  e.zeta_m = c.zeta_m;
  e.p_fix_s_w = c.P_fix_s_W;
  e.p_fix_m_w = c.P_fix_m_W;
  e.cache_coeff_w_per_bit = c.c_ca_W_per_bit;
  e.backhaul_coeff_w_per_bit = c.c_bh_W_per_bit;
  e.price_energy = c.k_c;
  e.price_rate = c.k_r;
  return e;
}

}  // namespace ecocache
