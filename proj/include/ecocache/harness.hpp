// Experiment front end: analyze (analytic STP/ESR curves), simulate (PPP
// validation), optimize (algorithm comparison at one operating point) and
// sweep (one variable, figure-ready rows).  Output rows follow one flat
// schema; emitters write CSV or a JSON mirror with identical numbers.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "ecocache/analytics.hpp"
#include "ecocache/config.hpp"
#include "ecocache/economics.hpp"
#include "ecocache/optimizer.hpp"
#include "ecocache/simulator.hpp"

namespace ecocache {

struct ResultRow {
  std::string sweep_var;
  double value = 0.0;
  std::string algorithm;
  std::optional<double> ece;
  std::optional<double> revenue;
  std::optional<double> cost;
  std::optional<double> stp_ref;
  std::optional<double> esr_ref;
  std::uint64_t seed = 0;
  std::string config_hash;
};

struct ResultSet {
  std::vector<ResultRow> rows;
  // Audit trail for re-evaluating emitted ECE values; not serialized.
  struct Audit {
    std::string algorithm;
    double sweep_value = 0.0;
    Placement placement;
    Catalog catalog;
    RateTable rates;
  };
  std::vector<Audit> audits;
};

namespace harness_detail {

inline std::vector<double> default_gamma_s_grid_db() {
  std::vector<double> g;
  for (double v = 0.0; v <= 20.0; v += 2.0) g.push_back(v);
  return g;
}

inline std::vector<double> default_gamma_m_grid_db() {
  std::vector<double> g;
  for (double v = 0.0; v <= 10.0; v += 1.0) g.push_back(v);
  return g;
}

inline std::vector<double> to_linear(const std::vector<double>& db) {
  std::vector<double> out;
  out.reserve(db.size());
  for (double v : db) out.push_back(db_to_linear(v));
  return out;
}

// Per-SBS cache budget under the equal-cache-size regime.
inline std::vector<double> equal_budgets(const ExperimentConfig& cfg,
                                         const NetworkGeometry& geo) {
  double total_sbs = 0.0;
  for (std::size_t k = 0; k < geo.cluster_count(); ++k) {
    total_sbs += geo.cluster_size(k);
  }
  return std::vector<double>(geo.cluster_count(), cfg.M_bits / total_sbs);
}

}  // namespace harness_detail

inline ResultSet run_analyze(const ExperimentConfig& cfg) {
  const auto geo = to_geometry(cfg);
  const std::string hash = config_hash(cfg);
  const McSettings mc{cfg.seed, cfg.mc_samples};
  ResultSet rs;

  for (double db : harness_detail::default_gamma_s_grid_db()) {
    auto g = geo;
    g.qos_sbs = db_to_linear(db);
    for (std::size_t k = 0; k < geo.cluster_count(); ++k) {
      ResultRow row;
      row.sweep_var = "gamma_s_dB";
      row.value = db;
      row.algorithm = "analytic_sbs_k" + std::to_string(k + 1);
      row.stp_ref = stp_sbs_cluster(k, g.qos_sbs, g, mc).mean;
      row.esr_ref = esr_sbs_cluster(k, g, mc).mean;
      row.seed = cfg.seed;
      row.config_hash = hash;
      rs.rows.push_back(std::move(row));
    }
  }
  for (double db : harness_detail::default_gamma_m_grid_db()) {
    auto g = geo;
    g.qos_mbs = db_to_linear(db);
    ResultRow row;
    row.sweep_var = "gamma_m_dB";
    row.value = db;
    row.algorithm = "analytic_mbs";
    row.stp_ref = stp_mbs(g.qos_mbs, g.mbs_pathloss);
    row.esr_ref = esr_mbs(g);
    row.seed = cfg.seed;
    row.config_hash = hash;
    rs.rows.push_back(std::move(row));
  }
  return rs;
}

inline ResultSet run_simulate(const ExperimentConfig& cfg) {
  const auto geo = to_geometry(cfg);
  const std::string hash = config_hash(cfg);
  ResultSet rs;

  const auto db_s = harness_detail::default_gamma_s_grid_db();
  const auto table_s =
      estimate_metrics(geo, harness_detail::to_linear(db_s), cfg.mc_samples, cfg.seed);
  for (std::size_t gi = 0; gi < db_s.size(); ++gi) {
    for (std::size_t k = 0; k < geo.cluster_count(); ++k) {
      ResultRow row;
      row.sweep_var = "gamma_s_dB";
      row.value = db_s[gi];
      row.algorithm = "mc_sbs_k" + std::to_string(k + 1);
      row.stp_ref = table_s.cluster_stp[k][gi].mean;
      if (table_s.cluster_esr[k][gi].samples > 0) {
        row.esr_ref = table_s.cluster_esr[k][gi].mean;
      }
      row.seed = cfg.seed;
      row.config_hash = hash;
      rs.rows.push_back(std::move(row));
    }
  }
  const auto db_m = harness_detail::default_gamma_m_grid_db();
  const auto table_m =
      estimate_metrics(geo, harness_detail::to_linear(db_m), cfg.mc_samples, cfg.seed);
  for (std::size_t gi = 0; gi < db_m.size(); ++gi) {
    ResultRow row;
    row.sweep_var = "gamma_m_dB";
    row.value = db_m[gi];
    row.algorithm = "mc_mbs";
    row.stp_ref = table_m.mbs_stp[gi].mean;
    if (table_m.mbs_esr[gi].samples > 0) row.esr_ref = table_m.mbs_esr[gi].mean;
    row.seed = cfg.seed;
    row.config_hash = hash;
    rs.rows.push_back(std::move(row));
  }
  return rs;
}

namespace harness_detail {

// Shared by optimize and sweep: run the configured algorithms at one
// operating point and append their rows.
inline void optimize_point(const ExperimentConfig& cfg, const std::string& var,
                           double value, const RateTable& rates, ResultSet& rs) {
  const auto geo = to_geometry(cfg);
  const auto cat = to_catalog(cfg);
  const auto econ = to_econ(cfg);
  const std::string hash = config_hash(cfg);
  const auto budgets = equal_budgets(cfg, geo);
  const double stp_ref = stp_mbs(geo.qos_mbs, geo.mbs_pathloss);
  const double esr_ref = rates.mbs_rate.mean;

  auto emit = [&](const std::string& name, std::optional<double> ece_v,
                  std::optional<double> rev, std::optional<double> cost_v) {
    ResultRow row;
    row.sweep_var = var;
    row.value = value;
    row.algorithm = name;
    row.ece = ece_v;
    row.revenue = rev;
    row.cost = cost_v;
    row.stp_ref = stp_ref;
    row.esr_ref = esr_ref;
    row.seed = cfg.seed;
    row.config_hash = hash;
    rs.rows.push_back(std::move(row));
  };
  auto placement_rows = [&](const std::string& name, const Placement& x,
                            const Catalog& c) {
    const double rev = revenue(x, c, rates, econ, geo);
    const double cost_v = total_cost(x, c, geo, econ);
    emit(name, rev - cost_v, rev, cost_v);
    rs.audits.push_back({name, value, x, c, rates});
  };

  auto wants = [&](const std::string& name) {
    return std::find(cfg.algorithms.begin(), cfg.algorithms.end(), name) !=
           cfg.algorithms.end();
  };

  std::optional<double> mplp_ece;
  if (wants("mplp") || wants("alg2")) {
    const auto x = mplp_baseline(cat, budgets);
    const double rev = revenue(x, cat, rates, econ, geo);
    const double cost_v = total_cost(x, cat, geo, econ);
    mplp_ece = rev - cost_v;
    if (wants("mplp")) placement_rows("mplp", x, cat);
  }
  if (wants("alg1") || wants("relaxed")) {
    const auto relaxed =
        solve_relaxed_placement(cat, geo, econ, rates, budgets, cfg.tau);
    if (wants("relaxed")) {
      emit("relaxed", relaxed.objective, std::nullopt, std::nullopt);
    }
    if (wants("alg1")) {
      const auto x = greedy_round_alg1(relaxed, cat, geo, econ, rates, budgets);
      placement_rows("alg1", x, cat);
    }
  }
  if (wants("alg2")) {
    const double delta = 1e-6 * (1.0 + std::abs(mplp_ece.value_or(1.0)));
    const auto js =
        alternating_alg2(cat, geo, econ, rates, cfg.M_bits, delta, 30, cfg.tau);
    placement_rows("alg2", js.placement, js.catalog);
  }
}

}  // namespace harness_detail

inline ResultSet run_optimize(const ExperimentConfig& cfg) {
  const auto geo = to_geometry(cfg);
  const McSettings mc{cfg.seed, cfg.mc_samples};
  const auto rates = build_rate_table(geo, mc);
  ResultSet rs;
  harness_detail::optimize_point(cfg, "operating_point", 0.0, rates, rs);
  return rs;
}

inline std::vector<double> default_sweep_grid(const std::string& var) {
  if (var == "gamma_s_dB") return {0.0, 5.0, 10.0, 15.0, 20.0};
  if (var == "zipf_alpha") return {1.0, 1.25, 1.5, 1.75, 2.0};
  if (var == "M_bits") return {500e6, 750e6, 1000e6, 1250e6, 1500e6};
  if (var == "c_bh") return {1e-4, 2.5e-4, 5e-4, 7.5e-4, 1e-3};
  if (var == "L") return {2.0, 3.0, 5.0, 8.0};
  throw config_error("unknown sweep variable '" + var + "'");
}

inline ResultSet run_sweep(const ExperimentConfig& cfg) {
  const std::string var = cfg.sweep;
  std::vector<double> grid = cfg.grid.empty() ? default_sweep_grid(var) : cfg.grid;
  if (var != "gamma_s_dB" && var != "zipf_alpha" && var != "M_bits" &&
      var != "c_bh" && var != "L") {
    throw config_error("unknown sweep variable '" + var + "'");
  }

  ResultSet rs;
  // The rate table depends on the geometry only; rebuild it per point just
  // for the QoS sweep.
  std::optional<RateTable> shared_rates;
  for (double value : grid) {
    ExperimentConfig point = cfg;
    if (var == "gamma_s_dB") point.gamma_s_dB = value;
    else if (var == "zipf_alpha") point.zipf_alpha = value;
    else if (var == "M_bits") point.M_bits = value;
    else if (var == "c_bh") point.c_bh_W_per_bit = value;
    else point.L = static_cast<int>(value);
    validate_config(point);

    const auto geo = to_geometry(point);
    const McSettings mc{point.seed, point.mc_samples};
    if (var == "gamma_s_dB") {
      const auto rates = build_rate_table(geo, mc);
      harness_detail::optimize_point(point, var, value, rates, rs);
    } else {
      if (!shared_rates) shared_rates = build_rate_table(geo, mc);
      harness_detail::optimize_point(point, var, value, *shared_rates, rs);
    }
  }
  return rs;
}

namespace harness_detail {

inline std::string fmt_cell(const std::optional<double>& v) {
  if (!v) return "";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", *v);
  return buf;
}

}  // namespace harness_detail

inline void sort_rows(ResultSet& rs) {
  std::stable_sort(rs.rows.begin(), rs.rows.end(),
                   [](const ResultRow& a, const ResultRow& b) {
                     if (a.sweep_var != b.sweep_var) return a.sweep_var < b.sweep_var;
                     if (a.value != b.value) return a.value < b.value;
                     return a.algorithm < b.algorithm;
                   });
}

inline void emit_csv(const ResultSet& rs, std::ostream& out) {
  out << "sweep_var,value,algorithm,ece,revenue,cost,stp_ref,esr_ref,seed,"
         "config_hash\n";
  char num[40];
  for (const auto& r : rs.rows) {
    std::snprintf(num, sizeof(num), "%.12g", r.value);
    out << r.sweep_var << ',' << num << ',' << r.algorithm << ','
        << harness_detail::fmt_cell(r.ece) << ','
        << harness_detail::fmt_cell(r.revenue) << ','
        << harness_detail::fmt_cell(r.cost) << ','
        << harness_detail::fmt_cell(r.stp_ref) << ','
        << harness_detail::fmt_cell(r.esr_ref) << ',' << r.seed << ','
        << r.config_hash << '\n';
  }
}

inline void emit_json(const ResultSet& rs, std::ostream& out) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : rs.rows) {
    nlohmann::ordered_json row;
    row["sweep_var"] = r.sweep_var;
    row["value"] = r.value;
    row["algorithm"] = r.algorithm;
    // numbers pass through the CSV formatting so the two mirrors agree
    // bit-for-bit
    auto put = [&](const char* key, const std::optional<double>& v) {
      if (v) {
        row[key] = std::strtod(harness_detail::fmt_cell(v).c_str(), nullptr);
      } else {
        row[key] = nullptr;
      }
    };
    put("ece", r.ece);
    put("revenue", r.revenue);
    put("cost", r.cost);
    put("stp_ref", r.stp_ref);
    put("esr_ref", r.esr_ref);
    row["seed"] = r.seed;
    row["config_hash"] = r.config_hash;
    arr.push_back(std::move(row));
  }
  out << arr.dump(2) << '\n';
}

inline void emit_results(ResultSet& rs, const std::string& path,
                         const std::string& format) {
  if (format != "csv" && format != "json") {
    throw config_error("unknown output format '" + format + "'");
  }
  sort_rows(rs);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open output file: " + path);
  if (format == "csv") {
    emit_csv(rs, out);
  } else {
    emit_json(rs, out);
  }
  out.flush();
  if (!out) throw io_error("failed writing output file: " + path);
}

}  // namespace ecocache
