// ECE maximization: the reweighted-l1 LP relaxation, the greedy rounding
// heuristic, the stability check of the resulting layer-cluster matching,
// the most-popular-layer baseline, an exhaustive oracle for small instances,
// and the alternating cache/layer-size optimization.
//
// Layer caching indicators use the flat index ((f * L) + l) * K + k.
// Placement::cluster_budgets always holds the per-SBS cache budget in bits.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ecocache/catalog.hpp"
#include "ecocache/economics.hpp"
#include "ecocache/geometry.hpp"
#include "ecocache/lp.hpp"

namespace ecocache {

struct oversize_instance : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct RelaxedPlacement {
  std::vector<double> x;  // F*L*K, values in [0, 1]
  double objective = 0.0; // relaxed ECE at the returned point
  std::size_t iterations = 0;
  bool converged = false;
};

namespace opt_detail {

inline std::size_t flat(std::size_t f, std::size_t l, std::size_t k,
                        std::size_t L, std::size_t K) {
  return (f * L + l) * K + k;
}

// log-revenue terms per cluster and for the MBS fallback
struct RevenueTerms {
  std::vector<double> sbs;  // A_k
  double mbs = 0.0;         // B
};

inline RevenueTerms revenue_terms(const NetworkGeometry& geo,
                                  const RateTable& rates) {
  if (rates.cluster_rates.size() != geo.cluster_count() ||
      rates.mbs_rate.samples == 0) {
    throw std::invalid_argument("optimizer: rate table is missing entries");
  }
  RevenueTerms t;
  const double ref_s = geo.ref_rate_sbs();
  const double ref_m = geo.ref_rate_mbs();
  t.sbs.reserve(geo.cluster_count());
  for (const auto& r : rates.cluster_rates) {
    t.sbs.push_back(ref_s * std::log2(1.0 + r.mean / ref_s));
  }
  t.mbs = ref_m * std::log2(1.0 + rates.mbs_rate.mean / ref_m);
  return t;
}

// Relaxed ECE with the self-consistent l0 surrogate mass/(mass + tau).
inline double relaxed_ece(const std::vector<double>& x, const Catalog& cat,
                          const NetworkGeometry& geo, const EconomicModel& econ,
                          const RevenueTerms& terms, const RateTable& rates,
                          double tau) {
  const std::size_t F = cat.file_count(), L = cat.layer_count(),
                    K = geo.cluster_count();
  double acc = revenue_constant(geo, econ, rates) - cost_constant(cat, geo, econ);
  for (std::size_t k = 0; k < K; ++k) {
    const double sk = static_cast<double>(geo.cluster_size(k));
    double mass = 0.0;
    double linear = 0.0;
    for (std::size_t f = 0; f < F; ++f) {
      for (std::size_t l = 0; l < L; ++l) {
        const double xv = x[flat(f, l, k, L, K)];
        const double p = cat.layer_probability(f, l);
        const double c = cat.layer_size(f, l);
        mass += p * xv;
        linear += econ.price_rate * p * xv * (terms.sbs[k] - terms.mbs) -
                  econ.price_energy * xv * c *
                      (econ.cache_coeff_w_per_bit * sk -
                       p * econ.backhaul_coeff_w_per_bit);
      }
    }
    acc += linear - econ.price_energy * mass / (mass + tau) * sk *
                        (econ.zeta_s * geo.sbs_power_w + econ.p_fix_s_w);
  }
  return acc;
}

}  // namespace opt_detail

// Reweighted-l1 relaxation of the placement problem: every iteration freezes
// the cluster-activation denominators at the previous iterate and solves the
// resulting LP over x in [0,1]^{FLK} with the one-cluster-per-layer and
// per-SBS budget rows.
inline RelaxedPlacement solve_relaxed_placement(
    const Catalog& cat, const NetworkGeometry& geo, const EconomicModel& econ,
    const RateTable& rates, const std::vector<double>& budgets, double tau,
    std::size_t max_iter = 50, double eps = 1e-6) {
  if (!(tau > 0.0)) throw std::invalid_argument("solve_relaxed_placement: tau > 0");
  const std::size_t F = cat.file_count(), L = cat.layer_count(),
                    K = geo.cluster_count();
  if (budgets.size() != K) {
    throw std::invalid_argument("solve_relaxed_placement: one budget per cluster");
  }
  const auto terms = opt_detail::revenue_terms(geo, rates);
  const std::size_t n = F * L * K;

  LpProblem p;
  p.num_vars = n;
  p.objective.assign(n, 0.0);
  p.lower.assign(n, 0.0);
  p.upper.assign(n, 1.0);
  p.rows.reserve(F * L + K);
  for (std::size_t f = 0; f < F; ++f) {
    for (std::size_t l = 0; l < L; ++l) {
      LpProblem::Row row;
      row.bound = 1.0;
      for (std::size_t k = 0; k < K; ++k) {
        row.coeffs.push_back({opt_detail::flat(f, l, k, L, K), 1.0});
      }
      p.rows.push_back(std::move(row));
    }
  }
  double size_scale = 0.0;
  for (std::size_t f = 0; f < F; ++f) {
    for (std::size_t l = 0; l < L; ++l) {
      size_scale = std::max(size_scale, cat.layer_size(f, l));
    }
  }
  for (std::size_t k = 0; k < K; ++k) {
    if (budgets[k] < 0.0) {
      throw std::invalid_argument("solve_relaxed_placement: negative budget");
    }
    const double scale = budgets[k] > 0.0 ? budgets[k] : size_scale;
    LpProblem::Row row;
    row.bound = budgets[k] / scale;
    for (std::size_t f = 0; f < F; ++f) {
      for (std::size_t l = 0; l < L; ++l) {
        row.coeffs.push_back(
            {opt_detail::flat(f, l, k, L, K), cat.layer_size(f, l) / scale});
      }
    }
    p.rows.push_back(std::move(row));
  }

  RelaxedPlacement out;
  std::vector<double> prev(n, 1.0);  // weight seed; not itself feasible
  for (std::size_t it = 0; it < max_iter; ++it) {
    for (std::size_t k = 0; k < K; ++k) {
      const double sk = static_cast<double>(geo.cluster_size(k));
      double mass = 0.0;
      for (std::size_t f = 0; f < F; ++f) {
        for (std::size_t l = 0; l < L; ++l) {
          mass += cat.layer_probability(f, l) *
                  prev[opt_detail::flat(f, l, k, L, K)];
        }
      }
      const double weight =
          sk * (econ.zeta_s * geo.sbs_power_w + econ.p_fix_s_w) / (mass + tau);
      for (std::size_t f = 0; f < F; ++f) {
        for (std::size_t l = 0; l < L; ++l) {
          const double pr = cat.layer_probability(f, l);
          const double c = cat.layer_size(f, l);
          p.objective[opt_detail::flat(f, l, k, L, K)] =
              econ.price_rate * pr * (terms.sbs[k] - terms.mbs) -
              econ.price_energy *
                  (weight * pr + c * (econ.cache_coeff_w_per_bit * sk -
                                      pr * econ.backhaul_coeff_w_per_bit));
        }
      }
    }
    const LpSolution sol = lp_solve(p);
    if (sol.status != LpStatus::Optimal) {
      throw std::runtime_error(
          "solve_relaxed_placement: relaxation LP failed (internal error)");
    }
    out.iterations = it + 1;
    double delta = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double clamped = std::min(1.0, std::max(0.0, sol.x[j]));
      delta = std::max(delta, std::abs(clamped - prev[j]));
      prev[j] = clamped;
    }
    if (it > 0 && delta < eps) {
      out.converged = true;
      break;
    }
  }
  out.x = std::move(prev);
  out.objective =
      opt_detail::relaxed_ece(out.x, cat, geo, econ, terms, rates, tau);
  return out;
}

// Marginal-gain table evaluated at the relaxed solution.
inline std::vector<double> compute_z_table(const std::vector<double>& x_tilde,
                                           const Catalog& cat,
                                           const NetworkGeometry& geo,
                                           const EconomicModel& econ,
                                           const RateTable& rates) {
  const std::size_t F = cat.file_count(), L = cat.layer_count(),
                    K = geo.cluster_count();
  std::vector<double> z(F * L * K);
  for (std::size_t f = 0; f < F; ++f) {
    for (std::size_t l = 0; l < L; ++l) {
      for (std::size_t k = 0; k < K; ++k) {
        const std::size_t idx = opt_detail::flat(f, l, k, L, K);
        z[idx] = marginal_ece(f, l, k, x_tilde[idx], cat, geo, econ, rates);
      }
    }
  }
  return z;
}

// Greedy rounding: descend the z table, cache whatever fits, and retire the
// other clusters of a layer once it is cached (one cluster per layer).
// Preference-indifference ties fall back to the smaller file-size-to-
// popularity ratio, then the smaller layer, then the larger cluster rate.
inline Placement greedy_round_alg1(const RelaxedPlacement& relaxed,
                                   const Catalog& cat,
                                   const NetworkGeometry& geo,
                                   const EconomicModel& econ,
                                   const RateTable& rates,
                                   const std::vector<double>& budgets) {
  const std::size_t F = cat.file_count(), L = cat.layer_count(),
                    K = geo.cluster_count();
  if (budgets.size() != K) {
    throw std::invalid_argument("greedy_round_alg1: one budget per cluster");
  }
  const std::vector<double> z = compute_z_table(relaxed.x, cat, geo, econ, rates);

  std::vector<double> ratio(F);
  for (std::size_t f = 0; f < F; ++f) {
    ratio[f] = cat.file_size(f) / cat.popularity(f);
  }
  std::vector<std::size_t> order(z.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (z[a] != z[b]) return z[a] > z[b];
    const std::size_t fa = a / (L * K), fb = b / (L * K);
    if (fa != fb) {
      if (ratio[fa] != ratio[fb]) return ratio[fa] < ratio[fb];
      return fa < fb;
    }
    const std::size_t la = (a / K) % L, lb = (b / K) % L;
    if (la != lb) return la < lb;
    const std::size_t ka = a % K, kb = b % K;
    const double ra = rates.cluster_rates[ka].mean;
    const double rb = rates.cluster_rates[kb].mean;
    if (ra != rb) return ra > rb;
    return ka < kb;
  });

  Placement out(F, L, K);
  out.cluster_budgets = budgets;
  out.total_budget = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    out.total_budget += budgets[k] * geo.cluster_size(k);
  }
  std::vector<double> room = budgets;
  std::vector<bool> layer_done(F * L, false);
  for (std::size_t idx : order) {
    const std::size_t f = idx / (L * K);
    const std::size_t l = (idx / K) % L;
    const std::size_t k = idx % K;
    if (layer_done[f * L + l]) continue;
    const double c = cat.layer_size(f, l);
    if (c <= room[k]) {
      out.set(f, l, k, true);
      room[k] -= c;
      layer_done[f * L + l] = true;
    }
  }
  return out;
}

// Placement plus the z table it was ranked with.
struct StabilityReport {
  bool stable = true;
  struct BlockingPair {
    std::size_t f_a, l_a, k_a;
    std::size_t f_b, l_b, k_b;
  };
  std::vector<BlockingPair> blocking;
};

// A pair of cached layers blocks the matching when swapping their clusters
// would strictly raise both z values while still fitting both budgets.
inline StabilityReport check_stability(const Placement& placement,
                                       const std::vector<double>& z,
                                       const Catalog& cat,
                                       const std::vector<double>& budgets) {
  const std::size_t F = placement.file_count(), L = placement.layer_count(),
                    K = placement.cluster_count();
  if (z.size() != F * L * K || budgets.size() != K) {
    throw std::invalid_argument("check_stability: table sizes do not match");
  }
  struct Entry {
    std::size_t f, l, k;
  };
  std::vector<Entry> cached;
  std::vector<double> used(K, 0.0);
  for (std::size_t f = 0; f < F; ++f) {
    for (std::size_t l = 0; l < L; ++l) {
      for (std::size_t k = 0; k < K; ++k) {
        if (placement.cached(f, l, k)) {
          cached.push_back({f, l, k});
          used[k] += cat.layer_size(f, l);
        }
      }
    }
  }
  StabilityReport report;
  for (std::size_t a = 0; a < cached.size(); ++a) {
    for (std::size_t b = a + 1; b < cached.size(); ++b) {
      const auto& ea = cached[a];
      const auto& eb = cached[b];
      if (ea.k == eb.k) continue;
      const double ca = cat.layer_size(ea.f, ea.l);
      const double cb = cat.layer_size(eb.f, eb.l);
      const bool a_prefers = z[opt_detail::flat(ea.f, ea.l, eb.k, L, K)] >
                             z[opt_detail::flat(ea.f, ea.l, ea.k, L, K)];
      const bool b_prefers = z[opt_detail::flat(eb.f, eb.l, ea.k, L, K)] >
                             z[opt_detail::flat(eb.f, eb.l, eb.k, L, K)];
      const bool fits = used[eb.k] - cb + ca <= budgets[eb.k] &&
                        used[ea.k] - ca + cb <= budgets[ea.k];
      if (a_prefers && b_prefers && fits) {
        report.stable = false;
        report.blocking.push_back({ea.f, ea.l, ea.k, eb.f, eb.l, eb.k});
      }
    }
  }
  return report;
}

// Most-popular-layer placement: files in descending popularity, layers in
// order, first cluster with room.
inline Placement mplp_baseline(const Catalog& cat,
                               const std::vector<double>& budgets) {
  const std::size_t F = cat.file_count(), L = cat.layer_count(),
                    K = budgets.size();
  if (K == 0) throw std::invalid_argument("mplp_baseline: no clusters");
  Placement out(F, L, K);
  out.cluster_budgets = budgets;
  std::vector<double> room = budgets;
  for (std::size_t f = 0; f < F; ++f) {
    for (std::size_t l = 0; l < L; ++l) {
      const double c = cat.layer_size(f, l);
      for (std::size_t k = 0; k < K; ++k) {
        if (c <= room[k]) {
          out.set(f, l, k, true);
          room[k] -= c;
          break;
        }
      }
    }
  }
  return out;
}

struct BruteForceResult {
  Placement placement;
  double ece = 0.0;
};

// Exhaustive oracle: every layer picks one of {uncached, cluster 0..K-1};
// enumeration is lexicographic over that digit vector and strictly better
// candidates replace, so ties keep the lexicographically first optimum.
inline BruteForceResult brute_force_placement(const Catalog& cat,
                                              const NetworkGeometry& geo,
                                              const EconomicModel& econ,
                                              const RateTable& rates,
                                              const std::vector<double>& budgets) {
  const std::size_t F = cat.file_count(), L = cat.layer_count(),
                    K = geo.cluster_count();
  double combos = 1.0;
  for (std::size_t i = 0; i < F * L; ++i) {
    combos *= static_cast<double>(K + 1);
    if (combos > 1e6) {
      throw oversize_instance("brute_force_placement: instance too large");
    }
  }
  BruteForceResult best{Placement(F, L, K), 0.0};
  best.placement.cluster_budgets = budgets;
  bool have_best = false;

  std::vector<std::size_t> digit(F * L, 0);  // 0: uncached, 1+k: cluster k
  Placement cand(F, L, K);
  cand.cluster_budgets = budgets;
  std::vector<double> used(K, 0.0);
  for (;;) {
    bool feasible = true;
    for (std::size_t k = 0; k < K; ++k) {
      if (used[k] > budgets[k]) {
        feasible = false;
        break;
      }
    }
    if (feasible) {
      const double v = ece(cand, cat, geo, econ, rates);
      if (!have_best || v > best.ece) {
        best.ece = v;
        best.placement = cand;
        have_best = true;
      }
    }
    // odometer step
    std::size_t pos = F * L;
    while (pos-- > 0) {
      const std::size_t f = pos / L;
      const std::size_t l = pos % L;
      if (digit[pos] > 0) {
        cand.set(f, l, digit[pos] - 1, false);
        used[digit[pos] - 1] -= cat.layer_size(f, l);
      }
      if (digit[pos] < K) {
        ++digit[pos];
        cand.set(f, l, digit[pos] - 1, true);
        used[digit[pos] - 1] += cat.layer_size(f, l);
        break;
      }
      digit[pos] = 0;
    }
    if (pos == static_cast<std::size_t>(-1)) break;
  }
  return best;
}

struct JointSolution {
  Placement placement;
  Catalog catalog;                  // carries the optimized layer sizes
  std::vector<double> budgets_bits; // M_k per cluster (all SBSs combined)
  std::vector<double> ece_trace;    // after each full iteration
  bool converged = false;
  std::size_t iterations = 0;
};

// Alternating optimization: (a) re-solve the placement at fixed sizes via the
// relaxation plus greedy rounding, keeping the incumbent if it scores higher
// (which makes the trace nondecreasing even though the rounding step is a
// heuristic), then (b) re-optimize layer sizes and cache budgets by LP at
// fixed placement.  The LP is indifferent to how slack budget is spread, so
// leftover capacity is shared in proportion to cluster size.
inline JointSolution alternating_alg2(const Catalog& cat0,
                                      const NetworkGeometry& geo,
                                      const EconomicModel& econ,
                                      const RateTable& rates,
                                      double total_budget_bits, double delta,
                                      std::size_t max_iterations, double tau) {
  if (!(total_budget_bits > 0.0)) {
    throw std::invalid_argument("alternating_alg2: budget must be positive");
  }
  if (!(delta > 0.0) || max_iterations < 1) {
    throw std::invalid_argument("alternating_alg2: bad convergence settings");
  }
  const std::size_t F = cat0.file_count(), L = cat0.layer_count(),
                    K = geo.cluster_count();
  const double cluster_total = [&] {
    double s = 0.0;
    for (std::size_t k = 0; k < K; ++k) s += geo.cluster_size(k);
    return s;
  }();

  // Layer-size start: floors plus an equal share of the remaining file size;
  // reduces to the plain equal split under the default floors.
  std::vector<double> sizes(F * L);
  for (std::size_t f = 0; f < F; ++f) {
    double th_sum = 0.0;
    for (std::size_t l = 0; l < L; ++l) th_sum += cat0.layer_min_size(l);
    if (th_sum > cat0.file_size(f)) {
      throw infeasible_catalog("alternating_alg2: layer floors exceed file size");
    }
    const double slack = (cat0.file_size(f) - th_sum) / static_cast<double>(L);
    for (std::size_t l = 0; l < L; ++l) {
      sizes[f * L + l] = cat0.layer_min_size(l) + slack;
    }
  }
  Catalog cat = cat0.with_layer_sizes(sizes);
  std::vector<double> budgets_m(K, total_budget_bits / static_cast<double>(K));

  auto per_sbs = [&](const std::vector<double>& m) {
    std::vector<double> q(K);
    for (std::size_t k = 0; k < K; ++k) {
      q[k] = m[k] / static_cast<double>(geo.cluster_size(k));
    }
    return q;
  };

  Placement placement = mplp_baseline(cat, per_sbs(budgets_m));
  double current = ece(placement, cat, geo, econ, rates);

  JointSolution out{placement, cat, budgets_m, {current}, false, 0};
  const double unit = [&] {
    double c_max = 0.0;
    for (std::size_t f = 0; f < F; ++f) c_max = std::max(c_max, cat0.file_size(f));
    return std::max(1.0, c_max / 10.0);
  }();

  for (std::size_t t = 1; t <= max_iterations; ++t) {
    const double ece_prev = current;
    // (a) placement step at fixed sizes and budgets
    const auto q = per_sbs(budgets_m);
    const auto relaxed = solve_relaxed_placement(cat, geo, econ, rates, q, tau);
    Placement cand = greedy_round_alg1(relaxed, cat, geo, econ, rates, q);
    const double cand_ece = ece(cand, cat, geo, econ, rates);
    if (cand_ece > current) {
      placement = std::move(cand);
      current = cand_ece;
    }

    // (b) size step at fixed placement: LP over layer sizes and budgets
    LpProblem p;
    p.num_vars = F * L + K;
    p.objective.assign(p.num_vars, 0.0);
    p.lower.resize(p.num_vars);
    p.upper.resize(p.num_vars);
    for (std::size_t f = 0; f < F; ++f) {
      for (std::size_t l = 0; l < L; ++l) {
        const std::size_t j = f * L + l;
        p.lower[j] = cat0.layer_min_size(l) / unit;
        p.upper[j] = cat0.file_size(f) / unit;
        const std::size_t kc = placement.cluster_of(f, l);
        const double pr = cat.layer_probability(f, l);
        double coef = static_cast<double>(K) * pr * econ.backhaul_coeff_w_per_bit;
        if (kc != Placement::npos) {
          coef += econ.cache_coeff_w_per_bit * geo.cluster_size(kc) -
                  pr * econ.backhaul_coeff_w_per_bit;
        }
        p.objective[j] = -econ.price_energy * coef * unit;
      }
    }
    for (std::size_t k = 0; k < K; ++k) {
      p.lower[F * L + k] = 0.0;
      p.upper[F * L + k] = total_budget_bits / unit;
    }
    for (std::size_t k = 0; k < K; ++k) {  // cached load fits the cluster
      LpProblem::Row row;
      row.bound = 0.0;
      for (std::size_t f = 0; f < F; ++f) {
        for (std::size_t l = 0; l < L; ++l) {
          if (placement.cached(f, l, k)) row.coeffs.push_back({f * L + l, 1.0});
        }
      }
      row.coeffs.push_back(
          {F * L + k, -1.0 / static_cast<double>(geo.cluster_size(k))});
      p.rows.push_back(std::move(row));
    }
    {
      LpProblem::Row row;  // total cache budget
      row.bound = total_budget_bits / unit;
      for (std::size_t k = 0; k < K; ++k) row.coeffs.push_back({F * L + k, 1.0});
      p.rows.push_back(std::move(row));
    }
    for (std::size_t f = 0; f < F; ++f) {  // layers fit the file
      LpProblem::Row row;
      row.bound = cat0.file_size(f) / unit;
      for (std::size_t l = 0; l < L; ++l) row.coeffs.push_back({f * L + l, 1.0});
      p.rows.push_back(std::move(row));
    }
    const LpSolution sol = lp_solve(p);
    if (sol.status != LpStatus::Optimal) {
      throw std::runtime_error("alternating_alg2: size allocation LP failed");
    }

    // project LP dust back onto the exact feasible box
    for (std::size_t f = 0; f < F; ++f) {
      double sum = 0.0;
      for (std::size_t l = 0; l < L; ++l) {
        const std::size_t j = f * L + l;
        sizes[j] = std::min(std::max(sol.x[j] * unit, cat0.layer_min_size(l)),
                            cat0.file_size(f));
        sum += sizes[j];
      }
      if (sum > cat0.file_size(f)) {
        double excess = sum - cat0.file_size(f);
        double slack_total = 0.0;
        for (std::size_t l = 0; l < L; ++l) {
          slack_total += sizes[f * L + l] - cat0.layer_min_size(l);
        }
        if (slack_total > 0.0) {
          for (std::size_t l = 0; l < L; ++l) {
            const std::size_t j = f * L + l;
            sizes[j] -= excess * (sizes[j] - cat0.layer_min_size(l)) / slack_total;
          }
        }
      }
    }
    cat = cat0.with_layer_sizes(sizes);

    // budgets: cover each cluster's cached load, share the slack by size
    std::vector<double> load(K, 0.0);
    double committed = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      for (std::size_t f = 0; f < F; ++f) {
        for (std::size_t l = 0; l < L; ++l) {
          if (placement.cached(f, l, k)) load[k] += cat.layer_size(f, l);
        }
      }
      load[k] *= static_cast<double>(geo.cluster_size(k));
      committed += load[k];
    }
    const double spare = std::max(0.0, total_budget_bits - committed);
    for (std::size_t k = 0; k < K; ++k) {
      budgets_m[k] = load[k] +
                     spare * static_cast<double>(geo.cluster_size(k)) / cluster_total;
    }

    const double next = ece(placement, cat, geo, econ, rates);
    out.ece_trace.push_back(next);
    out.iterations = t;
    const double step = std::abs(next - ece_prev);
    current = next;
    if (step <= delta) {
      out.converged = true;
      break;
    }
  }

  out.placement = placement;
  out.placement.cluster_budgets = per_sbs(budgets_m);
  out.placement.total_budget = total_budget_bits;
  out.catalog = cat;
  out.budgets_bits = budgets_m;
  return out;
}

}  // namespace ecocache
