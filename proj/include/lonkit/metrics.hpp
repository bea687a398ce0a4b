#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "lonkit/lon.hpp"

namespace lonkit {

/// Pearson correlation coefficient with population normalization.
inline double pcc(const std::vector<double>& x1,
                  const std::vector<double>& x2) {
  if (x1.size() != x2.size() || x1.size() < 2)
    throw ValidationError("pcc needs two equal-length vectors of size >= 2");
  const double n = static_cast<double>(x1.size());
  double m1 = std::accumulate(x1.begin(), x1.end(), 0.0) / n;
  double m2 = std::accumulate(x2.begin(), x2.end(), 0.0) / n;
  double cov = 0, v1 = 0, v2 = 0;
  for (std::size_t i = 0; i < x1.size(); ++i) {
    double d1 = x1[i] - m1, d2 = x2[i] - m2;
    cov += d1 * d2;
    v1 += d1 * d1;
    v2 += d2 * d2;
  }
  if (v1 == 0.0 || v2 == 0.0)
    throw UndefinedMetricError("pcc undefined: zero variance");
  return cov / std::sqrt(v1 * v2);
}

/// |E| / (|V|(|V|-1)), counting directed edge records.
inline double network_density(const LocalOptimaNetwork& lon) {
  double vn = static_cast<double>(lon.num_vertices());
  if (vn < 2) throw UndefinedMetricError("density undefined for vn < 2");
  return static_cast<double>(lon.num_edges()) / (vn * (vn - 1.0));
}

/// Mean number of steps along shortest paths into the global optimum
/// (unit edge weights, paths follow edge direction), averaged over the
/// vertices that can reach it; the unreachable share is reported as
/// 1 - fraction.
inline std::pair<double, double> shortest_path_length(
    const LocalOptimaNetwork& lon) {
  if (lon.num_vertices() == 0) throw ValidationError("empty LON");
  if (lon.num_vertices() == 1) return {0.0, 1.0};
  std::size_t go = global_optimum(lon);
  auto in_adj = lon.in_adjacency();
  std::vector<std::size_t> dist(lon.num_vertices(), SIZE_MAX);
  dist[go] = 0;
  std::deque<std::size_t> queue{go};
  while (!queue.empty()) {
    std::size_t v = queue.front();
    queue.pop_front();
    for (std::size_t u : in_adj[v])
      if (dist[u] == SIZE_MAX) {
        dist[u] = dist[v] + 1;
        queue.push_back(u);
      }
  }
  std::size_t reachable = 0;
  double total = 0;
  for (std::size_t d : dist)
    if (d != SIZE_MAX) {
      ++reachable;
      total += static_cast<double>(d);
    }
  double spl = reachable > 1 ? total / static_cast<double>(reachable - 1) : 0.0;
  double fraction = static_cast<double>(reachable) /
                    static_cast<double>(lon.num_vertices());
  return {spl, fraction};
}

/// Degree assortativity: Pearson correlation over directed edge records
/// between the source's remaining out-degree and the destination's
/// remaining in-degree. Empty when either endpoint degree sequence is
/// constant.
inline std::optional<double> assortativity(const LocalOptimaNetwork& lon) {
  if (lon.num_edges() < 2) return std::nullopt;
  auto out_deg = lon.out_degrees();
  auto in_deg = lon.in_degrees();
  std::vector<double> src, dst;
  for (const auto& e : lon.edges()) {
    src.push_back(static_cast<double>(out_deg[e.src]) - 1.0);
    dst.push_back(static_cast<double>(in_deg[e.dst]) - 1.0);
  }
  try {
    return pcc(src, dst);
  } catch (const UndefinedMetricError&) {
    return std::nullopt;
  }
}

/// Average local clustering coefficient on the undirected simple
/// projection: C_i = triangles at i / (k_i(k_i-1)/2), zero for k_i < 2.
inline double average_clustering(const LocalOptimaNetwork& lon) {
  std::size_t n = lon.num_vertices();
  if (n == 0) throw ValidationError("empty LON");
  std::vector<std::set<std::size_t>> adj(n);
  for (const auto& e : lon.edges()) {
    adj[e.src].insert(e.dst);
    adj[e.dst].insert(e.src);
  }
  double total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t k = adj[i].size();
    if (k < 2) continue;
    std::size_t triangles = 0;
    for (auto it = adj[i].begin(); it != adj[i].end(); ++it) {
      auto jt = it;
      for (++jt; jt != adj[i].end(); ++jt)
        if (adj[*it].count(*jt)) ++triangles;
    }
    total += static_cast<double>(triangles) /
             (static_cast<double>(k) * static_cast<double>(k - 1) / 2.0);
  }
  return total / static_cast<double>(n);
}

/// RCC(k) = 2 E>=k / (N>=k (N>=k - 1)) over the vertices with out-degree
/// >= k and the directed edge records among them. The factor 2 is kept
/// as defined, so dense directed graphs can score above 1; only relative
/// trends are interpreted. Entries with N>=k < 2 are omitted.
inline std::vector<std::pair<std::size_t, double>> rich_club_curve(
    const LocalOptimaNetwork& lon, const std::vector<std::size_t>& k_values) {
  auto out_deg = lon.out_degrees();
  std::vector<std::pair<std::size_t, double>> curve;
  for (std::size_t k : k_values) {
    std::vector<bool> in_club(lon.num_vertices(), false);
    std::size_t club_size = 0;
    for (std::size_t i = 0; i < lon.num_vertices(); ++i)
      if (out_deg[i] >= k) {
        in_club[i] = true;
        ++club_size;
      }
    if (club_size < 2) continue;
    std::size_t club_edges = 0;
    for (const auto& e : lon.edges())
      if (in_club[e.src] && in_club[e.dst]) ++club_edges;
    double denom =
        static_cast<double>(club_size) * static_cast<double>(club_size - 1);
    curve.emplace_back(k, 2.0 * static_cast<double>(club_edges) / denom);
  }
  return curve;
}

/// Funnel-bases sorted ascending by fitness (rank 1 = best, fitness ties
/// by key), paired with their out-degree in the full LON so that escape
/// attempts count toward attraction.
inline std::vector<std::pair<std::size_t, std::size_t>> funnel_base_rank_table(
    const LocalOptimaNetwork& lon, const FunnelDecomposition& decomposition) {
  auto out_deg = lon.out_degrees();
  std::vector<std::size_t> bases = decomposition.funnel_bases;
  std::sort(bases.begin(), bases.end(), [&](std::size_t a, std::size_t b) {
    if (lon.vertex(a).fitness != lon.vertex(b).fitness)
      return lon.vertex(a).fitness < lon.vertex(b).fitness;
    return lon.vertex(a).key < lon.vertex(b).key;
  });
  std::vector<std::pair<std::size_t, std::size_t>> table;
  for (std::size_t r = 0; r < bases.size(); ++r)
    table.emplace_back(r + 1, out_deg[bases[r]]);
  return table;
}

/// Number of funnel-bases one step away from the global optimum. An
/// edge into the optimum is itself improving, so a base is counted here
/// when all of its improving out-edges lead directly into the optimum
/// (base-ness judged with that last step set aside); decomposition bases
/// with such an edge cannot occur but are unioned in for completeness.
inline std::size_t go_neighborhood_radius(
    const LocalOptimaNetwork& lon, const FunnelDecomposition& decomposition) {
  if (lon.num_vertices() == 0) return 0;
  std::size_t go = global_optimum(lon);
  std::set<std::size_t> bases(decomposition.funnel_bases.begin(),
                              decomposition.funnel_bases.end());
  std::set<std::size_t> in_neighbors;
  std::set<std::size_t> escapes_elsewhere;  // improving edge not into go
  for (const auto& e : lon.edges()) {
    if (e.dst == go && e.src != go) in_neighbors.insert(e.src);
    if (e.dst != go &&
        lon.vertex(e.dst).fitness <= lon.vertex(e.src).fitness)
      escapes_elsewhere.insert(e.src);
  }
  std::size_t count = 0;
  for (std::size_t v : in_neighbors)
    if (bases.count(v) || !escapes_elsewhere.count(v)) ++count;
  return count;
}

struct RankSumResult {
  double statistic;    // rank sum of the first sample, midranks for ties
  double p_two_sided;  // in (0, 1]
};

namespace detail {

/// Exact two-sided p for the rank-sum statistic by enumerating all
/// C(n+m, n) rank assignments. Only valid without ties.
inline double ranksum_exact_p(std::size_t n, std::size_t m, double w) {
  std::size_t N = n + m;
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::uint64_t total = 0, le = 0, ge = 0;
  for (;;) {
    ++total;
    double s = 0;
    for (std::size_t i : idx) s += static_cast<double>(i + 1);
    if (s <= w + 1e-9) ++le;
    if (s >= w - 1e-9) ++ge;
    // next combination
    std::size_t i = n;
    while (i > 0 && idx[i - 1] == N - n + i - 1) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t j = i; j < n; ++j) idx[j] = idx[j - 1] + 1;
  }
  double p = 2.0 * std::min(static_cast<double>(le), static_cast<double>(ge)) /
             static_cast<double>(total);
  return std::min(p, 1.0);
}

}  // namespace detail

/// Two-sample Wilcoxon rank-sum test. Exact two-sided p by enumeration
/// when n+m <= 20 and the pooled sample has no ties; otherwise the
/// normal approximation with tie-corrected variance and continuity
/// correction.
inline RankSumResult wilcoxon_rank_sum(const std::vector<double>& a,
                                       const std::vector<double>& b) {
  if (a.size() < 2 || b.size() < 2)
    throw ValidationError("rank-sum test needs >= 2 observations per sample");
  const std::size_t n = a.size(), m = b.size(), N = n + m;

  std::vector<std::pair<double, int>> pooled;  // value, 0 = from a
  for (double v : a) pooled.emplace_back(v, 0);
  for (double v : b) pooled.emplace_back(v, 1);
  std::sort(pooled.begin(), pooled.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });

  std::vector<double> ranks(N);
  bool ties = false;
  double tie_term = 0;  // sum of t^3 - t over tie groups
  for (std::size_t i = 0; i < N;) {
    std::size_t j = i;
    while (j < N && pooled[j].first == pooled[i].first) ++j;
    double rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) ranks[k] = rank;
    if (j - i > 1) {
      ties = true;
      double t = static_cast<double>(j - i);
      tie_term += t * t * t - t;
    }
    i = j;
  }
  double w = 0;
  for (std::size_t i = 0; i < N; ++i)
    if (pooled[i].second == 0) w += ranks[i];

  double p;
  if (!ties && N <= 20) {
    p = detail::ranksum_exact_p(n, m, w);
  } else {
    double mu = static_cast<double>(n) * static_cast<double>(N + 1) / 2.0;
    double nn = static_cast<double>(n), mm = static_cast<double>(m),
           NN = static_cast<double>(N);
    double var = nn * mm / 12.0 * (NN + 1.0 - tie_term / (NN * (NN - 1.0)));
    if (var <= 0) {
      p = 1.0;
    } else {
      double z = (std::abs(w - mu) - 0.5) / std::sqrt(var);
      if (z < 0) z = 0;
      p = std::erfc(z / std::sqrt(2.0));
      p = std::min(std::max(p, std::numeric_limits<double>::min()), 1.0);
    }
  }
  return {w, p};
}

/// All scalar network metrics plus the funnel-statistics tables for one
/// LON. ac and nd are empty where structurally undefined.
struct MetricReport {
  std::size_t vn = 0;
  std::size_t en = 0;
  double spl = 0;
  double spl_reachable_fraction = 1;
  std::optional<double> ac;
  double acc = 0;
  std::optional<double> nd;
  std::vector<std::pair<std::size_t, double>> rcc_curve;
  std::vector<std::pair<std::size_t, std::size_t>> base_rank_table;
  std::size_t go_neighborhood_radius = 0;
  std::size_t num_funnels = 0;
};

inline MetricReport compute_report(const LocalOptimaNetwork& lon) {
  MetricReport report;
  report.vn = lon.num_vertices();
  report.en = lon.num_edges();
  std::tie(report.spl, report.spl_reachable_fraction) =
      shortest_path_length(lon);
  report.ac = assortativity(lon);
  report.acc = average_clustering(lon);
  if (report.vn >= 2) report.nd = network_density(lon);

  std::size_t max_out = 0;
  for (std::size_t d : lon.out_degrees()) max_out = std::max(max_out, d);
  std::vector<std::size_t> ks(max_out + 1);
  std::iota(ks.begin(), ks.end(), std::size_t{0});
  report.rcc_curve = rich_club_curve(lon, ks);

  FunnelDecomposition decomposition = funnels(lon);
  report.num_funnels = decomposition.funnel_bases.size();
  report.base_rank_table = funnel_base_rank_table(lon, decomposition);
  report.go_neighborhood_radius = go_neighborhood_radius(lon, decomposition);
  return report;
}

}  // namespace lonkit
