#pragma once

// Shared generators for the test suites. Everything here is independent
// of the library's sampling path: graphs are constructed directly.

#include <cstdint>
#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "lonkit/common.hpp"
#include "lonkit/config_space.hpp"
#include "lonkit/lon.hpp"

namespace testutil {

inline lonkit::ConfigurationSpace binary_space(std::size_t n) {
  std::vector<lonkit::OptionSpec> opts;
  for (std::size_t i = 0; i < n; ++i)
    opts.push_back({"o" + std::to_string(i), {"0", "1"}});
  return lonkit::ConfigurationSpace(std::move(opts));
}

inline std::string vkey(std::size_t i, const char* prefix = "v") {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%s%03zu", prefix, i);
  return buf;
}

/// Random directed graph without self-loops: n vertices, random fitness,
/// each ordered pair carries an edge with probability p. Distinct key
/// prefixes give graphs that can be merged without fitness conflicts.
inline lonkit::LocalOptimaNetwork random_lon(lonkit::Rng& rng, std::size_t n,
                                             double p,
                                             bool improving_only = false,
                                             const char* prefix = "v") {
  std::vector<lonkit::LonVertex> vertices;
  std::vector<double> fitness(n);
  for (std::size_t i = 0; i < n; ++i) {
    fitness[i] = rng.real();
    vertices.push_back({vkey(i, prefix), fitness[i], 1 + rng.bounded(5)});
  }
  std::vector<std::pair<std::pair<std::string, std::string>, std::uint64_t>>
      edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || rng.real() >= p) continue;
      if (improving_only && fitness[j] > fitness[i]) continue;
      edges.push_back({{vkey(i, prefix), vkey(j, prefix)}, 1 + rng.bounded(3)});
    }
  return lonkit::LocalOptimaNetwork(std::move(vertices), std::move(edges), {},
                                    0);
}

/// All simple paths from `src` following edges of the improving
/// subgraph; used as the funnel path-existence oracle.
inline bool improving_path_exists(const lonkit::LocalOptimaNetwork& lon,
                                  std::size_t src, std::size_t dst) {
  auto adj = lon.out_adjacency();
  std::vector<bool> seen(lon.num_vertices(), false);
  std::vector<std::size_t> stack{src};
  seen[src] = true;
  while (!stack.empty()) {
    std::size_t v = stack.back();
    stack.pop_back();
    if (v == dst) return true;
    for (std::size_t u : adj[v]) {
      if (lon.vertex(u).fitness > lon.vertex(v).fitness) continue;
      if (!seen[u]) {
        seen[u] = true;
        stack.push_back(u);
      }
    }
  }
  return false;
}

}  // namespace testutil
