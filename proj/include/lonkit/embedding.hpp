#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "lonkit/lon.hpp"
#include "lonkit/metrics.hpp"

namespace lonkit {

struct EmbeddingConfig {
  std::size_t wl_iterations = 3;
  std::size_t dimension = 128;
  std::uint64_t hash_seed = 0;

  void validate() const {
    if (wl_iterations < 1) throw ValidationError("wl_iterations must be >= 1");
    if (dimension < 8) throw ValidationError("dimension must be >= 8");
  }
};

struct EmbeddingVector {
  std::string source;
  std::vector<double> values;  // L2-normalized
};

/// Out-degree fusion: 1 stays 1 (bridge vertices), 2-10 -> 2 (weak
/// attraction), then 20-wide bands 11-30 -> 3, 31-50 -> 5, 51-70 -> 7,
/// 71-90 -> 9, 91-110 -> 11. Degrees outside the table: 0 keeps its own
/// label, above 110 clamps to 11.
inline std::uint64_t bucket_out_degree(std::size_t d) {
  if (d == 0) return 0;
  if (d == 1) return 1;
  if (d <= 10) return 2;
  if (d > 110) return 11;
  std::size_t band = (d - 11) / 20;  // 0..4 for 11..110
  return 2 * band + 3;
}

/// Weisfeiler-Lehman subtree feature embedding. Initial label = bucketed
/// out-degree; each refinement hashes (own label, sorted in-neighbor
/// labels, sorted out-neighbor labels). Every label occurrence across
/// all rounds is hashed with hash_seed into one of `dimension` buckets;
/// the count vector is L2-normalized. Invariant under vertex relabeling
/// by construction.
inline EmbeddingVector embed(const LocalOptimaNetwork& lon,
                             const EmbeddingConfig& config,
                             std::string source = "") {
  config.validate();
  if (lon.num_vertices() == 0) throw ValidationError("empty LON");
  const std::size_t n = lon.num_vertices();

  auto in_adj = lon.in_adjacency();
  auto out_adj = lon.out_adjacency();
  auto out_deg = lon.out_degrees();

  std::vector<double> counts(config.dimension, 0.0);
  auto tally = [&](std::uint64_t label) {
    std::uint64_t h = mix64(config.hash_seed ^ 0x5851f42d4c957f2dULL, label);
    counts[h % config.dimension] += 1.0;
  };

  std::vector<std::uint64_t> labels(n);
  for (std::size_t v = 0; v < n; ++v) {
    labels[v] = bucket_out_degree(out_deg[v]);
    tally(labels[v]);
  }

  for (std::size_t round = 0; round < config.wl_iterations; ++round) {
    std::vector<std::uint64_t> next(n);
    for (std::size_t v = 0; v < n; ++v) {
      std::vector<std::uint64_t> in_labels, out_labels;
      for (std::size_t u : in_adj[v]) in_labels.push_back(labels[u]);
      for (std::size_t u : out_adj[v]) out_labels.push_back(labels[u]);
      std::sort(in_labels.begin(), in_labels.end());
      std::sort(out_labels.begin(), out_labels.end());
      std::uint64_t h = mix64(0x9e3779b97f4a7c15ULL, labels[v]);
      h = mix64(h, 0xa0761d6478bd642fULL);  // in/out section separators
      for (std::uint64_t l : in_labels) h = mix64(h, l);
      h = mix64(h, 0xe7037ed1a0b428dbULL);
      for (std::uint64_t l : out_labels) h = mix64(h, l);
      next[v] = h;
      tally(h);
    }
    labels = std::move(next);
  }

  double norm = 0;
  for (double c : counts) norm += c * c;
  norm = std::sqrt(norm);
  if (norm == 0.0) throw Error("zero embedding vector");
  for (double& c : counts) c /= norm;
  return {std::move(source), std::move(counts)};
}

/// Pairwise PCC of the embedding vectors; diagonal pinned to 1.
inline std::vector<std::vector<double>> similarity_matrix(
    const std::vector<EmbeddingVector>& vectors) {
  if (vectors.size() < 2)
    throw ValidationError("similarity matrix needs >= 2 vectors");
  for (const auto& v : vectors)
    if (v.values.size() != vectors.front().values.size())
      throw ValidationError("embedding vectors differ in dimension");
  std::size_t n = vectors.size();
  std::vector<std::vector<double>> m(n, std::vector<double>(n, 1.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double v = pcc(vectors[i].values, vectors[j].values);
      m[i][j] = v;
      m[j][i] = v;
    }
  return m;
}

}  // namespace lonkit
