#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "lonkit/common.hpp"
#include "lonkit/sampler.hpp"

namespace lonkit {

struct LonVertex {
  std::string key;
  double fitness;
  std::uint64_t multiplicity;
};

struct LonEdge {
  std::size_t src;
  std::size_t dst;
  std::uint64_t count;
};

/// Directed multigraph-with-counts of local optima. Vertex ids are dense
/// integers assigned in key order at construction; files reference keys
/// only. Immutable after construction; all operations below are pure.
class LocalOptimaNetwork {
 public:
  LocalOptimaNetwork(std::vector<LonVertex> vertices,
                     std::vector<std::pair<std::pair<std::string, std::string>,
                                           std::uint64_t>> edges,
                     std::vector<std::uint64_t> provenance,
                     std::uint64_t space_hash = 0)
      : provenance_(std::move(provenance)), space_hash_(space_hash) {
    std::sort(vertices.begin(), vertices.end(),
              [](const LonVertex& a, const LonVertex& b) {
                return a.key < b.key;
              });
    for (std::size_t i = 0; i < vertices.size(); ++i) {
      if (i > 0 && vertices[i].key == vertices[i - 1].key)
        throw ValidationError("duplicate vertex key '" + vertices[i].key + "'");
      if (!std::isfinite(vertices[i].fitness))
        throw ValidationError("non-finite fitness at '" + vertices[i].key +
                              "'");
      if (vertices[i].multiplicity < 1)
        throw ValidationError("vertex multiplicity must be >= 1");
      index_.emplace(vertices[i].key, i);
    }
    vertices_ = std::move(vertices);

    std::map<std::pair<std::size_t, std::size_t>, std::uint64_t> merged;
    for (auto& [pair, count] : edges) {
      auto s = index_.find(pair.first);
      auto d = index_.find(pair.second);
      if (s == index_.end() || d == index_.end())
        throw ValidationError("edge endpoint not in vertex set: '" +
                              pair.first + "' -> '" + pair.second + "'");
      if (s->second == d->second)
        throw ValidationError("self-loop at '" + pair.first + "'");
      if (count < 1) throw ValidationError("edge count must be >= 1");
      merged[{s->second, d->second}] += count;
    }
    for (const auto& [pair, count] : merged)
      edges_.push_back({pair.first, pair.second, count});
  }

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_edges() const { return edges_.size(); }
  const std::vector<LonVertex>& vertices() const { return vertices_; }
  const std::vector<LonEdge>& edges() const { return edges_; }
  const std::vector<std::uint64_t>& provenance() const { return provenance_; }
  std::uint64_t space_hash() const { return space_hash_; }

  const LonVertex& vertex(std::size_t id) const { return vertices_[id]; }

  std::size_t id_of(const std::string& key) const {
    auto it = index_.find(key);
    if (it == index_.end())
      throw ValidationError("no vertex with key '" + key + "'");
    return it->second;
  }

  bool has_vertex(const std::string& key) const { return index_.count(key); }

  std::vector<std::size_t> out_degrees() const {
    std::vector<std::size_t> deg(vertices_.size(), 0);
    for (const auto& e : edges_) ++deg[e.src];
    return deg;
  }

  std::vector<std::size_t> in_degrees() const {
    std::vector<std::size_t> deg(vertices_.size(), 0);
    for (const auto& e : edges_) ++deg[e.dst];
    return deg;
  }

  std::vector<std::vector<std::size_t>> out_adjacency() const {
    std::vector<std::vector<std::size_t>> adj(vertices_.size());
    for (const auto& e : edges_) adj[e.src].push_back(e.dst);
    return adj;
  }

  std::vector<std::vector<std::size_t>> in_adjacency() const {
    std::vector<std::vector<std::size_t>> adj(vertices_.size());
    for (const auto& e : edges_) adj[e.dst].push_back(e.src);
    return adj;
  }

 private:
  std::vector<LonVertex> vertices_;
  std::vector<LonEdge> edges_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::uint64_t> provenance_;
  std::uint64_t space_hash_;
};

namespace detail {

inline void check_fitness_consistent(const std::string& key, double a,
                                     double b) {
  double scale = std::max({std::abs(a), std::abs(b), 1.0});
  if (std::abs(a - b) > 1e-9 * scale)
    throw InconsistentTraceError("key '" + key + "' carries fitness " +
                                 std::to_string(a) + " and " +
                                 std::to_string(b));
}

}  // namespace detail

/// One vertex per distinct trace key with summed multiplicity, one edge
/// per ordered pair with summed count. Identical keys must carry
/// identical fitness (to 1e-9 relative); a mismatch signals a noisy
/// evaluator used without caching.
inline LocalOptimaNetwork build_run_lon(const RunTrace& trace,
                                        std::uint64_t space_hash = 0) {
  std::map<std::string, LonVertex> by_key;
  for (const auto& v : trace.vertices) {
    auto it = by_key.find(v.key);
    if (it == by_key.end()) {
      by_key.emplace(v.key, LonVertex{v.key, v.fitness, v.multiplicity});
    } else {
      detail::check_fitness_consistent(v.key, it->second.fitness, v.fitness);
      it->second.multiplicity += v.multiplicity;
    }
  }
  std::vector<LonVertex> vertices;
  for (auto& [k, v] : by_key) vertices.push_back(std::move(v));
  std::vector<std::pair<std::pair<std::string, std::string>, std::uint64_t>>
      edges;
  for (const auto& e : trace.edges)
    edges.push_back({{e.src, e.dst}, e.count});
  return LocalOptimaNetwork(std::move(vertices), std::move(edges),
                            {trace.seed}, space_hash);
}

/// Vertex-wise union keyed by canonical key with multiplicities summed,
/// edge-wise union with counts summed, provenance concatenated.
/// Commutative and associative up to id relabeling.
inline LocalOptimaNetwork synthesize(
    const std::vector<const LocalOptimaNetwork*>& lons) {
  if (lons.empty()) throw ValidationError("synthesize needs >= 1 LON");
  std::map<std::string, LonVertex> by_key;
  std::map<std::pair<std::string, std::string>, std::uint64_t> edge_counts;
  std::vector<std::uint64_t> provenance;
  std::uint64_t space_hash = lons.front()->space_hash();
  for (const auto* lon : lons) {
    if (lon->space_hash() != space_hash)
      throw ValidationError("cannot synthesize LONs from different spaces");
    for (const auto& v : lon->vertices()) {
      auto it = by_key.find(v.key);
      if (it == by_key.end()) {
        by_key.emplace(v.key, v);
      } else {
        detail::check_fitness_consistent(v.key, it->second.fitness, v.fitness);
        it->second.multiplicity += v.multiplicity;
      }
    }
    for (const auto& e : lon->edges())
      edge_counts[{lon->vertex(e.src).key, lon->vertex(e.dst).key}] += e.count;
    provenance.insert(provenance.end(), lon->provenance().begin(),
                      lon->provenance().end());
  }
  std::vector<LonVertex> vertices;
  for (auto& [k, v] : by_key) vertices.push_back(std::move(v));
  std::vector<std::pair<std::pair<std::string, std::string>, std::uint64_t>>
      edges;
  for (const auto& [pair, count] : edge_counts)
    edges.push_back({pair, count});
  return LocalOptimaNetwork(std::move(vertices), std::move(edges),
                            std::move(provenance), space_hash);
}

inline LocalOptimaNetwork synthesize(
    const std::vector<LocalOptimaNetwork>& lons) {
  std::vector<const LocalOptimaNetwork*> ptrs;
  for (const auto& g : lons) ptrs.push_back(&g);
  return synthesize(ptrs);
}

/// Best-fitness vertex; ties broken by lexicographically smallest key
/// (which is the id order, so the first minimum wins).
inline std::size_t global_optimum(const LocalOptimaNetwork& lon) {
  if (lon.num_vertices() == 0) throw ValidationError("empty LON");
  std::size_t best = 0;
  for (std::size_t i = 1; i < lon.num_vertices(); ++i)
    if (lon.vertex(i).fitness < lon.vertex(best).fitness) best = i;
  return best;
}

struct PruneReport {
  std::uint64_t removed_vertices = 0;
  std::uint64_t removed_multiplicity = 0;
  /// escape attempts recorded per surviving vertex: summed counts of its
  /// edges into removed sinks
  std::map<std::string, std::uint64_t> escape_attempts;
};

/// Repeatedly removes zero-out-degree vertices that are not the global
/// optimum and are strictly worse than the best of their in-neighbors,
/// until a fixpoint. These record failed escapes from a funnel-base, not
/// landscape structure.
inline LocalOptimaNetwork prune(const LocalOptimaNetwork& lon,
                                PruneReport* report = nullptr) {
  std::size_t n = lon.num_vertices();
  std::vector<bool> removed(n, false);
  std::size_t go = global_optimum(lon);

  for (;;) {
    std::vector<std::size_t> out_deg(n, 0);
    std::vector<double> best_in(n, std::numeric_limits<double>::infinity());
    std::vector<bool> has_in(n, false);
    for (const auto& e : lon.edges()) {
      if (removed[e.src] || removed[e.dst]) continue;
      ++out_deg[e.src];
      has_in[e.dst] = true;
      best_in[e.dst] = std::min(best_in[e.dst], lon.vertex(e.src).fitness);
    }
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (removed[i] || i == go) continue;
      if (out_deg[i] == 0 && has_in[i] &&
          lon.vertex(i).fitness > best_in[i]) {
        removed[i] = true;
        changed = true;
      }
    }
    if (!changed) break;
  }

  if (report) {
    *report = PruneReport{};
    for (std::size_t i = 0; i < n; ++i) {
      if (removed[i]) {
        ++report->removed_vertices;
        report->removed_multiplicity += lon.vertex(i).multiplicity;
      }
    }
    for (const auto& e : lon.edges())
      if (!removed[e.src] && removed[e.dst])
        report->escape_attempts[lon.vertex(e.src).key] += e.count;
  }

  std::vector<LonVertex> vertices;
  for (std::size_t i = 0; i < n; ++i)
    if (!removed[i]) vertices.push_back(lon.vertex(i));
  std::vector<std::pair<std::pair<std::string, std::string>, std::uint64_t>>
      edges;
  for (const auto& e : lon.edges())
    if (!removed[e.src] && !removed[e.dst])
      edges.push_back(
          {{lon.vertex(e.src).key, lon.vertex(e.dst).key}, e.count});
  return LocalOptimaNetwork(std::move(vertices), std::move(edges),
                            lon.provenance(), lon.space_hash());
}

/// Keeps exactly the edges with f(dst) <= f(src); neutral edges stay
/// (non-strict, matching how the sampler treats neutrality). All
/// vertices are retained. Idempotent.
inline LocalOptimaNetwork improving_subgraph(const LocalOptimaNetwork& lon) {
  std::vector<std::pair<std::pair<std::string, std::string>, std::uint64_t>>
      edges;
  for (const auto& e : lon.edges())
    if (lon.vertex(e.dst).fitness <= lon.vertex(e.src).fitness)
      edges.push_back(
          {{lon.vertex(e.src).key, lon.vertex(e.dst).key}, e.count});
  std::vector<LonVertex> vertices(lon.vertices());
  return LocalOptimaNetwork(std::move(vertices), std::move(edges),
                            lon.provenance(), lon.space_hash());
}

struct FunnelDecomposition {
  /// funnel-base vertex ids (for a collapsed neutral cycle, the member
  /// with the smallest key represents the base)
  std::vector<std::size_t> funnel_bases;
  /// base id -> all vertex ids with a monotonically improving path into
  /// that base (the base included)
  std::map<std::size_t, std::set<std::size_t>> funnels;
  /// vertices belonging to more than one funnel
  std::set<std::size_t> overlapping;
};

/// Funnel decomposition on the improving subgraph. Any cycle there is
/// fitness-neutral, so strongly connected components are collapsed
/// before the reverse breadth-first sweep from each zero-out-degree
/// component; members map back to their funnels afterwards.
inline FunnelDecomposition funnels(const LocalOptimaNetwork& lon) {
  LocalOptimaNetwork imp = improving_subgraph(lon);
  std::size_t n = imp.num_vertices();

  // Tarjan SCC, iterative
  auto adj = imp.out_adjacency();
  std::vector<std::size_t> comp(n, SIZE_MAX), low(n), disc(n, SIZE_MAX);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::size_t timer = 0, n_comp = 0;
  {
    struct Frame {
      std::size_t v;
      std::size_t edge;
    };
    for (std::size_t root = 0; root < n; ++root) {
      if (disc[root] != SIZE_MAX) continue;
      std::vector<Frame> frames{{root, 0}};
      disc[root] = low[root] = timer++;
      stack.push_back(root);
      on_stack[root] = true;
      while (!frames.empty()) {
        auto& fr = frames.back();
        if (fr.edge < adj[fr.v].size()) {
          std::size_t w = adj[fr.v][fr.edge++];
          if (disc[w] == SIZE_MAX) {
            disc[w] = low[w] = timer++;
            stack.push_back(w);
            on_stack[w] = true;
            frames.push_back({w, 0});
          } else if (on_stack[w]) {
            low[fr.v] = std::min(low[fr.v], disc[w]);
          }
        } else {
          if (low[fr.v] == disc[fr.v]) {
            for (;;) {
              std::size_t w = stack.back();
              stack.pop_back();
              on_stack[w] = false;
              comp[w] = n_comp;
              if (w == fr.v) break;
            }
            ++n_comp;
          }
          std::size_t v = fr.v;
          frames.pop_back();
          if (!frames.empty())
            low[frames.back().v] = std::min(low[frames.back().v], low[v]);
        }
      }
    }
  }

  // condensation adjacency (reversed) and out-degrees
  std::vector<std::set<std::size_t>> comp_in(n_comp);
  std::vector<std::size_t> comp_out(n_comp, 0);
  for (const auto& e : imp.edges()) {
    if (comp[e.src] == comp[e.dst]) continue;
    if (comp_in[comp[e.dst]].insert(comp[e.src]).second)
      ++comp_out[comp[e.src]];
  }

  std::vector<std::vector<std::size_t>> comp_members(n_comp);
  for (std::size_t v = 0; v < n; ++v) comp_members[comp[v]].push_back(v);

  FunnelDecomposition out;
  std::map<std::size_t, std::size_t> member_count;  // vertex -> #funnels
  for (std::size_t c = 0; c < n_comp; ++c) {
    if (comp_out[c] != 0) continue;
    // base representative: smallest key = smallest id
    std::size_t base =
        *std::min_element(comp_members[c].begin(), comp_members[c].end());
    out.funnel_bases.push_back(base);
    // reverse BFS over the condensation
    std::set<std::size_t> seen{c};
    std::deque<std::size_t> queue{c};
    while (!queue.empty()) {
      std::size_t cur = queue.front();
      queue.pop_front();
      for (std::size_t p : comp_in[cur])
        if (seen.insert(p).second) queue.push_back(p);
    }
    std::set<std::size_t>& members = out.funnels[base];
    for (std::size_t cc : seen)
      for (std::size_t v : comp_members[cc]) {
        members.insert(v);
        ++member_count[v];
      }
  }
  for (const auto& [v, cnt] : member_count)
    if (cnt > 1) out.overlapping.insert(v);
  std::sort(out.funnel_bases.begin(), out.funnel_bases.end());
  return out;
}

}  // namespace lonkit
