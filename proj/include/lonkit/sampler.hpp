#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "lonkit/config_space.hpp"
#include "lonkit/evaluator.hpp"

namespace lonkit {

/// Sampling knobs. tau/kappa/restart_prob/target defaults follow the
/// standard iterated-local-search setup for configuration sampling.
struct SamplerParams {
  std::size_t tau = 10;
  std::size_t kappa = 3;
  double restart_prob = 0.05;
  std::size_t target_optima = 100;
  std::uint64_t eval_budget = 1'000'000;
  std::uint64_t seed = 0;

  void validate() const {
    if (tau < 2) throw ValidationError("tau must be >= 2");
    if (kappa < 1) throw ValidationError("kappa must be >= 1");
    if (restart_prob < 0.0 || restart_prob > 1.0)
      throw ValidationError("restart_prob must be in [0,1]");
    if (target_optima < 1) throw ValidationError("target_optima must be >= 1");
    if (eval_budget < target_optima)
      throw ValidationError("eval_budget must be >= target_optima");
  }
};

struct TraceVertex {
  std::string key;
  double fitness;
  std::uint64_t multiplicity;
};

struct TraceEdge {
  std::string src;
  std::string dst;
  std::uint64_t count;
};

/// Ordered record of one sampling repeat: discovered local optima and
/// the perturbation transitions between them. Rediscoveries accumulate
/// into multiplicity / count rather than new events.
struct RunTrace {
  SamplerParams params;
  std::uint64_t seed = 0;
  std::vector<TraceVertex> vertices;
  std::vector<TraceEdge> edges;
  std::uint64_t evaluations = 0;
  bool budget_exhausted = false;

  std::size_t distinct_vertices() const { return vertices.size(); }

  void record_vertex(const std::string& key, double fitness) {
    auto it = vertex_index_.find(key);
    if (it != vertex_index_.end()) {
      ++vertices[it->second].multiplicity;
      return;
    }
    vertex_index_.emplace(key, vertices.size());
    vertices.push_back({key, fitness, 1});
  }

  void record_edge(const std::string& src, const std::string& dst) {
    if (src == dst) throw ValidationError("self-edge in trace");
    auto it = edge_index_.find(src + "\n" + dst);
    if (it != edge_index_.end()) {
      ++edges[it->second].count;
      return;
    }
    edge_index_.emplace(src + "\n" + dst, edges.size());
    edges.push_back({src, dst, 1});
  }

  bool has_vertex(const std::string& key) const {
    return vertex_index_.count(key) > 0;
  }

  void rebuild_index() {
    vertex_index_.clear();
    edge_index_.clear();
    for (std::size_t i = 0; i < vertices.size(); ++i)
      vertex_index_.emplace(vertices[i].key, i);
    for (std::size_t i = 0; i < edges.size(); ++i)
      edge_index_.emplace(edges[i].src + "\n" + edges[i].dst, i);
  }

 private:
  std::unordered_map<std::string, std::size_t> vertex_index_;
  std::unordered_map<std::string, std::size_t> edge_index_;
};

namespace detail {

struct BudgetSignal {};

/// Per-run evaluation gate: memoizes within the run and charges the
/// budget only for configurations this run has not probed before. Keeps
/// run behavior independent of what other repeats put in a shared cache.
class RunEvaluator {
 public:
  RunEvaluator(EvaluationCache& cache, std::uint64_t budget)
      : cache_(cache), budget_(budget) {}

  double operator()(const Configuration& x) {
    std::string key = cache_.space().canonical_key(x);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    if (memo_.size() >= budget_) throw BudgetSignal{};
    double f = cache_.evaluate(x);
    memo_.emplace(std::move(key), f);
    return f;
  }

  std::uint64_t unique_evaluations() const { return memo_.size(); }

 private:
  EvaluationCache& cache_;
  std::uint64_t budget_;
  std::unordered_map<std::string, double> memo_;
};

}  // namespace detail

/// Iterative first-improvement descent: per pass the neighbors are
/// visited in a seeded-shuffled order and the first one with
/// f(u) <= f(current) is taken. Neutral moves are admitted but only to
/// configurations not yet visited in this descent, which bounds plateau
/// walks; termination then guarantees f(result) <= f(u) for every
/// neighbor u.
template <typename EvalFn>
Configuration iterative_first_improvement(const ConfigurationSpace& space,
                                          Configuration x, EvalFn&& f,
                                          Rng& rng) {
  std::unordered_set<std::string> visited;
  visited.insert(space.canonical_key(x));
  double fx = f(x);
  for (;;) {
    std::vector<Configuration> neighbors = space.neighborhood(x);
    rng.shuffle(neighbors);
    bool moved = false;
    for (auto& u : neighbors) {
      double fu = f(u);
      if (fu > fx) continue;
      std::string key = space.canonical_key(u);
      if (!visited.insert(key).second) continue;
      x = std::move(u);
      fx = fu;
      moved = true;
      break;
    }
    if (!moved) return x;
  }
}

/// One full sampling run: initial perturbation (tau uniform draws
/// keeping improvements) followed by first-improvement descent to the
/// first local optimum, then repeated kappa-step perturbation + descent
/// with non-strict acceptance and probabilistic restart, until
/// target_optima distinct local optima are recorded or the budget is
/// exhausted. Edges run from the local optimum a perturbation started at
/// to the newly found one; transitions out of an unrecorded restart
/// point emit no edge.
inline RunTrace sample_run(const ConfigurationSpace& space,
                           EvaluationCache& cache,
                           const SamplerParams& params) {
  params.validate();
  RunTrace trace;
  trace.params = params;
  trace.seed = params.seed;
  Rng rng(params.seed);
  detail::RunEvaluator eval(cache, params.eval_budget);

  // iterations that neither find a new optimum nor spend budget would
  // otherwise loop forever on exhausted spaces
  const std::uint64_t stall_limit = 1000 + 10 * params.target_optima;
  std::uint64_t stalled = 0;

  try {
    Configuration init = space.random_sample(rng);
    double f_init = eval(init);
    for (std::size_t i = 0; i < params.tau; ++i) {
      Configuration c = space.random_sample(rng);
      double fc = eval(c);
      if (fc <= f_init) {
        init = std::move(c);
        f_init = fc;
      }
    }
    Configuration current = iterative_first_improvement(space, init, eval, rng);
    trace.record_vertex(space.canonical_key(current), eval(current));
    bool current_recorded = true;

    while (trace.distinct_vertices() < params.target_optima) {
      std::size_t before = trace.distinct_vertices();
      std::uint64_t evals_before = eval.unique_evaluations();

      const std::string start_key = space.canonical_key(current);
      const bool start_recorded = current_recorded;

      Configuration probe = current;
      for (std::size_t i = 0; i < params.kappa; ++i) {
        std::vector<Configuration> neighbors = space.neighborhood(probe);
        if (neighbors.empty()) break;
        probe = std::move(neighbors[rng.bounded(neighbors.size())]);
      }
      Configuration found =
          iterative_first_improvement(space, std::move(probe), eval, rng);
      const std::string found_key = space.canonical_key(found);
      const double f_found = eval(found);

      if (f_found <= eval(current)) {
        current = found;
        current_recorded = true;
      }
      if (rng.real() < params.restart_prob) {
        current = space.random_sample(rng);
        current_recorded = false;
      }
      trace.record_vertex(found_key, f_found);
      if (start_recorded && start_key != found_key)
        trace.record_edge(start_key, found_key);

      if (trace.distinct_vertices() == before &&
          eval.unique_evaluations() == evals_before) {
        if (++stalled >= stall_limit) {
          trace.budget_exhausted = true;
          break;
        }
      } else {
        stalled = 0;
      }
    }
  } catch (const detail::BudgetSignal&) {
    trace.budget_exhausted = true;
  }
  trace.evaluations = eval.unique_evaluations();
  return trace;
}

/// r_max independent runs, repeat j seeded with seed+j; output ordered
/// by repeat index regardless of completion order. Individual failures
/// are collected; throws only when every repeat failed.
inline std::vector<RunTrace> sample_repeats(
    const ConfigurationSpace& space, EvaluationCache& cache,
    const SamplerParams& params, std::size_t r_max, std::size_t parallelism = 1,
    std::vector<std::string>* errors_out = nullptr) {
  if (r_max < 1) throw ValidationError("r_max must be >= 1");
  if (parallelism < 1) parallelism = 1;

  std::vector<std::optional<RunTrace>> results(r_max);
  std::vector<std::string> errors(r_max);
  std::atomic<std::size_t> next{0};

  auto worker = [&]() {
    for (;;) {
      std::size_t j = next.fetch_add(1);
      if (j >= r_max) return;
      SamplerParams p = params;
      p.seed = params.seed + j;
      try {
        results[j] = sample_run(space, cache, p);
      } catch (const std::exception& e) {
        errors[j] = e.what();
      }
    }
  };

  if (parallelism == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < parallelism; ++t)
      threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }

  std::vector<RunTrace> traces;
  bool any_ok = false;
  for (std::size_t j = 0; j < r_max; ++j) {
    if (results[j]) {
      traces.push_back(std::move(*results[j]));
      any_ok = true;
    } else if (errors_out) {
      errors_out->push_back("repeat " + std::to_string(j) + ": " + errors[j]);
    }
  }
  if (!any_ok) throw Error("all sampling repeats failed: " + errors[0]);
  return traces;
}

}  // namespace lonkit
