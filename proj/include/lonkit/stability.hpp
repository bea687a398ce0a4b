#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lonkit/lon.hpp"
#include "lonkit/metrics.hpp"

namespace lonkit {

struct StabilityConfig {
  std::size_t step = 10;
  std::size_t resamples = 20;
  double alpha = 0.05;
  std::uint64_t seed = 0;

  void validate(std::size_t pool_size) const {
    if (step < 1) throw ValidationError("step must be >= 1");
    if (resamples < 2) throw ValidationError("resamples must be >= 2");
    if (alpha <= 0.0 || alpha >= 1.0)
      throw ValidationError("alpha must be in (0,1)");
    if (pool_size < 3 * step)
      throw ValidationError("pool must hold at least 3*step traces");
  }
};

struct StabilityGroup {
  std::size_t i = 0;
  std::vector<double> ac_samples;   // undefined subsamples excluded
  std::vector<double> acc_samples;
  std::optional<double> p_ac_prev;  // vs the (i-1) group, from i >= 2
  std::optional<double> p_acc_prev;
};

struct StabilityResult {
  LocalOptimaNetwork stable_lon;
  std::size_t n_stable = 0;  // repeats merged into the stable LON
  std::vector<StabilityGroup> trajectory;
  std::size_t decision_i = 0;
  bool converged = false;
};

/// Decides how many sampling repeats produce a structurally stable
/// synthesized LON. For i = 1, 2, ...: draw `resamples` random subsets
/// of size step*i from the pool (with replacement across subsets,
/// without replacement within one), synthesize each into a LON and take
/// its AC and ACC. From i >= 3, rank-sum tests compare the (i-2) vs
/// (i-1) and (i-1) vs i sample sets for both metrics; the first i where
/// all four tests find no significant difference (p >= alpha) declares
/// stability, and one randomly chosen LON of the (i-1) group is
/// returned. Pool exhaustion returns the largest group's LON flagged
/// non-converged.
inline StabilityResult detect_stable(const std::vector<RunTrace>& pool,
                                     const StabilityConfig& config,
                                     std::uint64_t space_hash = 0) {
  config.validate(pool.size());
  Rng rng(config.seed);

  std::vector<LocalOptimaNetwork> run_lons;
  run_lons.reserve(pool.size());
  for (const auto& trace : pool)
    run_lons.push_back(build_run_lon(trace, space_hash));

  std::vector<StabilityGroup> trajectory;
  // one retained LON per group, resample index preserved so the pick at
  // decision time is uniform over all subsamples
  std::vector<std::vector<LocalOptimaNetwork>> group_lons;

  for (std::size_t i = 1; config.step * i <= pool.size(); ++i) {
    StabilityGroup group;
    group.i = i;
    std::vector<LocalOptimaNetwork> lons_i;
    for (std::size_t r = 0; r < config.resamples; ++r) {
      // partial Fisher-Yates over pool indices: subset without
      // replacement within one draw
      std::vector<std::size_t> idx(pool.size());
      std::iota(idx.begin(), idx.end(), std::size_t{0});
      std::size_t take = config.step * i;
      for (std::size_t j = 0; j < take; ++j) {
        std::size_t k = j + static_cast<std::size_t>(
                                rng.bounded(idx.size() - j));
        std::swap(idx[j], idx[k]);
      }
      std::vector<const LocalOptimaNetwork*> subset;
      for (std::size_t j = 0; j < take; ++j) subset.push_back(&run_lons[idx[j]]);
      LocalOptimaNetwork merged = synthesize(subset);
      std::optional<double> ac = assortativity(merged);
      if (ac) {
        group.ac_samples.push_back(*ac);
        group.acc_samples.push_back(average_clustering(merged));
      }
      lons_i.push_back(std::move(merged));
    }
    if (group.ac_samples.size() < 2)
      throw InsufficientDataError(
          "fewer than 2 subsamples with defined assortativity at i=" +
          std::to_string(i));

    if (!trajectory.empty()) {
      const StabilityGroup& prev = trajectory.back();
      group.p_ac_prev =
          wilcoxon_rank_sum(prev.ac_samples, group.ac_samples).p_two_sided;
      group.p_acc_prev =
          wilcoxon_rank_sum(prev.acc_samples, group.acc_samples).p_two_sided;
    }
    trajectory.push_back(group);
    group_lons.push_back(std::move(lons_i));

    if (i >= 3) {
      const StabilityGroup& mid = trajectory[i - 2];  // group i-1
      const StabilityGroup& cur = trajectory[i - 1];  // group i
      bool stable = *mid.p_ac_prev >= config.alpha &&
                    *mid.p_acc_prev >= config.alpha &&
                    *cur.p_ac_prev >= config.alpha &&
                    *cur.p_acc_prev >= config.alpha;
      if (stable) {
        auto& candidates = group_lons[i - 2];  // the (i-1) group
        std::size_t pick =
            static_cast<std::size_t>(rng.bounded(candidates.size()));
        return StabilityResult{std::move(candidates[pick]),
                               config.step * (i - 1), std::move(trajectory), i,
                               true};
      }
    }
  }

  std::size_t last_i = trajectory.size();
  auto& candidates = group_lons.back();
  std::size_t pick = static_cast<std::size_t>(rng.bounded(candidates.size()));
  return StabilityResult{std::move(candidates[pick]), config.step * last_i,
                         std::move(trajectory), last_i, false};
}

}  // namespace lonkit
