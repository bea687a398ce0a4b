// Command-line pipeline over the lonkit library: sample a configuration
// landscape, synthesize a stable LON, analyze it, and export/compare.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lonkit/config_space.hpp"
#include "lonkit/embedding.hpp"
#include "lonkit/evaluator.hpp"
#include "lonkit/io.hpp"
#include "lonkit/lon.hpp"
#include "lonkit/metrics.hpp"
#include "lonkit/sampler.hpp"
#include "lonkit/stability.hpp"

namespace fs = std::filesystem;
using namespace lonkit;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string round4(double v) {
  std::ostringstream os;
  os << std::setprecision(4) << v;
  return os.str();
}

std::ofstream open_out(const fs::path& path) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path.string());
  return in;
}

ConfigurationSpace load_space(const fs::path& path) {
  std::ifstream in = open_in(path);
  return parse_space(in);
}

struct EvaluatorSpec {
  std::string table_path;
  bool negate = false;
  std::string nk;  // "n,k,seed"
  std::string exec_template;
  std::string space_path;
  double timeout_sec = 60.0;
  std::size_t repeats = 1;
  std::string aggregation = "median";

  void add_flags(CLI::App* cmd) {
    cmd->add_option("--table", table_path, "measurement table CSV");
    cmd->add_flag("--negate", negate,
                  "negate table fitness (maximization data)");
    cmd->add_option("--nk", nk, "synthetic NK landscape as n,k,seed");
    cmd->add_option("--exec", exec_template,
                    "external command template with {option} placeholders");
    cmd->add_option("--space", space_path,
                    "space definition file (table/exec backends)");
    cmd->add_option("--timeout", timeout_sec, "external command timeout [s]");
    cmd->add_option("--repeats", repeats, "measurement repetitions");
    cmd->add_option("--agg", aggregation, "aggregation: mean|median|min");
  }

  std::pair<ConfigurationSpace, std::shared_ptr<FitnessEvaluator>> build()
      const {
    int selected = (!table_path.empty()) + (!nk.empty()) +
                   (!exec_template.empty());
    if (selected != 1)
      throw UsageError("exactly one of --table, --nk, --exec is required");
    if (!nk.empty()) {
      std::size_t n = 0, k = 0;
      std::uint64_t seed = 0;
      char c1 = 0, c2 = 0;
      std::istringstream ss(nk);
      if (!(ss >> n >> c1 >> k >> c2 >> seed) || c1 != ',' || c2 != ',')
        throw UsageError("--nk expects n,k,seed");
      auto eval = std::make_shared<NKLandscape>(n, k, seed);
      return {eval->space(), eval};
    }
    if (space_path.empty())
      throw UsageError("--space is required for table/exec backends");
    ConfigurationSpace space = load_space(space_path);
    if (!table_path.empty()) {
      std::ifstream in = open_in(table_path);
      auto table = load_table(space, in, negate);
      return {space, std::make_shared<TableEvaluator>(space, std::move(table))};
    }
    auto ms = std::chrono::milliseconds(
        static_cast<std::int64_t>(timeout_sec * 1000.0));
    return {space, std::make_shared<ExternalCommandEvaluator>(
                       space, exec_template, ms, repeats,
                       parse_aggregation(aggregation))};
  }
};

std::string run_filename(std::size_t j) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "run_%06zu.jsonl", j);
  return buf;
}

int cmd_sample(const fs::path& workspace, const EvaluatorSpec& spec,
               const SamplerParams& params, std::size_t runs,
               std::size_t parallelism, const std::string& producer) {
  auto [space, evaluator] = spec.build();
  EvaluationCache cache(evaluator);

  fs::create_directories(workspace / "runs");
  open_out(workspace / "space.txt") << format_space(space);

  std::vector<std::string> errors;
  auto t0 = std::chrono::steady_clock::now();
  std::vector<RunTrace> traces =
      sample_repeats(space, cache, params, runs, parallelism, &errors);
  auto elapsed = std::chrono::duration<double>(
                     std::chrono::steady_clock::now() - t0)
                     .count();

  for (const auto& trace : traces) {
    std::size_t j = static_cast<std::size_t>(trace.seed - params.seed);
    std::ofstream out = open_out(workspace / "runs" / run_filename(j));
    save_trace(trace, out, producer);
    std::cout << run_filename(j) << ": " << trace.distinct_vertices()
              << " optima, " << trace.evaluations << " evaluations"
              << (trace.budget_exhausted ? " [budget]" : "") << '\n';
  }
  std::cout << traces.size() << "/" << runs << " runs in " << round4(elapsed)
            << " s, cache " << cache.unique_evaluations()
            << " unique evaluations\n";
  for (const auto& e : errors) std::cerr << "error: " << e << '\n';
  return errors.empty() ? 0 : 1;
}

int cmd_stable(const fs::path& workspace, const fs::path& runs_dir,
               const StabilityConfig& config, const std::string& producer) {
  std::vector<fs::path> files;
  if (fs::is_directory(runs_dir))
    for (const auto& entry : fs::directory_iterator(runs_dir))
      if (entry.path().extension() == ".jsonl") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.size() < 3 * config.step)
    throw UsageError("need at least " + std::to_string(3 * config.step) +
                     " traces in " + runs_dir.string());
  std::vector<RunTrace> pool;
  for (const auto& f : files) {
    std::ifstream in = open_in(f);
    pool.push_back(load_trace(in));
  }
  std::uint64_t hash = 0;
  if (fs::exists(workspace / "space.txt"))
    hash = space_hash(load_space(workspace / "space.txt"));

  StabilityResult result = detect_stable(pool, config, hash);
  {
    auto out = open_out(workspace / "lons" / "stable.json");
    save_lon(result.stable_lon, out, producer);
  }
  {
    auto out = open_out(workspace / "reports" / "stability.csv");
    save_trajectory_csv(result, out, producer);
  }
  {
    json summary = stability_summary_json(result);
    summary["producer"] = producer;
    open_out(workspace / "reports" / "stability.json") << summary.dump(2)
                                                       << '\n';
  }
  std::cout << "n_stable=" << result.n_stable
            << " decision_i=" << result.decision_i
            << (result.converged ? "" : " [non-converged]") << '\n';
  return result.converged ? 0 : 1;
}

int cmd_analyze(const fs::path& workspace, const fs::path& lon_path,
                bool no_prune, const std::string& producer) {
  std::ifstream in = open_in(lon_path);
  LocalOptimaNetwork lon = load_lon(in);

  PruneReport prune_report;
  LocalOptimaNetwork analyzed =
      no_prune ? lon : prune(lon, &prune_report);

  MetricReport report = compute_report(analyzed);
  FunnelDecomposition decomposition = funnels(analyzed);

  {
    json j = report_to_json(report);
    j["producer"] = producer;
    j["pruned"] = !no_prune;
    open_out(workspace / "reports" / "metrics.json") << j.dump(2) << '\n';
  }
  open_out(workspace / "reports" / "funnels.json")
      << funnels_to_json(analyzed, decomposition).dump(2) << '\n';
  {
    auto out = open_out(workspace / "reports" / "base_rank.csv");
    save_base_rank_csv(report, out, producer);
  }
  {
    auto out = open_out(workspace / "reports" / "rcc.csv");
    save_rcc_csv(report, out, producer);
  }
  if (!no_prune) {
    json j{{"producer", producer},
           {"removed_vertices", prune_report.removed_vertices},
           {"removed_multiplicity", prune_report.removed_multiplicity},
           {"escape_attempts", json::object()}};
    for (const auto& [key, count] : prune_report.escape_attempts)
      j["escape_attempts"][key] = count;
    open_out(workspace / "reports" / "prune.json") << j.dump(2) << '\n';
  }

  std::cout << "VN=" << report.vn << " EN=" << report.en
            << " SPL=" << round4(report.spl)
            << " (reachable " << round4(report.spl_reachable_fraction) << ")"
            << " AC=" << (report.ac ? round4(*report.ac) : "undefined")
            << " ACC=" << round4(report.acc)
            << " ND=" << (report.nd ? round4(*report.nd) : "undefined")
            << " funnels=" << report.num_funnels
            << " go_radius=" << report.go_neighborhood_radius << '\n';
  return 0;
}

int cmd_export(const fs::path& lon_path, const std::string& format,
               const fs::path& out_path, const std::string& producer) {
  std::ifstream in = open_in(lon_path);
  LocalOptimaNetwork lon = load_lon(in);
  std::ofstream out = open_out(out_path);
  if (format == "dot")
    export_dot(lon, out);
  else if (format == "graphml")
    export_graphml(lon, out);
  else if (format == "json")
    save_lon(lon, out, producer);
  else
    throw UsageError("unknown format '" + format + "'");
  std::cout << out_path.string() << '\n';
  return 0;
}

int cmd_compare(const fs::path& workspace,
                const std::vector<std::string>& lon_paths,
                const EmbeddingConfig& config, const std::string& producer) {
  if (lon_paths.size() < 2) throw UsageError("compare needs >= 2 LON files");
  std::vector<EmbeddingVector> vectors;
  std::vector<std::string> ids;
  for (const auto& p : lon_paths) {
    std::ifstream in = open_in(p);
    LocalOptimaNetwork lon = load_lon(in);
    std::string id = fs::path(p).stem().string();
    ids.push_back(id);
    vectors.push_back(embed(lon, config, id));
  }
  {
    auto out = open_out(workspace / "reports" / "vectors.csv");
    save_vectors_csv(vectors, out, producer);
  }
  auto matrix = similarity_matrix(vectors);
  {
    auto out = open_out(workspace / "reports" / "similarity.csv");
    save_similarity_csv(ids, matrix, out, producer);
  }
  std::cout << vectors.size() << "x" << vectors.size()
            << " similarity matrix written\n";
  return 0;
}

std::string make_producer(int argc, char** argv) {
  std::string p;
  for (int i = 0; i < argc; ++i) {
    if (i) p += ' ';
    p += argv[i];
  }
  return p;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"local optima network sampling and analysis"};
  app.require_subcommand(1);

  std::string workspace = ".";
  std::uint64_t seed = 0;
  std::size_t parallelism = 1;
  app.add_option("--workspace", workspace, "workspace directory");
  app.add_option("--seed", seed, "master random seed");
  app.add_option("--parallelism", parallelism, "worker threads");

  // sample
  auto* sample = app.add_subcommand("sample", "run the sampling repeats");
  EvaluatorSpec spec;
  spec.add_flags(sample);
  SamplerParams params;
  std::size_t runs = 300;
  sample->add_option("--runs", runs, "independent repeats (r_max)");
  sample->add_option("--tau", params.tau, "initial random samples");
  sample->add_option("--kappa", params.kappa, "perturbation steps");
  sample->add_option("--restart-prob", params.restart_prob,
                     "restart probability");
  sample->add_option("--target", params.target_optima,
                     "local optima per run");
  sample->add_option("--budget", params.eval_budget,
                     "unique evaluations per run");

  // stable
  auto* stable = app.add_subcommand("stable", "synthesize a stable LON");
  StabilityConfig stability;
  std::string runs_dir;
  stable->add_option("--runs-dir", runs_dir, "trace directory");
  stable->add_option("--step", stability.step, "subset-size increment");
  stable->add_option("--resamples", stability.resamples, "subsets per size");
  stable->add_option("--alpha", stability.alpha, "significance level");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "metric and funnel reports");
  std::string lon_path;
  bool no_prune = false;
  analyze->add_option("--lon", lon_path, "LON file");
  analyze->add_flag("--no-prune", no_prune, "skip pruning");

  // export
  auto* exp = app.add_subcommand("export", "write DOT/GraphML/JSON");
  std::string exp_lon, format = "dot", out_path;
  exp->add_option("--lon", exp_lon, "LON file");
  exp->add_option("--format", format, "dot|graphml|json");
  exp->add_option("--out", out_path, "output file");

  // compare
  auto* compare = app.add_subcommand("compare", "embedding similarity matrix");
  std::vector<std::string> compare_lons;
  EmbeddingConfig embedding;
  compare->add_option("lons", compare_lons, "LON files");
  compare->add_option("--wl-iterations", embedding.wl_iterations,
                      "WL refinement rounds");
  compare->add_option("--dimension", embedding.dimension, "vector length");
  compare->add_option("--hash-seed", embedding.hash_seed, "feature hash seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const std::string producer = make_producer(argc, argv);
  const fs::path ws(workspace);
  try {
    if (*sample) {
      params.seed = seed;
      return cmd_sample(ws, spec, params, runs, parallelism, producer);
    }
    if (*stable) {
      stability.seed = seed;
      fs::path rd = runs_dir.empty() ? ws / "runs" : fs::path(runs_dir);
      return cmd_stable(ws, rd, stability, producer);
    }
    if (*analyze) {
      fs::path lp =
          lon_path.empty() ? ws / "lons" / "stable.json" : fs::path(lon_path);
      return cmd_analyze(ws, lp, no_prune, producer);
    }
    if (*exp) {
      if (exp_lon.empty()) exp_lon = (ws / "lons" / "stable.json").string();
      if (out_path.empty())
        out_path = (ws / "reports" / ("lon." + format)).string();
      return cmd_export(exp_lon, format, out_path, producer);
    }
    if (*compare) {
      return cmd_compare(ws, compare_lons, embedding, producer);
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
