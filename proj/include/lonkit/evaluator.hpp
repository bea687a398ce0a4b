#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include "lonkit/config_space.hpp"

namespace lonkit {

/// Fitness function f over the configuration space, minimization.
/// Implementations must return finite values and be safe for concurrent
/// evaluate() calls.
class FitnessEvaluator {
 public:
  virtual ~FitnessEvaluator() = default;
  virtual double evaluate(const Configuration& x) = 0;
  virtual const ConfigurationSpace& space() const = 0;
};

/// Memoizing wrapper keyed by canonical key. Internally synchronized;
/// the one piece of state shared across sampling repeats.
class EvaluationCache {
 public:
  explicit EvaluationCache(std::shared_ptr<FitnessEvaluator> inner)
      : inner_(std::move(inner)) {}

  double evaluate(const Configuration& x) {
    std::string key = inner_->space().canonical_key(x);
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = values_.find(key);
      if (it != values_.end()) {
        ++hits_;
        return it->second;
      }
    }
    double f = inner_->evaluate(x);
    std::lock_guard<std::mutex> lock(mu_);
    auto [it, inserted] = values_.emplace(std::move(key), f);
    if (inserted)
      ++misses_;
    else
      ++hits_;
    return it->second;
  }

  std::uint64_t hits() const { return hits_; }
  std::uint64_t misses() const { return misses_; }
  /// Unique configurations probed so far.
  std::uint64_t unique_evaluations() const { return misses_; }
  const ConfigurationSpace& space() const { return inner_->space(); }

 private:
  std::shared_ptr<FitnessEvaluator> inner_;
  std::unordered_map<std::string, double> values_;
  std::atomic<std::uint64_t> hits_{0};
  std::atomic<std::uint64_t> misses_{0};
  std::mutex mu_;
};

/// Replays a measured key -> fitness table.
class TableEvaluator : public FitnessEvaluator {
 public:
  TableEvaluator(ConfigurationSpace space,
                 std::map<std::string, double> table)
      : space_(std::move(space)), table_(std::move(table)) {}

  double evaluate(const Configuration& x) override {
    std::string key = space_.canonical_key(x);
    auto it = table_.find(key);
    if (it == table_.end())
      throw MissingMeasurementError("no measurement for configuration '" +
                                    key + "'");
    return it->second;
  }

  const ConfigurationSpace& space() const override { return space_; }
  const std::map<std::string, double>& table() const { return table_; }

 private:
  ConfigurationSpace space_;
  std::map<std::string, double> table_;
};

/// NK landscape over n binary options with adjacent epistasis of degree
/// k: f(x) = (1/n) sum_i c_i(x_i, x_{i+1 mod n}, ..., x_{i+k mod n}),
/// contributions drawn uniformly from [0,1) by a seeded generator.
/// Fully determined by (n, k, seed).
class NKLandscape : public FitnessEvaluator {
 public:
  NKLandscape(std::size_t n, std::size_t k, std::uint64_t seed)
      : space_(make_space(n)), n_(n), k_(k), seed_(seed) {
    if (n < 1) throw ValidationError("NK landscape needs n >= 1");
    if (k > n - 1) throw ValidationError("NK landscape needs k <= n-1");
    Rng rng(seed);
    std::size_t rows = std::size_t{1} << (k + 1);
    tables_.resize(n);
    for (auto& t : tables_) {
      t.resize(rows);
      for (auto& c : t) c = rng.real();
    }
  }

  double evaluate(const Configuration& x) override {
    space_.validate(x);
    double total = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      std::size_t pattern = 0;
      for (std::size_t j = 0; j <= k_; ++j)
        pattern = (pattern << 1) | x[(i + j) % n_];
      total += tables_[i][pattern];
    }
    return total / static_cast<double>(n_);
  }

  const ConfigurationSpace& space() const override { return space_; }
  std::size_t n() const { return n_; }
  std::size_t k() const { return k_; }
  std::uint64_t seed() const { return seed_; }

  // test hook: force all contributions to a constant
  void force_constant(double c) {
    for (auto& t : tables_)
      for (auto& v : t) v = c;
  }

 private:
  static ConfigurationSpace make_space(std::size_t n) {
    std::vector<OptionSpec> opts;
    for (std::size_t i = 0; i < n; ++i)
      opts.push_back({"x" + std::to_string(i), {"0", "1"}});
    return ConfigurationSpace(std::move(opts));
  }

  ConfigurationSpace space_;
  std::size_t n_, k_;
  std::uint64_t seed_;
  std::vector<std::vector<double>> tables_;
};

enum class Aggregation { kMean, kMedian, kMin };

inline Aggregation parse_aggregation(const std::string& s) {
  if (s == "mean") return Aggregation::kMean;
  if (s == "median") return Aggregation::kMedian;
  if (s == "min") return Aggregation::kMin;
  throw ParseError("unknown aggregation '" + s + "'");
}

inline double aggregate(std::vector<double> values, Aggregation agg) {
  switch (agg) {
    case Aggregation::kMean: {
      double s = 0;
      for (double v : values) s += v;
      return s / static_cast<double>(values.size());
    }
    case Aggregation::kMedian: {
      std::sort(values.begin(), values.end());
      std::size_t n = values.size();
      return n % 2 ? values[n / 2]
                   : 0.5 * (values[n / 2 - 1] + values[n / 2]);
    }
    case Aggregation::kMin:
      return *std::min_element(values.begin(), values.end());
  }
  throw Error("unreachable");
}

namespace detail {

/// Runs `command` under /bin/sh, captures stdout, kills the process
/// group on timeout. Returns exit status and captured output.
inline int run_command(const std::string& command,
                       std::chrono::milliseconds timeout,
                       std::string& output) {
  int pipefd[2];
  if (pipe(pipefd) != 0) throw Error("pipe() failed");
  pid_t pid = fork();
  if (pid < 0) throw Error("fork() failed");
  if (pid == 0) {
    setpgid(0, 0);
    dup2(pipefd[1], STDOUT_FILENO);
    close(pipefd[0]);
    close(pipefd[1]);
    execl("/bin/sh", "sh", "-c", command.c_str(), (char*)nullptr);
    _exit(127);
  }
  close(pipefd[1]);
  output.clear();
  auto deadline = std::chrono::steady_clock::now() + timeout;
  bool timed_out = false;
  char buf[4096];
  for (;;) {
    auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (remaining.count() <= 0) {
      timed_out = true;
      break;
    }
    struct pollfd pfd{pipefd[0], POLLIN, 0};
    int pr = poll(&pfd, 1, static_cast<int>(remaining.count()));
    if (pr == 0) {
      timed_out = true;
      break;
    }
    ssize_t nr = read(pipefd[0], buf, sizeof(buf));
    if (nr < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (nr == 0) break;  // EOF
    output.append(buf, static_cast<std::size_t>(nr));
  }
  close(pipefd[0]);
  if (timed_out) {
    kill(-pid, SIGKILL);
    int status = 0;
    waitpid(pid, &status, 0);
    throw TimeoutError("measurement timed out: " + command);
  }
  int status = 0;
  waitpid(pid, &status, 0);
  return WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
}

}  // namespace detail

/// Measures configurations by spawning an external command. Placeholders
/// `{name}` in the template are substituted with the option's value
/// token. The last whitespace-trimmed stdout line is parsed as fitness;
/// `repeats` executions are reduced by the chosen aggregation.
class ExternalCommandEvaluator : public FitnessEvaluator {
 public:
  ExternalCommandEvaluator(ConfigurationSpace space, std::string cmd_template,
                           std::chrono::milliseconds timeout =
                               std::chrono::milliseconds(60000),
                           std::size_t repeats = 1,
                           Aggregation aggregation = Aggregation::kMedian)
      : space_(std::move(space)),
        cmd_template_(std::move(cmd_template)),
        timeout_(timeout),
        repeats_(repeats),
        aggregation_(aggregation) {
    if (repeats_ < 1) throw ValidationError("repeats must be >= 1");
  }

  std::string substitute(const Configuration& x) const {
    space_.validate(x);
    std::string cmd = cmd_template_;
    const auto& opts = space_.options();
    for (std::size_t i = 0; i < opts.size(); ++i) {
      std::string placeholder = "{" + opts[i].name + "}";
      std::size_t pos;
      while ((pos = cmd.find(placeholder)) != std::string::npos)
        cmd.replace(pos, placeholder.size(), opts[i].domain[x[i]]);
    }
    return cmd;
  }

  double evaluate(const Configuration& x) override {
    std::string cmd = substitute(x);
    std::vector<double> samples;
    samples.reserve(repeats_);
    for (std::size_t r = 0; r < repeats_; ++r) {
      std::string output;
      int status = detail::run_command(cmd, timeout_, output);
      if (status != 0)
        throw MeasurementFailureError("command exited with status " +
                                      std::to_string(status) + ": " + cmd);
      samples.push_back(parse_fitness(output, cmd));
    }
    return aggregate(std::move(samples), aggregation_);
  }

  const ConfigurationSpace& space() const override { return space_; }

 private:
  static double parse_fitness(const std::string& output,
                              const std::string& cmd) {
    // last non-empty line, whitespace trimmed
    std::size_t end = output.find_last_not_of(" \t\r\n");
    if (end == std::string::npos)
      throw ParseError("empty output from: " + cmd);
    std::size_t start = output.find_last_of('\n', end);
    start = (start == std::string::npos) ? 0 : start + 1;
    std::string line = output.substr(start, end - start + 1);
    std::size_t lead = line.find_first_not_of(" \t");
    line = line.substr(lead);
    try {
      std::size_t consumed = 0;
      double v = std::stod(line, &consumed);
      if (consumed != line.size() || !std::isfinite(v))
        throw ParseError("");
      return v;
    } catch (const std::exception&) {
      throw ParseError("cannot parse fitness from '" + line + "' of: " + cmd);
    }
  }

  ConfigurationSpace space_;
  std::string cmd_template_;
  std::chrono::milliseconds timeout_;
  std::size_t repeats_;
  Aggregation aggregation_;
};

}  // namespace lonkit
