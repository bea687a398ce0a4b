#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lonkit/common.hpp"

namespace lonkit {

/// One discrete configuration option: a name and its ordered domain of
/// value tokens. Binary and integer options are both plain token lists.
struct OptionSpec {
  std::string name;
  std::vector<std::string> domain;
};

/// A point in the space: one domain index per option, in option order.
using Configuration = std::vector<std::size_t>;

constexpr char kKeySeparator = '|';

/// The Cartesian product of all option domains. Option order is fixed at
/// construction and defines the canonical key layout. Immutable.
class ConfigurationSpace {
 public:
  explicit ConfigurationSpace(std::vector<OptionSpec> options)
      : options_(std::move(options)) {
    if (options_.empty())
      throw ValidationError("configuration space needs at least one option");
    std::set<std::string> names;
    for (const auto& opt : options_) {
      if (opt.domain.empty())
        throw ValidationError("option '" + opt.name + "' has empty domain");
      if (!names.insert(opt.name).second)
        throw ValidationError("duplicate option name '" + opt.name + "'");
      std::set<std::string> values;
      for (const auto& v : opt.domain) {
        if (v.find(kKeySeparator) != std::string::npos)
          throw ValidationError("value '" + v + "' of option '" + opt.name +
                                "' contains the key separator");
        if (!values.insert(v).second)
          throw ValidationError("duplicate value '" + v + "' in option '" +
                                opt.name + "'");
      }
    }
  }

  const std::vector<OptionSpec>& options() const { return options_; }
  std::size_t num_options() const { return options_.size(); }

  /// Total number of configurations (product of domain sizes). Saturates
  /// at uint64 max for astronomically large spaces.
  std::uint64_t size() const {
    std::uint64_t total = 1;
    for (const auto& opt : options_) {
      std::uint64_t d = opt.domain.size();
      if (total > UINT64_MAX / d) return UINT64_MAX;
      total *= d;
    }
    return total;
  }

  void validate(const Configuration& x) const {
    if (x.size() != options_.size())
      throw ValidationError("configuration has " + std::to_string(x.size()) +
                            " values, space has " +
                            std::to_string(options_.size()) + " options");
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] >= options_[i].domain.size())
        throw ValidationError("value index " + std::to_string(x[i]) +
                              " out of range for option '" +
                              options_[i].name + "'");
    }
  }

  /// All configurations differing from x in exactly one option, x itself
  /// excluded. Deterministic base order: option index ascending, then
  /// domain index ascending.
  std::vector<Configuration> neighborhood(const Configuration& x) const {
    validate(x);
    std::vector<Configuration> out;
    for (std::size_t i = 0; i < options_.size(); ++i) {
      for (std::size_t j = 0; j < options_[i].domain.size(); ++j) {
        if (j == x[i]) continue;
        Configuration y = x;
        y[i] = j;
        out.push_back(std::move(y));
      }
    }
    return out;
  }

  Configuration random_sample(Rng& rng) const {
    Configuration x(options_.size());
    for (std::size_t i = 0; i < options_.size(); ++i)
      x[i] = static_cast<std::size_t>(rng.bounded(options_[i].domain.size()));
    return x;
  }

  /// Injective text identity: value tokens joined with '|' in option
  /// order. Equal configurations give byte-identical keys.
  std::string canonical_key(const Configuration& x) const {
    validate(x);
    std::string key;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (i) key += kKeySeparator;
      key += options_[i].domain[x[i]];
    }
    return key;
  }

  /// Inverse of canonical_key.
  Configuration from_key(const std::string& key) const {
    std::vector<std::string> tokens;
    std::string cur;
    for (char c : key) {
      if (c == kKeySeparator) {
        tokens.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    tokens.push_back(cur);
    if (tokens.size() != options_.size())
      throw ParseError("key '" + key + "' has " +
                       std::to_string(tokens.size()) + " fields, expected " +
                       std::to_string(options_.size()));
    Configuration x(options_.size());
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      const auto& dom = options_[i].domain;
      auto it = std::find(dom.begin(), dom.end(), tokens[i]);
      if (it == dom.end())
        throw ParseError("token '" + tokens[i] + "' not in domain of option '" +
                         options_[i].name + "'");
      x[i] = static_cast<std::size_t>(it - dom.begin());
    }
    return x;
  }

  /// Count of differing options. Diagnostic helper only.
  std::size_t hamming_distance(const Configuration& a,
                               const Configuration& b) const {
    validate(a);
    validate(b);
    std::size_t d = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i] != b[i]) ++d;
    return d;
  }

  bool is_binary() const {
    return std::all_of(options_.begin(), options_.end(),
                       [](const OptionSpec& o) { return o.domain.size() == 2; });
  }

 private:
  std::vector<OptionSpec> options_;
};

/// Parse a space definition: one `name=v1,v2,...,vk` line per option,
/// `#` starts a comment line, file order is canonical order.
inline ConfigurationSpace parse_space(std::istream& in) {
  std::vector<OptionSpec> options;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos) continue;
    std::size_t end = line.find_last_not_of(" \t\r");
    line = line.substr(begin, end - begin + 1);
    if (line[0] == '#') continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("line " + std::to_string(lineno) +
                       ": expected name=v1,v2,...");
    OptionSpec opt;
    opt.name = line.substr(0, eq);
    std::string values = line.substr(eq + 1);
    std::string tok;
    std::istringstream vs(values);
    while (std::getline(vs, tok, ',')) opt.domain.push_back(tok);
    options.push_back(std::move(opt));
  }
  return ConfigurationSpace(std::move(options));
}

inline std::string format_space(const ConfigurationSpace& space) {
  std::string out;
  for (const auto& opt : space.options()) {
    out += opt.name;
    out += '=';
    for (std::size_t i = 0; i < opt.domain.size(); ++i) {
      if (i) out += ',';
      out += opt.domain[i];
    }
    out += '\n';
  }
  return out;
}

/// Stable identity of a space definition, recorded in LON files so that
/// LONs from different spaces are never merged by accident.
inline std::uint64_t space_hash(const ConfigurationSpace& space) {
  return fnv1a64(format_space(space));
}

}  // namespace lonkit
