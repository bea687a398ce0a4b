#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lonkit/config_space.hpp"
#include "lonkit/embedding.hpp"
#include "lonkit/lon.hpp"
#include "lonkit/metrics.hpp"
#include "lonkit/sampler.hpp"
#include "lonkit/stability.hpp"

namespace lonkit {

using json = nlohmann::ordered_json;

/// Shortest round-trip decimal form of a double.
inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

// ---- measurement table CSV ----

/// CSV schema: header row = option names in space order plus `fitness`;
/// value cells are domain tokens. With `negate`, fitness is multiplied
/// by -1 at load (maximization data).
inline std::map<std::string, double> load_table(const ConfigurationSpace& space,
                                                std::istream& in,
                                                bool negate = false) {
  std::map<std::string, double> table;
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty table CSV");
  auto split = [](const std::string& s) {
    std::vector<std::string> fields;
    std::string f;
    std::istringstream ss(s);
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (!s.empty() && s.back() == ',') fields.push_back("");
    return fields;
  };
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header = split(line);
  const auto& options = space.options();
  if (header.size() != options.size() + 1 || header.back() != "fitness")
    throw ParseError("table header must be option names plus final 'fitness'");
  for (std::size_t i = 0; i < options.size(); ++i)
    if (header[i] != options[i].name)
      throw ParseError("table column '" + header[i] +
                       "' does not match option '" + options[i].name + "'");
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields = split(line);
    if (fields.size() != options.size() + 1)
      throw ParseError("table line " + std::to_string(lineno) +
                       ": wrong field count");
    Configuration x(options.size());
    std::string key;
    for (std::size_t i = 0; i < options.size(); ++i) {
      if (i) key += kKeySeparator;
      key += fields[i];
    }
    x = space.from_key(key);
    double f = 0;
    auto [ptr, ec] = std::from_chars(
        fields.back().data(), fields.back().data() + fields.back().size(), f);
    if (ec != std::errc{} || ptr != fields.back().data() + fields.back().size())
      throw ParseError("table line " + std::to_string(lineno) +
                       ": bad fitness '" + fields.back() + "'");
    table[space.canonical_key(x)] = negate ? -f : f;
  }
  return table;
}

inline void save_table(const ConfigurationSpace& space,
                       const std::map<std::string, double>& table,
                       std::ostream& out) {
  for (std::size_t i = 0; i < space.options().size(); ++i)
    out << space.options()[i].name << ',';
  out << "fitness\n";
  for (const auto& [key, fitness] : table) {
    std::string row = key;
    for (char& c : row)
      if (c == kKeySeparator) c = ',';
    out << row << ',' << format_double(fitness) << '\n';
  }
}

// ---- run trace JSONL ----

inline json params_to_json(const SamplerParams& p) {
  return json{{"tau", p.tau},
              {"kappa", p.kappa},
              {"restart_prob", p.restart_prob},
              {"target_optima", p.target_optima},
              {"eval_budget", p.eval_budget},
              {"seed", p.seed}};
}

inline SamplerParams params_from_json(const json& j) {
  SamplerParams p;
  p.tau = j.at("tau").get<std::size_t>();
  p.kappa = j.at("kappa").get<std::size_t>();
  p.restart_prob = j.at("restart_prob").get<double>();
  p.target_optima = j.at("target_optima").get<std::size_t>();
  p.eval_budget = j.at("eval_budget").get<std::uint64_t>();
  p.seed = j.at("seed").get<std::uint64_t>();
  return p;
}

/// One JSON record per line: a header record with the parameter
/// snapshot, then vertex and edge events in discovery order.
inline void save_trace(const RunTrace& trace, std::ostream& out,
                       const std::string& producer = "") {
  json header{{"t", "h"},
              {"producer", producer},
              {"seed", trace.seed},
              {"params", params_to_json(trace.params)},
              {"evaluations", trace.evaluations},
              {"budget_exhausted", trace.budget_exhausted}};
  out << header.dump() << '\n';
  for (const auto& v : trace.vertices)
    out << json{{"t", "v"}, {"k", v.key}, {"f", v.fitness}, {"n", v.multiplicity}}
               .dump()
        << '\n';
  for (const auto& e : trace.edges)
    out << json{{"t", "e"}, {"s", e.src}, {"d", e.dst}, {"c", e.count}}.dump()
        << '\n';
}

inline RunTrace load_trace(std::istream& in) {
  RunTrace trace;
  std::string line;
  bool have_header = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("trace line " + std::to_string(lineno) + ": " +
                       e.what());
    }
    std::string t = j.at("t").get<std::string>();
    if (t == "h") {
      trace.seed = j.at("seed").get<std::uint64_t>();
      trace.params = params_from_json(j.at("params"));
      trace.evaluations = j.at("evaluations").get<std::uint64_t>();
      trace.budget_exhausted = j.at("budget_exhausted").get<bool>();
      have_header = true;
    } else if (t == "v") {
      trace.vertices.push_back({j.at("k").get<std::string>(),
                                j.at("f").get<double>(),
                                j.at("n").get<std::uint64_t>()});
    } else if (t == "e") {
      trace.edges.push_back({j.at("s").get<std::string>(),
                             j.at("d").get<std::string>(),
                             j.at("c").get<std::uint64_t>()});
    } else {
      throw ParseError("trace line " + std::to_string(lineno) +
                       ": unknown record type '" + t + "'");
    }
  }
  if (!have_header) throw ParseError("trace has no header record");
  trace.rebuild_index();
  return trace;
}

// ---- LON JSON ----

/// Byte-stable: vertices sorted by key, edges by (source, destination),
/// which is how the LON stores them.
inline void save_lon(const LocalOptimaNetwork& lon, std::ostream& out,
                     const std::string& producer = "") {
  json j{{"producer", producer},
         {"space_hash", lon.space_hash()},
         {"vertices", json::array()},
         {"edges", json::array()},
         {"provenance", lon.provenance()}};
  for (const auto& v : lon.vertices())
    j["vertices"].push_back(
        json{{"k", v.key}, {"f", v.fitness}, {"m", v.multiplicity}});
  for (const auto& e : lon.edges())
    j["edges"].push_back(json{{"s", lon.vertex(e.src).key},
                              {"d", lon.vertex(e.dst).key},
                              {"c", e.count}});
  out << j.dump(2) << '\n';
}

inline LocalOptimaNetwork load_lon(std::istream& in) {
  json j;
  try {
    j = json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("LON file: ") + e.what());
  }
  std::vector<LonVertex> vertices;
  for (const auto& v : j.at("vertices"))
    vertices.push_back({v.at("k").get<std::string>(), v.at("f").get<double>(),
                        v.at("m").get<std::uint64_t>()});
  std::vector<std::pair<std::pair<std::string, std::string>, std::uint64_t>>
      edges;
  for (const auto& e : j.at("edges"))
    edges.push_back({{e.at("s").get<std::string>(), e.at("d").get<std::string>()},
                     e.at("c").get<std::uint64_t>()});
  std::vector<std::uint64_t> provenance =
      j.at("provenance").get<std::vector<std::uint64_t>>();
  std::uint64_t hash = j.value("space_hash", std::uint64_t{0});
  return LocalOptimaNetwork(std::move(vertices), std::move(edges),
                            std::move(provenance), hash);
}

// ---- graph exports ----

inline std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

inline void export_dot(const LocalOptimaNetwork& lon, std::ostream& out) {
  std::size_t go = global_optimum(lon);
  out << "digraph lon {\n";
  for (std::size_t i = 0; i < lon.num_vertices(); ++i) {
    const auto& v = lon.vertex(i);
    out << "  n" << i << " [label=\"" << dot_escape(v.key) << "\" fitness=\""
        << format_double(v.fitness) << "\" multiplicity=\"" << v.multiplicity
        << "\" is_global_optimum=\"" << (i == go ? "true" : "false") << '"';
    if (i == go) out << " style=filled fillcolor=red";
    out << "];\n";
  }
  for (const auto& e : lon.edges())
    out << "  n" << e.src << " -> n" << e.dst << " [count=\"" << e.count
        << "\"];\n";
  out << "}\n";
}

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline void export_graphml(const LocalOptimaNetwork& lon, std::ostream& out) {
  std::size_t go = global_optimum(lon);
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
      << "  <key id=\"key\" for=\"node\" attr.name=\"key\" attr.type=\"string\"/>\n"
      << "  <key id=\"fitness\" for=\"node\" attr.name=\"fitness\" attr.type=\"double\"/>\n"
      << "  <key id=\"multiplicity\" for=\"node\" attr.name=\"multiplicity\" attr.type=\"long\"/>\n"
      << "  <key id=\"is_global_optimum\" for=\"node\" attr.name=\"is_global_optimum\" attr.type=\"boolean\"/>\n"
      << "  <key id=\"count\" for=\"edge\" attr.name=\"count\" attr.type=\"long\"/>\n"
      << "  <graph id=\"lon\" edgedefault=\"directed\">\n";
  for (std::size_t i = 0; i < lon.num_vertices(); ++i) {
    const auto& v = lon.vertex(i);
    out << "    <node id=\"n" << i << "\">\n"
        << "      <data key=\"key\">" << xml_escape(v.key) << "</data>\n"
        << "      <data key=\"fitness\">" << format_double(v.fitness)
        << "</data>\n"
        << "      <data key=\"multiplicity\">" << v.multiplicity << "</data>\n"
        << "      <data key=\"is_global_optimum\">"
        << (i == go ? "true" : "false") << "</data>\n"
        << "    </node>\n";
  }
  for (std::size_t i = 0; i < lon.num_edges(); ++i) {
    const auto& e = lon.edges()[i];
    out << "    <edge id=\"e" << i << "\" source=\"n" << e.src
        << "\" target=\"n" << e.dst << "\">\n"
        << "      <data key=\"count\">" << e.count << "</data>\n"
        << "    </edge>\n";
  }
  out << "  </graph>\n</graphml>\n";
}

// ---- reports ----

inline json report_to_json(const MetricReport& r) {
  json j{{"vn", r.vn},
         {"en", r.en},
         {"spl", r.spl},
         {"spl_reachable_fraction", r.spl_reachable_fraction},
         {"ac", r.ac ? json(*r.ac) : json(nullptr)},
         {"acc", r.acc},
         {"nd", r.nd ? json(*r.nd) : json(nullptr)},
         {"num_funnels", r.num_funnels},
         {"go_neighborhood_radius", r.go_neighborhood_radius},
         {"rcc_curve", json::array()},
         {"base_rank_table", json::array()}};
  for (const auto& [k, v] : r.rcc_curve)
    j["rcc_curve"].push_back(json{{"k", k}, {"rcc", v}});
  for (const auto& [rank, deg] : r.base_rank_table)
    j["base_rank_table"].push_back(json{{"rank", rank}, {"out_degree", deg}});
  return j;
}

inline void save_rcc_csv(const MetricReport& r, std::ostream& out,
                         const std::string& producer = "") {
  if (!producer.empty()) out << "# " << producer << '\n';
  out << "k,rcc\n";
  for (const auto& [k, v] : r.rcc_curve)
    out << k << ',' << format_double(v) << '\n';
}

inline void save_base_rank_csv(const MetricReport& r, std::ostream& out,
                               const std::string& producer = "") {
  if (!producer.empty()) out << "# " << producer << '\n';
  out << "rank,out_degree\n";
  for (const auto& [rank, deg] : r.base_rank_table)
    out << rank << ',' << deg << '\n';
}

inline json funnels_to_json(const LocalOptimaNetwork& lon,
                            const FunnelDecomposition& d) {
  json j{{"funnel_bases", json::array()},
         {"funnels", json::array()},
         {"overlapping", json::array()}};
  for (std::size_t b : d.funnel_bases)
    j["funnel_bases"].push_back(lon.vertex(b).key);
  for (const auto& [base, members] : d.funnels) {
    json f{{"base", lon.vertex(base).key}, {"members", json::array()}};
    for (std::size_t m : members) f["members"].push_back(lon.vertex(m).key);
    j["funnels"].push_back(std::move(f));
  }
  for (std::size_t v : d.overlapping)
    j["overlapping"].push_back(lon.vertex(v).key);
  return j;
}

inline void save_trajectory_csv(const StabilityResult& result,
                                std::ostream& out,
                                const std::string& producer = "") {
  if (!producer.empty()) out << "# " << producer << '\n';
  out << "i,sample_index,ac,acc\n";
  for (const auto& g : result.trajectory)
    for (std::size_t s = 0; s < g.ac_samples.size(); ++s)
      out << g.i << ',' << s << ',' << format_double(g.ac_samples[s]) << ','
          << format_double(g.acc_samples[s]) << '\n';
}

inline json stability_summary_json(const StabilityResult& result) {
  json j{{"n_stable", result.n_stable},
         {"decision_i", result.decision_i},
         {"converged", result.converged},
         {"trajectory", json::array()}};
  for (const auto& g : result.trajectory)
    j["trajectory"].push_back(
        json{{"i", g.i},
             {"p_ac_prev", g.p_ac_prev ? json(*g.p_ac_prev) : json(nullptr)},
             {"p_acc_prev",
              g.p_acc_prev ? json(*g.p_acc_prev) : json(nullptr)}});
  return j;
}

inline void save_vectors_csv(const std::vector<EmbeddingVector>& vectors,
                             std::ostream& out,
                             const std::string& producer = "") {
  if (!producer.empty()) out << "# " << producer << '\n';
  for (const auto& v : vectors) {
    out << v.source;
    for (double x : v.values) out << ',' << format_double(x);
    out << '\n';
  }
}

inline void save_similarity_csv(const std::vector<std::string>& ids,
                                const std::vector<std::vector<double>>& matrix,
                                std::ostream& out,
                                const std::string& producer = "") {
  if (!producer.empty()) out << "# " << producer << '\n';
  out << "id";
  for (const auto& id : ids) out << ',' << id;
  out << '\n';
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    out << ids[i];
    for (double v : matrix[i]) out << ',' << format_double(v);
    out << '\n';
  }
}

}  // namespace lonkit
