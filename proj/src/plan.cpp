#include <fstream>
#include <sstream>

#include "json.hpp"
#include "pcc/harness.hpp"

namespace pcc {

namespace {

using nlohmann::json;

PredictorSpec parse_predictor(const json& j) {
  PredictorSpec spec;
  if (j.is_string()) {
    spec.variant = parse_variant(j.get<std::string>());
    return spec;
  }
  spec.variant = parse_variant(j.value("variant", std::string("CDK")));
  spec.latent_dim = j.value("dim", spec.latent_dim);
  spec.margin = j.value("margin", spec.margin);
  spec.learning_rate = j.value("learning_rate", spec.learning_rate);
  spec.epochs = j.value("epochs", spec.epochs);
  if (j.contains("pairs_per_cascade")) spec.pairs_per_cascade = j["pairs_per_cascade"].get<std::size_t>();
  spec.negatives_per_pair = j.value("negatives_per_pair", spec.negatives_per_pair);
  spec.kernel_time = j.value("kernel_time", spec.kernel_time);
  spec.seed = j.value("seed", spec.seed);
  spec.external_path = j.value("path", spec.external_path);
  spec.name = j.value("name", spec.name);
  return spec;
}

ThresholdDist parse_threshold(const json& j) {
  if (j.is_number()) return ThresholdDist::fixed(j.get<double>());
  const auto text = j.get<std::string>();
  if (text == "uniform") return ThresholdDist::uniform();
  fail(ErrorKind::kValidation, "threshold must be \"uniform\" or a number");
}

std::size_t parse_length(const json& j, std::size_t nodes) {
  if (j.is_number_unsigned()) return j.get<std::size_t>();
  if (j.is_number_integer()) {
    const auto v = j.get<long long>();
    if (v <= 0) fail(ErrorKind::kValidation, "length must be positive");
    return static_cast<std::size_t>(v);
  }
  if (j.is_string()) {
    const auto text = j.get<std::string>();
    if (text.rfind("N/", 0) == 0) {
      const auto divisor = std::stoull(text.substr(2));
      if (divisor == 0) fail(ErrorKind::kValidation, "length expression divides by zero");
      return nodes / divisor;
    }
  }
  fail(ErrorKind::kValidation, "length must be an integer or \"N/k\"");
}

// Overlays the keys present in `j` onto `cell`.
void apply_cell_keys(CellSpec& cell, const json& j) {
  if (j.contains("name")) cell.name = j["name"].get<std::string>();
  if (j.contains("topology")) cell.graph.topology = parse_topology(j["topology"].get<std::string>());
  if (j.contains("nodes")) cell.graph.node_count = j["nodes"].get<std::size_t>();
  if (j.contains("avg_degree")) cell.graph.avg_degree = j["avg_degree"].get<double>();
  if (j.contains("weight_exponent")) cell.graph.weight_exponent = j["weight_exponent"].get<double>();
  if (j.contains("mechanism")) cell.sim.mechanism = parse_mechanism(j["mechanism"].get<std::string>());
  if (j.contains("ic_prob")) cell.sim.ic_prob = j["ic_prob"].get<double>();
  if (j.contains("si_rate")) cell.sim.si_rate = j["si_rate"].get<double>();
  if (j.contains("threshold")) cell.sim.lt_threshold = parse_threshold(j["threshold"]);
  if (j.contains("max_attempts")) cell.sim.max_attempts = j["max_attempts"].get<std::size_t>();
  if (j.contains("length")) cell.sim.target_length = parse_length(j["length"], cell.graph.node_count);
  if (j.contains("m")) cell.m = j["m"].get<std::size_t>();
  if (j.contains("split_ratio")) cell.split_ratio = j["split_ratio"].get<double>();
  if (j.contains("apce_scope")) {
    const auto scope = j["apce_scope"].get<std::string>();
    if (scope == "full") {
      cell.apce_scope = ApceScope::kFull;
    } else if (scope == "train") {
      cell.apce_scope = ApceScope::kTrain;
    } else {
      fail(ErrorKind::kValidation, "apce_scope must be \"full\" or \"train\"");
    }
  }
  if (j.contains("allow_long")) cell.allow_long = j["allow_long"].get<bool>();
  if (j.contains("cascades")) cell.cascades_path = j["cascades"].get<std::string>();
  if (j.contains("network_size")) {
    const auto mode = j["network_size"].get<std::string>();
    if (mode != "subgraph" && mode != "universe") {
      fail(ErrorKind::kValidation, "network_size must be \"subgraph\" or \"universe\"");
    }
    cell.whole_universe_size = mode == "universe";
  }
  if (j.contains("seed")) cell.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("predictors")) {
    cell.predictors.clear();
    for (const auto& p : j["predictors"]) cell.predictors.push_back(parse_predictor(p));
  }
}

template <typename T>
std::vector<T> list_or(const json& grid, const char* key, std::vector<T> fallback) {
  if (!grid.contains(key)) return fallback;
  return grid[key].get<std::vector<T>>();
}

void expand_grid(ExperimentPlan& plan, const json& grid, const json& defaults) {
  CellSpec base;
  if (!defaults.is_null()) apply_cell_keys(base, defaults);
  const auto topologies = list_or<std::string>(grid, "topologies", {to_string(base.graph.topology)});
  const auto mechanisms = list_or<std::string>(grid, "mechanisms", {to_string(base.sim.mechanism)});
  const auto nodes = list_or<std::size_t>(grid, "nodes", {base.graph.node_count});
  const json lengths = grid.contains("lengths") ? grid["lengths"] : json::array({base.sim.target_length});
  const std::size_t replicates = grid.value("seeds", std::size_t{1});

  for (const auto& topology : topologies) {
    for (const auto& mechanism : mechanisms) {
      for (std::size_t n : nodes) {
        // Lengths that coincide for this N (10 and N/10 at N = 100) stay
        // separate cells; each gets its own derived seed.
        for (const auto& len : lengths) {
          const std::size_t l = parse_length(len, n);
          for (std::size_t r = 0; r < replicates; ++r) {
            CellSpec cell = base;
            cell.graph.topology = parse_topology(topology);
            cell.sim.mechanism = parse_mechanism(mechanism);
            cell.graph.node_count = n;
            cell.sim.target_length = l;
            plan.cells.push_back(std::move(cell));
          }
        }
      }
    }
  }
}

}  // namespace

ExperimentPlan parse_plan(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::kParse, std::string("plan is not valid JSON: ") + e.what());
  }
  try {
    ExperimentPlan plan;
    plan.seed = doc.value("seed", std::uint64_t{0});
    plan.strict = doc.value("strict", false);
    plan.threads = doc.value("threads", std::size_t{1});
    if (doc.contains("outputs")) {
      const auto& out = doc["outputs"];
      plan.results_path = out.value("results", std::string());
      plan.curves_path = out.value("curves", std::string());
      plan.svg_path = out.value("svg", std::string());
    }
    const json defaults = doc.contains("defaults") ? doc["defaults"] : json();
    if (doc.contains("grid")) expand_grid(plan, doc["grid"], defaults);
    if (doc.contains("cells")) {
      for (const auto& c : doc["cells"]) {
        CellSpec cell;
        if (!defaults.is_null()) apply_cell_keys(cell, defaults);
        // Node count first so "N/k" lengths see the cell's own N.
        if (c.contains("nodes")) cell.graph.node_count = c["nodes"].get<std::size_t>();
        apply_cell_keys(cell, c);
        plan.cells.push_back(std::move(cell));
      }
    }
    if (plan.cells.empty()) fail(ErrorKind::kValidation, "plan defines no cells");
    if (plan.threads == 0) fail(ErrorKind::kValidation, "threads must be positive");
    return plan;
  } catch (const json::exception& e) {
    fail(ErrorKind::kParse, std::string("bad plan field: ") + e.what());
  }
}

ExperimentPlan load_plan(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_plan(text.str());
}

}  // namespace pcc
