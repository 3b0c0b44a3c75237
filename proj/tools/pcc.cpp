// pcc: command-line front end for graph generation, cascade simulation,
// randomness and accuracy metrics, predictor training, sweeps and fitting.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pcc/cascade.hpp"
#include "pcc/curve_fit.hpp"
#include "pcc/dataio.hpp"
#include "pcc/embedding.hpp"
#include "pcc/entropy.hpp"
#include "pcc/error.hpp"
#include "pcc/graph.hpp"
#include "pcc/harness.hpp"
#include "pcc/metrics.hpp"

namespace {

using nlohmann::json;
using namespace pcc;

constexpr int kUsageExit = 64;

// Reads option defaults from a JSON object. Top-level keys set global
// options, nested objects named after a subcommand set its options. Keys may
// use '_' or '-'.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App*, bool, bool, std::string) const override { return {}; }

  std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw CLI::ConversionError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw CLI::ConversionError("config must be a JSON object");
    std::vector<CLI::ConfigItem> items;
    walk(doc, {}, items);
    return items;
  }

 private:
  static std::string scalar(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
  }

  static void walk(const json& obj, const std::vector<std::string>& parents,
                   std::vector<CLI::ConfigItem>& items) {
    for (const auto& [key, value] : obj.items()) {
      std::string name = key;
      std::replace(name.begin(), name.end(), '_', '-');
      if (value.is_object()) {
        auto next = parents;
        next.push_back(name);
        walk(value, next, items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = name;
      if (value.is_array()) {
        bool flat = true;
        for (const auto& x : value) flat = flat && x.is_primitive();
        if (!flat) continue;  // plan structure, not an option
        for (const auto& x : value) item.inputs.push_back(scalar(x));
      } else {
        item.inputs.push_back(scalar(value));
      }
      items.push_back(std::move(item));
    }
  }
};

struct Globals {
  std::uint64_t seed = 0;
  std::string config;
  std::string out;
  bool strict = false;
};

// Writes to --out, or stdout when unset.
void emit(const Globals& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
  } else {
    write_text_file(g.out, text);
  }
}

std::string require_out(const Globals& g, const char* what) {
  if (g.out.empty()) fail(ErrorKind::kValidation, std::string(what) + " needs --out");
  return g.out;
}

ThresholdDist parse_threshold(const std::string& text) {
  if (text == "uniform") return ThresholdDist::uniform();
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return ThresholdDist::fixed(v);
  } catch (const std::exception&) {
  }
  fail(ErrorKind::kValidation, "threshold must be 'uniform' or a number, got '" + text + "'");
}

FitTarget parse_target(const std::string& text) {
  if (text == "smap") return FitTarget::kSmap;
  if (text == "map") return FitTarget::kMap;
  fail(ErrorKind::kValidation, "target must be 'smap' or 'map'");
}

std::size_t common_length(const CascadeSet& set) {
  const std::size_t l = set.cascades.front().size();
  for (const auto& c : set.cascades) {
    if (c.size() != l) {
      fail(ErrorKind::kValidation, "cascades have different lengths; pass --length");
    }
  }
  return l;
}

std::string failures_csv(const std::vector<CellFailure>& failures) {
  std::ostringstream out;
  out << "index,cell,category,message\n";
  for (const auto& f : failures) {
    auto quote = [](std::string s) {
      std::string q = "\"";
      for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
      return q + "\"";
    };
    out << f.index << ',' << quote(f.cell) << ',' << to_string(f.kind) << ',' << quote(f.message)
        << '\n';
  }
  return out.str();
}

int run(int argc, char** argv) {
  CLI::App app{"Cascade predictability toolkit"};
  app.require_subcommand(1);
  app.config_formatter(std::make_shared<JsonConfig>());
  app.allow_config_extras(CLI::config_extras_mode::ignore);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  Globals g;
  app.add_option("--seed", g.seed, "Master seed");
  app.set_config("--config", "", "JSON document with option defaults (sweep: the plan)");
  app.add_option("--out", g.out, "Output path (stdout when omitted)");
  app.add_flag("--strict", g.strict, "Abort on the first failing sweep cell");

  // gen-graph
  GraphSpec gspec;
  std::string topology = "ER";
  auto* gen = app.add_subcommand("gen-graph", "Generate an ER or static scale-free graph");
  gen->add_option("--topology", topology, "ER or BA")->capture_default_str();
  gen->add_option("--nodes", gspec.node_count)->capture_default_str();
  gen->add_option("--avg-degree", gspec.avg_degree)->capture_default_str();
  gen->add_option("--weight-exponent", gspec.weight_exponent)->capture_default_str();

  // simulate
  SimConfig sim;
  std::string graph_path, mechanism = "IC", threshold = "uniform";
  std::size_t m = 200;
  auto* simulate_cmd = app.add_subcommand("simulate", "Generate a fixed-length cascade set");
  simulate_cmd->add_option("--graph", graph_path, "Edge-list file")->required();
  simulate_cmd->add_option("--mechanism", mechanism, "IC, LT or SI")->capture_default_str();
  simulate_cmd->add_option("--ic-prob", sim.ic_prob)->capture_default_str();
  simulate_cmd->add_option("--si-rate", sim.si_rate)->capture_default_str();
  simulate_cmd->add_option("--threshold", threshold, "'uniform' or a fixed value")->capture_default_str();
  simulate_cmd->add_option("--length", sim.target_length)->capture_default_str();
  simulate_cmd->add_option("--m", m, "Number of cascades")->capture_default_str();
  simulate_cmd->add_option("--max-attempts", sim.max_attempts)->capture_default_str();

  // entropy
  std::string cascades_path;
  std::size_t block = 0;
  auto* entropy_cmd = app.add_subcommand("entropy", "APCE (and optionally block entropy) of a cascade file");
  entropy_cmd->add_option("--cascades", cascades_path)->required();
  entropy_cmd->add_option("--block", block, "Also report block entropy with this block length");

  // train
  PredictorSpec pspec;
  std::string variant = "CDK";
  std::size_t pairs = 0;
  auto* train_cmd = app.add_subcommand("train", "Train an embedding predictor");
  train_cmd->add_option("--cascades", cascades_path)->required();
  train_cmd->add_option("--variant", variant, "CDK, PAE or IAE")->capture_default_str();
  train_cmd->add_option("--dim", pspec.latent_dim)->capture_default_str();
  train_cmd->add_option("--margin", pspec.margin)->capture_default_str();
  train_cmd->add_option("--learning-rate", pspec.learning_rate)->capture_default_str();
  train_cmd->add_option("--epochs", pspec.epochs)->capture_default_str();
  train_cmd->add_option("--pairs-per-cascade", pairs, "Default 5x cascade length");
  train_cmd->add_option("--negatives-per-pair", pspec.negatives_per_pair)->capture_default_str();

  // evaluate
  std::string model_path, predictions_path;
  std::optional<std::size_t> network_size, length, top_k;
  auto* eval_cmd = app.add_subcommand("evaluate", "MAP and SMAP of a model or ranking file");
  eval_cmd->add_option("--cascades", cascades_path, "Truth cascades")->required();
  auto* model_opt = eval_cmd->add_option("--model", model_path, "Trained model file");
  auto* pred_opt = eval_cmd->add_option("--predictions", predictions_path, "'source: ranking' file");
  model_opt->excludes(pred_opt);
  eval_cmd->add_option("--network-size", network_size, "N for SMAP (default: universe size)");
  eval_cmd->add_option("--length", length, "L for SMAP (default: the common cascade length)");
  eval_cmd->add_option("--k", top_k, "Cut rankings to the top k");

  // sweep
  std::string plan_path;
  std::size_t threads = 0;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run an experiment plan");
  sweep_cmd->add_option("--plan", plan_path, "Plan file (default: the --config document)");
  sweep_cmd->add_option("--threads", threads, "Worker threads (overrides the plan)");

  // fit / plot
  std::string results_path, target = "smap";
  auto* fit_cmd = app.add_subcommand("fit", "Fit y = y0 + A exp(-B x) per model");
  fit_cmd->add_option("--results", results_path)->required();
  fit_cmd->add_option("--target", target, "smap or map")->capture_default_str();
  auto* plot_cmd = app.add_subcommand("plot", "Scatter plot with fitted curves (SVG)");
  plot_cmd->add_option("--results", results_path)->required();
  plot_cmd->add_option("--target", target, "smap or map")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: category=usage message=" << e.what() << '\n';
    return kUsageExit;
  }

  if (gen->parsed()) {
    gspec.topology = parse_topology(topology);
    gspec.seed = g.seed;
    std::ostringstream text;
    write_edge_list(text, generate_graph(gspec));
    emit(g, text.str());
  } else if (simulate_cmd->parsed()) {
    const Graph graph = read_edge_list(graph_path);
    sim.mechanism = parse_mechanism(mechanism);
    sim.lt_threshold = parse_threshold(threshold);
    validate(sim, graph);
    std::ostringstream text;
    write_cascades(text, generate_cascade_set(graph, sim, m, g.seed));
    emit(g, text.str());
  } else if (entropy_cmd->parsed()) {
    const auto loaded = load_cascades(cascades_path);
    const auto stats = pairwise_stats(loaded.set);
    std::ostringstream text;
    text << "cascades=" << loaded.set.size() << " pairs=" << stats.distinct_pairs()
         << " pair_occurrences=" << stats.total_pair_occurrences()
         << " apce=" << format_double(apce(stats));
    if (block > 0) {
      std::vector<std::vector<std::uint32_t>> seqs;
      for (const auto& c : loaded.set.cascades) seqs.emplace_back(c.nodes.begin(), c.nodes.end());
      text << " block_entropy=" << format_double(block_entropy(seqs, block));
    }
    text << '\n';
    emit(g, text.str());
  } else if (train_cmd->parsed()) {
    const auto loaded = load_cascades(cascades_path);
    pspec.variant = parse_variant(variant);
    pspec.seed = g.seed;
    if (pairs > 0) pspec.pairs_per_cascade = pairs;
    const auto model = train(pspec, loaded.set);
    model.save(require_out(g, "train"));
  } else if (eval_cmd->parsed()) {
    const auto loaded = load_cascades(cascades_path);
    std::vector<PredictedRanking> preds;
    if (!model_path.empty()) {
      const auto model = EmbeddingModel::load(model_path);
      if (model.universe_size() < loaded.set.universe_size) {
        fail(ErrorKind::kValidation, "model universe is smaller than the cascade universe");
      }
      for (const auto& c : loaded.set.cascades)
        preds.push_back(model.predict(c.source(), model.universe_size() - 1));
    } else if (!predictions_path.empty()) {
      const auto ranked = load_external_predictions(predictions_path, loaded.ids);
      for (const auto& c : loaded.set.cascades) {
        auto it = std::find_if(ranked.begin(), ranked.end(),
                               [&](const auto& p) { return p.source == c.source(); });
        if (it == ranked.end()) {
          fail(ErrorKind::kInsufficientData,
               "no ranking for source '" + loaded.ids.external(c.source()) + "'");
        }
        preds.push_back(*it);
      }
    } else {
      fail(ErrorKind::kValidation, "evaluate needs --model or --predictions");
    }
    const std::size_t n = network_size.value_or(loaded.set.universe_size);
    const std::size_t l = length.value_or(common_length(loaded.set));
    const auto r = evaluate(loaded.set.cascades, preds, n, l, top_k);
    std::ostringstream text;
    text << "cascades=" << loaded.set.size() << " N=" << n << " L=" << l
         << " map=" << format_double(r.map_value) << " smap=" << format_double(r.smap_value) << '\n';
    emit(g, text.str());
  } else if (sweep_cmd->parsed()) {
    const std::string source = plan_path.empty() ? app.get_config_ptr()->as<std::string>() : plan_path;
    if (source.empty()) fail(ErrorKind::kValidation, "sweep needs --plan or --config");
    ExperimentPlan plan = load_plan(source);
    if (app.count("--seed") > 0) plan.seed = g.seed;
    if (threads > 0) plan.threads = threads;
    plan.strict = plan.strict || g.strict;
    if (!g.out.empty()) plan.results_path = g.out;

    const auto result = run_sweep(plan);
    std::ostringstream csv;
    write_results_csv(csv, result.points);
    if (plan.results_path.empty()) {
      std::cout << csv.str();
    } else {
      write_text_file(plan.results_path, csv.str());
    }
    if (!result.failures.empty()) {
      const std::string sidecar =
          (plan.results_path.empty() ? std::string("sweep") : plan.results_path) + ".failures.csv";
      write_text_file(sidecar, failures_csv(result.failures));
      std::cerr << "warning: " << result.failures.size() << " of " << plan.cells.size()
                << " cells failed; see " << sidecar << '\n';
      if (result.points.empty()) {
        const auto& f = result.failures.front();
        std::cerr << "error: category=" << to_string(f.kind) << " message=" << f.message << '\n';
        return exit_code(f.kind);
      }
    }
    if (!plan.curves_path.empty() || !plan.svg_path.empty()) {
      const auto fit = fit_groups(result.points);
      for (const auto& w : fit.warnings) std::cerr << "warning: " << w << '\n';
      if (!plan.curves_path.empty()) write_text_file(plan.curves_path, curves_to_json(fit, FitTarget::kSmap));
      if (!plan.svg_path.empty())
        write_text_file(plan.svg_path, render_svg(result.points, fit, FitTarget::kSmap));
    }
  } else if (fit_cmd->parsed() || plot_cmd->parsed()) {
    const auto points = read_results_csv(results_path);
    const FitTarget t = parse_target(target);
    const auto fit = fit_groups(points, t);
    for (const auto& w : fit.warnings) std::cerr << "warning: " << w << '\n';
    emit(g, fit_cmd->parsed() ? curves_to_json(fit, t) : render_svg(points, fit, t));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const pcc::Error& e) {
    std::cerr << "error: category=" << pcc::to_string(e.kind()) << " message=" << e.what() << '\n';
    return pcc::exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: category=internal message=" << e.what() << '\n';
    return 1;
  }
}
