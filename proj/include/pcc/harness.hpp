#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pcc/cascade.hpp"
#include "pcc/curve_fit.hpp"
#include "pcc/dataio.hpp"
#include "pcc/embedding.hpp"
#include "pcc/error.hpp"
#include "pcc/graph.hpp"

namespace pcc {

enum class ApceScope { kFull, kTrain };

// One experiment cell: a synthetic (graph + mechanism) or empirical
// (cascade file) data source, evaluated with each predictor.
struct CellSpec {
  std::string name;
  // Synthetic source. graph.seed is ignored; seeds derive from the cell seed.
  GraphSpec graph;
  SimConfig sim;
  // Empirical source; when set, graph/sim are unused except target_length.
  std::string cascades_path;
  // Empirical N: propagation subgraph (default) or the whole id universe.
  bool whole_universe_size = false;
  std::size_t m = 200;
  double split_ratio = 0.8;
  ApceScope apce_scope = ApceScope::kFull;
  // Permit L > floor(N/10) for synthetic cells.
  bool allow_long = false;
  std::vector<PredictorSpec> predictors{PredictorSpec{}};
  // Defaults to a seed derived from (plan seed, cell index).
  std::optional<std::uint64_t> seed;

  bool empirical() const { return !cascades_path.empty(); }
  std::string describe() const;
};

void validate(const CellSpec& cell);

struct ExperimentPlan {
  std::vector<CellSpec> cells;
  std::uint64_t seed = 0;
  bool strict = false;
  std::size_t threads = 1;
  std::string results_path;
  std::string curves_path;
  std::string svg_path;
};

// Parses a plan document. Cells come from an explicit "cells" array and/or a
// "grid" block expanded over topologies x mechanisms x nodes x lengths x
// replicates; "defaults" applies to every cell. Lengths may be integers or
// "N/k" expressions.
ExperimentPlan parse_plan(const std::string& json_text);
ExperimentPlan load_plan(const std::string& path);

struct SplitSets {
  CascadeSet train;
  CascadeSet test;
};

// Seeded shuffle, then the first floor(ratio * m) cascades train.
SplitSets split(const CascadeSet& set, double ratio, std::uint64_t seed);

struct CellData {
  CascadeSet cascades;
  NodeIdMap ids;
  std::size_t network_size = 0;
  std::string topology;
  std::string mechanism;
};

// Generates (or loads and subsamples) the cascades for a cell.
CellData prepare_cell_data(const CellSpec& cell, std::uint64_t cell_seed);

// Full pipeline for one cell; returns one point per predictor in predictor
// order. Errors carry the cell description.
std::vector<ScalingPoint> run_cell(const CellSpec& cell, std::uint64_t cell_seed);

std::uint64_t cell_seed(const ExperimentPlan& plan, std::size_t index);

struct CellFailure {
  std::size_t index = 0;
  std::string cell;
  ErrorKind kind = ErrorKind::kValidation;
  std::string message;
};

struct SweepResult {
  std::vector<ScalingPoint> points;  // canonical order
  std::vector<CellFailure> failures;
};

// Runs every cell on a bounded worker pool. In strict mode the first failing
// cell (by index) aborts the sweep with its error.
SweepResult run_sweep(const ExperimentPlan& plan);

void sort_canonical(std::vector<ScalingPoint>& points);

enum class FitTarget { kSmap, kMap };

struct ModelCurve {
  std::string model;
  FittedCurve curve;
};

struct GroupFit {
  std::vector<ModelCurve> curves;
  std::vector<std::string> warnings;
};

// One exponential fit of y (SMAP or MAP) against APCE per model group.
// Groups with fewer than 3 distinct APCE values are skipped with a warning;
// throws kInsufficientData when no points are given.
GroupFit fit_groups(const std::vector<ScalingPoint>& points, FitTarget target = FitTarget::kSmap,
                    const FitOptions& options = {});

std::vector<Point> to_xy(const std::vector<ScalingPoint>& points, FitTarget target);

std::string curves_to_json(const GroupFit& fit, FitTarget target);
std::string render_svg(const std::vector<ScalingPoint>& points, const GroupFit& fit,
                       FitTarget target);

// fit_groups + curves JSON (<prefix>.json) + scatter plot (<prefix>.svg).
GroupFit fit_and_plot(const std::vector<ScalingPoint>& points, const std::string& out_prefix,
                      FitTarget target = FitTarget::kSmap);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace pcc
