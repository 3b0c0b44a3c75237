#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "pcc/cascade.hpp"
#include "pcc/metrics.hpp"

namespace pcc {

// Bijection between external string ids and dense internal ids, in
// first-seen order.
class NodeIdMap {
 public:
  // Identity map over "0" .. "n-1".
  static NodeIdMap identity(std::size_t n);

  NodeId intern(const std::string& external);
  std::optional<NodeId> find(const std::string& external) const;
  const std::string& external(NodeId id) const { return names_.at(id); }
  std::size_t size() const noexcept { return names_.size(); }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, NodeId> ids_;
};

struct LoadedCascades {
  CascadeSet set;
  NodeIdMap ids;
};

// One cascade per line, whitespace-separated ids, source first. Lines
// starting with '#' are comments, except a "# universe=N" header which
// pre-registers the ids 0..N-1 so numeric files keep their ids. A token of
// the form "id,timestamp" has its timestamp discarded.
LoadedCascades load_cascades(std::istream& in);
LoadedCascades load_cascades(const std::string& path);

// Writes the "# universe=N" header followed by one line per cascade. With
// `ids`, internal ids are written as their external names and no header is
// emitted.
void write_cascades(std::ostream& out, const CascadeSet& set, const NodeIdMap* ids = nullptr);
void write_cascades(const std::string& path, const CascadeSet& set,
                    const NodeIdMap* ids = nullptr);

// Keeps the source and a uniform (L-1)-subset of the remaining nodes in
// their original order.
Cascade subsample_cascade(const Cascade& cascade, std::size_t length, std::uint64_t seed);

// Number of distinct nodes across all cascades.
std::size_t propagation_subgraph_size(const CascadeSet& set);

// "source: r1 r2 r3 ..." per line.
std::vector<PredictedRanking> load_external_predictions(std::istream& in, const NodeIdMap& ids);
std::vector<PredictedRanking> load_external_predictions(const std::string& path,
                                                        const NodeIdMap& ids);
void write_predictions(std::ostream& out, const std::vector<PredictedRanking>& preds,
                       const NodeIdMap& ids);
void write_predictions(const std::string& path, const std::vector<PredictedRanking>& preds,
                       const NodeIdMap& ids);

// One row of the results table.
struct ScalingPoint {
  std::string topology;
  std::string mechanism;
  std::string model;
  std::size_t network_size = 0;  // N
  std::size_t target_length = 0;  // L
  std::size_t cascade_count = 0;  // m
  std::uint64_t seed = 0;
  double apce = 0.0;
  double map_value = 0.0;
  double smap_value = 0.0;

  friend bool operator==(const ScalingPoint&, const ScalingPoint&) = default;
};

inline constexpr const char* kResultsHeader = "topology,mechanism,model,N,L,m,seed,apce,map,smap";

// Shortest round-trip decimal form of a double.
std::string format_double(double value);

void write_results_csv(std::ostream& out, const std::vector<ScalingPoint>& points);
void write_results_csv(const std::string& path, const std::vector<ScalingPoint>& points);
// Throws kParse on a schema mismatch or when smap differs from map*N/L by
// more than 1e-12 (relative).
std::vector<ScalingPoint> read_results_csv(std::istream& in);
std::vector<ScalingPoint> read_results_csv(const std::string& path);

}  // namespace pcc
