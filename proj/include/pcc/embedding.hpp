#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pcc/cascade.hpp"
#include "pcc/metrics.hpp"

namespace pcc {

enum class Variant { kCdk, kPae, kIae, kExternal, kRandom };

std::string to_string(Variant variant);
Variant parse_variant(const std::string& text);

struct PredictorSpec {
  Variant variant = Variant::kCdk;
  std::size_t latent_dim = 10;
  double margin = 1.0;
  double learning_rate = 0.01;
  std::size_t epochs = 50;
  // Defaults to 5x the cascade length when unset.
  std::optional<std::size_t> pairs_per_cascade;
  std::size_t negatives_per_pair = 1;
  double kernel_time = 1.0;
  std::uint64_t seed = 0;
  // Rankings file for Variant::kExternal.
  std::string external_path;
  // Label written to result files; defaults to the variant name.
  std::string name;

  std::string label() const { return name.empty() ? to_string(variant) : name; }
};

void validate(const PredictorSpec& spec);

// (4 pi t)^(-d/2) exp(-sq_dist / (4t)).
double heat_kernel(double t, std::size_t d, double sq_dist);

// One margin-ranking term: source-side vector `src`, the earlier-infected
// target `pos` and the later or uninfected target `neg`, with
// s(u) = -||src - u||^2 and loss = max(0, margin - s(pos) + s(neg)).
struct HingeTerm {
  double loss = 0.0;
  std::vector<double> grad_source;
  std::vector<double> grad_positive;
  std::vector<double> grad_negative;
};

HingeTerm hinge_term(std::span<const double> src, std::span<const double> pos,
                     std::span<const double> neg, double margin);

// Applies one SGD step of hinge_term in place. The three spans must not
// alias. Returns the loss before the step.
double hinge_step(std::span<double> src, std::span<double> pos, std::span<double> neg,
                  double margin, double learning_rate);

// Trained (or freshly initialized) embedding predictor.
//   CDK: one shared position z_v per node.
//   PAE: influence a_v and susceptibility b_v per node.
//   IAE: influence a_v per node and a susceptibility space b^(s) per source s
//        seen in training; unseen (s, v) fall back to a seeded default.
//   RANDOM: scores are seeded uniform draws per (source, v).
class EmbeddingModel {
 public:
  // Parameters drawn from N(0, 1/d) with the spec's seed.
  static EmbeddingModel initialize(const PredictorSpec& spec, std::size_t universe_size);
  static EmbeddingModel random(std::uint64_t seed, std::size_t universe_size);

  Variant variant() const noexcept { return variant_; }
  std::size_t universe_size() const noexcept { return universe_; }
  std::size_t dim() const noexcept { return dim_; }
  std::uint64_t seed() const noexcept { return seed_; }

  std::span<const double> source_vector(NodeId source) const;
  std::span<const double> target_vector(NodeId source, NodeId v) const;
  std::span<double> mutable_source_vector(NodeId source);
  // Allocates the IAE susceptibility space of `source` on first use.
  std::span<double> mutable_target_vector(NodeId source, NodeId v);

  bool has_source_space(NodeId source) const { return per_source_.contains(source); }
  std::size_t allocated_source_spaces() const noexcept { return per_source_.size(); }

  // Negative squared distance between the source-side and target-side
  // vectors; larger is more likely.
  double score(NodeId source, NodeId v) const;

  // All nodes but the source by descending score, ties by ascending id,
  // truncated to k.
  PredictedRanking predict(NodeId source, std::size_t k) const;

  bool all_finite() const;

  void save(std::ostream& out) const;
  void save(const std::string& path) const;
  static EmbeddingModel load(std::istream& in);
  static EmbeddingModel load(const std::string& path);

  friend bool operator==(const EmbeddingModel&, const EmbeddingModel&) = default;

 private:
  EmbeddingModel() = default;

  void check_node(NodeId v) const;
  std::vector<double> default_target(NodeId source, NodeId v) const;

  Variant variant_ = Variant::kCdk;
  std::size_t universe_ = 0;
  std::size_t dim_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<double> source_space_;  // N x d, row-major
  std::vector<double> target_space_;  // PAE only
  std::map<NodeId, std::vector<double>> per_source_;  // IAE only
};

// SGD on the margin ranking loss. Per epoch, cascades are visited in a
// seeded random order; for each, pairs_per_cascade pairs (v_i, v_j) are
// drawn with v_i a non-source member and v_j uniform over the members after
// v_i together with all non-members. Throws kUnsupported for EXTERNAL and
// RANDOM, kConvergence if a parameter becomes non-finite.
EmbeddingModel train(const PredictorSpec& spec, const CascadeSet& train_set);

}  // namespace pcc
