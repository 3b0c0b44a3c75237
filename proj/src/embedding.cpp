#include "pcc/embedding.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "pcc/error.hpp"
#include "pcc/random.hpp"

namespace pcc {

namespace {

constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kTargetStream = 2;
constexpr std::uint64_t kDefaultTargetStream = 3;
constexpr std::uint64_t kRandomScoreStream = 4;
constexpr std::uint64_t kTrainStream = 5;

void fill_normal(std::span<double> out, std::uint64_t seed, std::size_t dim) {
  Rng rng = make_rng(seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  for (auto& x : out) x = standard_normal(rng) * scale;
}

double sq_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    s += diff * diff;
  }
  return s;
}

}  // namespace

std::string to_string(Variant variant) {
  switch (variant) {
    case Variant::kCdk: return "CDK";
    case Variant::kPae: return "PAE";
    case Variant::kIae: return "IAE";
    case Variant::kExternal: return "EXTERNAL";
    case Variant::kRandom: return "RANDOM";
  }
  return "?";
}

Variant parse_variant(const std::string& text) {
  std::string upper = text;
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (upper == "CDK") return Variant::kCdk;
  if (upper == "PAE") return Variant::kPae;
  if (upper == "IAE") return Variant::kIae;
  if (upper == "EXTERNAL") return Variant::kExternal;
  if (upper == "RANDOM") return Variant::kRandom;
  fail(ErrorKind::kValidation, "unknown predictor variant '" + text + "'");
}

void validate(const PredictorSpec& spec) {
  if (spec.latent_dim == 0) fail(ErrorKind::kValidation, "latent_dim must be >= 1");
  if (!(spec.margin > 0.0)) fail(ErrorKind::kValidation, "margin must be positive");
  if (!(spec.learning_rate > 0.0)) fail(ErrorKind::kValidation, "learning_rate must be positive");
  if (spec.pairs_per_cascade && *spec.pairs_per_cascade == 0) {
    fail(ErrorKind::kValidation, "pairs_per_cascade must be positive");
  }
  if (spec.negatives_per_pair == 0) fail(ErrorKind::kValidation, "negatives_per_pair must be positive");
  if (!(spec.kernel_time > 0.0)) fail(ErrorKind::kValidation, "kernel_time must be positive");
  if (spec.variant == Variant::kExternal && spec.external_path.empty()) {
    fail(ErrorKind::kValidation, "EXTERNAL predictor needs a rankings path");
  }
}

double heat_kernel(double t, std::size_t d, double sq_dist) {
  if (!(t > 0.0)) fail(ErrorKind::kDomain, "kernel time must be positive");
  if (!(sq_dist >= 0.0)) fail(ErrorKind::kDomain, "squared distance must be >= 0");
  return std::pow(4.0 * std::numbers::pi * t, -static_cast<double>(d) / 2.0) *
         std::exp(-sq_dist / (4.0 * t));
}

HingeTerm hinge_term(std::span<const double> src, std::span<const double> pos,
                     std::span<const double> neg, double margin) {
  if (src.size() != pos.size() || src.size() != neg.size()) {
    fail(ErrorKind::kValidation, "hinge_term dimension mismatch");
  }
  const std::size_t d = src.size();
  HingeTerm out;
  out.grad_source.assign(d, 0.0);
  out.grad_positive.assign(d, 0.0);
  out.grad_negative.assign(d, 0.0);
  out.loss = std::max(0.0, margin + sq_distance(src, pos) - sq_distance(src, neg));
  if (out.loss <= 0.0) return out;
  for (std::size_t i = 0; i < d; ++i) {
    out.grad_source[i] = 2.0 * (neg[i] - pos[i]);
    out.grad_positive[i] = -2.0 * (src[i] - pos[i]);
    out.grad_negative[i] = 2.0 * (src[i] - neg[i]);
  }
  return out;
}

double hinge_step(std::span<double> src, std::span<double> pos, std::span<double> neg,
                  double margin, double learning_rate) {
  const double loss = margin + sq_distance(src, pos) - sq_distance(src, neg);
  if (loss <= 0.0) return 0.0;
  for (std::size_t i = 0; i < src.size(); ++i) {
    const double s = src[i], p = pos[i], n = neg[i];
    src[i] -= learning_rate * 2.0 * (n - p);
    pos[i] += learning_rate * 2.0 * (s - p);
    neg[i] -= learning_rate * 2.0 * (s - n);
  }
  return loss;
}

EmbeddingModel EmbeddingModel::initialize(const PredictorSpec& spec, std::size_t universe_size) {
  validate(spec);
  if (spec.variant == Variant::kExternal) {
    fail(ErrorKind::kUnsupported, "EXTERNAL predictors have no model parameters");
  }
  if (spec.variant == Variant::kRandom) return random(spec.seed, universe_size);
  if (universe_size < 2) fail(ErrorKind::kValidation, "universe must hold at least two nodes");
  EmbeddingModel model;
  model.variant_ = spec.variant;
  model.universe_ = universe_size;
  model.dim_ = spec.latent_dim;
  model.seed_ = spec.seed;
  model.source_space_.resize(universe_size * spec.latent_dim);
  fill_normal(model.source_space_, derive_seed(spec.seed, {kInitStream}), spec.latent_dim);
  if (spec.variant == Variant::kPae) {
    model.target_space_.resize(universe_size * spec.latent_dim);
    fill_normal(model.target_space_, derive_seed(spec.seed, {kTargetStream}), spec.latent_dim);
  }
  return model;
}

EmbeddingModel EmbeddingModel::random(std::uint64_t seed, std::size_t universe_size) {
  if (universe_size < 2) fail(ErrorKind::kValidation, "universe must hold at least two nodes");
  EmbeddingModel model;
  model.variant_ = Variant::kRandom;
  model.universe_ = universe_size;
  model.seed_ = seed;
  return model;
}

void EmbeddingModel::check_node(NodeId v) const {
  if (v >= universe_) {
    fail(ErrorKind::kDomain, "node " + std::to_string(v) + " outside universe of size " +
                                 std::to_string(universe_));
  }
}

std::vector<double> EmbeddingModel::default_target(NodeId source, NodeId v) const {
  std::vector<double> out(dim_);
  fill_normal(out, derive_seed(seed_, {kDefaultTargetStream, source, v}), dim_);
  return out;
}

std::span<const double> EmbeddingModel::source_vector(NodeId source) const {
  check_node(source);
  if (variant_ == Variant::kRandom) fail(ErrorKind::kUnsupported, "RANDOM model has no vectors");
  return std::span<const double>(source_space_).subspan(source * dim_, dim_);
}

std::span<double> EmbeddingModel::mutable_source_vector(NodeId source) {
  check_node(source);
  if (variant_ == Variant::kRandom) fail(ErrorKind::kUnsupported, "RANDOM model has no vectors");
  return std::span<double>(source_space_).subspan(source * dim_, dim_);
}

std::span<const double> EmbeddingModel::target_vector(NodeId source, NodeId v) const {
  check_node(source);
  check_node(v);
  switch (variant_) {
    case Variant::kCdk:
      return std::span<const double>(source_space_).subspan(v * dim_, dim_);
    case Variant::kPae:
      return std::span<const double>(target_space_).subspan(v * dim_, dim_);
    case Variant::kIae: {
      auto it = per_source_.find(source);
      if (it == per_source_.end()) {
        fail(ErrorKind::kDomain, "no susceptibility space for source " + std::to_string(source));
      }
      return std::span<const double>(it->second).subspan(v * dim_, dim_);
    }
    default:
      fail(ErrorKind::kUnsupported, "model variant has no vectors");
  }
}

std::span<double> EmbeddingModel::mutable_target_vector(NodeId source, NodeId v) {
  check_node(source);
  check_node(v);
  switch (variant_) {
    case Variant::kCdk:
      return std::span<double>(source_space_).subspan(v * dim_, dim_);
    case Variant::kPae:
      return std::span<double>(target_space_).subspan(v * dim_, dim_);
    case Variant::kIae: {
      auto [it, inserted] = per_source_.try_emplace(source);
      if (inserted) {
        it->second.reserve(universe_ * dim_);
        for (NodeId u = 0; u < universe_; ++u) {
          const auto init = default_target(source, u);
          it->second.insert(it->second.end(), init.begin(), init.end());
        }
      }
      return std::span<double>(it->second).subspan(v * dim_, dim_);
    }
    default:
      fail(ErrorKind::kUnsupported, "model variant has no vectors");
  }
}

double EmbeddingModel::score(NodeId source, NodeId v) const {
  check_node(source);
  check_node(v);
  if (v == source) fail(ErrorKind::kDomain, "cannot score the source against itself");
  if (variant_ == Variant::kRandom) {
    Rng rng = make_rng(derive_seed(seed_, {kRandomScoreStream, source, v}));
    return uniform01(rng);
  }
  if (variant_ == Variant::kIae && !per_source_.contains(source)) {
    return -sq_distance(source_vector(source), default_target(source, v));
  }
  return -sq_distance(source_vector(source), target_vector(source, v));
}

PredictedRanking EmbeddingModel::predict(NodeId source, std::size_t k) const {
  check_node(source);
  if (k > universe_ - 1) {
    fail(ErrorKind::kDomain, "k = " + std::to_string(k) + " exceeds the " +
                                 std::to_string(universe_ - 1) + " candidates");
  }
  std::vector<std::pair<double, NodeId>> scored;
  scored.reserve(universe_ - 1);
  for (NodeId v = 0; v < universe_; ++v) {
    if (v != source) scored.emplace_back(score(source, v), v);
  }
  auto better = [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  };
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k),
                    scored.end(), better);
  PredictedRanking out;
  out.source = source;
  out.ranking.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.ranking.push_back(scored[i].second);
  return out;
}

bool EmbeddingModel::all_finite() const {
  auto finite = [](const std::vector<double>& xs) {
    return std::all_of(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); });
  };
  if (!finite(source_space_) || !finite(target_space_)) return false;
  return std::all_of(per_source_.begin(), per_source_.end(),
                     [&](const auto& kv) { return finite(kv.second); });
}

namespace {

constexpr std::string_view kMagic = "pcc-embedding";
constexpr int kFormatVersion = 1;

void write_rows(std::ostream& out, const std::vector<double>& values, std::size_t dim) {
  char buf[64];
  for (std::size_t i = 0; i < values.size(); ++i) {
    auto res = std::to_chars(buf, buf + sizeof buf, values[i]);
    out.write(buf, res.ptr - buf);
    out << ((i + 1) % dim == 0 ? '\n' : ' ');
  }
}

void read_values(std::istream& in, std::vector<double>& values, std::size_t count) {
  values.resize(count);
  std::string token;
  for (auto& x : values) {
    if (!(in >> token)) fail(ErrorKind::kParse, "model file truncated");
    auto res = std::from_chars(token.data(), token.data() + token.size(), x);
    if (res.ec != std::errc{} || res.ptr != token.data() + token.size()) {
      fail(ErrorKind::kParse, "bad number '" + token + "' in model file");
    }
  }
}

void expect(std::istream& in, std::string_view keyword) {
  std::string token;
  if (!(in >> token) || token != keyword) {
    fail(ErrorKind::kParse, "model file: expected '" + std::string(keyword) + "'");
  }
}

}  // namespace

void EmbeddingModel::save(std::ostream& out) const {
  out << kMagic << ' ' << kFormatVersion << '\n'
      << "variant " << to_string(variant_) << '\n'
      << "universe " << universe_ << '\n'
      << "dim " << dim_ << '\n'
      << "seed " << seed_ << '\n';
  if (variant_ == Variant::kRandom) return;
  out << "source_space\n";
  write_rows(out, source_space_, dim_);
  if (variant_ == Variant::kPae) {
    out << "target_space\n";
    write_rows(out, target_space_, dim_);
  }
  if (variant_ == Variant::kIae) {
    out << "source_spaces " << per_source_.size() << '\n';
    for (const auto& [source, values] : per_source_) {
      out << "source " << source << '\n';
      write_rows(out, values, dim_);
    }
  }
}

void EmbeddingModel::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::kIo, "cannot open '" + path + "' for writing");
  save(out);
  if (!out) fail(ErrorKind::kIo, "failed writing '" + path + "'");
}

EmbeddingModel EmbeddingModel::load(std::istream& in) {
  std::string magic, variant;
  int version = 0;
  if (!(in >> magic >> version) || magic != kMagic) fail(ErrorKind::kParse, "not a model file");
  if (version != kFormatVersion) {
    fail(ErrorKind::kParse, "unsupported model format version " + std::to_string(version));
  }
  EmbeddingModel model;
  expect(in, "variant");
  in >> variant;
  model.variant_ = parse_variant(variant);
  expect(in, "universe");
  in >> model.universe_;
  expect(in, "dim");
  in >> model.dim_;
  expect(in, "seed");
  in >> model.seed_;
  if (!in) fail(ErrorKind::kParse, "model file header truncated");
  if (model.variant_ == Variant::kExternal) fail(ErrorKind::kParse, "EXTERNAL is not a model");
  if (model.variant_ == Variant::kRandom) return model;
  if (model.dim_ == 0 || model.universe_ < 2) fail(ErrorKind::kParse, "bad model dimensions");
  const std::size_t block = model.universe_ * model.dim_;
  expect(in, "source_space");
  read_values(in, model.source_space_, block);
  if (model.variant_ == Variant::kPae) {
    expect(in, "target_space");
    read_values(in, model.target_space_, block);
  }
  if (model.variant_ == Variant::kIae) {
    std::size_t count = 0;
    expect(in, "source_spaces");
    in >> count;
    for (std::size_t i = 0; i < count; ++i) {
      NodeId source = 0;
      expect(in, "source");
      if (!(in >> source) || source >= model.universe_) {
        fail(ErrorKind::kParse, "bad source id in model file");
      }
      read_values(in, model.per_source_[source], block);
    }
  }
  return model;
}

EmbeddingModel EmbeddingModel::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open '" + path + "'");
  return load(in);
}

EmbeddingModel train(const PredictorSpec& spec, const CascadeSet& train_set) {
  if (spec.variant == Variant::kExternal || spec.variant == Variant::kRandom) {
    fail(ErrorKind::kUnsupported, to_string(spec.variant) + " predictors are not trainable");
  }
  validate(spec);
  validate(train_set);
  EmbeddingModel model = EmbeddingModel::initialize(spec, train_set.universe_size);
  const std::size_t universe = train_set.universe_size;
  Rng rng = make_rng(derive_seed(spec.seed, {kTrainStream}));

  std::vector<std::size_t> order(train_set.size());
  std::vector<bool> member(universe, false);
  for (std::size_t epoch = 0; epoch < spec.epochs; ++epoch) {
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    shuffle(std::span<std::size_t>(order), rng);

    for (std::size_t idx : order) {
      const auto& nodes = train_set.cascades[idx].nodes;
      const std::size_t len = nodes.size();
      if (len < 2) continue;
      const NodeId source = nodes.front();
      const std::size_t outsiders = universe - len;
      for (NodeId v : nodes) member[v] = true;

      const std::size_t pairs = spec.pairs_per_cascade.value_or(5 * len);
      for (std::size_t p = 0; p < pairs; ++p) {
        const std::size_t pos_at = 1 + static_cast<std::size_t>(uniform_index(rng, len - 1));
        const NodeId positive = nodes[pos_at];
        const std::size_t later = len - 1 - pos_at;
        if (later + outsiders == 0) continue;
        for (std::size_t q = 0; q < spec.negatives_per_pair; ++q) {
          const auto pick = static_cast<std::size_t>(uniform_index(rng, later + outsiders));
          NodeId negative;
          if (pick < later) {
            negative = nodes[pos_at + 1 + pick];
          } else {
            do {
              negative = static_cast<NodeId>(uniform_index(rng, universe));
            } while (member[negative]);
          }
          hinge_step(model.mutable_source_vector(source),
                     model.mutable_target_vector(source, positive),
                     model.mutable_target_vector(source, negative), spec.margin,
                     spec.learning_rate);
        }
      }
      for (NodeId v : nodes) member[v] = false;
    }
    if (!model.all_finite()) {
      fail(ErrorKind::kConvergence,
           "non-finite parameters after epoch " + std::to_string(epoch + 1));
    }
  }
  return model;
}

}  // namespace pcc
