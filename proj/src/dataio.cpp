#include "pcc/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "pcc/error.hpp"
#include "pcc/random.hpp"

namespace pcc {

NodeIdMap NodeIdMap::identity(std::size_t n) {
  NodeIdMap map;
  for (std::size_t i = 0; i < n; ++i) map.intern(std::to_string(i));
  return map;
}

NodeId NodeIdMap::intern(const std::string& external) {
  auto [it, inserted] = ids_.try_emplace(external, static_cast<NodeId>(names_.size()));
  if (inserted) names_.push_back(external);
  return it->second;
}

std::optional<NodeId> NodeIdMap::find(const std::string& external) const {
  auto it = ids_.find(external);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

namespace {

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open '" + path + "'");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::kIo, "cannot open '" + path + "' for writing");
  return out;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace

LoadedCascades load_cascades(std::istream& in) {
  LoadedCascades out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty()) continue;
    if (body.front() == '#') {
      const auto pos = body.find("universe=");
      if (pos != std::string_view::npos && out.set.cascades.empty() && out.ids.size() == 0) {
        const auto digits = body.substr(pos + 9);
        std::size_t n = 0;
        auto res = std::from_chars(digits.data(), digits.data() + digits.size(), n);
        if (res.ec != std::errc{}) {
          fail(ErrorKind::kParse, "line " + std::to_string(line_no) + ": bad universe header");
        }
        out.ids = NodeIdMap::identity(n);
      }
      continue;
    }
    std::istringstream tokens{std::string(body)};
    std::string token;
    Cascade cascade;
    std::unordered_set<NodeId> seen;
    while (tokens >> token) {
      if (auto comma = token.find(','); comma != std::string::npos) token.resize(comma);
      if (token.empty()) fail(ErrorKind::kParse, "line " + std::to_string(line_no) + ": empty id");
      const NodeId id = out.ids.intern(token);
      if (!seen.insert(id).second) {
        fail(ErrorKind::kParse, "line " + std::to_string(line_no) + ": duplicate node '" + token + "'");
      }
      cascade.nodes.push_back(id);
    }
    out.set.cascades.push_back(std::move(cascade));
  }
  if (out.set.cascades.empty()) fail(ErrorKind::kParse, "no cascades in input");
  out.set.universe_size = out.ids.size();
  return out;
}

LoadedCascades load_cascades(const std::string& path) {
  auto in = open_in(path);
  return load_cascades(in);
}

void write_cascades(std::ostream& out, const CascadeSet& set, const NodeIdMap* ids) {
  if (!ids) out << "# universe=" << set.universe_size << '\n';
  for (const auto& c : set.cascades) {
    for (std::size_t i = 0; i < c.nodes.size(); ++i) {
      if (i) out << ' ';
      if (ids) {
        out << ids->external(c.nodes[i]);
      } else {
        out << c.nodes[i];
      }
    }
    out << '\n';
  }
}

void write_cascades(const std::string& path, const CascadeSet& set, const NodeIdMap* ids) {
  auto out = open_out(path);
  write_cascades(out, set, ids);
  if (!out) fail(ErrorKind::kIo, "failed writing '" + path + "'");
}

Cascade subsample_cascade(const Cascade& cascade, std::size_t length, std::uint64_t seed) {
  const std::size_t n = cascade.size();
  if (length == 0) fail(ErrorKind::kDomain, "subsample length must be positive");
  if (n < length) {
    fail(ErrorKind::kDomain, "cascade of length " + std::to_string(n) +
                                 " is shorter than " + std::to_string(length));
  }
  // Selection sampling over the non-source positions keeps relative order.
  Rng rng = make_rng(seed);
  Cascade out;
  out.nodes.reserve(length);
  out.nodes.push_back(cascade.source());
  std::size_t needed = length - 1;
  std::size_t remaining = n - 1;
  for (std::size_t i = 1; i < n && needed > 0; ++i, --remaining) {
    if (uniform_index(rng, remaining) < needed) {
      out.nodes.push_back(cascade.nodes[i]);
      --needed;
    }
  }
  return out;
}

std::size_t propagation_subgraph_size(const CascadeSet& set) {
  std::unordered_set<NodeId> nodes;
  for (const auto& c : set.cascades) nodes.insert(c.nodes.begin(), c.nodes.end());
  return nodes.size();
}

std::vector<PredictedRanking> load_external_predictions(std::istream& in, const NodeIdMap& ids) {
  std::vector<PredictedRanking> out;
  std::string line;
  std::size_t line_no = 0;
  auto lookup = [&](const std::string& token) {
    auto id = ids.find(token);
    if (!id) {
      fail(ErrorKind::kParse,
           "line " + std::to_string(line_no) + ": unknown node id '" + token + "'");
    }
    return *id;
  };
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto colon = body.find(':');
    if (colon == std::string_view::npos) {
      fail(ErrorKind::kParse, "line " + std::to_string(line_no) + ": expected 'source: ranking'");
    }
    PredictedRanking pred;
    pred.source = lookup(std::string(trim(body.substr(0, colon))));
    std::istringstream tokens{std::string(body.substr(colon + 1))};
    std::string token;
    std::unordered_set<NodeId> seen;
    while (tokens >> token) {
      const NodeId id = lookup(token);
      if (id == pred.source) {
        fail(ErrorKind::kParse, "line " + std::to_string(line_no) + ": ranking contains its source");
      }
      if (!seen.insert(id).second) {
        fail(ErrorKind::kParse,
             "line " + std::to_string(line_no) + ": duplicate candidate '" + token + "'");
      }
      pred.ranking.push_back(id);
    }
    out.push_back(std::move(pred));
  }
  return out;
}

std::vector<PredictedRanking> load_external_predictions(const std::string& path,
                                                        const NodeIdMap& ids) {
  auto in = open_in(path);
  return load_external_predictions(in, ids);
}

void write_predictions(std::ostream& out, const std::vector<PredictedRanking>& preds,
                       const NodeIdMap& ids) {
  for (const auto& p : preds) {
    out << ids.external(p.source) << ':';
    for (NodeId v : p.ranking) out << ' ' << ids.external(v);
    out << '\n';
  }
}

void write_predictions(const std::string& path, const std::vector<PredictedRanking>& preds,
                       const NodeIdMap& ids) {
  auto out = open_out(path);
  write_predictions(out, preds, ids);
  if (!out) fail(ErrorKind::kIo, "failed writing '" + path + "'");
}

std::string format_double(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

void write_results_csv(std::ostream& out, const std::vector<ScalingPoint>& points) {
  out << kResultsHeader << '\n';
  for (const auto& p : points) {
    out << p.topology << ',' << p.mechanism << ',' << p.model << ',' << p.network_size << ','
        << p.target_length << ',' << p.cascade_count << ',' << p.seed << ','
        << format_double(p.apce) << ',' << format_double(p.map_value) << ','
        << format_double(p.smap_value) << '\n';
  }
}

void write_results_csv(const std::string& path, const std::vector<ScalingPoint>& points) {
  auto out = open_out(path);
  write_results_csv(out, points);
  if (!out) fail(ErrorKind::kIo, "failed writing '" + path + "'");
}

namespace {

template <typename T>
T parse_field(const std::string& text, std::size_t line_no, const char* name) {
  T value{};
  auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    fail(ErrorKind::kParse, "results line " + std::to_string(line_no) + ": bad " + name +
                                " '" + text + "'");
  }
  return value;
}

}  // namespace

std::vector<ScalingPoint> read_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != kResultsHeader) {
    fail(ErrorKind::kParse, std::string("results header must be '") + kResultsHeader + "'");
  }
  std::vector<ScalingPoint> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> f;
    std::string cell;
    std::istringstream row{std::string(trim(line))};
    while (std::getline(row, cell, ',')) f.push_back(cell);
    if (f.size() != 10) {
      fail(ErrorKind::kParse, "results line " + std::to_string(line_no) + ": expected 10 fields");
    }
    ScalingPoint p;
    p.topology = f[0];
    p.mechanism = f[1];
    p.model = f[2];
    p.network_size = parse_field<std::size_t>(f[3], line_no, "N");
    p.target_length = parse_field<std::size_t>(f[4], line_no, "L");
    p.cascade_count = parse_field<std::size_t>(f[5], line_no, "m");
    p.seed = parse_field<std::uint64_t>(f[6], line_no, "seed");
    p.apce = parse_field<double>(f[7], line_no, "apce");
    p.map_value = parse_field<double>(f[8], line_no, "map");
    p.smap_value = parse_field<double>(f[9], line_no, "smap");
    if (p.target_length == 0) fail(ErrorKind::kParse, "results line " + std::to_string(line_no) + ": L = 0");
    const double expected = p.map_value * static_cast<double>(p.network_size) /
                            static_cast<double>(p.target_length);
    if (std::abs(expected - p.smap_value) > 1e-12 * std::max(1.0, std::abs(expected))) {
      fail(ErrorKind::kParse, "results line " + std::to_string(line_no) + ": smap != map*N/L");
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<ScalingPoint> read_results_csv(const std::string& path) {
  auto in = open_in(path);
  return read_results_csv(in);
}

}  // namespace pcc
