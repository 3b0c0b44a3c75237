#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "pcc/harness.hpp"

namespace pcc {

std::vector<Point> to_xy(const std::vector<ScalingPoint>& points, FitTarget target) {
  std::vector<Point> xy;
  xy.reserve(points.size());
  for (const auto& p : points) {
    xy.push_back({p.apce, target == FitTarget::kSmap ? p.smap_value : p.map_value});
  }
  return xy;
}

GroupFit fit_groups(const std::vector<ScalingPoint>& points, FitTarget target,
                    const FitOptions& options) {
  if (points.empty()) fail(ErrorKind::kInsufficientData, "no points to fit");
  std::map<std::string, std::vector<ScalingPoint>> groups;
  for (const auto& p : points) groups[p.model].push_back(p);

  GroupFit out;
  for (const auto& [model, members] : groups) {
    std::set<double> distinct;
    for (const auto& p : members) distinct.insert(p.apce);
    if (distinct.size() < 3) {
      out.warnings.push_back("model " + model + ": only " + std::to_string(distinct.size()) +
                             " distinct APCE values, skipped");
      continue;
    }
    const auto xy = to_xy(members, target);
    out.curves.push_back({model, fit_exp_decay(xy, options)});
  }
  return out;
}

std::string curves_to_json(const GroupFit& fit, FitTarget target) {
  nlohmann::ordered_json doc;
  doc["x"] = "apce";
  doc["y"] = target == FitTarget::kSmap ? "smap" : "map";
  doc["curves"] = nlohmann::ordered_json::array();
  for (const auto& [model, c] : fit.curves) {
    nlohmann::ordered_json item;
    item["model"] = model;
    item["y0"] = c.y0;
    item["A"] = c.A;
    item["B"] = c.B;
    item["r_squared"] = c.r_squared;
    item["n_points"] = c.n_points;
    item["degenerate_variance"] = c.degenerate_variance;
    doc["curves"].push_back(item);
  }
  doc["skipped"] = fit.warnings;
  return doc.dump(2) + "\n";
}

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_svg(const std::vector<ScalingPoint>& points, const GroupFit& fit,
                       FitTarget target) {
  constexpr double kWidth = 800, kHeight = 560;
  constexpr double kLeft = 80, kRight = 160, kTop = 30, kBottom = 60;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;

  std::map<std::string, std::vector<Point>> groups;
  for (const auto& p : points) {
    groups[p.model].push_back({p.apce, target == FitTarget::kSmap ? p.smap_value : p.map_value});
  }
  double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;
  if (!points.empty()) {
    x_min = y_min = INFINITY;
    x_max = y_max = -INFINITY;
    for (const auto& [model, xy] : groups) {
      for (const auto& p : xy) {
        x_min = std::min(x_min, p.x);
        x_max = std::max(x_max, p.x);
        y_min = std::min(y_min, p.y);
        y_max = std::max(y_max, p.y);
      }
    }
    y_min = std::min(y_min, 0.0);
    if (x_max - x_min < 1e-12) { x_min -= 0.5; x_max += 0.5; }
    if (y_max - y_min < 1e-12) y_max = y_min + 1.0;
    const double pad_x = 0.05 * (x_max - x_min), pad_y = 0.05 * (y_max - y_min);
    x_min -= pad_x; x_max += pad_x; y_max += pad_y;
  }
  auto sx = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * plot_w; };
  auto sy = [&](double y) { return kTop + (1.0 - (y - y_min) / (y_max - y_min)) * plot_h; };
  const char* y_name = target == FitTarget::kSmap ? "SMAP" : "MAP";

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w << "\" height=\""
      << plot_h << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = x_min + (x_max - x_min) * i / 5.0;
    const double yv = y_min + (y_max - y_min) * i / 5.0;
    svg << "<line x1=\"" << fmt(sx(xv)) << "\" y1=\"" << fmt(kTop + plot_h) << "\" x2=\""
        << fmt(sx(xv)) << "\" y2=\"" << fmt(kTop + plot_h + 5) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << fmt(sx(xv)) << "\" y=\"" << fmt(kTop + plot_h + 20)
        << "\" text-anchor=\"middle\">" << tick_label(xv) << "</text>\n";
    svg << "<line x1=\"" << fmt(kLeft - 5) << "\" y1=\"" << fmt(sy(yv)) << "\" x2=\""
        << fmt(kLeft) << "\" y2=\"" << fmt(sy(yv)) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << fmt(kLeft - 8) << "\" y=\"" << fmt(sy(yv) + 4)
        << "\" text-anchor=\"end\">" << tick_label(yv) << "</text>\n";
  }
  svg << "<text x=\"" << fmt(kLeft + plot_w / 2) << "\" y=\"" << fmt(kHeight - 15)
      << "\" text-anchor=\"middle\">APCE</text>\n";
  svg << "<text x=\"20\" y=\"" << fmt(kTop + plot_h / 2) << "\" text-anchor=\"middle\" "
      << "transform=\"rotate(-90 20 " << fmt(kTop + plot_h / 2) << ")\">" << y_name
      << "</text>\n";

  std::size_t color_index = 0;
  for (const auto& [model, xy] : groups) {
    const char* color = kPalette[color_index % std::size(kPalette)];
    svg << "<g class=\"model\" data-model=\"" << escape(model) << "\" fill=\"" << color
        << "\" stroke=\"" << color << "\">\n";
    for (const auto& p : xy) {
      svg << "<circle cx=\"" << fmt(sx(p.x)) << "\" cy=\"" << fmt(sy(p.y))
          << "\" r=\"3\" fill-opacity=\"0.6\"/>\n";
    }
    auto curve = std::find_if(fit.curves.begin(), fit.curves.end(),
                              [&](const ModelCurve& c) { return c.model == model; });
    if (curve != fit.curves.end()) {
      double lo = INFINITY, hi = -INFINITY;
      for (const auto& p : xy) { lo = std::min(lo, p.x); hi = std::max(hi, p.x); }
      svg << "<polyline fill=\"none\" stroke-width=\"2\" points=\"";
      for (int i = 0; i < 200; ++i) {
        const double x = lo + (hi - lo) * i / 199.0;
        const double y = std::clamp(curve->curve(x), y_min, y_max);
        svg << (i ? " " : "") << fmt(sx(x)) << ',' << fmt(sy(y));
      }
      svg << "\"/>\n";
    }
    const double ly = kTop + 15 + 20.0 * static_cast<double>(color_index);
    svg << "<rect class=\"legend\" x=\"" << fmt(kLeft + plot_w + 15) << "\" y=\"" << fmt(ly - 9)
        << "\" width=\"10\" height=\"10\"/>\n";
    svg << "<text x=\"" << fmt(kLeft + plot_w + 30) << "\" y=\"" << fmt(ly)
        << "\" stroke=\"none\" fill=\"black\">" << escape(model);
    if (curve != fit.curves.end()) svg << " (R2=" << tick_label(curve->curve.r_squared) << ")";
    svg << "</text>\n</g>\n";
    ++color_index;
  }
  svg << "</svg>\n";
  return svg.str();
}

GroupFit fit_and_plot(const std::vector<ScalingPoint>& points, const std::string& out_prefix,
                      FitTarget target) {
  GroupFit fit = fit_groups(points, target);
  write_text_file(out_prefix + ".json", curves_to_json(fit, target));
  write_text_file(out_prefix + ".svg", render_svg(points, fit, target));
  return fit;
}

}  // namespace pcc
