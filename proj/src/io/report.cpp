#include "pose6d/io/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "pose6d/core/error.hpp"

namespace pose6d {

namespace {

const char* kRowHeader = "scene,instance_id,class_id,object_id,symmetric,add,adds,add_dispatch,diameter";
const char* kSummaryHeader = "metric,value";

std::string format9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string format_fixed6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_double(const std::string& token, int lineno) {
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (token.empty() || end != token.c_str() + token.size() || !std::isfinite(v))
    throw ParseError("malformed number '" + token + "'", lineno);
  return v;
}

long parse_int(const std::string& token, int lineno) {
  char* end = nullptr;
  const long v = std::strtol(token.c_str(), &end, 10);
  if (token.empty() || end != token.c_str() + token.size())
    throw ParseError("malformed integer '" + token + "'", lineno);
  return v;
}

}  // namespace

std::string write_report_csv(const std::vector<ReportRow>& rows,
                             const std::vector<std::pair<std::string, double>>& summary) {
  std::ostringstream out;
  out << kRowHeader << "\n";
  for (const ReportRow& r : rows) {
    if (r.object_id.find(',') != std::string::npos ||
        r.object_id.find('\n') != std::string::npos)
      throw InvalidArgumentError("object_id must not contain ',' or newlines");
    out << r.scene << ',' << r.instance_id << ',' << r.class_id << ',' << r.object_id
        << ',' << (r.symmetric ? 1 : 0) << ',' << format9(r.add) << ','
        << format9(r.adds) << ',' << format9(r.dispatch) << ',' << format9(r.diameter)
        << "\n";
  }
  out << "\n" << kSummaryHeader << "\n";
  for (const auto& [metric, value] : summary) {
    if (metric.find(',') != std::string::npos || metric.find('\n') != std::string::npos)
      throw InvalidArgumentError("metric names must not contain ',' or newlines");
    out << metric << ',' << format_fixed6(value) << "\n";
  }
  return out.str();
}

void read_report_csv(const std::string& text, std::vector<ReportRow>& rows,
                     std::vector<std::pair<std::string, double>>& summary) {
  rows.clear();
  summary.clear();
  std::istringstream in(text);
  std::string line;
  int lineno = 0;

  const auto next = [&](std::string& out_line) {
    if (!std::getline(in, out_line)) return false;
    if (!out_line.empty() && out_line.back() == '\r') out_line.pop_back();
    ++lineno;
    return true;
  };

  if (!next(line) || line != kRowHeader)
    throw ParseError("missing instance header row", 1);
  bool in_summary = false;
  while (next(line)) {
    if (line.empty()) {
      if (!next(line) || line != kSummaryHeader)
        throw ParseError("missing summary header after blank line", lineno);
      in_summary = true;
      continue;
    }
    const std::vector<std::string> f = split_csv(line);
    if (in_summary) {
      if (f.size() != 2) throw ParseError("summary rows need metric,value", lineno);
      summary.emplace_back(f[0], parse_double(f[1], lineno));
    } else {
      if (f.size() != 9) throw ParseError("instance rows need 9 fields", lineno);
      ReportRow r;
      r.scene = static_cast<int>(parse_int(f[0], lineno));
      r.instance_id = static_cast<int>(parse_int(f[1], lineno));
      r.class_id = static_cast<int>(parse_int(f[2], lineno));
      r.object_id = f[3];
      r.symmetric = parse_int(f[4], lineno) != 0;
      r.add = parse_double(f[5], lineno);
      r.adds = parse_double(f[6], lineno);
      r.dispatch = parse_double(f[7], lineno);
      r.diameter = parse_double(f[8], lineno);
      rows.push_back(std::move(r));
    }
  }
}

std::string accuracy_curve_svg(const std::vector<double>& distances,
                               double max_threshold, const std::string& label) {
  if (!(max_threshold > 0.0))
    throw InvalidArgumentError("svg: max threshold must be positive");
  if (distances.empty()) throw InvalidArgumentError("svg: no distances to plot");

  constexpr int kW = 640, kH = 480, kMargin = 60;
  const double plot_w = kW - 2 * kMargin, plot_h = kH - 2 * kMargin;
  const double n = static_cast<double>(distances.size());

  std::vector<double> sorted = distances;
  std::sort(sorted.begin(), sorted.end());

  const auto px = [&](double t) { return kMargin + t / max_threshold * plot_w; };
  const auto py = [&](double acc) { return kMargin + (1.0 - acc) * plot_h; };

  // Staircase: accuracy jumps where distances fall at or below the threshold.
  std::ostringstream pts;
  double acc = 0;
  size_t i = 0;
  while (i < sorted.size() && sorted[i] <= 0.0) {
    acc += 1.0 / n;
    ++i;
  }
  pts << format9(px(0.0)) << ',' << format9(py(acc));
  while (i < sorted.size() && sorted[i] <= max_threshold) {
    const double t = sorted[i];
    double jump = 0;
    while (i < sorted.size() && sorted[i] == t) {
      jump += 1.0 / n;
      ++i;
    }
    pts << ' ' << format9(px(t)) << ',' << format9(py(acc));
    acc += jump;
    pts << ' ' << format9(px(t)) << ',' << format9(py(acc));
  }
  pts << ' ' << format9(px(max_threshold)) << ',' << format9(py(acc));

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\""
      << kH << "\" viewBox=\"0 0 " << kW << " " << kH << "\">\n";
  svg << "  <rect width=\"" << kW << "\" height=\"" << kH << "\" fill=\"white\"/>\n";
  svg << "  <line x1=\"" << kMargin << "\" y1=\"" << kH - kMargin << "\" x2=\""
      << kW - kMargin << "\" y2=\"" << kH - kMargin
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  svg << "  <line x1=\"" << kMargin << "\" y1=\"" << kMargin << "\" x2=\"" << kMargin
      << "\" y2=\"" << kH - kMargin << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  for (int tick = 0; tick <= 4; ++tick) {
    const double frac = tick / 4.0;
    svg << "  <text x=\"" << format9(px(frac * max_threshold)) << "\" y=\""
        << kH - kMargin + 20 << "\" font-size=\"12\" text-anchor=\"middle\">"
        << format9(frac * max_threshold) << "</text>\n";
    svg << "  <text x=\"" << kMargin - 10 << "\" y=\"" << format9(py(frac) + 4)
        << "\" font-size=\"12\" text-anchor=\"end\">" << format9(frac) << "</text>\n";
  }
  svg << "  <text x=\"" << kW / 2 << "\" y=\"" << kH - 15
      << "\" font-size=\"14\" text-anchor=\"middle\">threshold (m)</text>\n";
  svg << "  <text x=\"15\" y=\"" << kH / 2
      << "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 15 "
      << kH / 2 << ")\">accuracy</text>\n";
  svg << "  <text x=\"" << kW / 2 << "\" y=\"30\" font-size=\"16\" text-anchor=\"middle\">"
      << label << "</text>\n";
  svg << "  <polyline fill=\"none\" stroke=\"#1a6fb0\" stroke-width=\"2\" points=\""
      << pts.str() << "\"/>\n";
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace pose6d
