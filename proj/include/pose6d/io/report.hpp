#pragma once

#include <string>
#include <utility>
#include <vector>

#include "pose6d/core/types.hpp"

namespace pose6d {

/// One evaluated instance. `dispatch` is ADD-S for symmetric classes and ADD
/// otherwise; plots and the diameter-relative metric read that column.
struct ReportRow {
  int scene = 0;
  int instance_id = 0;
  int class_id = 0;
  std::string object_id;
  bool symmetric = false;
  double add = 0;
  double adds = 0;
  double dispatch = 0;
  double diameter = 0;
};

/// Instance rows (9-significant-digit distances), a blank line, then
/// metric,value summary rows printed with 6 fixed decimals.
std::string write_report_csv(const std::vector<ReportRow>& rows,
                             const std::vector<std::pair<std::string, double>>& summary);

void read_report_csv(const std::string& text, std::vector<ReportRow>& rows,
                     std::vector<std::pair<std::string, double>>& summary);

/// Standalone SVG of accuracy (fraction of distances <= t) against the
/// threshold t over [0, max_threshold]. Pure text output, byte-deterministic.
std::string accuracy_curve_svg(const std::vector<double>& distances,
                               double max_threshold, const std::string& label);

}  // namespace pose6d
