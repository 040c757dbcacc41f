#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "aomd/types.hpp"

namespace aomd {

// Label 1 (offensive) is the positive class throughout.
struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
  bool operator==(const Confusion&) const = default;
};

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;  // scores >= threshold count as positive
  bool operator==(const RocPoint&) const = default;
};

struct EvalReport {
  std::size_t count = 0;
  double threshold = 0.5;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double cohen_kappa = 0.0;
  // Absent when the labels hold a single class.
  std::optional<double> auc;
  std::vector<RocPoint> roc;
  Confusion confusion;
};

// Throws MetricError on length mismatch, empty input or labels outside {0,1}.
Confusion confusion_matrix(const std::vector<double>& scores, const std::vector<int>& labels,
                           double threshold = 0.5);

double accuracy(const Confusion& c);
// 0 when nothing is predicted positive.
double precision(const Confusion& c);
// 0 when there are no positives.
double recall(const Confusion& c);
// 2tp / (2tp + fp + fn); 1 when there are neither positives nor positive
// predictions.
double f1_score(const Confusion& c);
// (p_o - p_e) / (1 - p_e) from the 2x2 table; when p_e = 1 the result is 1 if
// the raters agree everywhere and 0 otherwise.
double cohen_kappa(const Confusion& c);

// Threshold sweep over the distinct scores in descending order, anchored at
// (0,0) and ending at (1,1). Throws MetricError unless both classes occur.
std::vector<RocPoint> roc_curve(const std::vector<double>& scores, const std::vector<int>& labels);
// Trapezoid area under a ROC polyline.
double trapezoid_auc(const std::vector<RocPoint>& roc);
double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels);

EvalReport evaluate(const std::vector<double>& scores, const std::vector<int>& labels,
                    double threshold = 0.5);

// Fleiss' kappa for binary ratings. Throws MetricError with fewer than two
// records, fewer than two ratings per record, unequal rating counts or a
// rating outside {0,1}. When every rating falls in one category the
// expected agreement is 1 and the result is defined as 1.
double fleiss_kappa(const std::vector<AnnotationRecord>& records);

std::string report_json(const EvalReport& report);
void write_report(const EvalReport& report, const std::filesystem::path& path);
// "fpr,tpr,threshold" header plus one line per point.
void write_roc_csv(const std::vector<RocPoint>& roc, const std::filesystem::path& path);

}  // namespace aomd
