#include "aomd/metrics.hpp"

#include <algorithm>
#include <limits>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "aomd/error.hpp"
#include "aomd/format.hpp"

namespace aomd {

namespace {

void check_inputs(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size()) {
    throw MetricError("metrics: " + std::to_string(scores.size()) + " scores but " +
                      std::to_string(labels.size()) + " labels");
  }
  if (scores.empty()) throw MetricError("metrics: no predictions");
  for (int y : labels) {
    if (y != 0 && y != 1) throw MetricError("metrics: label " + std::to_string(y) + " is not 0 or 1");
  }
}

double ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

}  // namespace

Confusion confusion_matrix(const std::vector<double>& scores, const std::vector<int>& labels,
                           double threshold) {
  check_inputs(scores, labels);
  Confusion c;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted = scores[i] >= threshold;
    if (labels[i] == 1) {
      ++(predicted ? c.tp : c.fn);
    } else {
      ++(predicted ? c.fp : c.tn);
    }
  }
  return c;
}

double accuracy(const Confusion& c) {
  return ratio(static_cast<double>(c.tp + c.tn), static_cast<double>(c.total()));
}

double precision(const Confusion& c) {
  return ratio(static_cast<double>(c.tp), static_cast<double>(c.tp + c.fp));
}

double recall(const Confusion& c) {
  return ratio(static_cast<double>(c.tp), static_cast<double>(c.tp + c.fn));
}

double f1_score(const Confusion& c) {
  const std::size_t den = 2 * c.tp + c.fp + c.fn;
  if (den == 0) return 1.0;
  return 2.0 * static_cast<double>(c.tp) / static_cast<double>(den);
}

double cohen_kappa(const Confusion& c) {
  const double n = static_cast<double>(c.total());
  if (n == 0.0) throw MetricError("cohen_kappa: empty confusion table");
  const double p_o = static_cast<double>(c.tp + c.tn) / n;
  const double pred_pos = static_cast<double>(c.tp + c.fp) / n;
  const double true_pos = static_cast<double>(c.tp + c.fn) / n;
  const double p_e = pred_pos * true_pos + (1.0 - pred_pos) * (1.0 - true_pos);
  if (p_e == 1.0) return p_o == 1.0 ? 1.0 : 0.0;
  return (p_o - p_e) / (1.0 - p_e);
}

std::vector<RocPoint> roc_curve(const std::vector<double>& scores, const std::vector<int>& labels) {
  check_inputs(scores, labels);
  const std::size_t positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  const std::size_t negatives = labels.size() - positives;
  if (positives == 0 || negatives == 0) {
    throw MetricError("roc: labels contain a single class, AUC is undefined");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  std::vector<RocPoint> roc;
  roc.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double threshold = scores[order[i]];
    for (; i < order.size() && scores[order[i]] == threshold; ++i) {
      ++(labels[order[i]] == 1 ? tp : fp);
    }
    roc.push_back({static_cast<double>(fp) / static_cast<double>(negatives),
                   static_cast<double>(tp) / static_cast<double>(positives), threshold});
  }
  return roc;
}

double trapezoid_auc(const std::vector<RocPoint>& roc) {
  double area = 0.0;
  for (std::size_t i = 1; i < roc.size(); ++i) {
    area += (roc[i].fpr - roc[i - 1].fpr) * (roc[i].tpr + roc[i - 1].tpr) * 0.5;
  }
  return area;
}

double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  return trapezoid_auc(roc_curve(scores, labels));
}

EvalReport evaluate(const std::vector<double>& scores, const std::vector<int>& labels,
                    double threshold) {
  EvalReport r;
  r.count = scores.size();
  r.threshold = threshold;
  r.confusion = confusion_matrix(scores, labels, threshold);
  r.accuracy = accuracy(r.confusion);
  r.precision = precision(r.confusion);
  r.recall = recall(r.confusion);
  r.f1 = f1_score(r.confusion);
  r.cohen_kappa = cohen_kappa(r.confusion);
  const bool both = r.confusion.tp + r.confusion.fn > 0 && r.confusion.fp + r.confusion.tn > 0;
  if (both) {
    r.roc = roc_curve(scores, labels);
    r.auc = trapezoid_auc(r.roc);
  }
  return r;
}

double fleiss_kappa(const std::vector<AnnotationRecord>& records) {
  if (records.size() < 2) {
    throw MetricError("fleiss_kappa: need at least 2 records, got " + std::to_string(records.size()));
  }
  const std::size_t n = records.front().ratings.size();
  if (n < 2) throw MetricError("fleiss_kappa: need at least 2 ratings per record");
  const double raters = static_cast<double>(n);
  double agreement = 0.0;
  double positive = 0.0;
  for (const AnnotationRecord& r : records) {
    if (r.ratings.size() != n) {
      throw MetricError("fleiss_kappa: record '" + r.post_id + "' has " +
                        std::to_string(r.ratings.size()) + " ratings, expected " + std::to_string(n));
    }
    double ones = 0.0;
    for (int v : r.ratings) {
      if (v != 0 && v != 1) {
        throw MetricError("fleiss_kappa: record '" + r.post_id + "' has rating " +
                          std::to_string(v));
      }
      ones += v;
    }
    const double zeros = raters - ones;
    agreement += (ones * ones + zeros * zeros - raters) / (raters * (raters - 1.0));
    positive += ones;
  }
  const double count = static_cast<double>(records.size());
  const double p_bar = agreement / count;
  const double p1 = positive / (count * raters);
  const double p_e = p1 * p1 + (1.0 - p1) * (1.0 - p1);
  if (p_e == 1.0) return 1.0;
  return (p_bar - p_e) / (1.0 - p_e);
}

std::string report_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["count"] = r.count;
  j["threshold"] = r.threshold;
  j["accuracy"] = r.accuracy;
  j["precision"] = r.precision;
  j["recall"] = r.recall;
  j["f1"] = r.f1;
  j["cohen_kappa"] = r.cohen_kappa;
  j["auc"] = r.auc ? nlohmann::ordered_json(*r.auc) : nlohmann::ordered_json(nullptr);
  j["confusion"] = {{"tp", r.confusion.tp}, {"fp", r.confusion.fp}, {"tn", r.confusion.tn},
                    {"fn", r.confusion.fn}};
  auto roc = nlohmann::ordered_json::array();
  for (const RocPoint& p : r.roc) roc.push_back({p.fpr, p.tpr});
  j["roc"] = std::move(roc);
  return j.dump(2) + "\n";
}

void write_report(const EvalReport& report, const std::filesystem::path& path) {
  write_text_file(path, report_json(report));
}

void write_roc_csv(const std::vector<RocPoint>& roc, const std::filesystem::path& path) {
  std::string out = "fpr,tpr,threshold\n";
  for (const RocPoint& p : roc) {
    out += format_double(p.fpr) + "," + format_double(p.tpr) + "," + format_double(p.threshold) + "\n";
  }
  write_text_file(path, out);
}

}  // namespace aomd
