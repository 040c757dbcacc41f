#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "aomd/error.hpp"
#include "aomd/metrics.hpp"
#include "oracles.hpp"
#include "support.hpp"

namespace aomd {
namespace {

AnnotationRecord record(std::vector<int> ratings) { return {"r", std::move(ratings)}; }

TEST(Metrics, HandWorkedConfusion) {
  const Confusion c{3, 1, 4, 2};
  EXPECT_DOUBLE_EQ(precision(c), 0.75);
  EXPECT_DOUBLE_EQ(recall(c), 0.6);
  EXPECT_NEAR(f1_score(c), 0.666667, 1e-6);
  EXPECT_DOUBLE_EQ(accuracy(c), 0.7);
  EXPECT_NEAR(cohen_kappa(c), 0.4, 1e-12);
}

TEST(Metrics, ConfusionCountsAtThreshold) {
  const std::vector<double> s{0.9, 0.5, 0.49, 0.1, 0.7};
  const std::vector<int> y{1, 0, 1, 0, 0};
  EXPECT_EQ(confusion_matrix(s, y), (Confusion{1, 2, 1, 1}));
  EXPECT_EQ(confusion_matrix(s, y, 0.8), (Confusion{1, 0, 3, 1}));
}

TEST(Metrics, DegenerateConventions) {
  EXPECT_EQ(f1_score(Confusion{0, 0, 5, 0}), 1.0);
  EXPECT_EQ(precision(Confusion{0, 0, 5, 1}), 0.0);
  EXPECT_EQ(recall(Confusion{0, 2, 5, 0}), 0.0);
  EXPECT_EQ(cohen_kappa(Confusion{0, 0, 5, 0}), 1.0);  // p_e = 1, full agreement
  EXPECT_EQ(cohen_kappa(Confusion{4, 0, 0, 0}), 1.0);
}

TEST(Metrics, InputErrors) {
  EXPECT_THROW(confusion_matrix({}, {}), MetricError);
  EXPECT_THROW(confusion_matrix({0.1}, {1, 0}), MetricError);
  EXPECT_THROW(confusion_matrix({0.1}, {2}), MetricError);
  EXPECT_THROW(roc_auc({0.1, 0.2}, {1, 1}), MetricError);
}

TEST(Roc, TiesGiveTheDiagonal) {
  const std::vector<int> y{1, 0, 1, 0};
  EXPECT_DOUBLE_EQ(roc_auc({0.3, 0.3, 0.3, 0.3}, y), 0.5);
  const auto roc = roc_curve({0.3, 0.3, 0.3, 0.3}, y);
  ASSERT_EQ(roc.size(), 2u);
  EXPECT_EQ(roc.front().fpr, 0.0);
  EXPECT_TRUE(std::isinf(roc.front().threshold));
  EXPECT_EQ(roc.back().fpr, 1.0);
  EXPECT_EQ(roc.back().tpr, 1.0);
}

TEST(Roc, PerfectAndInvertedRankings) {
  EXPECT_EQ(roc_auc({0.9, 0.8, 0.2, 0.1}, {1, 1, 0, 0}), 1.0);
  EXPECT_EQ(roc_auc({0.9, 0.8, 0.2, 0.1}, {0, 0, 1, 1}), 0.0);
  const auto roc = roc_curve({0.9, 0.8, 0.2}, {1, 0, 0});
  ASSERT_EQ(roc.size(), 4u);
  EXPECT_EQ(roc[1], (RocPoint{0.0, 1.0, 0.9}));
  EXPECT_EQ(roc[2], (RocPoint{0.5, 1.0, 0.8}));
}

TEST(MetricsProperty, MatchOracles) {
  Rng rng(50);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.below(60);
    std::vector<double> s(n);
    std::vector<int> y(n);
    // Coarse scores force ties.
    const double grid = rng.bernoulli(0.5) ? 10.0 : 1000.0;
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = std::floor(rng.uniform() * grid) / grid;
      y[i] = static_cast<int>(rng.below(2));
    }
    const double thr = rng.bernoulli(0.5) ? 0.5 : rng.uniform();
    const EvalReport r = evaluate(s, y, thr);
    const oracle::Metrics m = oracle::direct_metrics(s, y, thr);
    EXPECT_NEAR(r.accuracy, m.accuracy, 1e-9);
    EXPECT_NEAR(r.precision, m.precision, 1e-9);
    EXPECT_NEAR(r.recall, m.recall, 1e-9);
    EXPECT_NEAR(r.f1, m.f1, 1e-9);
    EXPECT_NEAR(r.cohen_kappa, m.kappa, 1e-9);
    const bool both = std::count(y.begin(), y.end(), 1) > 0 && std::count(y.begin(), y.end(), 0) > 0;
    ASSERT_EQ(r.auc.has_value(), both);
    if (both) {
      EXPECT_NEAR(*r.auc, oracle::pairwise_auc(s, y), 1e-9) << "trial " << trial;
    }
  }
}

TEST(RocProperty, MonotoneFromOriginToCorner) {
  Rng rng(51);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> s;
    std::vector<int> y{0, 1};
    s = {rng.uniform(), rng.uniform()};
    for (std::size_t i = rng.below(30); i > 0; --i) {
      s.push_back(std::round(rng.uniform() * 20) / 20);
      y.push_back(static_cast<int>(rng.below(2)));
    }
    const auto roc = roc_curve(s, y);
    EXPECT_EQ(roc.front().fpr, 0.0);
    EXPECT_EQ(roc.front().tpr, 0.0);
    EXPECT_EQ(roc.back().fpr, 1.0);
    EXPECT_EQ(roc.back().tpr, 1.0);
    for (std::size_t i = 1; i < roc.size(); ++i) {
      EXPECT_GE(roc[i].fpr, roc[i - 1].fpr);
      EXPECT_GE(roc[i].tpr, roc[i - 1].tpr);
      EXPECT_LT(roc[i].threshold, roc[i - 1].threshold);
    }
  }
}

TEST(Fleiss, HandComputedFixtures) {
  EXPECT_EQ(fleiss_kappa({record({1, 1, 1}), record({0, 0, 0})}), 1.0);
  EXPECT_NEAR(fleiss_kappa({record({1, 1, 0}), record({0, 0, 1})}), -1.0 / 3.0, 1e-12);
  EXPECT_EQ(fleiss_kappa({record({1, 1}), record({1, 1}), record({1, 1})}), 1.0);
  // Four records of three raters: P_i = 1, 1/3, 1/3, 1; P = 2/3;
  // p_1 = 9/12, P_e = 9/16 + 1/16; kappa = (2/3 - 5/8) / (3/8) = 1/9.
  const double pe = 10.0 / 16.0;
  EXPECT_NEAR(fleiss_kappa({record({1, 1, 1}), record({1, 1, 0}), record({0, 0, 1}),
                            record({1, 1, 1})}),
              (2.0 / 3.0 - pe) / (1.0 - pe), 1e-12);
}

TEST(Fleiss, InvalidInputs) {
  EXPECT_THROW(fleiss_kappa({record({1, 0})}), MetricError);
  EXPECT_THROW(fleiss_kappa({record({1}), record({0})}), MetricError);
  EXPECT_THROW(fleiss_kappa({record({1, 0}), record({0, 0, 1})}), MetricError);
  EXPECT_THROW(fleiss_kappa({record({1, 2}), record({0, 0})}), MetricError);
}

TEST(Reports, JsonAndCsv) {
  testing::TempDir dir("metrics");
  const EvalReport r = evaluate({0.9, 0.2, 0.6, 0.4}, {1, 0, 0, 1});
  const auto j = nlohmann::json::parse(report_json(r));
  EXPECT_EQ(j.at("count"), 4);
  EXPECT_DOUBLE_EQ(j.at("accuracy").get<double>(), 0.5);
  EXPECT_DOUBLE_EQ(j.at("auc").get<double>(), 0.75);
  write_report(r, dir / "r.json");
  EXPECT_EQ(nlohmann::json::parse(testing::file_bytes(dir / "r.json")), j);

  write_roc_csv(r.roc, dir / "roc.csv");
  std::ifstream in(dir / "roc.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "fpr,tpr,threshold");
  std::size_t lines = 0;
  for (std::string l; std::getline(in, l);) ++lines;
  EXPECT_EQ(lines, r.roc.size());

  const EvalReport one_class = evaluate({0.9, 0.2}, {1, 1});
  EXPECT_FALSE(one_class.auc.has_value());
  EXPECT_TRUE(nlohmann::json::parse(report_json(one_class)).at("auc").is_null());
}

}  // namespace
}  // namespace aomd
