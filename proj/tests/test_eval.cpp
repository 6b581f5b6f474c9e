#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "mining/eval.hpp"
#include "mining/rng.hpp"

using namespace mining;

namespace {

double brute_auc(const std::vector<double>& s, const std::vector<int>& y) {
  double num = 0;
  std::size_t pos = 0, neg = 0;
  for (std::size_t i = 0; i < s.size(); ++i) (y[i] ? pos : neg) += 1;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (!(y[i] == 1 && y[j] == 0)) continue;
      num += s[i] > s[j] ? 1.0 : s[i] == s[j] ? 0.5 : 0.0;
    }
  return num / (static_cast<double>(pos) * static_cast<double>(neg));
}

std::pair<DesignMatrix, std::vector<int>> clusters(std::size_t n, double sep, std::uint64_t seed,
                                                   std::size_t n_features = 3) {
  Rng rng(seed);
  DesignMatrix m = DesignMatrix::zeros(n, n_features);
  for (std::size_t j = 0; j < n_features; ++j) m.names[j] = "f" + std::to_string(j);
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = rng.bernoulli(0.5) ? 1 : 0;
    for (std::size_t j = 0; j < n_features; ++j)
      m.at(i, j) = rng.normal() + (labels[i] ? sep : 0.0);
  }
  return {std::move(m), std::move(labels)};
}

GBDTParams small_gbdt() {
  GBDTParams p;
  p.num_trees = 20;
  p.max_leaves = 8;
  p.min_data_in_leaf = 5;
  return p;
}

}  // namespace

TEST_CASE("auc on hand cases") {
  CHECK(auc({0.9, 0.8, 0.3, 0.2}, {1, 1, 0, 0}) == 1.0);
  CHECK(auc({0.2, 0.3, 0.8, 0.9}, {1, 1, 0, 0}) == 0.0);
  CHECK(auc({0.5, 0.5, 0.5, 0.5}, {1, 1, 0, 0}) == 0.5);
  CHECK_THROWS_AS(auc({0.1, 0.2}, {1, 1}), DataError);
}

TEST_CASE("auc equals exhaustive pair counting, ties included") {
  Rng rng(55);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = 2 + rng.below(199);
    std::vector<double> scores(n);
    std::vector<int> labels(n);
    bool has_pos = false, has_neg = false;
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = static_cast<double>(rng.below(10)) / 10.0;  // force plenty of ties
      labels[i] = rng.bernoulli(0.4) ? 1 : 0;
      (labels[i] ? has_pos : has_neg) = true;
    }
    if (!has_pos || !has_neg) {
      labels[0] = 1;
      labels[n - 1] = 0;
    }
    CHECK(auc(scores, labels) == brute_auc(scores, labels));
  }
}

TEST_CASE("auc flips under label complement and survives monotone transforms") {
  Rng rng(56);
  std::vector<double> scores(80);
  std::vector<int> labels(80), flipped(80);
  std::set<double> seen;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    do {
      scores[i] = rng.uniform();
    } while (!seen.insert(scores[i]).second);  // tie-free
    labels[i] = rng.bernoulli(0.5) ? 1 : 0;
    flipped[i] = 1 - labels[i];
  }
  labels[0] = 1;
  labels[1] = 0;
  flipped[0] = 0;
  flipped[1] = 1;
  CHECK(auc(scores, labels) == doctest::Approx(1.0 - auc(scores, flipped)).epsilon(1e-12));
  std::vector<double> warped(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) warped[i] = std::exp(3 * scores[i]) + 7;
  CHECK(auc(scores, labels) == auc(warped, labels));
}

TEST_CASE("f1 from hand-built confusion matrices") {
  F1Result perfect = f1_score({1, 1, 0}, {1, 1, 0});
  CHECK(perfect.precision == 1.0);
  CHECK(perfect.recall == 1.0);
  CHECK(perfect.f1 == 1.0);
  // TP=1, FP=1, FN=1.
  F1Result half = f1_score({1, 1, 0}, {1, 0, 1});
  CHECK(half.precision == 0.5);
  CHECK(half.recall == 0.5);
  CHECK(half.f1 == 0.5);
  F1Result none = f1_score({0, 0, 0}, {1, 1, 0});
  CHECK(none.precision == 0.0);
  CHECK(none.f1 == 0.0);
}

TEST_CASE("stratified folds balance both classes") {
  std::vector<int> labels(20);
  for (int i = 0; i < 10; ++i) labels[i] = 1;
  std::vector<int> folds = stratified_kfold(labels, 5, 1);
  for (int k = 0; k < 5; ++k) {
    int pos = 0, neg = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (folds[i] != k) continue;
      (labels[i] ? pos : neg) += 1;
    }
    CHECK(pos == 2);
    CHECK(neg == 2);
  }
  CHECK(folds == stratified_kfold(labels, 5, 1));               // same seed, same folds
  CHECK(folds != stratified_kfold(labels, 5, 2));               // different seed reshuffles
  CHECK_THROWS_AS(stratified_kfold({1, 0, 0, 0}, 2, 1), DataError);  // class smaller than k
}

TEST_CASE("folds partition the rows") {
  Rng rng(57);
  std::vector<int> labels(47);
  for (auto& y : labels) y = rng.bernoulli(0.3) ? 1 : 0;
  labels[0] = 1;
  labels[1] = 1;
  labels[2] = 1;
  std::vector<int> folds = stratified_kfold(labels, 3, 9);
  REQUIRE(folds.size() == labels.size());
  for (int f : folds) {
    CHECK(f >= 0);
    CHECK(f < 3);
  }
}

TEST_CASE("cross validation learns separable data") {
  auto [m, labels] = clusters(600, 3.0, 21);
  CvResult cv = cross_validate(make_gbdt_learner(small_gbdt()), m, labels, 5, 1);
  CHECK(cv.mean_valid_auc >= 0.95);
  CHECK(cv.folds.size() == 5);
}

TEST_CASE("cross validation on shuffled labels hovers at chance") {
  auto [m, labels] = clusters(600, 3.0, 22);
  Rng rng(23);
  rng.shuffle(labels);
  CvResult cv = cross_validate(make_gbdt_learner(small_gbdt()), m, labels, 5, 1);
  CHECK(cv.mean_valid_auc >= 0.4);
  CHECK(cv.mean_valid_auc <= 0.6);
}

TEST_CASE("a constant learner scores exactly one half in every fold") {
  auto [m, labels] = clusters(100, 1.0, 24);
  Learner constant = [](const DesignMatrix& train, const std::vector<int>&, std::uint64_t,
                        const DesignMatrix& valid) {
    return std::make_pair(std::vector<double>(train.n_rows, 0.5),
                          std::vector<double>(valid.n_rows, 0.5));
  };
  CvResult cv = cross_validate(constant, m, labels, 4, 1);
  for (const FoldMetrics& fold : cv.folds) CHECK(fold.valid_auc == 0.5);
}

TEST_CASE("adversarial validation is calm when train and test match") {
  auto [train, tl] = clusters(800, 0.0, 31);
  auto [test, sl] = clusters(800, 0.0, 32);
  AdversarialReport report = adversarial_validation(train, test, small_gbdt(), 5, 1);
  CHECK(report.mean_auc >= 0.45);
  CHECK(report.mean_auc <= 0.58);
  CHECK(report.ranking.size() == train.n_cols);
}

TEST_CASE("adversarial validation flags an injected shift") {
  auto [train, tl] = clusters(800, 0.0, 33);
  auto [test, sl] = clusters(800, 0.0, 34);
  for (std::size_t i = 0; i < train.n_rows; ++i) train.at(i, 1) += 5.0;
  AdversarialReport report = adversarial_validation(train, test, small_gbdt(), 5, 1);
  CHECK(report.mean_auc > 0.9);
  REQUIRE(!report.ranking.empty());
  CHECK(report.ranking[0].first == "f1");
}

TEST_CASE("adversarial drop removes the shifted feature and settles down") {
  auto [train, tl] = clusters(800, 0.0, 35);
  auto [test, sl] = clusters(800, 0.0, 36);
  for (std::size_t i = 0; i < train.n_rows; ++i) train.at(i, 0) += 5.0;
  AdversarialReport report = adversarial_drop(train, test, small_gbdt(), 0.6, 5, 5, 1);
  REQUIRE(report.drop_trace.size() == 1);
  CHECK(report.drop_trace[0].first == "f0");
  CHECK(report.drop_trace[0].second < 0.6);
}

TEST_CASE("adversarial drop does nothing without drift or budget") {
  auto [train, tl] = clusters(600, 0.0, 37);
  auto [test, sl] = clusters(600, 0.0, 38);
  CHECK(adversarial_drop(train, test, small_gbdt(), 0.6, 5, 5, 1).drop_trace.empty());

  for (std::size_t i = 0; i < train.n_rows; ++i) train.at(i, 0) += 5.0;
  CHECK(adversarial_drop(train, test, small_gbdt(), 0.6, 0, 5, 1).drop_trace.empty());
}

TEST_CASE("single-feature CV keeps the signal and drops the noise") {
  Rng rng(41);
  DesignMatrix m = DesignMatrix::zeros(200, 3);
  m.names = {"copy", "flat", "noise"};
  std::vector<int> labels(200);
  for (std::size_t i = 0; i < 200; ++i) {
    labels[i] = rng.bernoulli(0.5) ? 1 : 0;
    m.at(i, 0) = labels[i];
    m.at(i, 1) = 2.0;  // constant: unsplittable, AUC exactly 0.5
    m.at(i, 2) = rng.normal();
  }
  FeatureCvReport report = single_feature_cv(m, labels, 4, 0.5, 1);
  REQUIRE(report.features.size() == 3);
  CHECK(report.features[0].kept);
  CHECK(report.features[0].mean_valid_auc > 0.99);
  CHECK(!report.features[1].kept);
  CHECK(report.features[1].mean_valid_auc == 0.5);
  CHECK(report.features[2].mean_valid_auc > 0.35);
  CHECK(report.features[2].mean_valid_auc < 0.65);
  CHECK(report.features[2].kept == (report.features[2].mean_valid_auc > 0.5));
}
