#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mining/gbdt.hpp"
#include "mining/matrix.hpp"

namespace mining {

// Mann-Whitney AUC: (concordant + half the ties) / (n_pos * n_neg).
// Rank-based O(n log n); exactly equal to brute-force pair counting.
double auc(const std::vector<double>& scores, const std::vector<int>& labels);

struct F1Result {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

F1Result f1_score(const std::vector<int>& predictions, const std::vector<int>& labels);

// Fold index per row; per-class round-robin after a seeded shuffle.
std::vector<int> stratified_kfold(const std::vector<int>& labels, int k, std::uint64_t seed);

// Fits on the train split, returns (train scores, validation scores).
using Learner = std::function<std::pair<std::vector<double>, std::vector<double>>(
    const DesignMatrix& train, const std::vector<int>& train_labels, std::uint64_t seed,
    const DesignMatrix& valid)>;

Learner make_gbdt_learner(GBDTParams params);

struct FoldMetrics {
  double train_auc = 0.0;
  double valid_auc = 0.0;
  double valid_f1 = 0.0;
};

struct CvResult {
  std::vector<FoldMetrics> folds;
  double mean_train_auc = 0.0;
  double mean_valid_auc = 0.0;
  double mean_valid_f1 = 0.0;
};

CvResult cross_validate(const Learner& learner, const DesignMatrix& matrix,
                        const std::vector<int>& labels, int k, std::uint64_t seed);

struct AdversarialReport {
  double mean_auc = 0.0;
  std::vector<double> fold_aucs;
  // Gain importance summed over fold models, descending.
  std::vector<std::pair<std::string, double>> ranking;
  // Filled by adversarial_drop: (dropped feature, mean AUC after the drop).
  std::vector<std::pair<std::string, double>> drop_trace;
};

AdversarialReport adversarial_validation(const DesignMatrix& train, const DesignMatrix& test,
                                         const GBDTParams& params, int k, std::uint64_t seed);

AdversarialReport adversarial_drop(const DesignMatrix& train, const DesignMatrix& test,
                                   const GBDTParams& params, double auc_target, int max_drops,
                                   int k, std::uint64_t seed);

struct FeatureCvEntry {
  std::string name;
  double mean_train_auc = 0.0;
  double mean_valid_auc = 0.0;
  bool kept = true;
};

struct FeatureCvReport {
  std::vector<FeatureCvEntry> features;
  double threshold = 0.5;  // drop when mean validation AUC <= threshold
};

FeatureCvReport single_feature_cv(const DesignMatrix& matrix, const std::vector<int>& labels,
                                  int k, double threshold, std::uint64_t seed,
                                  GBDTParams base_params = {});

}  // namespace mining
