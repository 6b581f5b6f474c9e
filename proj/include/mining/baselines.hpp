#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mining/gbdt.hpp"
#include "mining/matrix.hpp"

namespace mining {

// ---- Gaussian naive Bayes ------------------------------------------------

struct NaiveBayesModel {
  std::vector<std::string> feature_names;
  double prior_pos = 0.5;  // class frequency
  // Per feature, per class {0,1}: mean and variance (floored).
  std::vector<double> mean0, mean1, var0, var1;
  std::vector<bool> usable;  // false when a class saw no values for the feature
};

NaiveBayesModel nb_train(const DesignMatrix& matrix, const std::vector<int>& labels);
std::vector<double> nb_predict(const NaiveBayesModel& model, const DesignMatrix& matrix);

// ---- Gini decision tree / random forest ----------------------------------

struct TreeParams {
  int max_depth = 8;
  int min_leaf = 20;
  int max_bins = 255;
};

struct DecisionTreeModel {
  TreeParams params;
  BinMapper mapper;
  Tree tree;  // leaf_value = positive fraction
  std::vector<std::string> feature_names;
};

DecisionTreeModel tree_train(const DesignMatrix& matrix, const std::vector<int>& labels,
                             const TreeParams& params = {});
std::vector<double> tree_predict(const DecisionTreeModel& model, const DesignMatrix& matrix);

struct ForestParams {
  int num_trees = 200;
  int max_depth = 8;
  int min_leaf = 20;
  int max_bins = 255;
  // 0 means the sqrt rule: ceil(sqrt(n_features)) features per split.
  double feature_fraction = 0.0;
  bool bootstrap = true;
  std::uint64_t seed = 0;
};

struct RandomForestModel {
  ForestParams params;
  BinMapper mapper;
  std::vector<Tree> trees;
  std::vector<std::uint64_t> tree_seeds;
  std::vector<std::string> feature_names;
};

RandomForestModel forest_train(const DesignMatrix& matrix, const std::vector<int>& labels,
                               const ForestParams& params = {});
std::vector<double> forest_predict(const RandomForestModel& model, const DesignMatrix& matrix);

// ---- L2 logistic regression ----------------------------------------------

struct LogisticParams {
  double l2 = 1e-4;
  double learning_rate = 0.1;
  int iterations = 500;
};

struct LogisticModel {
  LogisticParams params;
  std::vector<std::string> feature_names;
  std::vector<double> weights;
  double bias = 0.0;
  std::vector<double> feature_mean, feature_std;  // z-scoring stats
};

LogisticModel lr_train(const DesignMatrix& matrix, const std::vector<int>& labels,
                       const LogisticParams& params = {});
std::vector<double> lr_predict(const LogisticModel& model, const DesignMatrix& matrix);

// Gradient of the regularized mean logistic loss at (weights, bias), on the
// standardized matrix. Exposed so it can be checked against finite
// differences.
std::pair<std::vector<double>, double> lr_gradient(const std::vector<double>& weights, double bias,
                                                   const DesignMatrix& standardized,
                                                   const std::vector<int>& labels, double l2);
double lr_loss(const std::vector<double>& weights, double bias, const DesignMatrix& standardized,
               const std::vector<int>& labels, double l2);
DesignMatrix lr_standardize(const LogisticModel& model, const DesignMatrix& matrix);

}  // namespace mining
