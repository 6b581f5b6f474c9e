#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mining/matrix.hpp"

namespace mining {

struct GBDTParams {
  int num_trees = 100;
  double learning_rate = 0.1;
  int max_leaves = 31;
  int min_data_in_leaf = 20;
  double min_child_hessian = 1e-3;
  double lambda_l2 = 1.0;   // leaf L2
  double gamma = 0.0;       // per-split penalty
  int max_bins = 255;
  double feature_fraction = 1.0;
  double bagging_fraction = 1.0;
  std::uint64_t seed = 0;
  int num_threads = 1;

  void validate() const;
};

// Per-feature quantile bin edges. Bin 0 is reserved for missing; finite
// values map to bins [1, n_bins(feature)].
struct BinMapper {
  std::vector<std::vector<double>> edges;  // ascending upper bounds per feature

  int bin_of(std::size_t feature, double value) const;
  int n_bins(std::size_t feature) const { return static_cast<int>(edges[feature].size()); }
  std::size_t n_features() const { return edges.size(); }
};

// Row-major uint16 bin codes, same shape as the source matrix.
struct BinnedMatrix {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<std::uint16_t> bins;
  std::uint16_t at(std::size_t row, std::size_t col) const { return bins[row * n_cols + col]; }
};

std::pair<BinMapper, BinnedMatrix> bin_features(const DesignMatrix& matrix, int max_bins,
                                                std::uint64_t seed);
BinnedMatrix apply_bins(const BinMapper& mapper, const DesignMatrix& matrix);

// Second-order logistic loss: p = sigmoid(score), g = p - y, h = p(1-p)
// floored at 1e-16.
std::pair<double, double> logloss_grad_hess(double score, int label);

double sigmoid(double x);

struct HistogramBin {
  double g = 0.0;
  double h = 0.0;
  std::uint32_t count = 0;
};

using FeatureHistogram = std::vector<HistogramBin>;  // index 0 = missing bin

struct SplitCandidate {
  int feature = -1;       // global feature index
  int threshold_bin = 0;  // go left when bin <= threshold (non-missing)
  bool missing_left = true;
  double gain = 0.0;
};

struct SplitTotals {
  double g = 0.0;
  double h = 0.0;
  std::uint32_t count = 0;
};

// Best positive-gain split over the given feature histograms, or nullopt.
// Ties break to lower feature index, lower threshold, missing-left.
std::optional<SplitCandidate> best_split(const std::vector<FeatureHistogram>& histograms,
                                         const std::vector<int>& features,
                                         const SplitTotals& totals, const GBDTParams& params);

struct TreeNode {
  int feature = -1;  // -1 for leaf
  int threshold_bin = 0;
  bool missing_left = true;
  int left = -1;
  int right = -1;
  double leaf_value = 0.0;
  double gain = 0.0;
};

struct Tree {
  std::vector<TreeNode> nodes;  // root at 0
  int leaf_for_row(const BinnedMatrix& binned, std::size_t row) const;
};

struct GBDTModel {
  GBDTParams params;
  BinMapper mapper;
  double base_score = 0.0;  // initial log-odds
  std::vector<Tree> trees;
  std::vector<std::string> feature_names;
};

GBDTModel gbdt_train(const GBDTParams& params, const DesignMatrix& matrix,
                     const std::vector<int>& labels);

std::vector<double> gbdt_predict(const GBDTModel& model, const DesignMatrix& matrix,
                                 bool raw_score = false);
std::vector<double> gbdt_predict_binned(const GBDTModel& model, const BinnedMatrix& binned,
                                        bool raw_score = false);

enum class ImportanceKind { Gain, SplitCount };
std::vector<double> feature_importance(const GBDTModel& model, ImportanceKind kind);

// Mean logistic loss of the model's staged predictions after each tree.
std::vector<double> staged_training_loss(const GBDTModel& model, const DesignMatrix& matrix,
                                         const std::vector<int>& labels);

}  // namespace mining
