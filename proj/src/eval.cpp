#include "mining/eval.hpp"

#include <algorithm>
#include <numeric>

#include "mining/rng.hpp"

namespace mining {

double auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size()) throw DataError("auc: length mismatch");
  std::size_t n_pos = 0;
  for (int y : labels) {
    if (y != 0 && y != 1) throw DataError("auc: labels must be 0 or 1");
    n_pos += static_cast<std::size_t>(y);
  }
  std::size_t n_neg = labels.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) throw DataError("auc: undefined, both classes required");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  // Walk descending tie groups; every count stays integral so the result
  // matches pair counting exactly.
  unsigned long long concordant = 0, tied = 0, pos_above = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    unsigned long long p = 0, q = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      if (labels[order[j]] == 1) ++p;
      else ++q;
      ++j;
    }
    concordant += pos_above * q;
    tied += p * q;
    pos_above += p;
    i = j;
  }
  return static_cast<double>(2 * concordant + tied) /
         (2.0 * static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

F1Result f1_score(const std::vector<int>& predictions, const std::vector<int>& labels) {
  if (predictions.size() != labels.size()) throw DataError("f1: length mismatch");
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (predictions[i] == 1 && labels[i] == 1) ++tp;
    else if (predictions[i] == 1) ++fp;
    else if (labels[i] == 1) ++fn;
  }
  F1Result r;
  r.precision = (tp + fp) == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  r.recall = (tp + fn) == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
  r.f1 = (r.precision + r.recall) == 0.0
             ? 0.0
             : 2.0 * r.precision * r.recall / (r.precision + r.recall);
  return r;
}

std::vector<int> stratified_kfold(const std::vector<int>& labels, int k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("stratified_kfold: k must be >= 2");
  std::vector<int> folds(labels.size(), -1);
  Rng rng(seed);
  for (int cls = 0; cls < 2; ++cls) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == cls) rows.push_back(i);
    if (rows.size() < static_cast<std::size_t>(k))
      throw DataError("stratified_kfold: class " + std::to_string(cls) + " has fewer than k rows");
    Rng class_rng = rng.fork(static_cast<std::uint64_t>(cls));
    class_rng.shuffle(rows);
    for (std::size_t i = 0; i < rows.size(); ++i)
      folds[rows[i]] = static_cast<int>(i % static_cast<std::size_t>(k));
  }
  return folds;
}

Learner make_gbdt_learner(GBDTParams params) {
  return [params](const DesignMatrix& train, const std::vector<int>& train_labels,
                  std::uint64_t seed, const DesignMatrix& valid) {
    GBDTParams p = params;
    p.seed = seed;
    GBDTModel model = gbdt_train(p, train, train_labels);
    return std::make_pair(gbdt_predict(model, train), gbdt_predict(model, valid));
  };
}

CvResult cross_validate(const Learner& learner, const DesignMatrix& matrix,
                        const std::vector<int>& labels, int k, std::uint64_t seed) {
  std::vector<int> folds = stratified_kfold(labels, k, seed);
  Rng rng(seed);
  CvResult result;
  for (int fold = 0; fold < k; ++fold) {
    std::vector<std::size_t> train_rows, valid_rows;
    std::vector<int> train_labels, valid_labels;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (folds[i] == fold) {
        valid_rows.push_back(i);
        valid_labels.push_back(labels[i]);
      } else {
        train_rows.push_back(i);
        train_labels.push_back(labels[i]);
      }
    }
    DesignMatrix train = matrix.select_rows(train_rows);
    DesignMatrix valid = matrix.select_rows(valid_rows);
    std::uint64_t fold_seed = rng.fork(static_cast<std::uint64_t>(fold) + 1).next_u64();
    auto [train_scores, valid_scores] = learner(train, train_labels, fold_seed, valid);

    FoldMetrics m;
    m.train_auc = auc(train_scores, train_labels);
    m.valid_auc = auc(valid_scores, valid_labels);
    std::vector<int> predictions(valid_scores.size());
    for (std::size_t i = 0; i < valid_scores.size(); ++i)
      predictions[i] = valid_scores[i] >= 0.5 ? 1 : 0;
    m.valid_f1 = f1_score(predictions, valid_labels).f1;
    result.folds.push_back(m);
    result.mean_train_auc += m.train_auc;
    result.mean_valid_auc += m.valid_auc;
    result.mean_valid_f1 += m.valid_f1;
  }
  result.mean_train_auc /= k;
  result.mean_valid_auc /= k;
  result.mean_valid_f1 /= k;
  return result;
}

AdversarialReport adversarial_validation(const DesignMatrix& train, const DesignMatrix& test,
                                         const GBDTParams& params, int k, std::uint64_t seed) {
  if (train.n_cols != test.n_cols)
    throw DataError("adversarial_validation: feature width mismatch");
  DesignMatrix combined = DesignMatrix::vstack(train, test);
  std::vector<int> labels(combined.n_rows, 0);
  for (std::size_t i = 0; i < train.n_rows; ++i) labels[i] = 1;

  std::vector<int> folds = stratified_kfold(labels, k, seed);
  Rng rng(seed);
  AdversarialReport report;
  std::vector<double> importance(combined.n_cols, 0.0);
  for (int fold = 0; fold < k; ++fold) {
    std::vector<std::size_t> train_rows, valid_rows;
    std::vector<int> fold_train_labels, fold_valid_labels;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (folds[i] == fold) {
        valid_rows.push_back(i);
        fold_valid_labels.push_back(labels[i]);
      } else {
        train_rows.push_back(i);
        fold_train_labels.push_back(labels[i]);
      }
    }
    GBDTParams p = params;
    p.seed = rng.fork(static_cast<std::uint64_t>(fold) + 1).next_u64();
    GBDTModel model = gbdt_train(p, combined.select_rows(train_rows), fold_train_labels);
    std::vector<double> scores = gbdt_predict(model, combined.select_rows(valid_rows));
    double fold_auc = auc(scores, fold_valid_labels);
    report.fold_aucs.push_back(fold_auc);
    report.mean_auc += fold_auc;
    std::vector<double> gain = feature_importance(model, ImportanceKind::Gain);
    for (std::size_t f = 0; f < gain.size(); ++f) importance[f] += gain[f];
  }
  report.mean_auc /= k;

  std::vector<std::size_t> order(combined.n_cols);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return importance[a] > importance[b]; });
  for (std::size_t f : order) report.ranking.emplace_back(combined.names[f], importance[f]);
  return report;
}

AdversarialReport adversarial_drop(const DesignMatrix& train, const DesignMatrix& test,
                                   const GBDTParams& params, double auc_target, int max_drops,
                                   int k, std::uint64_t seed) {
  DesignMatrix current_train = train;
  DesignMatrix current_test = test;
  AdversarialReport report = adversarial_validation(current_train, current_test, params, k, seed);
  std::vector<std::pair<std::string, double>> trace;
  int drops = 0;
  while (report.mean_auc > auc_target && drops < max_drops && current_train.n_cols > 1) {
    // Copy: the reassignment of `report` below destroys the old ranking.
    std::string victim = report.ranking.front().first;
    int col = current_train.column_index(victim);
    if (col < 0) break;
    current_train = current_train.drop_column(static_cast<std::size_t>(col));
    current_test = current_test.drop_column(static_cast<std::size_t>(col));
    report = adversarial_validation(current_train, current_test, params, k, seed);
    trace.emplace_back(victim, report.mean_auc);
    ++drops;
  }
  report.drop_trace = std::move(trace);
  return report;
}

FeatureCvReport single_feature_cv(const DesignMatrix& matrix, const std::vector<int>& labels,
                                  int k, double threshold, std::uint64_t seed,
                                  GBDTParams base_params) {
  GBDTParams params = base_params;
  params.max_leaves = 4;
  params.num_trees = 20;
  FeatureCvReport report;
  report.threshold = threshold;
  Learner learner = make_gbdt_learner(params);
  for (std::size_t f = 0; f < matrix.n_cols; ++f) {
    DesignMatrix single = matrix.select_columns({f});
    CvResult cv = cross_validate(learner, single, labels, k, seed);
    FeatureCvEntry entry;
    entry.name = matrix.names[f];
    entry.mean_train_auc = cv.mean_train_auc;
    entry.mean_valid_auc = cv.mean_valid_auc;
    // Only the validation clause is the hard rule; <= drops the exact-tie
    // constant-feature case deterministically.
    entry.kept = cv.mean_valid_auc > threshold;
    report.features.push_back(std::move(entry));
  }
  return report;
}

}  // namespace mining
