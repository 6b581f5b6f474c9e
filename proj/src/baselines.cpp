#include "mining/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>

#include "mining/rng.hpp"

namespace mining {

namespace {

void check_two_classes(const std::vector<int>& labels, std::size_t n_rows) {
  if (labels.size() != n_rows) throw DataError("row/label length mismatch");
  std::size_t pos = 0;
  for (int y : labels) {
    if (y != 0 && y != 1) throw DataError("labels must be 0 or 1");
    pos += static_cast<std::size_t>(y);
  }
  if (pos == 0 || pos == labels.size()) throw DataError("both classes must be present");
}

}  // namespace

// ---- naive Bayes ---------------------------------------------------------

NaiveBayesModel nb_train(const DesignMatrix& matrix, const std::vector<int>& labels) {
  check_two_classes(labels, matrix.n_rows);
  std::size_t f_count = matrix.n_cols;
  NaiveBayesModel model;
  model.feature_names = matrix.names;
  model.mean0.assign(f_count, 0.0);
  model.mean1.assign(f_count, 0.0);
  model.var0.assign(f_count, 0.0);
  model.var1.assign(f_count, 0.0);
  model.usable.assign(f_count, false);

  std::size_t n_pos = 0;
  for (int y : labels) n_pos += static_cast<std::size_t>(y);
  model.prior_pos = static_cast<double>(n_pos) / static_cast<double>(labels.size());

  // Variance floor scales with the largest overall feature variance.
  double max_var = 0.0;
  for (std::size_t f = 0; f < f_count; ++f) {
    double sum = 0.0, sum2 = 0.0;
    std::size_t n = 0;
    for (std::size_t r = 0; r < matrix.n_rows; ++r) {
      double v = matrix.at(r, f);
      if (DesignMatrix::is_missing(v)) continue;
      sum += v;
      sum2 += v * v;
      ++n;
    }
    if (n > 0) {
      double mean = sum / static_cast<double>(n);
      max_var = std::max(max_var, sum2 / static_cast<double>(n) - mean * mean);
    }
  }
  double floor = std::max(1e-9 * max_var, 1e-12);

  for (std::size_t f = 0; f < f_count; ++f) {
    double s0 = 0.0, s1 = 0.0, q0 = 0.0, q1 = 0.0;
    std::size_t n0 = 0, n1 = 0;
    for (std::size_t r = 0; r < matrix.n_rows; ++r) {
      double v = matrix.at(r, f);
      if (DesignMatrix::is_missing(v)) continue;
      if (labels[r] == 1) {
        s1 += v;
        q1 += v * v;
        ++n1;
      } else {
        s0 += v;
        q0 += v * v;
        ++n0;
      }
    }
    if (n0 == 0 || n1 == 0) continue;
    model.usable[f] = true;
    model.mean0[f] = s0 / static_cast<double>(n0);
    model.mean1[f] = s1 / static_cast<double>(n1);
    model.var0[f] = std::max(q0 / static_cast<double>(n0) - model.mean0[f] * model.mean0[f], floor);
    model.var1[f] = std::max(q1 / static_cast<double>(n1) - model.mean1[f] * model.mean1[f], floor);
  }
  return model;
}

std::vector<double> nb_predict(const NaiveBayesModel& model, const DesignMatrix& matrix) {
  if (matrix.n_cols != model.mean0.size()) throw DataError("nb_predict: feature width mismatch");
  constexpr double kLog2Pi = 1.8378770664093454835606594728112;
  std::vector<double> out(matrix.n_rows);
  for (std::size_t r = 0; r < matrix.n_rows; ++r) {
    double log1 = std::log(model.prior_pos);
    double log0 = std::log(1.0 - model.prior_pos);
    for (std::size_t f = 0; f < matrix.n_cols; ++f) {
      if (!model.usable[f]) continue;
      double v = matrix.at(r, f);
      if (DesignMatrix::is_missing(v)) continue;  // missing features drop out
      double d1 = v - model.mean1[f];
      double d0 = v - model.mean0[f];
      log1 += -0.5 * (kLog2Pi + std::log(model.var1[f])) - d1 * d1 / (2.0 * model.var1[f]);
      log0 += -0.5 * (kLog2Pi + std::log(model.var0[f])) - d0 * d0 / (2.0 * model.var0[f]);
    }
    double m = std::max(log0, log1);
    double e1 = std::exp(log1 - m);
    double e0 = std::exp(log0 - m);
    out[r] = e1 / (e0 + e1);
  }
  return out;
}

// ---- gini tree and forest ------------------------------------------------

namespace {

struct GiniSplit {
  int feature = -1;
  int threshold_bin = 0;
  bool missing_left = true;
  double decrease = 0.0;
};

double gini_impurity(std::uint32_t n, std::uint32_t pos) {
  if (n == 0) return 0.0;
  double p = static_cast<double>(pos) / static_cast<double>(n);
  return 1.0 - p * p - (1.0 - p) * (1.0 - p);
}

// Feature provider per node: all features, or a seeded subsample.
using FeaturePicker = std::function<std::vector<int>()>;

std::optional<GiniSplit> best_gini_split(const BinnedMatrix& binned, const BinMapper& mapper,
                                         const std::vector<int>& labels,
                                         const std::vector<std::uint32_t>& rows,
                                         const std::vector<int>& features, int min_leaf) {
  std::uint32_t total_n = static_cast<std::uint32_t>(rows.size());
  std::uint32_t total_pos = 0;
  for (std::uint32_t r : rows) total_pos += static_cast<std::uint32_t>(labels[r]);
  double parent = gini_impurity(total_n, total_pos);
  if (total_pos == 0 || total_pos == total_n) return std::nullopt;  // pure node

  std::optional<GiniSplit> best;
  for (int f : features) {
    int n_bins = mapper.n_bins(static_cast<std::size_t>(f));
    if (n_bins < 2) continue;
    std::vector<std::uint32_t> cnt(static_cast<std::size_t>(n_bins) + 1, 0);
    std::vector<std::uint32_t> pos(static_cast<std::size_t>(n_bins) + 1, 0);
    for (std::uint32_t r : rows) {
      int bin = binned.at(r, static_cast<std::size_t>(f));
      ++cnt[static_cast<std::size_t>(bin)];
      pos[static_cast<std::size_t>(bin)] += static_cast<std::uint32_t>(labels[r]);
    }
    std::uint32_t pc = 0, pp = 0;
    for (int t = 1; t < n_bins; ++t) {
      pc += cnt[static_cast<std::size_t>(t)];
      pp += pos[static_cast<std::size_t>(t)];
      for (int direction = 0; direction < 2; ++direction) {
        bool missing_left = direction == 0;
        if (!missing_left && cnt[0] == 0) continue;
        std::uint32_t nl = missing_left ? pc + cnt[0] : pc;
        std::uint32_t posl = missing_left ? pp + pos[0] : pp;
        std::uint32_t nr = total_n - nl;
        std::uint32_t posr = total_pos - posl;
        if (nl < static_cast<std::uint32_t>(min_leaf) || nr < static_cast<std::uint32_t>(min_leaf))
          continue;
        double weighted = (static_cast<double>(nl) * gini_impurity(nl, posl) +
                           static_cast<double>(nr) * gini_impurity(nr, posr)) /
                          static_cast<double>(total_n);
        double decrease = parent - weighted;
        if (decrease <= 0.0) continue;
        if (!best || decrease > best->decrease)
          best = GiniSplit{f, t, missing_left, decrease};
      }
    }
  }
  return best;
}

Tree grow_gini_tree(const BinnedMatrix& binned, const BinMapper& mapper,
                    const std::vector<int>& labels, std::vector<std::uint32_t> root_rows,
                    int max_depth, int min_leaf, const FeaturePicker& pick_features) {
  Tree tree;
  tree.nodes.emplace_back();
  struct Item {
    int node;
    std::vector<std::uint32_t> rows;
    int depth;
  };
  std::vector<Item> queue;
  queue.push_back({0, std::move(root_rows), 0});

  // Depth-wise: FIFO over the frontier, creation order.
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    Item item = std::move(queue[qi]);
    std::uint32_t n = static_cast<std::uint32_t>(item.rows.size());
    std::uint32_t pos = 0;
    for (std::uint32_t r : item.rows) pos += static_cast<std::uint32_t>(labels[r]);

    std::optional<GiniSplit> split;
    if (item.depth < max_depth)
      split = best_gini_split(binned, mapper, labels, item.rows, pick_features(), min_leaf);
    if (!split) {
      tree.nodes[item.node].leaf_value =
          n == 0 ? 0.0 : static_cast<double>(pos) / static_cast<double>(n);
      continue;
    }
    TreeNode& node = tree.nodes[item.node];
    node.feature = split->feature;
    node.threshold_bin = split->threshold_bin;
    node.missing_left = split->missing_left;
    node.gain = split->decrease;
    node.left = static_cast<int>(tree.nodes.size());
    node.right = node.left + 1;
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();

    std::vector<std::uint32_t> lrows, rrows;
    for (std::uint32_t r : item.rows) {
      int bin = binned.at(r, static_cast<std::size_t>(split->feature));
      bool go_left = bin == 0 ? split->missing_left : bin <= split->threshold_bin;
      (go_left ? lrows : rrows).push_back(r);
    }
    int left = tree.nodes[item.node].left;
    int right = tree.nodes[item.node].right;
    queue.push_back({left, std::move(lrows), item.depth + 1});
    queue.push_back({right, std::move(rrows), item.depth + 1});
  }
  return tree;
}

}  // namespace

DecisionTreeModel tree_train(const DesignMatrix& matrix, const std::vector<int>& labels,
                             const TreeParams& params) {
  check_two_classes(labels, matrix.n_rows);
  DecisionTreeModel model;
  model.params = params;
  model.feature_names = matrix.names;
  auto [mapper, binned] = bin_features(matrix, params.max_bins, 0);
  model.mapper = std::move(mapper);

  std::vector<int> all_features(matrix.n_cols);
  for (std::size_t f = 0; f < matrix.n_cols; ++f) all_features[f] = static_cast<int>(f);
  std::vector<std::uint32_t> rows(matrix.n_rows);
  for (std::size_t r = 0; r < matrix.n_rows; ++r) rows[r] = static_cast<std::uint32_t>(r);
  model.tree = grow_gini_tree(binned, model.mapper, labels, std::move(rows), params.max_depth,
                              params.min_leaf, [&]() { return all_features; });
  return model;
}

std::vector<double> tree_predict(const DecisionTreeModel& model, const DesignMatrix& matrix) {
  BinnedMatrix binned = apply_bins(model.mapper, matrix);
  std::vector<double> out(matrix.n_rows);
  for (std::size_t r = 0; r < matrix.n_rows; ++r)
    out[r] = model.tree.nodes[model.tree.leaf_for_row(binned, r)].leaf_value;
  return out;
}

RandomForestModel forest_train(const DesignMatrix& matrix, const std::vector<int>& labels,
                               const ForestParams& params) {
  check_two_classes(labels, matrix.n_rows);
  if (params.num_trees < 1) throw ConfigError("forest needs at least one tree");
  RandomForestModel model;
  model.params = params;
  model.feature_names = matrix.names;
  auto [mapper, binned] = bin_features(matrix, params.max_bins, params.seed);
  model.mapper = std::move(mapper);

  std::size_t f_count = matrix.n_cols;
  std::uint32_t k_features;
  if (params.feature_fraction <= 0.0) {
    k_features = static_cast<std::uint32_t>(std::ceil(std::sqrt(static_cast<double>(f_count))));
  } else {
    k_features = static_cast<std::uint32_t>(std::max<double>(
        1.0, std::round(params.feature_fraction * static_cast<double>(f_count))));
  }
  k_features = std::min<std::uint32_t>(k_features, static_cast<std::uint32_t>(f_count));

  Rng master(params.seed);
  for (int t = 0; t < params.num_trees; ++t) {
    std::uint64_t tree_seed = master.fork(static_cast<std::uint64_t>(t)).next_u64();
    model.tree_seeds.push_back(tree_seed);
    Rng rng(tree_seed);

    std::vector<std::uint32_t> rows;
    rows.reserve(matrix.n_rows);
    if (params.bootstrap) {
      for (std::size_t i = 0; i < matrix.n_rows; ++i)
        rows.push_back(static_cast<std::uint32_t>(rng.below(matrix.n_rows)));
      std::sort(rows.begin(), rows.end());
    } else {
      for (std::size_t i = 0; i < matrix.n_rows; ++i) rows.push_back(static_cast<std::uint32_t>(i));
    }

    FeaturePicker picker;
    if (k_features == f_count) {
      std::vector<int> all(f_count);
      for (std::size_t f = 0; f < f_count; ++f) all[f] = static_cast<int>(f);
      picker = [all]() { return all; };
    } else {
      picker = [&rng, f_count, k_features]() {
        auto sampled = rng.sample_without_replacement(static_cast<std::uint32_t>(f_count),
                                                      k_features);
        std::vector<int> features(sampled.begin(), sampled.end());
        std::sort(features.begin(), features.end());
        return features;
      };
    }
    model.trees.push_back(grow_gini_tree(binned, model.mapper, labels, std::move(rows),
                                         params.max_depth, params.min_leaf, picker));
  }
  return model;
}

std::vector<double> forest_predict(const RandomForestModel& model, const DesignMatrix& matrix) {
  BinnedMatrix binned = apply_bins(model.mapper, matrix);
  std::vector<double> out(matrix.n_rows, 0.0);
  for (const Tree& tree : model.trees)
    for (std::size_t r = 0; r < matrix.n_rows; ++r)
      out[r] += tree.nodes[tree.leaf_for_row(binned, r)].leaf_value;
  for (double& v : out) v /= static_cast<double>(model.trees.size());
  return out;
}

// ---- logistic regression -------------------------------------------------

DesignMatrix lr_standardize(const LogisticModel& model, const DesignMatrix& matrix) {
  DesignMatrix z = matrix;
  for (std::size_t r = 0; r < z.n_rows; ++r) {
    for (std::size_t f = 0; f < z.n_cols; ++f) {
      double v = z.at(r, f);
      if (DesignMatrix::is_missing(v) || model.feature_std[f] == 0.0) {
        z.at(r, f) = 0.0;  // missing contributes nothing after z-scoring
      } else {
        z.at(r, f) = (v - model.feature_mean[f]) / model.feature_std[f];
      }
    }
  }
  return z;
}

double lr_loss(const std::vector<double>& weights, double bias, const DesignMatrix& standardized,
               const std::vector<int>& labels, double l2) {
  double total = 0.0;
  for (std::size_t r = 0; r < standardized.n_rows; ++r) {
    double z = bias;
    for (std::size_t f = 0; f < standardized.n_cols; ++f)
      z += weights[f] * standardized.at(r, f);
    // log(1 + exp(-m)) with the stable branch
    double m = labels[r] == 1 ? z : -z;
    total += m > 0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m));
  }
  total /= static_cast<double>(standardized.n_rows);
  double reg = 0.0;
  for (double w : weights) reg += w * w;
  return total + 0.5 * l2 * reg;
}

std::pair<std::vector<double>, double> lr_gradient(const std::vector<double>& weights, double bias,
                                                   const DesignMatrix& standardized,
                                                   const std::vector<int>& labels, double l2) {
  std::vector<double> grad(weights.size(), 0.0);
  double grad_bias = 0.0;
  for (std::size_t r = 0; r < standardized.n_rows; ++r) {
    double z = bias;
    for (std::size_t f = 0; f < standardized.n_cols; ++f)
      z += weights[f] * standardized.at(r, f);
    double residual = sigmoid(z) - static_cast<double>(labels[r]);
    grad_bias += residual;
    for (std::size_t f = 0; f < standardized.n_cols; ++f)
      grad[f] += residual * standardized.at(r, f);
  }
  double inv_n = 1.0 / static_cast<double>(standardized.n_rows);
  for (std::size_t f = 0; f < grad.size(); ++f) grad[f] = grad[f] * inv_n + l2 * weights[f];
  grad_bias *= inv_n;
  return {grad, grad_bias};
}

LogisticModel lr_train(const DesignMatrix& matrix, const std::vector<int>& labels,
                       const LogisticParams& params) {
  check_two_classes(labels, matrix.n_rows);
  LogisticModel model;
  model.params = params;
  model.feature_names = matrix.names;
  model.feature_mean.assign(matrix.n_cols, 0.0);
  model.feature_std.assign(matrix.n_cols, 0.0);
  for (std::size_t f = 0; f < matrix.n_cols; ++f) {
    double sum = 0.0, sum2 = 0.0;
    std::size_t n = 0;
    for (std::size_t r = 0; r < matrix.n_rows; ++r) {
      double v = matrix.at(r, f);
      if (DesignMatrix::is_missing(v)) continue;
      sum += v;
      sum2 += v * v;
      ++n;
    }
    if (n == 0) continue;
    double mean = sum / static_cast<double>(n);
    double var = sum2 / static_cast<double>(n) - mean * mean;
    model.feature_mean[f] = mean;
    model.feature_std[f] = var > 0.0 ? std::sqrt(var) : 0.0;
  }

  DesignMatrix z = lr_standardize(model, matrix);
  model.weights.assign(matrix.n_cols, 0.0);
  model.bias = 0.0;
  if (params.iterations == 0) return model;

  double loss = lr_loss(model.weights, model.bias, z, labels, params.l2);
  double step = params.learning_rate;
  for (int iter = 0; iter < params.iterations; ++iter) {
    auto [grad, grad_bias] = lr_gradient(model.weights, model.bias, z, labels, params.l2);
    for (int halving = 0; halving < 40; ++halving) {
      std::vector<double> w_next = model.weights;
      for (std::size_t f = 0; f < w_next.size(); ++f) w_next[f] -= step * grad[f];
      double b_next = model.bias - step * grad_bias;
      double next_loss = lr_loss(w_next, b_next, z, labels, params.l2);
      if (next_loss <= loss) {
        model.weights = std::move(w_next);
        model.bias = b_next;
        loss = next_loss;
        break;
      }
      step *= 0.5;  // training loss is non-increasing by construction
    }
  }
  return model;
}

std::vector<double> lr_predict(const LogisticModel& model, const DesignMatrix& matrix) {
  if (matrix.n_cols != model.weights.size()) throw DataError("lr_predict: feature width mismatch");
  DesignMatrix z = lr_standardize(model, matrix);
  std::vector<double> out(matrix.n_rows);
  for (std::size_t r = 0; r < matrix.n_rows; ++r) {
    double s = model.bias;
    for (std::size_t f = 0; f < matrix.n_cols; ++f) s += model.weights[f] * z.at(r, f);
    out[r] = sigmoid(s);
  }
  return out;
}

}  // namespace mining
