#include "mining/gbdt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mining/parallel.hpp"
#include "mining/rng.hpp"

namespace mining {

void GBDTParams::validate() const {
  if (num_trees < 0) throw ConfigError("num_trees must be >= 0");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  if (max_leaves < 2) throw ConfigError("max_leaves must be >= 2");
  if (min_data_in_leaf < 1) throw ConfigError("min_data_in_leaf must be >= 1");
  if (!(min_child_hessian >= 0.0)) throw ConfigError("min_child_hessian must be >= 0");
  if (!(lambda_l2 >= 0.0)) throw ConfigError("lambda_l2 must be >= 0");
  if (max_bins < 2 || max_bins > 65535) throw ConfigError("max_bins must be in [2, 65535]");
  if (!(feature_fraction > 0.0 && feature_fraction <= 1.0))
    throw ConfigError("feature_fraction must be in (0, 1]");
  if (!(bagging_fraction > 0.0 && bagging_fraction <= 1.0))
    throw ConfigError("bagging_fraction must be in (0, 1]");
  if (num_threads < 1) throw ConfigError("num_threads must be >= 1");
}

int BinMapper::bin_of(std::size_t feature, double value) const {
  if (DesignMatrix::is_missing(value)) return 0;
  const std::vector<double>& e = edges[feature];
  if (e.empty()) return 1;
  auto it = std::lower_bound(e.begin(), e.end(), value);
  if (it == e.end()) return static_cast<int>(e.size());  // beyond the last edge
  return static_cast<int>(it - e.begin()) + 1;
}

std::pair<BinMapper, BinnedMatrix> bin_features(const DesignMatrix& matrix, int max_bins,
                                                std::uint64_t seed) {
  if (matrix.n_rows == 0 || matrix.n_cols == 0) throw DataError("bin_features: empty matrix");
  if (max_bins < 2 || max_bins > 65535) throw ConfigError("max_bins must be in [2, 65535]");

  constexpr std::size_t kQuantileSampleCap = 1000000;
  BinMapper mapper;
  mapper.edges.resize(matrix.n_cols);
  for (std::size_t f = 0; f < matrix.n_cols; ++f) {
    std::vector<double> values;
    values.reserve(matrix.n_rows);
    if (matrix.n_rows > kQuantileSampleCap) {
      Rng rng = Rng(seed).fork(f);
      auto rows = rng.sample_without_replacement(static_cast<std::uint32_t>(matrix.n_rows),
                                                 static_cast<std::uint32_t>(kQuantileSampleCap));
      std::sort(rows.begin(), rows.end());
      for (std::uint32_t r : rows) {
        double v = matrix.at(r, f);
        if (!DesignMatrix::is_missing(v)) values.push_back(v);
      }
    } else {
      for (std::size_t r = 0; r < matrix.n_rows; ++r) {
        double v = matrix.at(r, f);
        if (!DesignMatrix::is_missing(v)) values.push_back(v);
      }
    }
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    std::vector<double>& edges = mapper.edges[f];
    std::size_t m = values.size();
    if (m == 0) {
      // all missing; keep a single unreachable value bin
      edges = {0.0};
    } else if (m <= static_cast<std::size_t>(max_bins)) {
      edges = values;  // one bin per distinct value
    } else {
      for (int k = 1; k <= max_bins; ++k) {
        std::size_t rank = static_cast<std::size_t>(
            std::ceil(static_cast<double>(k) * static_cast<double>(m) / max_bins));
        if (rank < 1) rank = 1;
        if (rank > m) rank = m;
        double e = values[rank - 1];
        if (edges.empty() || e > edges.back()) edges.push_back(e);
      }
    }
  }
  return {mapper, apply_bins(mapper, matrix)};
}

BinnedMatrix apply_bins(const BinMapper& mapper, const DesignMatrix& matrix) {
  if (matrix.n_cols != mapper.n_features())
    throw DataError("apply_bins: feature count mismatch");
  BinnedMatrix binned;
  binned.n_rows = matrix.n_rows;
  binned.n_cols = matrix.n_cols;
  binned.bins.resize(matrix.n_rows * matrix.n_cols);
  for (std::size_t r = 0; r < matrix.n_rows; ++r)
    for (std::size_t f = 0; f < matrix.n_cols; ++f)
      binned.bins[r * matrix.n_cols + f] =
          static_cast<std::uint16_t>(mapper.bin_of(f, matrix.at(r, f)));
  return binned;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::pair<double, double> logloss_grad_hess(double score, int label) {
  if (!std::isfinite(score)) throw NumericError("logloss_grad_hess: non-finite score");
  double p = sigmoid(score);
  double g = p - static_cast<double>(label);
  double h = p * (1.0 - p);
  if (h < 1e-16) h = 1e-16;
  return {g, h};
}

std::optional<SplitCandidate> best_split(const std::vector<FeatureHistogram>& histograms,
                                         const std::vector<int>& features,
                                         const SplitTotals& totals, const GBDTParams& params) {
  const double lambda = params.lambda_l2;
  const double parent_score = totals.g * totals.g / (totals.h + lambda);
  std::optional<SplitCandidate> best;

  for (std::size_t fi = 0; fi < histograms.size(); ++fi) {
    const FeatureHistogram& hist = histograms[fi];
    int n_bins = static_cast<int>(hist.size()) - 1;
    if (n_bins < 2) continue;
    const HistogramBin& miss = hist[0];

    // Prefix over value bins; at each threshold try missing-left first so
    // equal gains resolve to (lower threshold, missing-left).
    double pg = 0.0, ph = 0.0;
    std::uint32_t pc = 0;
    for (int t = 1; t < n_bins; ++t) {
      pg += hist[t].g;
      ph += hist[t].h;
      pc += hist[t].count;
      for (int direction = 0; direction < 2; ++direction) {
        bool missing_left = direction == 0;
        // With no missing rows both directions coincide; keep missing-left.
        if (!missing_left && miss.count == 0) continue;
        double gl = missing_left ? pg + miss.g : pg;
        double hl = missing_left ? ph + miss.h : ph;
        std::uint32_t cl = missing_left ? pc + miss.count : pc;
        double gr = totals.g - gl;
        double hr = totals.h - hl;
        std::uint32_t cr = totals.count - cl;
        if (cl < static_cast<std::uint32_t>(params.min_data_in_leaf) ||
            cr < static_cast<std::uint32_t>(params.min_data_in_leaf))
          continue;
        if (hl < params.min_child_hessian || hr < params.min_child_hessian) continue;
        double gain = 0.5 * (gl * gl / (hl + lambda) + gr * gr / (hr + lambda) - parent_score) -
                      params.gamma;
        if (gain <= 0.0) continue;
        if (!best || gain > best->gain) {
          best = SplitCandidate{features[fi], t, missing_left, gain};
        }
      }
    }
  }
  return best;
}

int Tree::leaf_for_row(const BinnedMatrix& binned, std::size_t row) const {
  int node = 0;
  while (nodes[node].feature >= 0) {
    const TreeNode& n = nodes[node];
    int bin = binned.at(row, static_cast<std::size_t>(n.feature));
    bool go_left = bin == 0 ? n.missing_left : bin <= n.threshold_bin;
    node = go_left ? n.left : n.right;
  }
  return node;
}

namespace {

struct LeafState {
  int node = -1;
  std::vector<std::uint32_t> rows;  // ascending
  double g = 0.0;
  double h = 0.0;
  std::optional<SplitCandidate> best;
  int created = 0;
  bool open = true;
};

std::vector<FeatureHistogram> build_histograms(const BinnedMatrix& binned,
                                               const std::vector<int>& features,
                                               const std::vector<std::uint32_t>& rows,
                                               const std::vector<double>& grad,
                                               const std::vector<double>& hess,
                                               const BinMapper& mapper, int num_threads) {
  std::vector<FeatureHistogram> hists(features.size());
  parallel_for(features.size(), num_threads, [&](std::size_t fi) {
    int f = features[fi];
    FeatureHistogram& hist = hists[fi];
    hist.assign(static_cast<std::size_t>(mapper.n_bins(f)) + 1, HistogramBin{});
    for (std::uint32_t r : rows) {
      int bin = binned.at(r, static_cast<std::size_t>(f));
      HistogramBin& cell = hist[static_cast<std::size_t>(bin)];
      cell.g += grad[r];
      cell.h += hess[r];
      ++cell.count;
    }
  });
  return hists;
}

}  // namespace

GBDTModel gbdt_train(const GBDTParams& params, const DesignMatrix& matrix,
                     const std::vector<int>& labels) {
  params.validate();
  if (labels.size() != matrix.n_rows) throw DataError("gbdt_train: row/label length mismatch");
  std::size_t n_pos = 0;
  for (int y : labels) {
    if (y != 0 && y != 1) throw DataError("gbdt_train: labels must be 0 or 1");
    n_pos += static_cast<std::size_t>(y);
  }
  if (n_pos == 0 || n_pos == labels.size())
    throw DataError("gbdt_train: both classes must be present");

  GBDTModel model;
  model.params = params;
  model.feature_names = matrix.names;
  auto [mapper, binned] = bin_features(matrix, params.max_bins, params.seed);
  model.mapper = std::move(mapper);

  double p_bar = static_cast<double>(n_pos) / static_cast<double>(labels.size());
  model.base_score = std::log(p_bar / (1.0 - p_bar));

  std::size_t n = matrix.n_rows;
  std::size_t n_features = matrix.n_cols;
  std::vector<double> scores(n, model.base_score);
  std::vector<double> grad(n), hess(n);
  Rng master(params.seed);

  for (int tree_index = 0; tree_index < params.num_trees; ++tree_index) {
    for (std::size_t i = 0; i < n; ++i) {
      auto [g, h] = logloss_grad_hess(scores[i], labels[i]);
      grad[i] = g;
      hess[i] = h;
    }

    // Per-tree row bag and feature subset, each from a derived stream.
    std::vector<std::uint32_t> bag;
    if (params.bagging_fraction < 1.0) {
      Rng rng = master.fork(static_cast<std::uint64_t>(tree_index) * 2 + 1);
      auto k = static_cast<std::uint32_t>(
          std::max<double>(1.0, std::round(params.bagging_fraction * static_cast<double>(n))));
      bag = rng.sample_without_replacement(static_cast<std::uint32_t>(n), k);
      std::sort(bag.begin(), bag.end());
    } else {
      bag.resize(n);
      for (std::size_t i = 0; i < n; ++i) bag[i] = static_cast<std::uint32_t>(i);
    }
    std::vector<int> features;
    if (params.feature_fraction < 1.0) {
      Rng rng = master.fork(static_cast<std::uint64_t>(tree_index) * 2 + 2);
      auto k = static_cast<std::uint32_t>(std::max<double>(
          1.0, std::round(params.feature_fraction * static_cast<double>(n_features))));
      auto sampled =
          rng.sample_without_replacement(static_cast<std::uint32_t>(n_features), k);
      features.assign(sampled.begin(), sampled.end());
      std::sort(features.begin(), features.end());
    } else {
      features.resize(n_features);
      for (std::size_t f = 0; f < n_features; ++f) features[f] = static_cast<int>(f);
    }

    Tree tree;
    tree.nodes.emplace_back();
    std::vector<LeafState> leaves;
    {
      LeafState root;
      root.node = 0;
      root.rows = bag;
      for (std::uint32_t r : root.rows) {
        root.g += grad[r];
        root.h += hess[r];
      }
      auto hists = build_histograms(binned, features, root.rows, grad, hess, model.mapper,
                                    params.num_threads);
      root.best = best_split(hists, features,
                             SplitTotals{root.g, root.h,
                                         static_cast<std::uint32_t>(root.rows.size())},
                             params);
      root.created = 0;
      leaves.push_back(std::move(root));
    }

    int n_leaves = 1;
    int created = 0;
    while (n_leaves < params.max_leaves) {
      int pick = -1;
      for (std::size_t li = 0; li < leaves.size(); ++li) {
        if (!leaves[li].open || !leaves[li].best) continue;
        if (pick < 0 || leaves[li].best->gain > leaves[pick].best->gain) pick = static_cast<int>(li);
      }
      if (pick < 0) break;

      LeafState& parent = leaves[pick];
      const SplitCandidate& split = *parent.best;
      int left_index = static_cast<int>(tree.nodes.size());
      {
        TreeNode& node = tree.nodes[parent.node];
        node.feature = split.feature;
        node.threshold_bin = split.threshold_bin;
        node.missing_left = split.missing_left;
        node.gain = split.gain;
        node.left = left_index;
        node.right = left_index + 1;
      }
      tree.nodes.emplace_back();  // invalidates references into tree.nodes
      tree.nodes.emplace_back();

      LeafState lchild, rchild;
      lchild.node = left_index;
      rchild.node = left_index + 1;
      lchild.created = ++created;
      rchild.created = ++created;
      for (std::uint32_t r : parent.rows) {
        int bin = binned.at(r, static_cast<std::size_t>(split.feature));
        bool go_left = bin == 0 ? split.missing_left : bin <= split.threshold_bin;
        LeafState& child = go_left ? lchild : rchild;
        child.rows.push_back(r);
        child.g += grad[r];
        child.h += hess[r];
      }
      parent.open = false;
      parent.rows.clear();
      parent.rows.shrink_to_fit();

      for (LeafState* child : {&lchild, &rchild}) {
        auto hists = build_histograms(binned, features, child->rows, grad, hess, model.mapper,
                                      params.num_threads);
        child->best = best_split(hists, features,
                                 SplitTotals{child->g, child->h,
                                             static_cast<std::uint32_t>(child->rows.size())},
                                 params);
      }
      leaves.push_back(std::move(lchild));
      leaves.push_back(std::move(rchild));
      ++n_leaves;
    }

    for (const LeafState& leaf : leaves) {
      if (!leaf.open) continue;
      tree.nodes[leaf.node].leaf_value =
          -params.learning_rate * leaf.g / (leaf.h + params.lambda_l2);
    }

    // Scores advance for every row, in and out of the bag.
    for (std::size_t r = 0; r < n; ++r)
      scores[r] += tree.nodes[tree.leaf_for_row(binned, r)].leaf_value;
    model.trees.push_back(std::move(tree));
  }
  return model;
}

std::vector<double> gbdt_predict_binned(const GBDTModel& model, const BinnedMatrix& binned,
                                        bool raw_score) {
  if (binned.n_cols != model.mapper.n_features())
    throw DataError("gbdt_predict: feature width mismatch");
  std::vector<double> out(binned.n_rows);
  parallel_for(binned.n_rows, model.params.num_threads, [&](std::size_t r) {
    double score = model.base_score;
    for (const Tree& tree : model.trees)
      score += tree.nodes[tree.leaf_for_row(binned, r)].leaf_value;
    out[r] = raw_score ? score : sigmoid(score);
  });
  return out;
}

std::vector<double> gbdt_predict(const GBDTModel& model, const DesignMatrix& matrix,
                                 bool raw_score) {
  if (matrix.n_cols != model.mapper.n_features())
    throw DataError("gbdt_predict: feature width mismatch");
  return gbdt_predict_binned(model, apply_bins(model.mapper, matrix), raw_score);
}

std::vector<double> feature_importance(const GBDTModel& model, ImportanceKind kind) {
  std::vector<double> importance(model.feature_names.size(), 0.0);
  for (const Tree& tree : model.trees) {
    for (const TreeNode& node : tree.nodes) {
      if (node.feature < 0) continue;
      if (kind == ImportanceKind::Gain)
        importance[static_cast<std::size_t>(node.feature)] += node.gain;
      else
        importance[static_cast<std::size_t>(node.feature)] += 1.0;
    }
  }
  return importance;
}

std::vector<double> staged_training_loss(const GBDTModel& model, const DesignMatrix& matrix,
                                         const std::vector<int>& labels) {
  if (labels.size() != matrix.n_rows) throw DataError("staged_training_loss: length mismatch");
  BinnedMatrix binned = apply_bins(model.mapper, matrix);
  std::vector<double> scores(matrix.n_rows, model.base_score);
  std::vector<double> losses;
  auto mean_loss = [&]() {
    double total = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      double p = sigmoid(scores[i]);
      p = std::min(1.0 - 1e-15, std::max(1e-15, p));
      total += labels[i] == 1 ? -std::log(p) : -std::log(1.0 - p);
    }
    return total / static_cast<double>(scores.size());
  };
  losses.push_back(mean_loss());
  for (const Tree& tree : model.trees) {
    for (std::size_t r = 0; r < matrix.n_rows; ++r)
      scores[r] += tree.nodes[tree.leaf_for_row(binned, r)].leaf_value;
    losses.push_back(mean_loss());
  }
  return losses;
}

}  // namespace mining
