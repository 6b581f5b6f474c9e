#include "mining/pulearn.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "mining/frame.hpp"
#include "mining/rng.hpp"

namespace mining {

void PUDataset::validate() const {
  if (positives.n_cols != unlabeled.n_cols)
    throw DataError("PU dataset: positive/unlabeled feature width mismatch");
  if (positive_ids.size() != positives.n_rows || unlabeled_ids.size() != unlabeled.n_rows)
    throw DataError("PU dataset: id count mismatch");
  std::unordered_set<std::string> ids(positive_ids.begin(), positive_ids.end());
  if (ids.size() != positive_ids.size()) throw DataError("PU dataset: duplicate positive id");
  for (const auto& id : unlabeled_ids)
    if (!ids.insert(id).second) throw DataError("PU dataset: id appears twice: " + id);
}

namespace {

void fill_ranking(PUResult& result) {
  std::vector<std::size_t> order(result.scores.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (result.scores[a].score != result.scores[b].score)
      return result.scores[a].score > result.scores[b].score;
    return result.scores[a].id < result.scores[b].id;
  });
  result.ranking.clear();
  for (std::size_t i : order) result.ranking.push_back(result.scores[i].id);
}

// Positives labeled 1 against the given unlabeled rows labeled 0.
GBDTModel train_pn_model(const PUDataset& data, const std::vector<std::uint32_t>& positive_rows,
                         const std::vector<std::uint32_t>& negative_rows,
                         const GBDTParams& params, std::uint64_t seed) {
  std::vector<std::size_t> rows;
  std::vector<int> labels;
  for (std::uint32_t r : positive_rows) {
    rows.push_back(r);
    labels.push_back(1);
  }
  DesignMatrix train = data.positives.select_rows(rows);
  rows.clear();
  for (std::uint32_t r : negative_rows) {
    rows.push_back(r);
    labels.push_back(0);
  }
  train = DesignMatrix::vstack(train, data.unlabeled.select_rows(rows));
  GBDTParams p = params;
  p.seed = seed;
  return gbdt_train(p, train, labels);
}

std::vector<std::uint32_t> all_rows(std::size_t n) {
  std::vector<std::uint32_t> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = static_cast<std::uint32_t>(i);
  return rows;
}

}  // namespace

PUResult bagging_pu(const PUDataset& data, const GBDTParams& params, int rounds, double neg_ratio,
                    std::uint64_t seed) {
  data.validate();
  if (rounds < 1) throw ConfigError("bagging_pu: rounds must be >= 1");
  if (data.positives.n_rows < 10) throw DataError("bagging_pu: need at least 10 positives");
  if (data.unlabeled.n_rows <= data.positives.n_rows)
    throw DataError("bagging_pu: unlabeled pool must outnumber the positives");
  if (!(neg_ratio > 0.0)) throw ConfigError("bagging_pu: neg_ratio must be positive");

  std::size_t n_unlabeled = data.unlabeled.n_rows;
  std::uint32_t draw_size = static_cast<std::uint32_t>(
      std::ceil(neg_ratio * static_cast<double>(data.positives.n_rows)));
  if (draw_size > n_unlabeled) draw_size = static_cast<std::uint32_t>(n_unlabeled);

  std::vector<double> oob_sum(n_unlabeled, 0.0);
  std::vector<int> oob_count(n_unlabeled, 0);
  std::vector<double> in_bag_sum(n_unlabeled, 0.0);
  std::vector<int> in_bag_count(n_unlabeled, 0);
  std::vector<std::uint32_t> positives = all_rows(data.positives.n_rows);

  Rng master(seed);
  for (int round = 0; round < rounds; ++round) {
    Rng rng = master.fork(static_cast<std::uint64_t>(round) + 1);
    auto draw = rng.sample_without_replacement(static_cast<std::uint32_t>(n_unlabeled), draw_size);
    std::sort(draw.begin(), draw.end());
    GBDTModel model = train_pn_model(data, positives, draw, params, rng.next_u64());
    std::vector<double> scores = gbdt_predict(model, data.unlabeled);

    std::vector<bool> drawn(n_unlabeled, false);
    for (std::uint32_t r : draw) drawn[r] = true;
    // Aggregation stays in fixed round-then-row order.
    for (std::size_t r = 0; r < n_unlabeled; ++r) {
      if (drawn[r]) {
        in_bag_sum[r] += scores[r];
        ++in_bag_count[r];
      } else {
        oob_sum[r] += scores[r];
        ++oob_count[r];
      }
    }
  }

  PUResult result;
  result.scores.resize(n_unlabeled);
  for (std::size_t r = 0; r < n_unlabeled; ++r) {
    PUScore& s = result.scores[r];
    s.id = data.unlabeled_ids[r];
    s.rounds_out_of_bag = oob_count[r];
    if (oob_count[r] > 0) {
      s.score = oob_sum[r] / static_cast<double>(oob_count[r]);
    } else {
      s.score = in_bag_count[r] > 0 ? in_bag_sum[r] / static_cast<double>(in_bag_count[r]) : 0.0;
      s.in_bag_fallback = true;
    }
  }
  fill_ranking(result);
  return result;
}

PUResult spy_two_step(const PUDataset& data, const GBDTParams& params, double spy_frac,
                      double spy_quantile, std::uint64_t seed) {
  data.validate();
  if (!(spy_frac > 0.0 && spy_frac < 1.0)) throw ConfigError("spy_two_step: spy_frac must be in (0,1)");
  if (!(spy_quantile >= 0.0 && spy_quantile <= 1.0))
    throw ConfigError("spy_two_step: spy_quantile must be in [0,1]");
  std::size_t n_pos = data.positives.n_rows;
  std::uint32_t n_spies = static_cast<std::uint32_t>(
      std::floor(spy_frac * static_cast<double>(n_pos)));
  if (n_spies < 5) throw DataError("spy_two_step: need at least 5 spies");
  if (n_spies >= n_pos) throw DataError("spy_two_step: spies would exhaust the positives");

  Rng rng(seed);
  auto spy_draw = rng.sample_without_replacement(static_cast<std::uint32_t>(n_pos), n_spies);
  std::sort(spy_draw.begin(), spy_draw.end());
  std::vector<bool> is_spy(n_pos, false);
  for (std::uint32_t s : spy_draw) is_spy[s] = true;

  // Step 1: P-minus-spies vs U-plus-spies.
  std::vector<std::size_t> kept_pos;
  std::vector<std::size_t> spy_rows;
  for (std::size_t i = 0; i < n_pos; ++i)
    (is_spy[i] ? spy_rows : kept_pos).push_back(i);

  DesignMatrix step1_train = data.positives.select_rows(kept_pos);
  std::vector<int> step1_labels(kept_pos.size(), 1);
  DesignMatrix u_plus_spies =
      DesignMatrix::vstack(data.unlabeled, data.positives.select_rows(spy_rows));
  step1_train = DesignMatrix::vstack(step1_train, u_plus_spies);
  step1_labels.resize(step1_labels.size() + u_plus_spies.n_rows, 0);

  GBDTParams p1 = params;
  p1.seed = rng.next_u64();
  GBDTModel step1 = gbdt_train(p1, step1_train, step1_labels);

  std::vector<double> unlabeled_scores = gbdt_predict(step1, data.unlabeled);
  std::vector<double> spy_scores = gbdt_predict(step1, data.positives.select_rows(spy_rows));

  std::vector<double> sorted_spies = spy_scores;
  std::sort(sorted_spies.begin(), sorted_spies.end());
  double threshold;
  if (spy_quantile == 0.0) {
    // Below every spy score, so RN is maximal for this model.
    threshold = sorted_spies.front();
  } else {
    threshold = nearest_rank_quantile(sorted_spies, spy_quantile);
  }

  std::vector<std::size_t> reliable_negatives;
  for (std::size_t r = 0; r < data.unlabeled.n_rows; ++r)
    if (unlabeled_scores[r] < threshold) reliable_negatives.push_back(r);

  if (reliable_negatives.size() < n_pos) {
    PUResult fallback = bagging_pu(data, params, 100, 1.0, seed);
    fallback.spy_fallback = true;
    return fallback;
  }

  // Step 2: all positives vs the reliable negatives.
  DesignMatrix step2_train = data.positives;
  std::vector<int> step2_labels(n_pos, 1);
  step2_train = DesignMatrix::vstack(step2_train, data.unlabeled.select_rows(reliable_negatives));
  step2_labels.resize(step2_labels.size() + reliable_negatives.size(), 0);
  GBDTParams p2 = params;
  p2.seed = rng.next_u64();
  GBDTModel step2 = gbdt_train(p2, step2_train, step2_labels);
  std::vector<double> final_scores = gbdt_predict(step2, data.unlabeled);

  PUResult result;
  result.scores.resize(data.unlabeled.n_rows);
  for (std::size_t r = 0; r < data.unlabeled.n_rows; ++r) {
    result.scores[r].id = data.unlabeled_ids[r];
    result.scores[r].score = final_scores[r];
  }
  fill_ranking(result);
  return result;
}

double calibrate_prior(const PUDataset& data, const GBDTParams& params, double holdout_frac,
                       std::uint64_t seed) {
  data.validate();
  if (!(holdout_frac > 0.0 && holdout_frac < 1.0))
    throw ConfigError("calibrate_prior: holdout_frac must be in (0,1)");
  std::size_t n_pos = data.positives.n_rows;
  std::uint32_t n_holdout = static_cast<std::uint32_t>(
      std::round(holdout_frac * static_cast<double>(n_pos)));
  if (n_holdout < 5) throw DataError("calibrate_prior: need at least 5 held-out positives");
  if (n_holdout >= n_pos) throw DataError("calibrate_prior: holdout would exhaust the positives");

  Rng rng(seed);
  auto holdout = rng.sample_without_replacement(static_cast<std::uint32_t>(n_pos), n_holdout);
  std::sort(holdout.begin(), holdout.end());
  std::vector<bool> held(n_pos, false);
  for (std::uint32_t h : holdout) held[h] = true;

  std::vector<std::size_t> held_in, held_out;
  for (std::size_t i = 0; i < n_pos; ++i) (held[i] ? held_out : held_in).push_back(i);

  // Nontraditional classifier: held-in positives vs the whole unlabeled pool.
  DesignMatrix train = data.positives.select_rows(held_in);
  std::vector<int> labels(held_in.size(), 1);
  train = DesignMatrix::vstack(train, data.unlabeled);
  labels.resize(labels.size() + data.unlabeled.n_rows, 0);
  GBDTParams p = params;
  p.seed = rng.next_u64();
  GBDTModel model = gbdt_train(p, train, labels);

  std::vector<double> scores = gbdt_predict(model, data.positives.select_rows(held_out));
  double mean = 0.0;
  for (double s : scores) mean += s;
  mean /= static_cast<double>(scores.size());
  return std::min(1.0, std::max(1e-6, mean));
}

TopKResult rank_top_k(const PUResult& result, std::size_t k) {
  if (k < 1) throw ConfigError("rank_top_k: k must be >= 1");
  std::vector<std::pair<std::string, double>> by_id;
  for (const PUScore& s : result.scores) by_id.emplace_back(s.id, s.score);
  std::sort(by_id.begin(), by_id.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  TopKResult out;
  if (k > by_id.size()) {
    out.short_list = true;
    k = by_id.size();
  }
  for (std::size_t i = 0; i < k; ++i)
    out.entries.push_back(TopKEntry{by_id[i].first, by_id[i].second, i + 1});
  return out;
}

}  // namespace mining
