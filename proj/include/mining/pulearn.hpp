#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mining/gbdt.hpp"
#include "mining/matrix.hpp"

namespace mining {

struct PUDataset {
  DesignMatrix positives;
  std::vector<std::string> positive_ids;
  DesignMatrix unlabeled;
  std::vector<std::string> unlabeled_ids;

  void validate() const;  // disjoint ids, matching feature space
};

struct PUScore {
  std::string id;
  double score = 0.0;        // mean out-of-bag probability
  int rounds_out_of_bag = 0;
  bool in_bag_fallback = false;
};

struct PUResult {
  std::vector<PUScore> scores;  // one per unlabeled row, input order
  double calibration_c = 1.0;
  bool calibrated = false;
  bool spy_fallback = false;  // spy_two_step fell back to bagging
  // Ranked ids, score descending then id ascending.
  std::vector<std::string> ranking;
};

// Bagging PU: per round, draw provisional negatives from the unlabeled
// pool, train positives-vs-draw, and score the rows left out of the draw.
PUResult bagging_pu(const PUDataset& data, const GBDTParams& params, int rounds,
                    double neg_ratio, std::uint64_t seed);

// Spy two-step: spies hidden in the unlabeled pool locate a reliable
// negative threshold, then a second model scores everything.
PUResult spy_two_step(const PUDataset& data, const GBDTParams& params, double spy_frac,
                      double spy_quantile, std::uint64_t seed);

// Label frequency c: mean nontraditional-classifier score on held-out
// positives, clamped to [1e-6, 1]. Calibrated probability is min(1, s/c).
double calibrate_prior(const PUDataset& data, const GBDTParams& params, double holdout_frac,
                       std::uint64_t seed);

struct TopKEntry {
  std::string id;
  double score = 0.0;
  std::size_t rank = 0;  // 1-based
};

struct TopKResult {
  std::vector<TopKEntry> entries;
  bool short_list = false;  // k exceeded the unlabeled population
};

TopKResult rank_top_k(const PUResult& result, std::size_t k);

}  // namespace mining
