#include "mining/synth.hpp"

#include <cstdio>

#include "mining/rng.hpp"

namespace mining {

void SynthSpec::validate() const {
  if (n_rows < 1) throw ConfigError("synth: n_rows must be >= 1");
  if (n_numeric < 1) throw ConfigError("synth: n_numeric must be >= 1");
  if (!(positive_rate > 0.0 && positive_rate < 1.0))
    throw ConfigError("synth: positive_rate must be in (0,1)");
  if (!(censor_c > 0.0 && censor_c <= 1.0)) throw ConfigError("synth: censor_c must be in (0,1]");
  if (drift_feature >= static_cast<int>(n_numeric))
    throw ConfigError("synth: drift_feature out of range");
}

namespace {

constexpr int kCategoricalLevels = 4;

int draw_level(Rng& rng, const double* probabilities) {
  double u = rng.uniform();
  double acc = 0.0;
  for (int level = 0; level < kCategoricalLevels - 1; ++level) {
    acc += probabilities[level];
    if (u < acc) return level;
  }
  return kCategoricalLevels - 1;
}

struct Split {
  Frame frame;
  std::vector<int> true_labels;
  std::vector<int> observed;
};

Split generate_split(const SynthSpec& spec, const char* prefix, Rng rng, bool apply_drift) {
  std::size_t informative = (spec.n_numeric + 1) / 2;
  // Class-dependent tables only when there is separation to model.
  const double table0[kCategoricalLevels] = {0.4, 0.3, 0.2, 0.1};
  const double table1_sep[kCategoricalLevels] = {0.1, 0.2, 0.3, 0.4};
  const double* table1 = spec.class_sep != 0.0 ? table1_sep : table0;

  Split split;
  std::vector<std::string> ids(spec.n_rows);
  std::vector<std::vector<double>> nums(spec.n_numeric, std::vector<double>(spec.n_rows));
  std::vector<std::vector<std::string>> cats(spec.n_categorical,
                                             std::vector<std::string>(spec.n_rows));
  for (std::size_t r = 0; r < spec.n_rows; ++r) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%08zu", prefix, r);
    ids[r] = buf;
    int y = rng.bernoulli(spec.positive_rate) ? 1 : 0;
    split.true_labels.push_back(y);
    split.observed.push_back(y == 1 && rng.bernoulli(spec.censor_c) ? 1 : 0);
    for (std::size_t f = 0; f < spec.n_numeric; ++f) {
      double mean = (y == 1 && f < informative) ? spec.class_sep : 0.0;
      nums[f][r] = mean + rng.normal();
    }
    for (std::size_t c = 0; c < spec.n_categorical; ++c) {
      int level = draw_level(rng, y == 1 ? table1 : table0);
      cats[c][r] = "v" + std::to_string(level);
    }
  }
  if (apply_drift && spec.drift_feature >= 0) {
    for (std::size_t r = 0; r < spec.n_rows; ++r)
      nums[static_cast<std::size_t>(spec.drift_feature)][r] += spec.drift_shift;
  }

  split.frame.key = "id";
  split.frame.add(Column::categorical("id", std::move(ids)));
  for (std::size_t f = 0; f < spec.n_numeric; ++f)
    split.frame.add(Column::numeric("num" + std::to_string(f), std::move(nums[f])));
  for (std::size_t c = 0; c < spec.n_categorical; ++c)
    split.frame.add(Column::categorical("cat" + std::to_string(c), std::move(cats[c])));
  return split;
}

}  // namespace

SynthData generate(const SynthSpec& spec) {
  spec.validate();
  Rng master(spec.seed);
  SynthData data;
  Split train = generate_split(spec, "tr", master.fork(1), true);
  Split test = generate_split(spec, "te", master.fork(2), false);
  train.frame.name = "synth.train";
  test.frame.name = "synth.test";
  data.train = std::move(train.frame);
  data.test = std::move(test.frame);
  data.train_true = std::move(train.true_labels);
  data.train_observed = std::move(train.observed);
  data.test_true = std::move(test.true_labels);
  return data;
}

DesignMatrix synth_matrix(const Frame& frame) {
  std::vector<std::string> numeric_cols;
  for (const auto& c : frame.columns)
    if (c.kind == ColumnKind::Numeric) numeric_cols.push_back(c.name);
  DesignMatrix m;
  m.n_rows = frame.n_rows;
  m.n_cols = numeric_cols.size();
  m.values.resize(m.n_rows * m.n_cols);
  m.names = numeric_cols;
  for (std::size_t j = 0; j < numeric_cols.size(); ++j) {
    const Column& c = frame.at(numeric_cols[j]);
    for (std::size_t r = 0; r < frame.n_rows; ++r)
      m.values[r * m.n_cols + j] = c.missing[r] ? DesignMatrix::missing_marker() : c.nums[r];
  }
  return m;
}

}  // namespace mining
