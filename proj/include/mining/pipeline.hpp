#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mining/csv.hpp"
#include "mining/document.hpp"
#include "mining/eval.hpp"
#include "mining/features.hpp"
#include "mining/gbdt.hpp"
#include "mining/pulearn.hpp"
#include "mining/synth.hpp"
#include "mining/text.hpp"

namespace mining {

struct PipelineConfig {
  // Inputs; schemas may come from the config or from <csv>.schema.json
  // sidecars written by this tool.
  std::string train_path, test_path, positives_path, unlabeled_path, model_path;
  std::map<std::string, Schema> schemas;  // keyed by role: train/test/positives/unlabeled
  std::string key;    // id column
  std::string label;  // label column (train only)
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  int num_threads = 1;

  // Feature settings.
  double corr_threshold = 0.97;
  std::vector<std::string> date_cols;  // empty = every date-kind column
  DerivationSpec derivation;
  std::vector<std::string> text_cols;
  std::uint32_t text_dim = 32768;
  bool use_idf = true;
  bool single_feature_filter = true;
  double feature_cv_threshold = 0.5;
  bool null_groups_by_count = false;

  // Learner and eval settings.
  GBDTParams gbdt;
  int k_folds = 5;
  double auc_target = 0.6;
  int max_drops = 10;

  // PU settings.
  std::string pu_method = "bagging";  // bagging | spy
  int pu_rounds = 100;
  double neg_ratio = 1.0;
  double spy_frac = 0.1;
  double spy_quantile = 0.05;
  bool calibrate = false;
  double holdout_frac = 0.2;
  std::size_t top_k = 10000;

  SynthSpec synth;

  // Raw config file bytes, hashed into the run manifest.
  std::string config_text;
};

PipelineConfig load_config(const std::string& path);

// Columns that feed the learners: every numeric column except key/label,
// plus hashed text blocks for the configured text columns.
struct MatrixAssembler {
  std::vector<std::string> numeric_cols;
  struct TextBlock {
    std::string column;
    std::uint32_t dim = 0;
    bool use_idf = true;
    IdfModel idf;
  };
  std::vector<TextBlock> text_blocks;

  static MatrixAssembler fit(const Frame& frame, const PipelineConfig& config);
  DesignMatrix apply(const Frame& frame) const;
  Json to_json() const;
  static MatrixAssembler from_json(const Json& j);
};

std::vector<int> read_labels(const Frame& frame, const std::string& label);

// CLI commands; each throws Config/Data/NumericError on failure.
void cmd_explore(const PipelineConfig& config);
void cmd_features(const PipelineConfig& config);
void cmd_adversarial(const PipelineConfig& config);
void cmd_cv(const PipelineConfig& config);
void cmd_train(const PipelineConfig& config);
void cmd_predict(const PipelineConfig& config);
void cmd_pu(const PipelineConfig& config);
void cmd_synth(const PipelineConfig& config);

// The cmd_cv core, exposed for the acceptance harness: per-model mean
// validation F1/AUC in a fixed model order.
struct ModelComparison {
  std::vector<std::string> model;
  std::vector<double> f1;
  std::vector<double> auc;
};
ModelComparison compare_models(const DesignMatrix& matrix, const std::vector<int>& labels, int k,
                               std::uint64_t seed, const GBDTParams& params);

// id,score,rank deliverable CSV.
void write_ranked_csv(const TopKResult& top, const std::string& path);

}  // namespace mining
