#include "mining/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include "mining/baselines.hpp"

namespace mining {

namespace fs = std::filesystem;

namespace {

Schema schema_from_json(const Json& j) {
  Schema schema;
  for (const auto& field : j) {
    if (!field.is_array() || field.size() != 2)
      throw ConfigError("schema entries must be [name, kind] pairs");
    schema.push_back({field[0].get<std::string>(), kind_from_name(field[1].get<std::string>())});
  }
  return schema;
}

Json schema_to_json(const Schema& schema) {
  Json j = Json::array();
  for (const auto& field : schema) j.push_back({field.name, kind_name(field.kind)});
  return j;
}

GroupByItem groupby_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 3)
    throw ConfigError("groupby entries must be [key, value, stat] triples");
  GroupByItem item;
  item.key = j[0].get<std::string>();
  item.value = j[1].get<std::string>();
  item.stat = agg_stat_from_name(j[2].get<std::string>());
  return item;
}

template <typename T>
void read_field(const Json& j, const char* name, T& out) {
  if (j.contains(name)) out = j.at(name).get<T>();
}

void read_gbdt_params(const Json& j, GBDTParams& params) {
  read_field(j, "num_trees", params.num_trees);
  read_field(j, "learning_rate", params.learning_rate);
  read_field(j, "max_leaves", params.max_leaves);
  read_field(j, "min_data_in_leaf", params.min_data_in_leaf);
  read_field(j, "min_child_hessian", params.min_child_hessian);
  read_field(j, "lambda_l2", params.lambda_l2);
  read_field(j, "gamma", params.gamma);
  read_field(j, "max_bins", params.max_bins);
  read_field(j, "feature_fraction", params.feature_fraction);
  read_field(j, "bagging_fraction", params.bagging_fraction);
}

std::string fnv_hex(const std::string& bytes) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%08x", fnv1a32(bytes));
  return buf;
}

void ensure_out_dir(const PipelineConfig& config) {
  std::error_code ec;
  fs::create_directories(config.out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory: " + config.out_dir);
}

std::string out_path(const PipelineConfig& config, const std::string& file) {
  return (fs::path(config.out_dir) / file).string();
}

void write_manifest(const PipelineConfig& config, const std::string& command,
                    const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs) {
  Json m;
  m["command"] = command;
  m["inputs"] = inputs;
  m["outputs"] = outputs;
  m["config_hash"] = fnv_hex(config.config_text);
  m["seed"] = config.seed;
  save_document(out_path(config, "manifest.json"), "manifest", std::move(m));
}

Schema resolve_schema(const PipelineConfig& config, const std::string& role,
                      const std::string& path) {
  auto it = config.schemas.find(role);
  if (it != config.schemas.end()) return it->second;
  std::string sidecar = path + ".schema.json";
  if (fs::exists(sidecar)) return schema_from_json(load_document(sidecar, "schema"));
  throw ConfigError("no schema for '" + role + "': provide schemas." + role +
                    " in the config or a " + sidecar + " sidecar");
}

Frame load_frame(const PipelineConfig& config, const std::string& role, const std::string& path) {
  if (path.empty()) throw ConfigError("config is missing the '" + role + "' input path");
  CsvOptions options;
  options.key = config.key;
  Frame frame = read_csv(path, resolve_schema(config, role, path), options);
  if (!config.key.empty() && !frame.has(config.key))
    throw DataError(path + ": key column '" + config.key + "' not present");
  frame.check();
  return frame;
}

void write_frame(const Frame& frame, const std::string& path) {
  write_csv(frame, path);
  save_document(path + ".schema.json", "schema", schema_to_json(schema_of(frame)));
}

std::vector<std::string> learner_columns(const Frame& frame, const PipelineConfig& config) {
  std::vector<std::string> cols;
  for (const auto& c : frame.columns) {
    if (c.kind != ColumnKind::Numeric) continue;
    if (c.name == config.key || c.name == config.label || c.name == "pu_label") continue;
    cols.push_back(c.name);
  }
  return cols;
}

}  // namespace

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  Json j;
  try {
    j = Json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(path + ": malformed config: " + e.what());
  }

  PipelineConfig config;
  config.config_text = text;
  read_field(j, "train", config.train_path);
  read_field(j, "test", config.test_path);
  read_field(j, "positives", config.positives_path);
  read_field(j, "unlabeled", config.unlabeled_path);
  read_field(j, "model", config.model_path);
  read_field(j, "key", config.key);
  read_field(j, "label", config.label);
  read_field(j, "out", config.out_dir);
  read_field(j, "seed", config.seed);
  read_field(j, "threads", config.num_threads);
  if (config.num_threads < 1) throw ConfigError("threads must be >= 1");

  if (j.contains("schemas")) {
    for (const auto& [role, schema] : j.at("schemas").items())
      config.schemas[role] = schema_from_json(schema);
  }

  if (j.contains("features")) {
    const Json& f = j.at("features");
    read_field(f, "corr_threshold", config.corr_threshold);
    read_field(f, "date_cols", config.date_cols);
    read_field(f, "text_cols", config.text_cols);
    read_field(f, "text_dim", config.text_dim);
    read_field(f, "use_idf", config.use_idf);
    read_field(f, "single_feature_filter", config.single_feature_filter);
    read_field(f, "cv_threshold", config.feature_cv_threshold);
    read_field(f, "null_groups_by_count", config.null_groups_by_count);
    if (f.contains("cross")) {
      for (const auto& entry : f.at("cross"))
        config.derivation.cross.push_back(entry.get<std::vector<std::string>>());
    }
    if (f.contains("count_encode"))
      config.derivation.count_encode = f.at("count_encode").get<std::vector<std::string>>();
    if (f.contains("groupby")) {
      for (const auto& entry : f.at("groupby"))
        config.derivation.groupby.push_back(groupby_from_json(entry));
    }
  }
  if (!(config.corr_threshold > 0.0 && config.corr_threshold <= 1.0))
    throw ConfigError("corr_threshold must be in (0, 1]");

  if (j.contains("gbdt")) read_gbdt_params(j.at("gbdt"), config.gbdt);
  config.gbdt.seed = config.seed;
  config.gbdt.num_threads = config.num_threads;
  config.gbdt.validate();

  if (j.contains("eval")) {
    const Json& e = j.at("eval");
    read_field(e, "k_folds", config.k_folds);
    read_field(e, "auc_target", config.auc_target);
    read_field(e, "max_drops", config.max_drops);
  }
  if (config.k_folds < 2) throw ConfigError("k_folds must be >= 2");

  if (j.contains("pu")) {
    const Json& p = j.at("pu");
    read_field(p, "method", config.pu_method);
    read_field(p, "rounds", config.pu_rounds);
    read_field(p, "neg_ratio", config.neg_ratio);
    read_field(p, "spy_frac", config.spy_frac);
    read_field(p, "spy_quantile", config.spy_quantile);
    read_field(p, "calibrate", config.calibrate);
    read_field(p, "holdout_frac", config.holdout_frac);
    read_field(p, "top_k", config.top_k);
  }
  if (config.pu_method != "bagging" && config.pu_method != "spy")
    throw ConfigError("pu.method must be 'bagging' or 'spy'");

  if (j.contains("synth")) {
    const Json& s = j.at("synth");
    read_field(s, "n_rows", config.synth.n_rows);
    read_field(s, "n_numeric", config.synth.n_numeric);
    read_field(s, "n_categorical", config.synth.n_categorical);
    read_field(s, "class_sep", config.synth.class_sep);
    read_field(s, "positive_rate", config.synth.positive_rate);
    read_field(s, "drift_feature", config.synth.drift_feature);
    read_field(s, "drift_shift", config.synth.drift_shift);
    read_field(s, "censor_c", config.synth.censor_c);
  }
  config.synth.seed = config.seed;  // one seed governs the whole run
  return config;
}

MatrixAssembler MatrixAssembler::fit(const Frame& frame, const PipelineConfig& config) {
  MatrixAssembler assembler;
  assembler.numeric_cols = learner_columns(frame, config);
  for (const auto& name : config.text_cols) {
    const Column& c = frame.at(name);
    if (c.kind != ColumnKind::Text) throw DataError("text column expected: " + name);
    TextBlock block;
    block.column = name;
    block.dim = config.text_dim;
    block.use_idf = config.use_idf;
    if (config.use_idf) {
      std::vector<SparseVector> corpus;
      corpus.reserve(frame.n_rows);
      for (std::size_t r = 0; r < frame.n_rows; ++r)
        corpus.push_back(hashing_tf(c.missing[r] ? std::vector<std::string>{} : c.texts[r],
                                    config.text_dim));
      block.idf = idf_fit(corpus, config.text_dim);
    }
    assembler.text_blocks.push_back(std::move(block));
  }
  return assembler;
}

DesignMatrix MatrixAssembler::apply(const Frame& frame) const {
  std::vector<SparseBlock> blocks;
  for (const auto& block : text_blocks) {
    const Column& c = frame.at(block.column);
    if (c.kind != ColumnKind::Text) throw DataError("text column expected: " + block.column);
    SparseBlock sb;
    sb.prefix = "tf(" + block.column + ")";
    sb.dim = block.dim;
    for (std::size_t r = 0; r < frame.n_rows; ++r) {
      SparseVector v =
          hashing_tf(c.missing[r] ? std::vector<std::string>{} : c.texts[r], block.dim);
      sb.rows.push_back(block.use_idf ? idf_transform(block.idf, v) : std::move(v));
    }
    blocks.push_back(std::move(sb));
  }
  return assemble(frame, numeric_cols, blocks);
}

Json MatrixAssembler::to_json() const {
  Json j;
  j["numeric_cols"] = numeric_cols;
  j["text_blocks"] = Json::array();
  for (const auto& block : text_blocks) {
    Json b;
    b["column"] = block.column;
    b["dim"] = block.dim;
    b["use_idf"] = block.use_idf;
    if (block.use_idf) {
      b["doc_count"] = block.idf.doc_count;
      b["idf"] = block.idf.idf;
    }
    j["text_blocks"].push_back(std::move(b));
  }
  return j;
}

MatrixAssembler MatrixAssembler::from_json(const Json& j) {
  MatrixAssembler assembler;
  assembler.numeric_cols = j.at("numeric_cols").get<std::vector<std::string>>();
  for (const auto& b : j.at("text_blocks")) {
    TextBlock block;
    block.column = b.at("column").get<std::string>();
    block.dim = b.at("dim").get<std::uint32_t>();
    block.use_idf = b.at("use_idf").get<bool>();
    if (block.use_idf) {
      block.idf.dim = block.dim;
      block.idf.doc_count = b.at("doc_count").get<std::size_t>();
      block.idf.idf = b.at("idf").get<std::vector<double>>();
    }
    assembler.text_blocks.push_back(std::move(block));
  }
  return assembler;
}

std::vector<int> read_labels(const Frame& frame, const std::string& label) {
  if (label.empty()) throw ConfigError("config is missing the 'label' column name");
  const Column& c = frame.at(label);
  std::vector<int> labels(frame.n_rows);
  for (std::size_t i = 0; i < frame.n_rows; ++i) {
    if (c.missing[i]) throw DataError("label column has a missing entry at row " +
                                      std::to_string(i + 1));
    double v;
    if (c.kind == ColumnKind::Numeric) {
      v = c.nums[i];
    } else if (c.kind == ColumnKind::Categorical) {
      v = c.cats[i] == "1" ? 1.0 : c.cats[i] == "0" ? 0.0 : -1.0;
    } else {
      throw DataError("label column must be numeric or categorical");
    }
    if (v != 0.0 && v != 1.0)
      throw DataError("label column must hold 0/1 values, row " + std::to_string(i + 1));
    labels[i] = static_cast<int>(v);
  }
  return labels;
}

void cmd_explore(const PipelineConfig& config) {
  ensure_out_dir(config);
  std::vector<std::string> inputs, outputs;
  for (const auto& [role, path] : std::initializer_list<std::pair<std::string, std::string>>{
           {"train", config.train_path}, {"test", config.test_path}}) {
    if (path.empty()) continue;
    Frame frame = load_frame(config, role, path);
    inputs.push_back(path);

    Json report;
    report["rows"] = frame.n_rows;
    report["columns"] = Json::array();
    for (const ColumnSummary& s : summary_stats(frame)) {
      Json c;
      c["name"] = s.name;
      c["kind"] = kind_name(s.kind);
      if (s.numeric) {
        c["count"] = s.numeric->count;
        c["missing"] = s.numeric->missing;
        c["all_missing"] = s.numeric->count == 0;
        if (s.numeric->mean) c["mean"] = *s.numeric->mean;
        if (s.numeric->min) c["min"] = *s.numeric->min;
        if (s.numeric->max) c["max"] = *s.numeric->max;
        if (s.numeric->std_dev) c["std"] = *s.numeric->std_dev;
      }
      if (s.categorical) {
        c["count"] = s.categorical->count;
        c["missing"] = s.categorical->missing;
        c["all_missing"] = s.categorical->count == 0;
        c["distinct"] = s.categorical->distinct;
        Json top = Json::array();
        for (const auto& [value, count] : s.categorical->top)
          top.push_back({{"value", value}, {"count", count}});
        c["top"] = std::move(top);
      }
      report["columns"].push_back(std::move(c));
    }
    NullPatternGroups null_groups = null_pattern_groups(frame, config.null_groups_by_count);
    report["null_groups"] = Json::array();
    for (std::size_t g = 0; g < null_groups.groups.size(); ++g)
      report["null_groups"].push_back(
          {{"columns", null_groups.groups[g]},
           {"complete", static_cast<int>(g) == null_groups.complete_group}});

    std::string out_file = out_path(config, "explore_" + role + ".json");
    save_document(out_file, "summary_report", std::move(report));
    outputs.push_back(out_file);
  }
  if (inputs.empty()) throw ConfigError("explore needs a 'train' (and optionally 'test') input");
  write_manifest(config, "explore", inputs, outputs);
}

void cmd_features(const PipelineConfig& config) {
  ensure_out_dir(config);
  Frame train = load_frame(config, "train", config.train_path);
  std::optional<Frame> test;
  if (!config.test_path.empty()) test = load_frame(config, "test", config.test_path);

  FeatureReport report;

  // 1. Date decomposition.
  std::vector<std::string> date_cols = config.date_cols;
  if (date_cols.empty()) {
    for (const auto& c : train.columns)
      if (c.kind == ColumnKind::Date) date_cols.push_back(c.name);
  }
  for (const auto& name : date_cols) {
    train = decompose_dates(train, name);
    if (test && test->has(name)) *test = decompose_dates(*test, name);
  }

  // 2. Null-pattern grouping (reported) and correlation grouping (drops).
  report.null_groups = null_pattern_groups(train, config.null_groups_by_count);
  std::vector<std::string> candidates = learner_columns(train, config);
  if (candidates.size() >= 2) {
    std::vector<double> matrix = correlation_matrix(train, candidates);
    report.corr_groups =
        correlation_groups(matrix, candidates, config.corr_threshold, train);
    for (const CorrGroup& group : report.corr_groups) {
      for (const std::string& member : group.members) {
        if (member == group.representative) continue;
        report.dropped.emplace_back(member, "corr_group");
        train.drop(member);
        if (test && test->has(member)) test->drop(member);
      }
    }
  }

  // 3. Category crossing; crosses are count-encoded below so they reach the
  // learners as numerics.
  std::vector<std::string> count_targets = config.derivation.count_encode;
  for (const auto& columns : config.derivation.cross) {
    train = cross_categories(train, columns);
    if (test) *test = cross_categories(*test, columns);
    count_targets.push_back(cross_name(columns));
  }

  // 4. Count encoding, fit on train only.
  for (const auto& name : count_targets) {
    CountEncoder encoder = CountEncoder::fit(train, name);
    train = encoder.apply(train);
    if (test) *test = encoder.apply(*test);
  }

  // 5. Group-by derived features, fit on train only.
  for (const auto& item : config.derivation.groupby) {
    GroupByEncoder encoder = GroupByEncoder::fit(train, item);
    train = encoder.apply(train);
    if (test) *test = encoder.apply(*test);
  }

  // 6. Single-feature CV filter.
  if (config.single_feature_filter && !config.label.empty() && train.has(config.label)) {
    std::vector<int> labels = read_labels(train, config.label);
    std::vector<std::string> features = learner_columns(train, config);
    if (!features.empty()) {
      MatrixAssembler plain;
      plain.numeric_cols = features;
      DesignMatrix m = plain.apply(train);
      GBDTParams params = config.gbdt;
      FeatureCvReport cv = single_feature_cv(m, labels, config.k_folds,
                                             config.feature_cv_threshold, config.seed, params);
      for (const FeatureCvEntry& entry : cv.features) {
        if (entry.kept) continue;
        report.dropped.emplace_back(entry.name, "single_feature_cv");
        train.drop(entry.name);
        if (test && test->has(entry.name)) test->drop(entry.name);
      }
    }
  }

  report.kept = learner_columns(train, config);

  std::string train_out = out_path(config, "engineered_train.csv");
  write_frame(train, train_out);
  std::vector<std::string> outputs{train_out};
  if (test) {
    std::string test_out = out_path(config, "engineered_test.csv");
    write_frame(*test, test_out);
    outputs.push_back(test_out);
  }
  std::string report_out = out_path(config, "feature_report.json");
  save_document(report_out, "feature_report", feature_report_to_json(report));
  outputs.push_back(report_out);

  std::vector<std::string> inputs{config.train_path};
  if (test) inputs.push_back(config.test_path);
  write_manifest(config, "features", inputs, outputs);
}

void cmd_adversarial(const PipelineConfig& config) {
  ensure_out_dir(config);
  Frame train = load_frame(config, "train", config.train_path);
  Frame test = load_frame(config, "test", config.test_path);
  MatrixAssembler assembler = MatrixAssembler::fit(train, config);
  DesignMatrix train_m = assembler.apply(train);
  DesignMatrix test_m = assembler.apply(test);

  AdversarialReport report = adversarial_drop(train_m, test_m, config.gbdt, config.auc_target,
                                              config.max_drops, config.k_folds, config.seed);
  Json j;
  j["mean_auc"] = report.mean_auc;
  j["fold_aucs"] = report.fold_aucs;
  j["ranking"] = Json::array();
  for (const auto& [name, gain] : report.ranking)
    j["ranking"].push_back({{"feature", name}, {"gain", gain}});
  j["drop_trace"] = Json::array();
  for (const auto& [name, mean_auc] : report.drop_trace)
    j["drop_trace"].push_back({{"dropped", name}, {"mean_auc", mean_auc}});
  std::string out_file = out_path(config, "adversarial_report.json");
  save_document(out_file, "adversarial_report", std::move(j));
  write_manifest(config, "adversarial", {config.train_path, config.test_path}, {out_file});
}

ModelComparison compare_models(const DesignMatrix& matrix, const std::vector<int>& labels, int k,
                               std::uint64_t seed, const GBDTParams& params) {
  ModelComparison result;
  auto run = [&](const std::string& name, const Learner& learner) {
    CvResult cv = cross_validate(learner, matrix, labels, k, seed);
    result.model.push_back(name);
    result.f1.push_back(cv.mean_valid_f1);
    result.auc.push_back(cv.mean_valid_auc);
  };
  run("gbdt", make_gbdt_learner(params));
  run("naive_bayes", [](const DesignMatrix& train, const std::vector<int>& train_labels,
                        std::uint64_t, const DesignMatrix& valid) {
    NaiveBayesModel model = nb_train(train, train_labels);
    return std::make_pair(nb_predict(model, train), nb_predict(model, valid));
  });
  run("decision_tree", [](const DesignMatrix& train, const std::vector<int>& train_labels,
                          std::uint64_t, const DesignMatrix& valid) {
    DecisionTreeModel model = tree_train(train, train_labels);
    return std::make_pair(tree_predict(model, train), tree_predict(model, valid));
  });
  run("random_forest", [](const DesignMatrix& train, const std::vector<int>& train_labels,
                          std::uint64_t fold_seed, const DesignMatrix& valid) {
    ForestParams fp;
    fp.num_trees = 100;
    fp.seed = fold_seed;
    RandomForestModel model = forest_train(train, train_labels, fp);
    return std::make_pair(forest_predict(model, train), forest_predict(model, valid));
  });
  run("logistic_regression", [](const DesignMatrix& train, const std::vector<int>& train_labels,
                                std::uint64_t, const DesignMatrix& valid) {
    LogisticModel model = lr_train(train, train_labels);
    return std::make_pair(lr_predict(model, train), lr_predict(model, valid));
  });
  return result;
}

void cmd_cv(const PipelineConfig& config) {
  ensure_out_dir(config);
  Frame train = load_frame(config, "train", config.train_path);
  std::vector<int> labels = read_labels(train, config.label);
  MatrixAssembler assembler = MatrixAssembler::fit(train, config);
  DesignMatrix matrix = assembler.apply(train);

  ModelComparison cmp = compare_models(matrix, labels, config.k_folds, config.seed, config.gbdt);

  std::printf("%-22s %10s %10s\n", "model", "f1", "auc");
  Json j;
  j["models"] = Json::array();
  for (std::size_t i = 0; i < cmp.model.size(); ++i) {
    std::printf("%-22s %10.4f %10.4f\n", cmp.model[i].c_str(), cmp.f1[i], cmp.auc[i]);
    j["models"].push_back(
        {{"model", cmp.model[i]}, {"f1", cmp.f1[i]}, {"auc", cmp.auc[i]}});
  }
  std::string out_file = out_path(config, "cv_report.json");
  save_document(out_file, "cv_report", std::move(j));
  write_manifest(config, "cv", {config.train_path}, {out_file});
}

void cmd_train(const PipelineConfig& config) {
  ensure_out_dir(config);
  Frame train = load_frame(config, "train", config.train_path);
  std::vector<int> labels = read_labels(train, config.label);
  MatrixAssembler assembler = MatrixAssembler::fit(train, config);
  DesignMatrix matrix = assembler.apply(train);

  GBDTModel model = gbdt_train(config.gbdt, matrix, labels);
  Json payload = gbdt_model_to_json(model);
  payload["assembler"] = assembler.to_json();
  std::string out_file = out_path(config, "model.json");
  save_document(out_file, "gbdt_model", std::move(payload));
  write_manifest(config, "train", {config.train_path}, {out_file});
}

void write_ranked_csv(const TopKResult& top, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write file: " + path);
  out << "id,score,rank\n";
  char buf[40];
  for (const TopKEntry& entry : top.entries) {
    std::snprintf(buf, sizeof(buf), "%.17g", entry.score);
    out << entry.id << ',' << buf << ',' << entry.rank << '\n';
  }
  if (!out) throw DataError("write failed: " + path);
}

void cmd_predict(const PipelineConfig& config) {
  ensure_out_dir(config);
  if (config.model_path.empty()) throw ConfigError("predict needs a 'model' path");
  Json payload = load_document(config.model_path, "gbdt_model");
  GBDTModel model = gbdt_model_from_json(payload);
  MatrixAssembler assembler = MatrixAssembler::from_json(payload.at("assembler"));

  Frame test = load_frame(config, "test", config.test_path);
  if (config.key.empty()) throw ConfigError("predict needs the 'key' column name");
  const Column& ids = test.at(config.key);
  DesignMatrix matrix = assembler.apply(test);
  std::vector<double> scores = gbdt_predict(model, matrix);

  PUResult scored;
  scored.scores.resize(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    scored.scores[i].id = ids.cats[i];
    scored.scores[i].score = scores[i];
  }
  TopKResult ranked = rank_top_k(scored, scores.empty() ? 1 : scores.size());
  std::string out_file = out_path(config, "predictions.csv");
  write_ranked_csv(ranked, out_file);
  write_manifest(config, "predict", {config.model_path, config.test_path}, {out_file});
}

void cmd_pu(const PipelineConfig& config) {
  ensure_out_dir(config);
  Frame positives = load_frame(config, "positives", config.positives_path);
  Frame unlabeled = load_frame(config, "unlabeled", config.unlabeled_path);
  if (config.key.empty()) throw ConfigError("pu needs the 'key' column name");

  MatrixAssembler assembler = MatrixAssembler::fit(unlabeled, config);
  PUDataset data;
  data.positives = assembler.apply(positives);
  data.unlabeled = assembler.apply(unlabeled);
  data.positive_ids = positives.at(config.key).cats;
  data.unlabeled_ids = unlabeled.at(config.key).cats;

  PUResult result;
  if (config.pu_method == "spy") {
    result = spy_two_step(data, config.gbdt, config.spy_frac, config.spy_quantile, config.seed);
  } else {
    result = bagging_pu(data, config.gbdt, config.pu_rounds, config.neg_ratio, config.seed);
  }
  if (config.calibrate) {
    result.calibration_c = calibrate_prior(data, config.gbdt, config.holdout_frac, config.seed);
    result.calibrated = true;
  }

  TopKResult top = rank_top_k(result, config.top_k);
  std::string topk_file = out_path(config, "top_k.csv");
  write_ranked_csv(top, topk_file);

  Json j;
  j["method"] = config.pu_method;
  j["n_positives"] = data.positives.n_rows;
  j["n_unlabeled"] = data.unlabeled.n_rows;
  j["k"] = top.entries.size();
  j["short_list"] = top.short_list;
  j["spy_fallback"] = result.spy_fallback;
  if (result.calibrated) j["calibration_c"] = result.calibration_c;
  std::size_t fallback_rows = 0;
  for (const PUScore& s : result.scores) fallback_rows += s.in_bag_fallback ? 1 : 0;
  j["in_bag_fallback_rows"] = fallback_rows;
  std::string report_file = out_path(config, "pu_report.json");
  save_document(report_file, "pu_report", std::move(j));
  write_manifest(config, "pu", {config.positives_path, config.unlabeled_path},
                 {topk_file, report_file});
}

void cmd_synth(const PipelineConfig& config) {
  ensure_out_dir(config);
  SynthData data = generate(config.synth);

  Frame train = data.train;
  {
    std::vector<double> labels(train.n_rows), observed(train.n_rows);
    for (std::size_t i = 0; i < train.n_rows; ++i) {
      labels[i] = data.train_true[i];
      observed[i] = data.train_observed[i];
    }
    train.add(Column::numeric("label", std::move(labels)));
    train.add(Column::numeric("pu_label", std::move(observed)));
  }
  Frame test = data.test;
  {
    std::vector<double> labels(test.n_rows);
    for (std::size_t i = 0; i < test.n_rows; ++i) labels[i] = data.test_true[i];
    test.add(Column::numeric("label", std::move(labels)));
  }

  // PU view: observed positives vs everything else, with the labels held out.
  std::vector<std::size_t> pos_rows, unl_rows;
  for (std::size_t i = 0; i < data.train.n_rows; ++i)
    (data.train_observed[i] == 1 ? pos_rows : unl_rows).push_back(i);
  auto subset = [&](const std::vector<std::size_t>& rows) {
    Frame f;
    f.key = data.train.key;
    for (const auto& c : data.train.columns) {
      Column sc;
      sc.name = c.name;
      sc.kind = c.kind;
      for (std::size_t r : rows) {
        sc.missing.push_back(c.missing[r]);
        switch (c.kind) {
          case ColumnKind::Numeric: sc.nums.push_back(c.nums[r]); break;
          case ColumnKind::Categorical: sc.cats.push_back(c.cats[r]); break;
          case ColumnKind::Date: sc.dates.push_back(c.dates[r]); break;
          case ColumnKind::Text: sc.texts.push_back(c.texts[r]); break;
        }
      }
      f.add(std::move(sc));
    }
    return f;
  };

  std::vector<std::string> outputs;
  for (const auto& [name, frame] :
       std::initializer_list<std::pair<std::string, const Frame*>>{
           {"synth_train.csv", &train},
           {"synth_test.csv", &test}}) {
    std::string path = out_path(config, name);
    write_frame(*frame, path);
    outputs.push_back(path);
  }
  Frame pu_pos = subset(pos_rows);
  Frame pu_unl = subset(unl_rows);
  std::string pos_path = out_path(config, "pu_positives.csv");
  std::string unl_path = out_path(config, "pu_unlabeled.csv");
  write_frame(pu_pos, pos_path);
  write_frame(pu_unl, unl_path);
  outputs.push_back(pos_path);
  outputs.push_back(unl_path);

  Json m;
  m["spec"] = {{"n_rows", config.synth.n_rows},
               {"n_numeric", config.synth.n_numeric},
               {"n_categorical", config.synth.n_categorical},
               {"class_sep", config.synth.class_sep},
               {"positive_rate", config.synth.positive_rate},
               {"drift_feature", config.synth.drift_feature},
               {"drift_shift", config.synth.drift_shift},
               {"censor_c", config.synth.censor_c},
               {"seed", config.synth.seed}};
  m["outputs"] = outputs;
  std::string manifest_path = out_path(config, "synth_manifest.json");
  save_document(manifest_path, "synth_manifest", std::move(m));
  write_manifest(config, "synth", {}, outputs);
}

}  // namespace mining
