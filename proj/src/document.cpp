#include "mining/document.hpp"

#include <fstream>

namespace mining {

Json make_document(const std::string& kind, Json payload) {
  Json doc;
  doc["version"] = kDocumentVersion;
  doc["kind"] = kind;
  doc["payload"] = std::move(payload);
  return doc;
}

void save_document(const std::string& path, const std::string& kind, Json payload) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write file: " + path);
  out << make_document(kind, std::move(payload)).dump(2) << '\n';
  if (!out) throw DataError("write failed: " + path);
}

Json load_document(const std::string& path, const std::string& expected_kind) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file: " + path);
  Json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw DataError(path + ": malformed document: " + e.what());
  }
  if (!doc.contains("version") || !doc.contains("kind") || !doc.contains("payload"))
    throw DataError(path + ": not a versioned document");
  if (doc["version"].get<int>() != kDocumentVersion)
    throw DataError(path + ": unsupported document version " +
                    std::to_string(doc["version"].get<int>()));
  if (doc["kind"].get<std::string>() != expected_kind)
    throw DataError(path + ": expected kind '" + expected_kind + "', found '" +
                    doc["kind"].get<std::string>() + "'");
  return doc["payload"];
}

Json gbdt_model_to_json(const GBDTModel& model) {
  Json p;
  const GBDTParams& params = model.params;
  p["params"] = {
      {"num_trees", params.num_trees},
      {"learning_rate", params.learning_rate},
      {"max_leaves", params.max_leaves},
      {"min_data_in_leaf", params.min_data_in_leaf},
      {"min_child_hessian", params.min_child_hessian},
      {"lambda_l2", params.lambda_l2},
      {"gamma", params.gamma},
      {"max_bins", params.max_bins},
      {"feature_fraction", params.feature_fraction},
      {"bagging_fraction", params.bagging_fraction},
      {"seed", params.seed},
  };  // num_threads is an execution setting, not part of the model
  p["base_score"] = model.base_score;
  p["feature_names"] = model.feature_names;
  p["bin_edges"] = model.mapper.edges;
  Json trees = Json::array();
  for (const Tree& tree : model.trees) {
    Json t;
    std::vector<int> feature, threshold, left, right;
    std::vector<int> missing_left;
    std::vector<double> leaf_value, gain;
    for (const TreeNode& node : tree.nodes) {
      feature.push_back(node.feature);
      threshold.push_back(node.threshold_bin);
      missing_left.push_back(node.missing_left ? 1 : 0);
      left.push_back(node.left);
      right.push_back(node.right);
      leaf_value.push_back(node.leaf_value);
      gain.push_back(node.gain);
    }
    t["feature"] = feature;
    t["threshold_bin"] = threshold;
    t["missing_left"] = missing_left;
    t["left"] = left;
    t["right"] = right;
    t["leaf_value"] = leaf_value;
    t["gain"] = gain;
    trees.push_back(std::move(t));
  }
  p["trees"] = std::move(trees);
  return p;
}

GBDTModel gbdt_model_from_json(const Json& p) {
  GBDTModel model;
  const Json& params = p.at("params");
  model.params.num_trees = params.at("num_trees").get<int>();
  model.params.learning_rate = params.at("learning_rate").get<double>();
  model.params.max_leaves = params.at("max_leaves").get<int>();
  model.params.min_data_in_leaf = params.at("min_data_in_leaf").get<int>();
  model.params.min_child_hessian = params.at("min_child_hessian").get<double>();
  model.params.lambda_l2 = params.at("lambda_l2").get<double>();
  model.params.gamma = params.at("gamma").get<double>();
  model.params.max_bins = params.at("max_bins").get<int>();
  model.params.feature_fraction = params.at("feature_fraction").get<double>();
  model.params.bagging_fraction = params.at("bagging_fraction").get<double>();
  model.params.seed = params.at("seed").get<std::uint64_t>();
  model.params.num_threads = 1;
  model.base_score = p.at("base_score").get<double>();
  model.feature_names = p.at("feature_names").get<std::vector<std::string>>();
  model.mapper.edges = p.at("bin_edges").get<std::vector<std::vector<double>>>();
  for (const Json& t : p.at("trees")) {
    Tree tree;
    auto feature = t.at("feature").get<std::vector<int>>();
    auto threshold = t.at("threshold_bin").get<std::vector<int>>();
    auto missing_left = t.at("missing_left").get<std::vector<int>>();
    auto left = t.at("left").get<std::vector<int>>();
    auto right = t.at("right").get<std::vector<int>>();
    auto leaf_value = t.at("leaf_value").get<std::vector<double>>();
    auto gain = t.at("gain").get<std::vector<double>>();
    std::size_t n = feature.size();
    if (threshold.size() != n || missing_left.size() != n || left.size() != n ||
        right.size() != n || leaf_value.size() != n || gain.size() != n)
      throw DataError("gbdt model: ragged tree arrays");
    for (std::size_t i = 0; i < n; ++i) {
      TreeNode node;
      node.feature = feature[i];
      node.threshold_bin = threshold[i];
      node.missing_left = missing_left[i] != 0;
      node.left = left[i];
      node.right = right[i];
      node.leaf_value = leaf_value[i];
      node.gain = gain[i];
      if (node.feature >= static_cast<int>(model.feature_names.size()))
        throw DataError("gbdt model: node references unknown feature");
      tree.nodes.push_back(node);
    }
    model.trees.push_back(std::move(tree));
  }
  return model;
}

void save_gbdt_model(const GBDTModel& model, const std::string& path) {
  save_document(path, "gbdt_model", gbdt_model_to_json(model));
}

GBDTModel load_gbdt_model(const std::string& path) {
  return gbdt_model_from_json(load_document(path, "gbdt_model"));
}

Json feature_report_to_json(const FeatureReport& report) {
  Json p;
  p["null_groups"] = Json::array();
  for (std::size_t i = 0; i < report.null_groups.groups.size(); ++i) {
    Json g;
    g["columns"] = report.null_groups.groups[i];
    g["complete"] = static_cast<int>(i) == report.null_groups.complete_group;
    p["null_groups"].push_back(std::move(g));
  }
  p["corr_groups"] = Json::array();
  for (const CorrGroup& g : report.corr_groups) {
    Json jg;
    jg["members"] = g.members;
    jg["representative"] = g.representative;
    Json edges = Json::array();
    for (const auto& [a, b, r] : g.edges) edges.push_back({{"a", a}, {"b", b}, {"r", r}});
    jg["edges"] = std::move(edges);
    p["corr_groups"].push_back(std::move(jg));
  }
  p["dropped"] = Json::array();
  for (const auto& [column, reason] : report.dropped)
    p["dropped"].push_back({{"column", column}, {"reason", reason}});
  p["kept"] = report.kept;
  return p;
}

}  // namespace mining
