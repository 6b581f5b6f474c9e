#pragma once

#include <string>

#include <json.hpp>

#include "mining/features.hpp"
#include "mining/gbdt.hpp"

namespace mining {

using Json = nlohmann::json;

// All reports and models share one container: a JSON document with a
// `version` and `kind` field so format evolution stays detectable.
inline constexpr int kDocumentVersion = 1;

Json make_document(const std::string& kind, Json payload);
void save_document(const std::string& path, const std::string& kind, Json payload);
Json load_document(const std::string& path, const std::string& expected_kind);

Json gbdt_model_to_json(const GBDTModel& model);
GBDTModel gbdt_model_from_json(const Json& payload);
void save_gbdt_model(const GBDTModel& model, const std::string& path);
GBDTModel load_gbdt_model(const std::string& path);

Json feature_report_to_json(const FeatureReport& report);

}  // namespace mining
