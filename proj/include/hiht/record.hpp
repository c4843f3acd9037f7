#pragma once

#include <string>

#include "json.hpp"

#include "hiht/evaluation.hpp"
#include "hiht/solver.hpp"

namespace hiht {

inline constexpr int kSchemaVersion = 1;

struct Fingerprint {
  long features = 0;
  long samples = 0;
  int classes = 0;
  std::string hash;  // 16 hex digits
};

Fingerprint fingerprint(const Dataset& dataset);

/// Everything one CLI invocation produced, serialised as a sorted-key JSON tree.
struct ResultRecord {
  int schema_version = kSchemaVersion;
  std::string command;
  nlohmann::json config = nlohmann::json::object();
  Fingerprint dataset;
  nlohmann::json outputs = nlohmann::json::object();
  nlohmann::json timings = nlohmann::json::object();
};

void to_json(nlohmann::json& j, const Fingerprint& f);
void from_json(const nlohmann::json& j, Fingerprint& f);
void to_json(nlohmann::json& j, const ResultRecord& r);
void from_json(const nlohmann::json& j, ResultRecord& r);

std::string serialize(const ResultRecord& record);
// Throws Parse when schema_version is missing or the document is malformed.
ResultRecord parse_record(const std::string& text);

nlohmann::json to_json(const SolverConfig& config);
// Path summary: lambda, support, objective, iteration counts per point.
nlohmann::json summarize(const RegularizationPath& path);
nlohmann::json summarize(const ExperimentReport& report);

}  // namespace hiht
