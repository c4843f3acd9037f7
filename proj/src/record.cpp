#include "hiht/record.hpp"

#include <cstdio>

#include "hiht/error.hpp"
#include "hiht/io.hpp"

namespace hiht {

using nlohmann::json;

Fingerprint fingerprint(const Dataset& dataset) {
  Fingerprint f;
  f.features = static_cast<long>(dataset.feature_count());
  f.samples = static_cast<long>(dataset.sample_count());
  f.classes = dataset.class_count;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(dataset_hash(dataset)));
  f.hash = buf;
  return f;
}

void to_json(json& j, const Fingerprint& f) {
  j = json{{"features", f.features}, {"samples", f.samples}, {"classes", f.classes}, {"hash", f.hash}};
}

void from_json(const json& j, Fingerprint& f) {
  j.at("features").get_to(f.features);
  j.at("samples").get_to(f.samples);
  j.at("classes").get_to(f.classes);
  j.at("hash").get_to(f.hash);
}

void to_json(json& j, const ResultRecord& r) {
  j = json{{"schema_version", r.schema_version}, {"command", r.command}, {"config", r.config},
           {"dataset", r.dataset},               {"outputs", r.outputs}, {"timings", r.timings}};
}

void from_json(const json& j, ResultRecord& r) {
  if (!j.contains("schema_version")) throw Error(ErrorKind::Parse, "result record lacks schema_version");
  j.at("schema_version").get_to(r.schema_version);
  j.at("command").get_to(r.command);
  r.config = j.at("config");
  j.at("dataset").get_to(r.dataset);
  r.outputs = j.at("outputs");
  r.timings = j.at("timings");
}

std::string serialize(const ResultRecord& record) { return json(record).dump(2) + "\n"; }

ResultRecord parse_record(const std::string& text) {
  try {
    return json::parse(text).get<ResultRecord>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("malformed result record: ") + e.what());
  }
}

json to_json(const SolverConfig& c) {
  json j{{"rho", c.rho},
         {"gamma", c.gamma},
         {"eta", c.eta},
         {"epsilon", c.epsilon},
         {"path_steps", c.path_steps},
         {"max_inner_iterations", c.max_inner_iterations},
         {"seed", c.seed}};
  j["lambda0"] = c.lambda0 ? json(*c.lambda0) : json("auto");
  j["L0"] = c.lipschitz0 ? json(*c.lipschitz0) : json("auto");
  j["max_L"] = c.max_lipschitz ? json(*c.max_lipschitz) : json("auto");
  return j;
}

json summarize(const RegularizationPath& path) {
  json points = json::array();
  for (const PathPoint& p : path.points) {
    points.push_back({{"lambda", p.lambda},
                      {"support_size", p.support_size},
                      {"support", p.support},
                      {"objective", p.objective},
                      {"inner_iterations", p.inner_iterations},
                      {"iht_updates", p.iht_updates},
                      {"final_L", p.final_lipschitz},
                      {"truncated", p.truncated}});
  }
  return json{{"algorithm", to_string(path.algorithm)},
              {"config", to_json(path.config)},
              {"points", std::move(points)},
              {"total_iht_updates", path.total_iht_updates}};
}

namespace {

json curve_json(const CurvePoint& p) {
  json j{{"classifier", p.classifier},
         {"target_count", p.target_count},
         {"mean_accuracy", p.mean_accuracy},
         {"accuracy_std", p.accuracy_std},
         {"mean_feature_count", p.mean_feature_count},
         {"trials", p.trials}};
  j["lambda"] = p.lambda ? json(*p.lambda) : json(nullptr);
  return j;
}

}  // namespace

json summarize(const ExperimentReport& report) {
  json trials = json::array();
  for (const TrialResult& t : report.trials) {
    json j{{"method", t.method},
           {"trial", t.trial},
           {"target_count", t.target_count},
           {"selected_features", t.selected_features},
           {"classifier", t.classifier},
           {"accuracy", t.accuracy}};
    j["lambda"] = t.lambda ? json(*t.lambda) : json(nullptr);
    trials.push_back(std::move(j));
  }
  json curve = json::array();
  for (const CurvePoint& p : report.curve) curve.push_back(curve_json(p));
  json best = json::array();
  for (const CurvePoint& p : report.best) best.push_back(curve_json(p));
  std::vector<std::string> classifiers;
  for (Classifier c : report.config.classifiers) classifiers.emplace_back(to_string(c));
  return json{{"dataset", report.dataset_name},
              {"method", report.method},
              {"seeds", report.seeds},
              {"trials", std::move(trials)},
              {"curve", std::move(curve)},
              {"best", std::move(best)},
              {"mean_accuracy", report.mean_accuracy},
              {"accuracy_std", report.accuracy_std},
              {"mean_feature_count", report.mean_feature_count},
              {"config",
               {{"solver", to_json(report.config.solver)},
                {"lambdas", report.config.lambdas},
                {"feature_counts", report.config.feature_counts},
                {"classifiers", classifiers},
                {"trials", report.config.trials},
                {"seed", report.config.seed},
                {"train_fraction", report.config.train_fraction},
                {"knn_k", report.config.knn_k},
                {"standardize", report.config.standardize}}}};
}

}  // namespace hiht
