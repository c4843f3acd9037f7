#include "hiht/cli.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "hiht/error.hpp"
#include "hiht/evaluation.hpp"
#include "hiht/io.hpp"
#include "hiht/l21.hpp"
#include "hiht/oracle.hpp"
#include "hiht/record.hpp"
#include "hiht/solver.hpp"
#include "hiht/synthetic.hpp"

namespace hiht {

namespace fs = std::filesystem;
using nlohmann::json;

const std::vector<std::string>& valid_config_keys() {
  static const std::vector<std::string> keys{
      "L0",       "algorithm", "classes",     "classifier", "d",          "data",    "epsilon",
      "eta",      "features",  "gamma",       "header",     "knn_k",      "label_column", "lambda",
      "lambda0",  "lambdas",   "max_L",       "max_d",      "max_inner",  "n",       "name",
      "out",      "rho",       "seed",        "sigma",      "standardize", "steps",  "support_size",
      "target",   "train_fraction", "trials"};
  return keys;
}

namespace {

Error usage(const std::string& message) { return Error(ErrorKind::Usage, message); }

class Settings {
 public:
  explicit Settings(std::map<std::string, std::string> values) : values_(std::move(values)) {
    const auto& keys = valid_config_keys();
    for (const auto& [key, value] : values_) {
      if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
        std::string list;
        for (const auto& k : keys) list += (list.empty() ? "" : ", ") + k;
        throw usage("unknown key '" + key + "'; valid keys: " + list);
      }
    }
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::string text(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  std::string required(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end() || it->second.empty()) throw usage("missing required key '" + key + "'");
    return it->second;
  }

  double number(const std::string& key, double fallback) const {
    return has(key) ? parse_number(key, values_.at(key)) : fallback;
  }

  std::optional<double> number_or_auto(const std::string& key) const {
    if (!has(key) || values_.at(key) == "auto") return std::nullopt;
    return parse_number(key, values_.at(key));
  }

  long integer(const std::string& key, long fallback) const {
    if (!has(key)) return fallback;
    const std::string& v = values_.at(key);
    long out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) throw usage(key + ": not an integer: '" + v + "'");
    return out;
  }

  bool flag(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string& v = values_.at(key);
    if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
    if (v == "off" || v == "false" || v == "0" || v == "no") return false;
    throw usage(key + ": expected on or off, got '" + v + "'");
  }

  std::vector<double> number_list(const std::string& key, std::vector<double> fallback) const {
    if (!has(key)) return fallback;
    std::vector<double> out;
    std::istringstream in(values_.at(key));
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(parse_number(key, item));
    if (out.empty()) throw usage(key + ": empty list");
    return out;
  }

  // "a,b,c" or "start:stop:step"
  std::vector<std::size_t> count_list(const std::string& key, std::vector<std::size_t> fallback) const {
    if (!has(key)) return fallback;
    const std::string& v = values_.at(key);
    std::vector<std::size_t> out;
    if (v.find(':') != std::string::npos) {
      std::vector<double> parts;
      std::istringstream in(v);
      std::string item;
      while (std::getline(in, item, ':')) parts.push_back(parse_number(key, item));
      if (parts.size() != 3 || parts[0] < 1 || parts[2] < 1 || parts[1] < parts[0])
        throw usage(key + ": expected start:stop:step with 1 <= start <= stop, step >= 1");
      for (double c = parts[0]; c <= parts[1]; c += parts[2]) out.push_back(static_cast<std::size_t>(c));
    } else {
      for (double c : number_list(key, {})) {
        if (c < 1 || c != static_cast<double>(static_cast<std::size_t>(c)))
          throw usage(key + ": feature counts must be positive integers");
        out.push_back(static_cast<std::size_t>(c));
      }
    }
    return out;
  }

  json to_json() const { return json(values_); }

 private:
  static double parse_number(const std::string& key, std::string v) {
    v.erase(0, v.find_first_not_of(' '));
    v.erase(v.find_last_not_of(' ') + 1);
    double out = 0.0;
    const char* begin = v.data();
    if (!v.empty() && *begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, v.data() + v.size(), out);
    if (v.empty() || ec != std::errc() || ptr != v.data() + v.size())
      throw usage(key + ": not a number: '" + v + "'");
    return out;
  }

  std::map<std::string, std::string> values_;
};

SolverConfig solver_config(const Settings& s) {
  SolverConfig c;
  c.lambda0 = s.number_or_auto("lambda0");
  c.lipschitz0 = s.number_or_auto("L0");
  c.max_lipschitz = s.number_or_auto("max_L");
  c.rho = s.number("rho", c.rho);
  c.gamma = s.number("gamma", c.gamma);
  c.eta = s.number("eta", c.eta);
  c.epsilon = s.number("epsilon", c.epsilon);
  c.path_steps = static_cast<int>(s.integer("steps", c.path_steps));
  c.max_inner_iterations = static_cast<int>(s.integer("max_inner", c.max_inner_iterations));
  c.seed = static_cast<std::uint64_t>(s.integer("seed", 0));
  c.validate();
  return c;
}

std::vector<Classifier> classifiers(const Settings& s) {
  const std::string v = s.text("classifier", "both");
  if (v == "knn") return {Classifier::Knn};
  if (v == "softmax") return {Classifier::Softmax};
  if (v == "both") return {Classifier::Knn, Classifier::Softmax};
  throw usage("classifier: expected knn, softmax or both, got '" + v + "'");
}

Dataset load_dataset(const Settings& s) {
  CsvOptions options;
  const std::string header = s.text("header", "auto");
  options.has_header = header == "auto" ? std::nullopt : std::optional<bool>(s.flag("header", false));
  if (s.has("label_column") && s.text("label_column", "") != "last") options.label_column = s.text("label_column", "");
  Dataset dataset = load_csv(s.required("data"), options);
  dataset.validate();
  return dataset;
}

CenteredData prepare(const Dataset& dataset, bool standardize) {
  Matrix features = dataset.features;
  if (standardize) features = Standardizer::fit(features).apply(features);
  return center(features, one_hot_encode(dataset.labels, dataset.class_count).values);
}

class Output {
 public:
  explicit Output(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  void table(const std::string& name, const std::string& header, const std::vector<std::string>& rows) {
    std::string content = header + "\n";
    for (const auto& r : rows) content += r + "\n";
    write_file_atomic(dir_ / name, content);
    files_.push_back(name);
  }

  void raw(const std::string& name, const std::string& content) {
    write_file_atomic(dir_ / name, content);
    files_.push_back(name);
  }

  const std::vector<std::string>& files() const { return files_; }
  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

std::string join(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + cells[i];
  return out;
}

std::string join_indices(const std::vector<std::size_t>& idx) {
  std::string out;
  for (std::size_t i = 0; i < idx.size(); ++i) out += (i ? " " : "") + std::to_string(idx[i]);
  return out;
}

Algorithm path_algorithm(const Settings& s) {
  const std::string a = s.text("algorithm", "hiht");
  if (a == "hiht") return Algorithm::Hiht;
  if (a == "ahiht") return Algorithm::Ahiht;
  throw usage("algorithm: this command expects hiht or ahiht, got '" + a + "'");
}

std::vector<std::string> path_rows(const RegularizationPath& path) {
  std::vector<std::string> rows;
  for (std::size_t k = 0; k < path.points.size(); ++k) {
    const PathPoint& p = path.points[k];
    rows.push_back(join({std::to_string(k), format_number(p.lambda), std::to_string(p.support_size),
                         format_number(p.objective), std::to_string(p.inner_iterations),
                         std::to_string(p.iht_updates), format_number(p.final_lipschitz),
                         p.truncated ? "1" : "0"}));
  }
  return rows;
}

constexpr const char* kPathHeader = "point,lambda,support_size,objective,inner_iterations,iht_updates,final_L,truncated";

void print_path(const RegularizationPath& path, std::ostream& out) {
  out << "# " << to_string(path.algorithm) << " path, " << path.points.size() << " points\n" << kPathHeader << "\n";
  for (const auto& row : path_rows(path)) out << row << "\n";
}

std::vector<std::string> weight_rows(const WeightMatrix& w) {
  std::vector<std::string> rows;
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    std::vector<std::string> cells{std::to_string(i)};
    for (Eigen::Index c = 0; c < w.cols(); ++c) cells.push_back(format_number(w(i, c)));
    rows.push_back(join(cells));
  }
  return rows;
}

std::string weight_header(Eigen::Index classes) {
  std::string h = "feature";
  for (Eigen::Index c = 0; c < classes; ++c) h += ",class_" + std::to_string(c);
  return h;
}

std::vector<std::string> trace_rows(const RegularizationPath& path) {
  std::vector<std::string> rows;
  for (std::size_t k = 0; k < path.points.size(); ++k) {
    const PathPoint& p = path.points[k];
    for (std::size_t i = 0; i < p.trace.size(); ++i)
      rows.push_back(join({std::to_string(k), format_number(p.lambda), std::to_string(i), format_number(p.trace[i])}));
  }
  return rows;
}

// One row per accepted update across the whole path (the warm-start entries are skipped).
std::vector<std::string> global_trace_rows(const RegularizationPath& path) {
  std::vector<std::string> rows;
  long iteration = 0;
  for (const PathPoint& p : path.points)
    for (std::size_t i = 1; i < p.trace.size(); ++i)
      rows.push_back(join({std::to_string(++iteration), format_number(p.lambda), format_number(p.trace[i])}));
  return rows;
}

ExperimentConfig experiment_config(const Settings& s, Method method) {
  ExperimentConfig c;
  c.method = method;
  c.solver = solver_config(s);
  c.lambdas = s.number_list("lambdas", c.lambdas);
  c.feature_counts = s.count_list("features", c.feature_counts);
  c.classifiers = classifiers(s);
  c.trials = static_cast<int>(s.integer("trials", c.trials));
  c.seed = static_cast<std::uint64_t>(s.integer("seed", 0));
  c.train_fraction = s.number("train_fraction", c.train_fraction);
  c.knn_k = static_cast<int>(s.integer("knn_k", c.knn_k));
  c.standardize = s.flag("standardize", false);
  return c;
}

std::vector<std::string> curve_rows(const ExperimentReport& report, bool with_method) {
  std::vector<std::string> rows;
  for (const CurvePoint& p : report.curve) {
    std::vector<std::string> cells;
    if (with_method) cells.push_back(report.method);
    cells.insert(cells.end(), {p.classifier, std::to_string(p.target_count), format_number(p.mean_accuracy),
                               format_number(p.accuracy_std), format_number(p.mean_feature_count)});
    rows.push_back(join(cells));
  }
  return rows;
}

std::string dataset_name(const Settings& s) {
  if (s.has("name")) return s.text("name", "");
  return fs::path(s.required("data")).stem().string();
}

// --- commands ---------------------------------------------------------------

void cmd_synth(const Settings& s, Output& out, ResultRecord& record, std::ostream& os) {
  SyntheticSpec spec;
  spec.features = static_cast<int>(s.integer("d", spec.features));
  spec.samples = static_cast<int>(s.integer("n", spec.samples));
  spec.classes = static_cast<int>(s.integer("classes", spec.classes));
  spec.support_size = static_cast<int>(s.integer("support_size", spec.support_size));
  spec.noise_sigma = s.number("sigma", spec.noise_sigma);
  spec.seed = static_cast<std::uint64_t>(s.integer("seed", 0));
  const SyntheticData synth = generate_synthetic(spec);
  out.raw("data.csv", to_csv(synth.dataset, true));
  std::vector<std::string> rows;
  for (std::size_t i : synth.support) rows.push_back(std::to_string(i));
  out.table("support.csv", "feature", rows);
  record.dataset = fingerprint(synth.dataset);
  record.outputs["support"] = synth.support;
  os << "wrote " << (out.dir() / "data.csv").string() << ": d=" << spec.features << " N=" << spec.samples
     << " C=" << spec.classes << " planted support {" << join_indices(synth.support) << "}\n";
}

void cmd_solve(const Settings& s, Output& out, ResultRecord& record, std::ostream& os) {
  const Dataset dataset = load_dataset(s);
  record.dataset = fingerprint(dataset);
  const CenteredData data = prepare(dataset, s.flag("standardize", false));
  const SolverConfig config = solver_config(s);
  if (s.text("algorithm", "hiht") == "l21") {
    const double lambda = s.number("lambda", 0.01);
    const L21Result fit = l21_solve(data, lambda, config);
    const std::size_t nonzero = support_size(fit.weights);
    out.table("l21_solution.csv", "lambda,objective,loss,nonzero_rows,zero_rows,iterations,final_L,truncated",
              {join({format_number(lambda), format_number(fit.objective), format_number(loss(fit.weights, data)),
                     std::to_string(nonzero), std::to_string(fit.weights.rows() - static_cast<long>(nonzero)),
                     std::to_string(fit.iterations), format_number(fit.final_lipschitz), fit.truncated ? "1" : "0"})});
    out.table("weights.csv", weight_header(fit.weights.cols()), weight_rows(fit.weights));
    record.outputs["l21"] = {{"lambda", lambda},         {"objective", fit.objective},
                             {"nonzero_rows", nonzero},  {"iterations", fit.iterations},
                             {"truncated", fit.truncated}, {"support", support(fit.weights)}};
    record.timings["l21_seconds"] = fit.wall_seconds;
    os << "l21 lambda=" << format_number(lambda) << " objective=" << format_number(fit.objective)
       << " nonzero_rows=" << nonzero << " iterations=" << fit.iterations << "\n";
    return;
  }
  const RegularizationPath path = solve_path(path_algorithm(s), data, config);
  out.table("path.csv", kPathHeader, path_rows(path));
  const PathPoint& last = path.points.back();
  out.table("weights.csv", weight_header(last.weights.cols()), weight_rows(last.weights));
  record.outputs["path"] = summarize(path);
  record.outputs["final_bias"] = std::vector<double>(last.bias.data(), last.bias.data() + last.bias.size());
  record.timings["solve_seconds"] = path.wall_seconds;
  print_path(path, os);
}

void cmd_path(const Settings& s, Output& out, ResultRecord& record, std::ostream& os) {
  const Dataset dataset = load_dataset(s);
  record.dataset = fingerprint(dataset);
  const CenteredData data = prepare(dataset, s.flag("standardize", false));
  const RegularizationPath path = solve_path(path_algorithm(s), data, solver_config(s));
  out.table("path.csv", kPathHeader, path_rows(path));
  out.table("trace.csv", "point,lambda,iteration,objective", trace_rows(path));
  std::vector<std::string> rows;
  for (std::size_t k = 0; k < path.points.size(); ++k) {
    const PathPoint& p = path.points[k];
    rows.push_back(join({std::to_string(k), format_number(p.lambda), std::to_string(p.support_size),
                         join_indices(p.support)}));
  }
  out.table("supports.csv", "point,lambda,support_size,features", rows);
  record.outputs["path"] = summarize(path);
  record.timings["solve_seconds"] = path.wall_seconds;
  print_path(path, os);
}

void cmd_select(const Settings& s, Output& out, ResultRecord& record, std::ostream& os) {
  const Dataset dataset = load_dataset(s);
  record.dataset = fingerprint(dataset);
  const CenteredData data = prepare(dataset, s.flag("standardize", false));
  const long target = s.integer("target", 0);
  if (target < 1) throw usage("select needs target >= 1");
  const RegularizationPath path = solve_path(path_algorithm(s), data, solver_config(s));
  const PathPoint& point = select_by_count(path, static_cast<std::size_t>(target));
  const Vector norms = row_norms(point.weights);
  std::vector<std::string> rows;
  for (std::size_t i : point.support) {
    const std::string name = dataset.feature_names.empty() ? "" : dataset.feature_names[i];
    rows.push_back(join({std::to_string(i), name, format_number(norms[static_cast<Eigen::Index>(i)])}));
  }
  out.table("selected.csv", "feature,name,row_norm", rows);
  record.outputs["selected"] = {{"lambda", point.lambda},
                                {"support", point.support},
                                {"support_size", point.support_size},
                                {"objective", point.objective},
                                {"target", target}};
  record.timings["solve_seconds"] = path.wall_seconds;
  os << "lambda=" << format_number(point.lambda) << " support_size=" << point.support_size << " features {"
     << join_indices(point.support) << "}\n";
}

void cmd_evaluate(const Settings& s, Output& out, ResultRecord& record, std::ostream& os) {
  const Dataset dataset = load_dataset(s);
  record.dataset = fingerprint(dataset);
  const ExperimentConfig config = experiment_config(s, parse_method(s.text("algorithm", "hiht")));
  const ExperimentReport report = run_experiment(dataset, dataset_name(s), config);
  out.table("curve.csv", "classifier,count,accuracy,accuracy_std,mean_features", curve_rows(report, false));
  std::vector<std::string> rows;
  for (const TrialResult& t : report.trials)
    rows.push_back(join({std::to_string(t.trial), t.classifier, std::to_string(t.target_count),
                         t.lambda ? format_number(*t.lambda) : "", std::to_string(t.selected_features.size()),
                         format_number(t.accuracy)}));
  out.table("trials.csv", "trial,classifier,count,lambda,selected,accuracy", rows);
  record.outputs["report"] = summarize(report);
  record.timings["mean_train_seconds"] = report.mean_train_seconds;
  for (const CurvePoint& b : report.best)
    os << report.method << " " << b.classifier << ": best accuracy " << format_number(b.mean_accuracy) << " +- "
       << format_number(b.accuracy_std) << " at " << b.target_count << " features (mean selected "
       << format_number(b.mean_feature_count) << ")\n";
}

void cmd_compare(const Settings& s, Output& out, ResultRecord& record, std::ostream& os) {
  const Dataset dataset = load_dataset(s);
  record.dataset = fingerprint(dataset);
  const bool standardize = s.flag("standardize", false);
  const CenteredData data = prepare(dataset, standardize);
  const SolverConfig config = solver_config(s);

  // Convergence traces and timings on the full data.
  const RegularizationPath hiht_path = hiht_solve(data, config);
  const RegularizationPath ahiht_path = ahiht_solve(data, config);
  out.table("trace_hiht.csv", "iteration,lambda,objective", global_trace_rows(hiht_path));
  out.table("trace_ahiht.csv", "iteration,lambda,objective", global_trace_rows(ahiht_path));

  const std::vector<double> lambdas = s.number_list("lambdas", ExperimentConfig{}.lambdas);
  double l21_seconds = 0.0;
  long l21_updates = 0;
  for (double lambda : lambdas) {
    const L21Result fit = l21_solve(data, lambda, config);
    l21_seconds += fit.wall_seconds;
    l21_updates += fit.updates;
  }
  out.table("timings.csv", "method,seconds,updates",
            {join({"hiht", format_number(hiht_path.wall_seconds), std::to_string(hiht_path.total_iht_updates)}),
             join({"ahiht", format_number(ahiht_path.wall_seconds), std::to_string(ahiht_path.total_iht_updates)}),
             join({"l21", format_number(l21_seconds), std::to_string(l21_updates)})});
  record.timings["hiht_seconds"] = hiht_path.wall_seconds;
  record.timings["ahiht_seconds"] = ahiht_path.wall_seconds;
  record.timings["l21_seconds"] = l21_seconds;

  // Exact row sparsity of l2,0 points against l2,1 fits of matched loss.
  std::vector<std::string> sparsity;
  const long d = static_cast<long>(data.feature_count());
  const long max_support = std::min<long>(10, d);
  for (const PathPoint& p : hiht_path.points) {
    if (p.support_size == 0 || static_cast<long>(p.support_size) > max_support) continue;
    const MatchedL21 matched = l21_match_loss(data, loss(p.weights, data), config);
    sparsity.push_back(join({format_number(p.lambda), std::to_string(p.support_size),
                             std::to_string(d - static_cast<long>(p.support_size)), format_number(loss(p.weights, data)),
                             format_number(matched.lambda),
                             std::to_string(d - static_cast<long>(support_size(matched.fit.weights))),
                             format_number(loss(matched.fit.weights, data))}));
  }
  out.table("sparsity.csv", "l20_lambda,l20_support,l20_zero_rows,l20_loss,l21_lambda,l21_zero_rows,l21_loss",
            sparsity);

  // Accuracy-versus-count curves for every method.
  std::vector<std::string> curves;
  json reports = json::object();
  for (Method method : {Method::Hiht, Method::Ahiht, Method::L21, Method::AllFeatures}) {
    const ExperimentReport report = run_experiment(dataset, dataset_name(s), experiment_config(s, method));
    for (auto& row : curve_rows(report, true)) curves.push_back(std::move(row));
    reports[to_string(method)] = summarize(report);
    for (const CurvePoint& b : report.best)
      os << to_string(method) << " " << b.classifier << ": best accuracy " << format_number(b.mean_accuracy)
         << " at " << b.target_count << " features\n";
  }
  out.table("curves.csv", "method,classifier,count,accuracy,accuracy_std,mean_features", curves);
  record.outputs["reports"] = std::move(reports);
  record.outputs["hiht_path"] = summarize(hiht_path);
  record.outputs["ahiht_path"] = summarize(ahiht_path);
  os << "hiht: " << hiht_path.total_iht_updates << " updates in " << format_number(hiht_path.wall_seconds)
     << " s; ahiht: " << ahiht_path.total_iht_updates << " updates in " << format_number(ahiht_path.wall_seconds)
     << " s\n";
}

void cmd_oracle_check(const Settings& s, Output& out, ResultRecord& record, std::ostream& os) {
  const Dataset dataset = load_dataset(s);
  record.dataset = fingerprint(dataset);
  const CenteredData data = prepare(dataset, s.flag("standardize", false));
  const SupportEnumeration oracle(data, static_cast<int>(s.integer("max_d", 12)));
  const RegularizationPath path = solve_path(path_algorithm(s), data, solver_config(s));
  std::vector<std::string> rows;
  json points = json::array();
  double worst = 0.0;
  for (std::size_t k = 0; k < path.points.size(); ++k) {
    const PathPoint& p = path.points[k];
    const OracleSolution best = oracle.solve(p.lambda);
    const double gap = p.objective - best.objective;
    const double rel = best.objective > 0.0 ? gap / best.objective : gap;
    worst = std::max(worst, rel);
    rows.push_back(join({std::to_string(k), format_number(p.lambda), format_number(p.objective),
                         format_number(best.objective), format_number(gap), format_number(rel),
                         join_indices(p.support), join_indices(best.support)}));
    points.push_back({{"lambda", p.lambda}, {"solver", p.objective}, {"oracle", best.objective}, {"gap", gap}});
    os << "lambda=" << format_number(p.lambda) << " solver=" << format_number(p.objective)
       << " oracle=" << format_number(best.objective) << " gap=" << format_number(gap) << "\n";
  }
  out.table("oracle.csv",
            "point,lambda,solver_objective,oracle_objective,gap,relative_gap,solver_support,oracle_support", rows);
  record.outputs["oracle"] = {{"points", std::move(points)}, {"worst_relative_gap", worst}};
  record.timings["solve_seconds"] = path.wall_seconds;
  os << "worst relative gap " << format_number(worst) << "\n";
}

using Command = void (*)(const Settings&, Output&, ResultRecord&, std::ostream&);

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Row-sparse multi-class feature selection by homotopy iterative hard thresholding", "hiht"};
  app.require_subcommand(1);

  struct Flags {
    std::string config, out, seed, algorithm, lambda0, rho, gamma, eta, epsilon, steps, features, classifier,
        standardize, data;
    std::vector<std::string> sets;
  };
  Flags flags;
  const std::vector<std::pair<std::string, Command>> commands{
      {"synth", cmd_synth},     {"solve", cmd_solve},     {"path", cmd_path},
      {"select", cmd_select},   {"evaluate", cmd_evaluate}, {"compare", cmd_compare},
      {"oracle-check", cmd_oracle_check}};
  const std::map<std::string, std::string> descriptions{
      {"synth", "generate a planted-support synthetic dataset"},
      {"solve", "solve the l2,0 path (or a single l2,1 problem) and write the path summary"},
      {"path", "solve the l2,0 path and write per-iteration objective traces and supports"},
      {"select", "pick the path point whose support size is nearest to target"},
      {"evaluate", "repeated stratified-split classification experiment"},
      {"compare", "traces, timings, sparsity and accuracy curves for every method"},
      {"oracle-check", "compare path objectives with the exhaustive-support optimum"}};

  std::vector<std::pair<std::string, std::string*>> key_flags{
      {"out", &flags.out},           {"seed", &flags.seed},         {"algorithm", &flags.algorithm},
      {"lambda0", &flags.lambda0},   {"rho", &flags.rho},           {"gamma", &flags.gamma},
      {"eta", &flags.eta},           {"epsilon", &flags.epsilon},   {"steps", &flags.steps},
      {"features", &flags.features}, {"classifier", &flags.classifier}, {"standardize", &flags.standardize},
      {"data", &flags.data}};

  for (const auto& [name, fn] : commands) {
    CLI::App* sub = app.add_subcommand(name, descriptions.at(name));
    sub->add_option("--config", flags.config, "key=value config file");
    sub->add_option("--out", flags.out, "output directory (default: out)");
    sub->add_option("--seed", flags.seed, "random seed");
    sub->add_option("--algorithm", flags.algorithm, "hiht | ahiht | l21 (evaluate also accepts all)");
    sub->add_option("--lambda0", flags.lambda0, "initial lambda or auto");
    sub->add_option("--rho", flags.rho, "lambda decay in (0,1)");
    sub->add_option("--gamma", flags.gamma, "L inflation factor > 1");
    sub->add_option("--eta", flags.eta, "sufficient-decrease coefficient");
    sub->add_option("--epsilon", flags.epsilon, "inner stopping tolerance");
    sub->add_option("--steps", flags.steps, "homotopy path length");
    sub->add_option("--features", flags.features, "feature counts: a,b,c or start:stop:step");
    sub->add_option("--classifier", flags.classifier, "knn | softmax | both");
    sub->add_option("--standardize", flags.standardize, "on | off");
    sub->add_option("--data", flags.data, "input CSV (rows are samples)");
    sub->add_option("--set", flags.sets, "extra key=value setting (repeatable)");
  }

  std::vector<std::string> argv_storage{"hiht"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  try {
    std::map<std::string, std::string> values;
    if (!flags.config.empty()) values = load_key_values(flags.config);
    for (const auto& item : flags.sets) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw usage("--set expects key=value, got '" + item + "'");
      values[item.substr(0, eq)] = item.substr(eq + 1);
    }
    for (const auto& [key, target] : key_flags)
      if (!target->empty()) values[key] = *target;
    const Settings settings(std::move(values));

    for (const auto& [name, fn] : commands) {
      if (!app.got_subcommand(name)) continue;
      Output output(settings.text("out", "out"));
      ResultRecord record;
      record.command = name;
      record.config = settings.to_json();
      fn(settings, output, record, out);
      record.outputs["files"] = output.files();
      output.raw("record.json", serialize(record));
      return kExitOk;
    }
    throw usage("no command given");
  } catch (const Error& e) {
    err << e.what() << "\n";
    return e.kind() == ErrorKind::Usage ? kExitUsage : kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace hiht
