#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"

#include "hiht/cli.hpp"
#include "hiht/error.hpp"
#include "hiht/io.hpp"
#include "hiht/oracle.hpp"
#include "hiht/record.hpp"
#include "hiht/synthetic.hpp"

namespace fs = std::filesystem;
using namespace hiht;

namespace {

std::string parse_error(const std::string& text, const CsvOptions& options = {}) {
  std::istringstream in(text);
  try {
    parse_csv(in, options, "t.csv");
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("hiht_unit_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int cli(const std::vector<std::string>& args, std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  if (err_text) *err_text = err.str();
  return code;
}

std::size_t count_lines(const std::string& text, const std::string& prefix) {
  std::istringstream in(text);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) n += line.rfind(prefix, 0) == 0 ? 1 : 0;
  return n;
}

}  // namespace

TEST_CASE("parse_csv example") {
  std::istringstream in("1.0,2.0,a\n3.0,4.0,b\n5.0,6.0,a\n");
  const Dataset d = parse_csv(in, {});
  CHECK(d.feature_count() == 2);
  CHECK(d.sample_count() == 3);
  CHECK(d.class_count == 2);
  CHECK(d.labels == std::vector<int>{0, 1, 0});
  CHECK(d.class_names == std::vector<std::string>{"a", "b"});
  CHECK(d.features == (Matrix(2, 3) << 1, 3, 5, 2, 4, 6).finished());
}

TEST_CASE("parse_csv headers and label columns") {
  CsvOptions automatic;
  automatic.has_header = std::nullopt;
  std::istringstream in("x,y,class\n1,2,a\n3,4,b\n5,6,b\n");
  const Dataset d = parse_csv(in, automatic);
  CHECK(d.feature_names == std::vector<std::string>{"x", "y"});
  CHECK(d.sample_count() == 3);

  CsvOptions by_name;
  by_name.has_header = true;
  by_name.label_column = "class";
  std::istringstream first("class,x\nu,1\nv,2\nu,3\n");
  const Dataset e = parse_csv(first, by_name);
  CHECK(e.feature_count() == 1);
  CHECK(e.labels == std::vector<int>{0, 1, 0});
}

TEST_CASE("parse_csv errors name the line") {
  CHECK(parse_error("1,2,a\n3,b\n").find("t.csv:2") != std::string::npos);
  CHECK(parse_error("1,2,a\n3,zz,b\n").find("t.csv:2") != std::string::npos);
  CHECK(parse_error("1,2,a\n3,4,b\n5,6,\n").find("t.csv:3") != std::string::npos);
  CHECK(parse_error("").find("no data rows") != std::string::npos);
  CsvOptions named;
  named.has_header = true;
  named.label_column = "nope";
  CHECK(parse_error("a,b\n1,x\n", named).find("nope") != std::string::npos);
}

TEST_CASE("CSV round trip is bit-exact") {
  const SyntheticData s = generate_synthetic({7, 30, 3, 2, 0.1, 3});
  const std::string text = to_csv(s.dataset, true);
  std::istringstream in(text);
  CsvOptions options;
  options.has_header = true;
  const Dataset back = parse_csv(in, options);
  REQUIRE(back.features.rows() == 7);
  for (Eigen::Index j = 0; j < back.features.cols(); ++j)
    for (Eigen::Index i = 0; i < 7; ++i)
      CHECK(std::bit_cast<std::uint64_t>(back.features(i, j)) ==
            std::bit_cast<std::uint64_t>(s.dataset.features(i, j)));
  // Indices follow first appearance in the file; the tokens themselves survive.
  REQUIRE(back.labels.size() == s.dataset.labels.size());
  for (std::size_t j = 0; j < back.labels.size(); ++j)
    CHECK(back.class_names[back.labels[j]] == "c" + std::to_string(s.dataset.labels[j]));
  const std::string again = to_csv(back, true);
  CHECK(again == text);
}

TEST_CASE("format helpers") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(std::stod(format_exact(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("parse_key_values") {
  std::istringstream in("# comment\nrho = 0.5\n\nsteps=12  # trailing\n");
  const auto kv = parse_key_values(in);
  CHECK(kv.at("rho") == "0.5");
  CHECK(kv.at("steps") == "12");
  CHECK(kv.size() == 2);
  std::istringstream bad("rho 0.5\n");
  CHECK_THROWS_AS(parse_key_values(bad), Error);
}

TEST_CASE("synthetic generator") {
  const SyntheticData a = generate_synthetic({50, 150, 3, 3, 0.1, 7});
  const SyntheticData b = generate_synthetic({50, 150, 3, 3, 0.1, 7});
  CHECK(a.dataset.features == b.dataset.features);
  CHECK(a.dataset.labels == b.dataset.labels);
  CHECK(a.support == b.support);
  CHECK(a.support.size() == 3);
  std::size_t nonzero = 0;
  for (Eigen::Index i = 0; i < 50; ++i) nonzero += a.true_weights.row(i).norm() > 0.0 ? 1 : 0;
  CHECK(nonzero == 3);
  for (std::size_t i : a.support) CHECK(a.true_weights.row(static_cast<Eigen::Index>(i)).norm() > 0.0);
  std::vector<int> counts(3, 0);
  for (int l : a.dataset.labels) ++counts[l];
  for (int c : counts) CHECK(c >= 2);
  CHECK_THROWS_AS(generate_synthetic({5, 30, 3, 0, 0.0, 1}), Error);
  CHECK_THROWS_AS(generate_synthetic({5, 30, 3, 6, 0.1, 1}), Error);
}

TEST_CASE("synthetic labels follow the planted model") {
  const SyntheticData s = generate_synthetic({50, 150, 3, 3, 0.1, 8});
  std::mt19937_64 rng(1);
  const Dataset fresh = sample_from_model(s.true_weights, 0.1, 10000, rng);
  CHECK(accuracy(bayes_predict(s.true_weights, fresh.features), fresh.labels) >= 0.9);

  // No noise and every row planted: labels are the argmax exactly.
  const SyntheticData exact = generate_synthetic({6, 60, 3, 6, 0.0, 8});
  CHECK(bayes_predict(exact.true_weights, exact.dataset.features) == exact.dataset.labels);

  // Without planted rows the labels are pure noise.
  const SyntheticData noise = generate_synthetic({20, 90, 3, 0, 1.0, 9});
  const Dataset noise_fresh = sample_from_model(noise.true_weights, 1.0, 6000, rng);
  const double acc = accuracy(bayes_predict(noise.true_weights, noise_fresh.features), noise_fresh.labels);
  CHECK(acc == doctest::Approx(1.0 / 3.0).epsilon(0.15));
}

TEST_CASE("brute-force oracle on the identity design") {
  CenteredData d;
  d.x_centered = Matrix::Identity(2, 2);
  d.y_centered = (Matrix(1, 2) << 2.0, 0.2).finished();
  d.x_mean = Vector::Zero(2);
  d.y_mean = Vector::Zero(1);
  const OracleSolution s = brute_force_oracle(d, 0.5);
  CHECK(s.support == std::vector<std::size_t>{0});
  CHECK(s.objective == doctest::Approx(0.52));
  CHECK(s.weights(0, 0) == doctest::Approx(2.0));

  const SupportEnumeration e(d);
  CHECK(e.support_count() == 4);
  CHECK(e.best_loss_of_size(0) == doctest::Approx(2.02));
  CHECK(e.best_loss_of_size(1) == doctest::Approx(0.02));
  CHECK(e.best_loss_of_size(2) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(e.solve(0.0).support.size() == 2);
  CHECK(e.solve(100.0).support.empty());
}

TEST_CASE("brute-force oracle agrees with dense least squares") {
  std::mt19937_64 rng(31);
  const CenteredData d = center(oracle::random_matrix(5, 20, rng), oracle::random_matrix(2, 20, rng));
  const OracleSolution full = brute_force_oracle(d, 0.0);
  const Matrix gram = d.x_centered * d.x_centered.transpose();
  const Matrix ls = gram.ldlt().solve(d.x_centered * d.y_centered.transpose());
  CHECK((full.weights - ls).cwiseAbs().maxCoeff() < 1e-6);
  // Any lambda: no single support beats the reported optimum.
  for (double lambda : {0.01, 0.3, 2.0}) {
    const OracleSolution s = brute_force_oracle(d, lambda);
    CHECK(s.objective == doctest::Approx(objective_value(s.weights, lambda, d)).epsilon(1e-9));
    CHECK(s.objective <= objective_value(Matrix::Zero(5, 2), lambda, d) + 1e-12);
  }
}

TEST_CASE("brute-force oracle refuses large problems") {
  std::mt19937_64 rng(32);
  const CenteredData d = center(oracle::random_matrix(13, 20, rng), oracle::random_matrix(2, 20, rng));
  try {
    SupportEnumeration e(d);
    FAIL("expected refusal");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Refusal);
  }
}

TEST_CASE("result record round trip") {
  ResultRecord r;
  r.command = "path";
  r.config = {{"rho", 0.7}, {"steps", 30}};
  r.dataset = {4, 10, 2, "0123456789abcdef"};
  r.outputs["x"] = {1, 2, 3};
  r.timings["solve_seconds"] = 0.25;
  const std::string text = serialize(r);
  const ResultRecord back = parse_record(text);
  CHECK(serialize(back) == text);
  CHECK(back.schema_version == kSchemaVersion);
  CHECK(back.dataset.hash == "0123456789abcdef");
  CHECK_THROWS_AS(parse_record("{\"command\": \"x\"}"), Error);
  CHECK_THROWS_AS(parse_record("{not json"), Error);
}

TEST_CASE("cli rejects unknown keys and bad usage") {
  std::string err;
  CHECK(cli({"path", "--set", "bogus=1"}, &err) == kExitUsage);
  CHECK(err.find("bogus") != std::string::npos);
  CHECK(err.find("rho") != std::string::npos);
  CHECK(cli({}, &err) == kExitUsage);
  CHECK(cli({"frobnicate"}, &err) == kExitUsage);
  CHECK(cli({"path", "--data", "/nonexistent/file.csv"}, &err) == kExitRuntime);
}

TEST_CASE("cli commands write their tables") {
  const fs::path dir = scratch("cli");
  const std::string data = (dir / "synth" / "data.csv").string();
  REQUIRE(cli({"synth", "--out", (dir / "synth").string(), "--seed", "3", "--set", "d=10", "--set", "n=60"}) ==
          kExitOk);
  CHECK(fs::exists(dir / "synth" / "support.csv"));
  CHECK(parse_record(slurp(dir / "synth" / "record.json")).command == "synth");

  REQUIRE(cli({"path", "--data", data, "--out", (dir / "path").string(), "--steps", "8"}) == kExitOk);
  CHECK(count_lines(slurp(dir / "path" / "path.csv"), "") == 9);
  CHECK(slurp(dir / "path" / "trace.csv").rfind("point,lambda,iteration,objective", 0) == 0);
  CHECK(fs::exists(dir / "path" / "supports.csv"));

  REQUIRE(cli({"solve", "--data", data, "--out", (dir / "solve").string(), "--algorithm", "ahiht"}) == kExitOk);
  CHECK(fs::exists(dir / "solve" / "weights.csv"));
  REQUIRE(cli({"solve", "--data", data, "--out", (dir / "l21").string(), "--algorithm", "l21", "--set",
               "lambda=0.5"}) == kExitOk);
  CHECK(fs::exists(dir / "l21" / "l21_solution.csv"));

  REQUIRE(cli({"select", "--data", data, "--out", (dir / "select").string(), "--set", "target=3"}) == kExitOk);
  CHECK(fs::exists(dir / "select" / "selected.csv"));
  CHECK(cli({"select", "--data", data, "--out", (dir / "select").string()}) == kExitUsage);

  REQUIRE(cli({"oracle-check", "--data", data, "--out", (dir / "oracle").string(), "--steps", "6"}) == kExitOk);
  CHECK(count_lines(slurp(dir / "oracle" / "oracle.csv"), "") == 7);

  REQUIRE(cli({"evaluate", "--data", data, "--out", (dir / "eval").string(), "--features", "20:400:20", "--set",
               "trials=2"}) == kExitOk);
  const std::string curve = slurp(dir / "eval" / "curve.csv");
  CHECK(count_lines(curve, "knn,") == 20);
  CHECK(count_lines(curve, "softmax,") == 20);

  REQUIRE(cli({"compare", "--data", data, "--out", (dir / "compare").string(), "--features", "2,4", "--steps",
               "10", "--set", "trials=2", "--set", "lambdas=0.01,0.1"}) == kExitOk);
  for (const char* f : {"trace_hiht.csv", "trace_ahiht.csv", "timings.csv", "sparsity.csv", "curves.csv"})
    CHECK(fs::exists(dir / "compare" / f));
  fs::remove_all(dir);
}

TEST_CASE("cli precedence: config file, then --set, then flags") {
  const fs::path dir = scratch("precedence");
  const std::string data = (dir / "data.csv").string();
  save_csv(generate_synthetic({6, 40, 2, 2, 0.1, 1}).dataset, data, true);
  {
    std::ofstream cfg(dir / "run.cfg");
    cfg << "steps = 3\nrho = 0.5\n";
  }
  REQUIRE(cli({"path", "--config", (dir / "run.cfg").string(), "--data", data, "--out", (dir / "a").string()}) ==
          kExitOk);
  CHECK(count_lines(slurp(dir / "a" / "path.csv"), "") == 4);
  REQUIRE(cli({"path", "--config", (dir / "run.cfg").string(), "--set", "steps=5", "--data", data, "--out",
               (dir / "b").string()}) == kExitOk);
  CHECK(count_lines(slurp(dir / "b" / "path.csv"), "") == 6);
  REQUIRE(cli({"path", "--config", (dir / "run.cfg").string(), "--set", "steps=5", "--steps", "2", "--data", data,
               "--out", (dir / "c").string()}) == kExitOk);
  CHECK(count_lines(slurp(dir / "c" / "path.csv"), "") == 3);
  fs::remove_all(dir);
}
