#include "hiht/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <vector>

#include "hiht/error.hpp"

namespace hiht {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

bool parse_double(const std::string& text, double& value) {
  if (text.empty()) return false;
  const char* begin = text.data();
  const char* end = begin + text.size();
  if (*begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  return ec == std::errc() && ptr == end;
}

}  // namespace

Dataset parse_csv(std::istream& in, const CsvOptions& options, const std::string& source) {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> tokens;
  std::optional<std::size_t> width;
  std::size_t label_index = 0;

  std::string line;
  std::size_t line_no = 0;
  bool header_pending = options.has_header.value_or(false);
  bool detect_header = !options.has_header.has_value();
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    std::vector<std::string> fields = split_fields(line);
    if (detect_header) {
      detect_header = false;
      double unused = 0.0;
      for (std::size_t k = 0; k + 1 < fields.size(); ++k)
        if (!parse_double(fields[k], unused)) header_pending = true;
      if (options.label_column) header_pending = true;
    }
    if (header_pending) {
      header = fields;
      header_pending = false;
      width = fields.size();
      label_index = fields.size() - 1;
      if (options.label_column) {
        std::size_t k = 0;
        while (k < header.size() && header[k] != *options.label_column) ++k;
        if (k == header.size())
          throw Error(ErrorKind::Parse, source + ":" + std::to_string(line_no) + ": no column named '" +
                                            *options.label_column + "'");
        label_index = k;
      }
      continue;
    }
    if (!width) {
      if (options.label_column)
        throw Error(ErrorKind::Parse, source + ": label column by name requires a header");
      width = fields.size();
      label_index = fields.size() - 1;
    }
    if (fields.size() != *width)
      throw Error(ErrorKind::Parse, source + ":" + std::to_string(line_no) + ": expected " + std::to_string(*width) +
                                        " fields, found " + std::to_string(fields.size()));
    if (*width < 2)
      throw Error(ErrorKind::Parse, source + ":" + std::to_string(line_no) + ": need at least one feature column");
    std::vector<double> values;
    values.reserve(fields.size() - 1);
    for (std::size_t k = 0; k < fields.size(); ++k) {
      if (k == label_index) continue;
      double v = 0.0;
      if (!parse_double(fields[k], v))
        throw Error(ErrorKind::Parse, source + ":" + std::to_string(line_no) + ": column " + std::to_string(k + 1) +
                                          ": not a number: '" + fields[k] + "'");
      values.push_back(v);
    }
    if (fields[label_index].empty())
      throw Error(ErrorKind::Parse, source + ":" + std::to_string(line_no) + ": empty label");
    tokens.push_back(fields[label_index]);
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw Error(ErrorKind::Parse, source + ": no data rows");

  Dataset out;
  const auto d = static_cast<Eigen::Index>(rows.front().size());
  const auto n = static_cast<Eigen::Index>(rows.size());
  out.features.resize(d, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < d; ++i)
      out.features(i, j) = rows[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];

  std::unordered_map<std::string, int> classes;
  for (const std::string& token : tokens) {
    auto [it, inserted] = classes.emplace(token, static_cast<int>(out.class_names.size()));
    if (inserted) out.class_names.push_back(token);
    out.labels.push_back(it->second);
  }
  out.class_count = static_cast<int>(out.class_names.size());
  if (!header.empty())
    for (std::size_t k = 0; k < header.size(); ++k)
      if (k != label_index) out.feature_names.push_back(header[k]);
  return out;
}

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  return parse_csv(in, options, path.string());
}

std::string format_exact(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

std::string format_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return buf;
}

std::string to_csv(const Dataset& dataset, bool header) {
  std::ostringstream out;
  const auto d = dataset.feature_count();
  if (header) {
    for (Eigen::Index i = 0; i < d; ++i) {
      if (!dataset.feature_names.empty())
        out << dataset.feature_names[static_cast<std::size_t>(i)];
      else
        out << 'f' << i;
      out << ',';
    }
    out << "label\n";
  }
  for (Eigen::Index j = 0; j < dataset.sample_count(); ++j) {
    for (Eigen::Index i = 0; i < d; ++i) out << format_exact(dataset.features(i, j)) << ',';
    const int c = dataset.labels[static_cast<std::size_t>(j)];
    if (!dataset.class_names.empty())
      out << dataset.class_names[static_cast<std::size_t>(c)];
    else
      out << 'c' << c;
    out << '\n';
  }
  return out.str();
}

void save_csv(const Dataset& dataset, const std::filesystem::path& path, bool header) {
  write_file_atomic(path, to_csv(dataset, header));
}

std::map<std::string, std::string> parse_key_values(std::istream& in, const std::string& source) {
  std::map<std::string, std::string> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::Parse, source + ":" + std::to_string(line_no) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw Error(ErrorKind::Parse, source + ":" + std::to_string(line_no) + ": empty key");
    values[key] = trim(line.substr(eq + 1));
  }
  return values;
}

std::map<std::string, std::string> load_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open config " + path.string());
  return parse_key_values(in, path.string());
}

std::uint64_t dataset_hash(const Dataset& dataset) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](const std::string& s) {
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 0x100000001b3ULL;
    }
  };
  char buf[64];
  for (Eigen::Index j = 0; j < dataset.sample_count(); ++j) {
    for (Eigen::Index i = 0; i < dataset.feature_count(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g,", dataset.features(i, j));
      feed(buf);
    }
    feed(std::to_string(dataset.labels[static_cast<std::size_t>(j)]) + "\n");
  }
  return h;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw Error(ErrorKind::Io, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

}  // namespace hiht
