#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include "hiht/data.hpp"

namespace hiht {

struct CsvOptions {
  // Unset: a first line whose feature fields are not all numeric is a header.
  std::optional<bool> has_header = false;
  std::optional<std::string> label_column;  // header name; default is the last column
};

// Rows are samples; the label column may hold arbitrary tokens, mapped to
// classes in first-appearance order (class_names keeps the tokens).
Dataset parse_csv(std::istream& in, const CsvOptions& options, const std::string& source = "<stream>");
Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options);

// Shortest round-trip decimal rendering, so load_csv(save_csv(x)) is bit-exact.
std::string to_csv(const Dataset& dataset, bool header);
void save_csv(const Dataset& dataset, const std::filesystem::path& path, bool header);

// Flat "key = value" lines, '#' starts a comment.
std::map<std::string, std::string> parse_key_values(std::istream& in, const std::string& source = "<stream>");
std::map<std::string, std::string> load_key_values(const std::filesystem::path& path);

// 12 significant digits, the precision used in every trace table.
std::string format_number(double value);
// Shortest representation that parses back to the same double.
std::string format_exact(double value);

// FNV-1a over the 17-digit rendering of the matrix and the labels.
std::uint64_t dataset_hash(const Dataset& dataset);

// Writes to a sibling temporary file, then renames over the target.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace hiht
