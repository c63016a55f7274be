#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "mrfsl/core.hpp"

namespace mrfsl {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Dataset CSV:
//   row 1: variable names
//   row 2: kind tags, `d:<cardinality>` or `c`
//   rows 3..: data
// Continuous values are written in shortest round-trip form.
void write_dataset_csv(std::ostream& os, const Dataset& data);
Dataset read_dataset_csv(std::istream& is);
void save_dataset(const std::filesystem::path& path, const Dataset& data);
Dataset load_dataset(const std::filesystem::path& path);

// Edge-set file: `D=<n>` then one `i j` line per edge, i < j, sorted.
void write_edge_set(std::ostream& os, const EdgeSet& es);
EdgeSet read_edge_set(std::istream& is);
void save_edge_set(const std::filesystem::path& path, const EdgeSet& es);
EdgeSet load_edge_set(const std::filesystem::path& path);

std::string to_string(const EdgeSet& es);

/// Writes `content` to `path` via a temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace mrfsl
