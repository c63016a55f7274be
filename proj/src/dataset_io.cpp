#include "mrfsl/dataset_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include <fmt/format.h>

namespace mrfsl {
namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    out.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, std::size_t line_no) {
  double x = 0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, x);
  if (s.empty() || ec != std::errc() || ptr != end)
    throw ParseError(fmt::format("line {}: cannot parse '{}' as a number", line_no, s));
  return x;
}

template <typename Int>
Int parse_int(const std::string& s, std::size_t line_no) {
  Int x = 0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, x);
  if (s.empty() || ec != std::errc() || ptr != end)
    throw ParseError(fmt::format("line {}: cannot parse '{}' as an integer", line_no, s));
  return x;
}

}  // namespace

void write_dataset_csv(std::ostream& os, const Dataset& data) {
  fmt::memory_buffer buf;
  const auto& cols = data.columns();
  for (std::size_t v = 0; v < cols.size(); ++v)
    fmt::format_to(std::back_inserter(buf), "{}{}", v ? "," : "", cols[v].name);
  buf.push_back('\n');
  for (std::size_t v = 0; v < cols.size(); ++v) {
    if (v) buf.push_back(',');
    if (cols[v].kind == ColumnKind::Discrete)
      fmt::format_to(std::back_inserter(buf), "d:{}", cols[v].cardinality);
    else
      buf.push_back('c');
  }
  buf.push_back('\n');
  const auto& x = data.values();
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    for (Eigen::Index v = 0; v < x.cols(); ++v) {
      if (v) buf.push_back(',');
      if (cols[static_cast<std::size_t>(v)].kind == ColumnKind::Discrete)
        fmt::format_to(std::back_inserter(buf), "{}", static_cast<int>(x(r, v)));
      else
        fmt::format_to(std::back_inserter(buf), "{}", x(r, v));
    }
    buf.push_back('\n');
  }
  os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

Dataset read_dataset_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ParseError("dataset: missing header row");
  const auto names = split_csv_line(line);
  if (!std::getline(is, line)) throw ParseError("dataset: missing kind row");
  const auto tags = split_csv_line(line);
  if (tags.size() != names.size())
    throw ParseError(fmt::format("dataset: {} names but {} kind tags", names.size(), tags.size()));

  std::vector<ColumnInfo> cols(names.size());
  for (std::size_t v = 0; v < names.size(); ++v) {
    cols[v].name = names[v];
    if (tags[v] == "c") {
      cols[v].kind = ColumnKind::Continuous;
    } else if (tags[v].rfind("d:", 0) == 0) {
      cols[v].kind = ColumnKind::Discrete;
      cols[v].cardinality = parse_int<int>(tags[v].substr(2), 2);
    } else {
      throw ParseError(fmt::format("line 2: unknown kind tag '{}'", tags[v]));
    }
  }

  std::vector<double> flat;
  std::size_t rows = 0;
  std::size_t line_no = 2;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != cols.size())
      throw ParseError(
          fmt::format("line {}: expected {} fields, got {}", line_no, cols.size(), cells.size()));
    for (const auto& c : cells) {
      if (c.empty() || c == "NA" || c == "nan" || c == "NaN")
        throw ParseError(fmt::format("line {}: missing value", line_no));
      flat.push_back(parse_double(c, line_no));
    }
    ++rows;
  }
  if (rows == 0) throw ParseError("dataset: no data rows");
  Eigen::MatrixXd values(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t v = 0; v < cols.size(); ++v)
      values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(v)) = flat[r * cols.size() + v];
  return Dataset(std::move(values), std::move(cols));
}

void save_dataset(const std::filesystem::path& path, const Dataset& data) {
  std::ostringstream os;
  write_dataset_csv(os, data);
  write_file_atomic(path, os.str());
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(fmt::format("cannot open {}", path.string()));
  return read_dataset_csv(in);
}

void write_edge_set(std::ostream& os, const EdgeSet& es) { os << to_string(es); }

std::string to_string(const EdgeSet& es) {
  fmt::memory_buffer buf;
  fmt::format_to(std::back_inserter(buf), "D={}\n", es.d());
  for (auto [i, j] : es.edges()) fmt::format_to(std::back_inserter(buf), "{} {}\n", i, j);
  return fmt::to_string(buf);
}

EdgeSet read_edge_set(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("D=", 0) != 0)
    throw ParseError("edge set: first line must be D=<n_vars>");
  while (!line.empty() && line.back() == '\r') line.pop_back();
  EdgeSet es(parse_int<std::size_t>(line.substr(2), 1));
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string a, b;
    if (!(ss >> a)) continue;
    if (!(ss >> b)) throw ParseError(fmt::format("line {}: expected 'i j'", line_no));
    const auto i = parse_int<std::size_t>(a, line_no);
    const auto j = parse_int<std::size_t>(b, line_no);
    if (i >= j) throw ParseError(fmt::format("line {}: edges must satisfy i < j", line_no));
    es.insert(i, j);
  }
  return es;
}

void save_edge_set(const std::filesystem::path& path, const EdgeSet& es) {
  write_file_atomic(path, to_string(es));
}

EdgeSet load_edge_set(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(fmt::format("cannot open {}", path.string()));
  return read_edge_set(in);
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(fmt::format("cannot write {}", tmp.string()));
    out << content;
    if (!out) throw std::runtime_error(fmt::format("write failed for {}", tmp.string()));
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace mrfsl
