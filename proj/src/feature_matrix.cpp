#include "gesture/feature_matrix.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "gesture/errors.hpp"
#include "gesture/skeleton.hpp"

namespace gesture {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
    std::size_t start = field.find_first_not_of(' ');
    fields.push_back(start == std::string::npos ? std::string() : field.substr(start));
  }
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

std::vector<double> flatten_sequence(const FeatureMatrix& m) { return m.data(); }

std::string feature_matrix_to_csv(const FeatureMatrix& m, std::span<const std::string> header,
                                  bool with_frame_index) {
  if (header.size() != m.cols()) throw DimensionMismatch(m.cols(), header.size());
  std::string out;
  if (with_frame_index) out += "frame,";
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c) out += ',';
    out += header[c];
  }
  out += '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    if (with_frame_index) out += std::to_string(r + 1) + ',';
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) out += ',';
      out += format_double(m(r, c));
    }
    out += '\n';
  }
  return out;
}

FeatureMatrix parse_feature_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw InputError("feature CSV is empty");
  auto header = split_csv_line(line);
  const bool has_frame = !header.empty() && header.front() == "frame";
  const std::size_t cols = header.size() - (has_frame ? 1 : 0);
  if (cols == 0) throw InputError("feature CSV has no feature columns");

  std::vector<double> values;
  std::size_t rows = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw InputError("feature CSV line " + std::to_string(line_no) + ": expected " +
                       std::to_string(header.size()) + " fields, got " + std::to_string(fields.size()));
    for (std::size_t c = has_frame ? 1 : 0; c < fields.size(); ++c) {
      const std::string& f = fields[c];
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc{} || ptr != f.data() + f.size() || f.empty())
        throw InputError("feature CSV line " + std::to_string(line_no) + ": bad number '" + f + "'");
      values.push_back(v);
    }
    ++rows;
  }
  if (rows == 0) throw InputError("feature CSV has no rows");

  FeatureMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = values[r * cols + c];
  return m;
}

FeatureMatrix read_feature_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open feature CSV: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_feature_csv(buf.str());
}

}  // namespace gesture
