#include "seizure/feature_csv.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>
#include <vector>

#include "seizure/error.hpp"

namespace seizure {
namespace {

void check_name(const std::string& s) {
  if (s.find_first_of(",\n\r\"") != std::string::npos) {
    throw DataError("identifier '" + s + "' contains a character not allowed in the feature CSV");
  }
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = line.find(',', pos);
    out.push_back(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

double parse_number(std::string_view s, std::size_t line_no) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw DataError("feature CSV line " + std::to_string(line_no) + ": bad number '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

void write_feature_csv(std::ostream& out, const Dataset& data) {
  check_binary_labels(data.X, data.y);
  out << "patient,file,start_s,label";
  for (std::size_t j = 0; j < data.X.cols; ++j) out << ",f" << j;
  out << '\n';
  std::string line;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const RowMeta& m = data.X.meta[i];
    check_name(m.patient);
    check_name(m.file);
    line.clear();
    line += m.patient;
    line += ',';
    line += m.file;
    line += ',';
    line += format_double(m.start_s);
    line += ',';
    line += std::to_string(data.y[i]);
    for (double v : data.X.row(i)) {
      line += ',';
      line += format_double(v);
    }
    line += '\n';
    out << line;
  }
}

Dataset read_feature_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("feature CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line);
  if (header.size() < 4 || header[0] != "patient" || header[1] != "file" || header[2] != "start_s" ||
      header[3] != "label") {
    throw DataError("feature CSV header must start with patient,file,start_s,label");
  }
  const std::size_t d = header.size() - 4;
  for (std::size_t j = 0; j < d; ++j) {
    if (header[4 + j] != "f" + std::to_string(j)) throw DataError("feature CSV column " + std::to_string(4 + j) + " must be f" + std::to_string(j));
  }

  Dataset data{FeatureMatrix(d), {}};
  std::vector<double> row(d);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line);
    if (fields.size() != d + 4) {
      throw DataError("feature CSV line " + std::to_string(line_no) + ": expected " + std::to_string(d + 4) +
                      " fields, got " + std::to_string(fields.size()));
    }
    const double label = parse_number(fields[3], line_no);
    if (label != 0.0 && label != 1.0) throw DataError("feature CSV line " + std::to_string(line_no) + ": label must be 0 or 1");
    for (std::size_t j = 0; j < d; ++j) row[j] = parse_number(fields[4 + j], line_no);
    data.X.append_row(row, RowMeta{std::string(fields[0]), std::string(fields[1]), parse_number(fields[2], line_no)});
    data.y.push_back(static_cast<int>(label));
  }
  return data;
}

void write_feature_csv(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  write_feature_csv(out, data);
  if (!out) throw DataError("failed writing " + path.string());
}

Dataset read_feature_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return read_feature_csv(in);
}

}  // namespace seizure
