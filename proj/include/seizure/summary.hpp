#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace seizure {

/// Half-open interval [start_s, end_s) of an annotated seizure.
struct SeizureInterval {
  std::string file_name;
  double start_s = 0.0;
  double end_s = 0.0;

  bool operator==(const SeizureInterval&) const = default;
};

struct FileSeizures {
  std::string file_name;
  std::size_t declared_count = 0;
  std::vector<SeizureInterval> intervals;
};

/// Parsed seizure summary, files kept in document order.
struct SeizureSummary {
  std::vector<FileSeizures> files;

  /// nullptr when the file is not mentioned.
  const FileSeizures* find(std::string_view file_name) const;
  std::size_t total_seizures() const;
};

/// Parses the line-oriented summary text ("File Name:", "Number of Seizures
/// in File:", "Seizure[ N] Start/End Time: <s> seconds"). Unrecognised lines
/// are skipped.
SeizureSummary parse_seizure_summary(std::string_view text);

}  // namespace seizure
