#include "seizure/summary.hpp"

#include <charconv>
#include <optional>

#include "seizure/error.hpp"

namespace seizure {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool consume(std::string_view& s, std::string_view prefix) {
  if (!s.starts_with(prefix)) return false;
  s.remove_prefix(prefix.size());
  return true;
}

double parse_seconds(std::string_view s, std::size_t line_no) {
  s = trim(s);
  if (s.ends_with("seconds")) s.remove_suffix(7);
  else if (s.ends_with("secs")) s.remove_suffix(4);
  s = trim(s);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw DataError("summary line " + std::to_string(line_no) + ": cannot parse time '" + std::string(s) + "'");
  }
  return value;
}

enum class Bound { start, end };

// Matches "Seizure Start Time:" and "Seizure <i> Start Time:" (and End).
std::optional<Bound> seizure_time_line(std::string_view& line) {
  std::string_view s = line;
  if (!consume(s, "Seizure")) return std::nullopt;
  s = trim(s);
  while (!s.empty() && s.front() >= '0' && s.front() <= '9') s.remove_prefix(1);
  s = trim(s);
  std::optional<Bound> bound;
  if (consume(s, "Start Time:")) bound = Bound::start;
  else if (consume(s, "End Time:")) bound = Bound::end;
  if (bound) line = s;
  return bound;
}

class Builder {
 public:
  void open_file(std::string name) {
    close_file();
    current_.emplace();
    current_->file_name = std::move(name);
  }

  void declare_count(std::size_t n, std::size_t line_no) {
    require_file(line_no).declared_count = n;
    declared_ = true;
  }

  void start(double t, std::size_t line_no) {
    require_file(line_no);
    if (pending_start_) {
      throw DataError("summary line " + std::to_string(line_no) + ": seizure start without end in " + current_->file_name);
    }
    if (t < 0.0) throw DataError("summary line " + std::to_string(line_no) + ": negative seizure start");
    pending_start_ = t;
  }

  void end(double t, std::size_t line_no) {
    FileSeizures& f = require_file(line_no);
    if (!pending_start_) {
      throw DataError("summary line " + std::to_string(line_no) + ": seizure end without start in " + f.file_name);
    }
    if (!(t > *pending_start_)) {
      throw DataError("invalid seizure interval in " + f.file_name + ": end " + std::to_string(t) +
                      " <= start " + std::to_string(*pending_start_));
    }
    f.intervals.push_back({f.file_name, *pending_start_, t});
    pending_start_.reset();
  }

  SeizureSummary finish() {
    close_file();
    return std::move(summary_);
  }

 private:
  FileSeizures& require_file(std::size_t line_no) {
    if (!current_) throw DataError("summary line " + std::to_string(line_no) + ": seizure data before any 'File Name:'");
    return *current_;
  }

  void close_file() {
    if (!current_) return;
    if (pending_start_) throw DataError("seizure start without end in " + current_->file_name);
    if (!declared_) throw DataError("file " + current_->file_name + " has no 'Number of Seizures in File' line");
    if (current_->declared_count != current_->intervals.size()) {
      throw DataError("seizure count mismatch in " + current_->file_name + ": declared " +
                      std::to_string(current_->declared_count) + ", found " +
                      std::to_string(current_->intervals.size()));
    }
    summary_.files.push_back(std::move(*current_));
    current_.reset();
    declared_ = false;
  }

  SeizureSummary summary_;
  std::optional<FileSeizures> current_;
  std::optional<double> pending_start_;
  bool declared_ = false;
};

}  // namespace

const FileSeizures* SeizureSummary::find(std::string_view file_name) const {
  for (const FileSeizures& f : files) {
    if (f.file_name == file_name) return &f;
  }
  return nullptr;
}

std::size_t SeizureSummary::total_seizures() const {
  std::size_t n = 0;
  for (const FileSeizures& f : files) n += f.intervals.size();
  return n;
}

SeizureSummary parse_seizure_summary(std::string_view text) {
  Builder b;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t eol = text.find('\n');
    std::string_view line = trim(text.substr(0, eol));
    text.remove_prefix(eol == std::string_view::npos ? text.size() : eol + 1);
    ++line_no;

    if (consume(line, "File Name:")) {
      b.open_file(std::string(trim(line)));
    } else if (consume(line, "Number of Seizures in File:")) {
      line = trim(line);
      std::size_t n = 0;
      const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), n);
      if (line.empty() || ec != std::errc{} || ptr != line.data() + line.size()) {
        throw DataError("summary line " + std::to_string(line_no) + ": bad seizure count '" + std::string(line) + "'");
      }
      b.declare_count(n, line_no);
    } else if (const auto bound = seizure_time_line(line)) {
      const double t = parse_seconds(line, line_no);
      if (*bound == Bound::start) b.start(t, line_no);
      else b.end(t, line_no);
    }
  }
  return b.finish();
}

}  // namespace seizure
