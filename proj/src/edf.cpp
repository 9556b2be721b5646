#include "seizure/edf.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <limits>
#include <string_view>

#include "seizure/error.hpp"

namespace seizure {
namespace {

constexpr std::size_t kHeaderBytes = 256;
constexpr std::size_t kSignalHeaderBytes = 256;
constexpr int kDigitalLow = std::numeric_limits<std::int16_t>::min();
constexpr int kDigitalHigh = std::numeric_limits<std::int16_t>::max();

// Per-signal field widths, in on-disk order.
constexpr std::size_t kLabelW = 16, kTransducerW = 80, kDimensionW = 8, kNumberW = 8, kPrefilterW = 80,
                      kReservedW = 32;

bool printable(char c) { return c >= 0x20 && c <= 0x7e; }

std::string_view trim_right(std::string_view s) {
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  return s;
}

std::string_view trim(std::string_view s) {
  s = trim_right(s);
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  return s;
}

class HeaderReader {
 public:
  explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::string text(std::size_t offset, std::size_t width, const char* field) const {
    if (offset + width > bytes_.size()) {
      throw ParseError(field, bytes_.size(), "truncated header (need " + std::to_string(offset + width) + " bytes)");
    }
    std::string out;
    out.reserve(width);
    for (std::size_t i = 0; i < width; ++i) {
      const char c = static_cast<char>(bytes_[offset + i]);
      if (!printable(c)) throw ParseError(field, offset + i, "non-printable ASCII byte");
      out.push_back(c);
    }
    out.resize(trim_right(out).size());
    return out;
  }

  double real(std::size_t offset, std::size_t width, const char* field) const {
    const std::string raw = text(offset, width, field);
    const std::string_view s = trim(raw);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(value)) {
      throw ParseError(field, offset, "not a number: '" + raw + "'");
    }
    return value;
  }

  std::int64_t integer(std::size_t offset, std::size_t width, const char* field) const {
    const std::string raw = text(offset, width, field);
    std::string_view s = trim(raw);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    std::int64_t value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
      throw ParseError(field, offset, "not an integer: '" + raw + "'");
    }
    return value;
  }

 private:
  std::span<const std::uint8_t> bytes_;
};

int two_digits(std::string_view s, std::size_t pos, const char* field, std::size_t offset) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + pos + 2, v);
  if (ec != std::errc{} || ptr != s.data() + pos + 2) throw ParseError(field, offset + pos, "expected two digits");
  return v;
}

// "dd.mm.yy" + "hh.mm.ss"
EdfDateTime parse_datetime(const std::string& date, const std::string& time) {
  constexpr std::size_t kDateOff = 168, kTimeOff = 176;
  if (date.size() != 8 || date[2] != '.' || date[5] != '.') throw ParseError("start date", kDateOff, "expected dd.mm.yy");
  if (time.size() != 8 || time[2] != '.' || time[5] != '.') throw ParseError("start time", kTimeOff, "expected hh.mm.ss");
  EdfDateTime dt;
  dt.day = two_digits(date, 0, "start date", kDateOff);
  dt.month = two_digits(date, 3, "start date", kDateOff);
  const int yy = two_digits(date, 6, "start date", kDateOff);
  dt.year = yy >= 85 ? 1900 + yy : 2000 + yy;
  dt.hour = two_digits(time, 0, "start time", kTimeOff);
  dt.minute = two_digits(time, 3, "start time", kTimeOff);
  dt.second = two_digits(time, 6, "start time", kTimeOff);
  return dt;
}

class HeaderWriter {
 public:
  explicit HeaderWriter(std::vector<std::uint8_t>& out) : out_(out) {}

  void text(std::string_view s, std::size_t width, const char* field) {
    if (s.size() > width) {
      throw RangeError(field, 0, "text '" + std::string(s) + "' exceeds " + std::to_string(width) + " bytes");
    }
    for (char c : s) {
      if (!printable(c)) throw RangeError(field, 0, "non-printable ASCII character");
      out_.push_back(static_cast<std::uint8_t>(c));
    }
    out_.insert(out_.end(), width - s.size(), static_cast<std::uint8_t>(' '));
  }

  // Shortest decimal form that parses back to exactly `v`.
  void number(double v, std::size_t width, const char* field) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    const std::string_view s(buf, static_cast<std::size_t>(res.ptr - buf));
    if (s.size() > width) {
      throw RangeError(field, 0, "value " + std::string(s) + " not representable in " + std::to_string(width) + " characters");
    }
    text(s, width, field);
  }

 private:
  std::vector<std::uint8_t>& out_;
};

std::string two_digit_field(int a, int b, int c) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02d.%02d.%02d", a, b, c);
  return buf;
}

}  // namespace

double to_physical(const ChannelMeta& ch, int digital) noexcept {
  if (digital == ch.digital_min) return ch.physical_min;
  if (digital == ch.digital_max) return ch.physical_max;
  return ch.physical_min + static_cast<double>(digital - ch.digital_min) * (ch.physical_max - ch.physical_min) /
                               static_cast<double>(ch.digital_max - ch.digital_min);
}

int to_digital(const ChannelMeta& ch, double physical, std::size_t index) {
  const double lo = std::min(ch.physical_min, ch.physical_max);
  const double hi = std::max(ch.physical_min, ch.physical_max);
  const double slack = 1e-9 * (hi - lo);
  if (!(physical >= lo - slack && physical <= hi + slack)) {
    throw RangeError(ch.label, index,
                     "physical value " + std::to_string(physical) + " outside [" + std::to_string(lo) + ", " +
                         std::to_string(hi) + "]");
  }
  const double d = static_cast<double>(ch.digital_min) + (physical - ch.physical_min) / ch.gain();
  const long rounded = std::lround(d);
  return static_cast<int>(std::clamp<long>(rounded, ch.digital_min, ch.digital_max));
}

void validate(const Recording& r) {
  if (!(r.record_duration_s > 0.0) || !std::isfinite(r.record_duration_s)) {
    throw ConfigError("record duration must be positive");
  }
  if (r.num_records < 0) throw ConfigError("num_records must be nonnegative");
  if (r.signals.size() != r.channels.size()) {
    throw ShapeError("recording has " + std::to_string(r.channels.size()) + " channels but " +
                     std::to_string(r.signals.size()) + " signals");
  }
  for (std::size_t c = 0; c < r.channels.size(); ++c) {
    const ChannelMeta& ch = r.channels[c];
    if (ch.digital_min >= ch.digital_max) {
      throw CalibrationError(ch.label, "digital_min " + std::to_string(ch.digital_min) + " >= digital_max " +
                                           std::to_string(ch.digital_max));
    }
    if (ch.digital_min < kDigitalLow || ch.digital_max > kDigitalHigh) {
      throw CalibrationError(ch.label, "digital range exceeds 16-bit storage");
    }
    if (ch.physical_min == ch.physical_max) throw CalibrationError(ch.label, "physical_min == physical_max");
    if (ch.samples_per_record < 1) throw CalibrationError(ch.label, "samples_per_record must be >= 1");
    const auto expected = static_cast<std::size_t>(r.num_records) * static_cast<std::size_t>(ch.samples_per_record);
    if (r.signals[c].size() != expected) {
      throw ShapeError("channel '" + ch.label + "' has " + std::to_string(r.signals[c].size()) +
                       " samples, expected " + std::to_string(expected));
    }
  }
}

Recording parse_edf(std::span<const std::uint8_t> bytes) {
  const HeaderReader in(bytes);
  Recording r;

  const std::string version = in.text(0, 8, "version");
  if (version != "0") throw ParseError("version", 0, "expected '0', got '" + version + "'");
  r.patient_id = in.text(8, 80, "patient id");
  r.recording_id = in.text(88, 80, "recording id");
  r.start = parse_datetime(in.text(168, 8, "start date"), in.text(176, 8, "start time"));
  const std::int64_t header_bytes = in.integer(184, 8, "header bytes");
  std::int64_t num_records = in.integer(236, 8, "number of data records");
  r.record_duration_s = in.real(244, 8, "record duration");
  const std::int64_t ns = in.integer(252, 4, "number of signals");

  if (ns < 0) throw ParseError("number of signals", 252, "negative signal count");
  if (num_records < -1) throw ParseError("number of data records", 236, "negative record count");
  if (!(r.record_duration_s > 0.0)) throw ParseError("record duration", 244, "must be positive");
  const auto n = static_cast<std::size_t>(ns);
  if (header_bytes != static_cast<std::int64_t>(kHeaderBytes + n * kSignalHeaderBytes)) {
    throw ParseError("header bytes", 184,
                     "declared " + std::to_string(header_bytes) + ", layout requires " +
                         std::to_string(kHeaderBytes + n * kSignalHeaderBytes));
  }

  // Signal header arrays: each field is stored contiguously for all signals.
  r.channels.resize(n);
  std::size_t off = kHeaderBytes;
  auto each_text = [&](std::size_t width, const char* field, auto assign) {
    for (std::size_t i = 0; i < n; ++i) assign(r.channels[i], in.text(off + i * width, width, field));
    off += n * width;
  };
  auto each_real = [&](const char* field, auto assign) {
    for (std::size_t i = 0; i < n; ++i) assign(r.channels[i], in.real(off + i * kNumberW, kNumberW, field), off + i * kNumberW);
    off += n * kNumberW;
  };
  auto each_int = [&](const char* field, auto assign) {
    for (std::size_t i = 0; i < n; ++i) assign(r.channels[i], in.integer(off + i * kNumberW, kNumberW, field), off + i * kNumberW);
    off += n * kNumberW;
  };

  each_text(kLabelW, "label", [](ChannelMeta& c, std::string s) { c.label = std::move(s); });
  each_text(kTransducerW, "transducer", [](ChannelMeta& c, std::string s) { c.transducer = std::move(s); });
  each_text(kDimensionW, "physical dimension", [](ChannelMeta& c, std::string s) { c.physical_dimension = std::move(s); });
  each_real("physical minimum", [](ChannelMeta& c, double v, std::size_t) { c.physical_min = v; });
  each_real("physical maximum", [](ChannelMeta& c, double v, std::size_t) { c.physical_max = v; });
  each_int("digital minimum", [](ChannelMeta& c, std::int64_t v, std::size_t at) {
    if (v < kDigitalLow || v > kDigitalHigh) throw ParseError("digital minimum", at, "outside 16-bit range");
    c.digital_min = static_cast<int>(v);
  });
  each_int("digital maximum", [](ChannelMeta& c, std::int64_t v, std::size_t at) {
    if (v < kDigitalLow || v > kDigitalHigh) throw ParseError("digital maximum", at, "outside 16-bit range");
    c.digital_max = static_cast<int>(v);
  });
  each_text(kPrefilterW, "prefiltering", [](ChannelMeta& c, std::string s) { c.prefiltering = std::move(s); });
  each_int("samples per record", [](ChannelMeta& c, std::int64_t v, std::size_t at) {
    if (v < 1 || v > std::numeric_limits<int>::max()) throw ParseError("samples per record", at, "must be >= 1");
    c.samples_per_record = static_cast<int>(v);
  });
  // Per-signal reserved area: content ignored but must be present.
  in.text(off, n * kReservedW, "signal reserved");
  off += n * kReservedW;

  for (const ChannelMeta& ch : r.channels) {
    if (ch.digital_min >= ch.digital_max) {
      throw CalibrationError(ch.label, "digital_min " + std::to_string(ch.digital_min) + " >= digital_max " +
                                           std::to_string(ch.digital_max));
    }
    if (ch.physical_min == ch.physical_max) throw CalibrationError(ch.label, "physical_min == physical_max");
  }

  std::size_t samples_per_record = 0;
  for (const ChannelMeta& ch : r.channels) samples_per_record += static_cast<std::size_t>(ch.samples_per_record);
  const std::size_t record_bytes = 2 * samples_per_record;
  const std::size_t data_bytes = bytes.size() - off;

  if (num_records == -1) {
    if (record_bytes == 0 || data_bytes % record_bytes != 0) {
      throw ParseError("number of data records", 236, "unknown record count (-1) and data length " +
                                                         std::to_string(data_bytes) + " is not a whole number of records");
    }
    num_records = static_cast<std::int64_t>(data_bytes / record_bytes);
  }
  r.num_records = num_records;
  const std::size_t records = static_cast<std::size_t>(num_records);
  if (data_bytes < records * record_bytes) {
    // Offset of the first record that is incomplete.
    throw ParseError("data record", off + (data_bytes / std::max<std::size_t>(record_bytes, 1)) * record_bytes,
                     "truncated data: need " + std::to_string(records * record_bytes) + " bytes, have " +
                         std::to_string(data_bytes));
  }

  r.signals.resize(n);
  for (std::size_t c = 0; c < n; ++c) r.signals[c].resize(records * static_cast<std::size_t>(r.channels[c].samples_per_record));

  const std::uint8_t* p = bytes.data() + off;
  for (std::size_t rec = 0; rec < records; ++rec) {
    for (std::size_t c = 0; c < n; ++c) {
      const ChannelMeta& ch = r.channels[c];
      const auto spr = static_cast<std::size_t>(ch.samples_per_record);
      double* dst = r.signals[c].data() + rec * spr;
      for (std::size_t s = 0; s < spr; ++s, p += 2) {
        const auto raw = static_cast<std::int16_t>(static_cast<std::uint16_t>(p[0] | (p[1] << 8)));
        dst[s] = to_physical(ch, raw);
      }
    }
  }
  return r;
}

std::vector<std::uint8_t> write_edf(const Recording& r) {
  validate(r);
  const std::size_t n = r.channels.size();

  std::vector<std::uint8_t> out;
  std::size_t samples_per_record = 0;
  for (const ChannelMeta& ch : r.channels) samples_per_record += static_cast<std::size_t>(ch.samples_per_record);
  out.reserve(kHeaderBytes + n * kSignalHeaderBytes + 2 * samples_per_record * static_cast<std::size_t>(r.num_records));

  if (r.start.year < 1985 || r.start.year > 2084) throw RangeError("start date", 0, "year outside 1985..2084");
  HeaderWriter w(out);
  w.text("0", 8, "version");
  w.text(r.patient_id, 80, "patient id");
  w.text(r.recording_id, 80, "recording id");
  w.text(two_digit_field(r.start.day, r.start.month, r.start.year % 100), 8, "start date");
  w.text(two_digit_field(r.start.hour, r.start.minute, r.start.second), 8, "start time");
  w.text(std::to_string(kHeaderBytes + n * kSignalHeaderBytes), 8, "header bytes");
  w.text("", 44, "reserved");
  w.text(std::to_string(r.num_records), 8, "number of data records");
  w.number(r.record_duration_s, 8, "record duration");
  w.text(std::to_string(n), 4, "number of signals");

  for (const ChannelMeta& ch : r.channels) w.text(ch.label, kLabelW, "label");
  for (const ChannelMeta& ch : r.channels) w.text(ch.transducer, kTransducerW, "transducer");
  for (const ChannelMeta& ch : r.channels) w.text(ch.physical_dimension, kDimensionW, "physical dimension");
  for (const ChannelMeta& ch : r.channels) w.number(ch.physical_min, kNumberW, "physical minimum");
  for (const ChannelMeta& ch : r.channels) w.number(ch.physical_max, kNumberW, "physical maximum");
  for (const ChannelMeta& ch : r.channels) w.text(std::to_string(ch.digital_min), kNumberW, "digital minimum");
  for (const ChannelMeta& ch : r.channels) w.text(std::to_string(ch.digital_max), kNumberW, "digital maximum");
  for (const ChannelMeta& ch : r.channels) w.text(ch.prefiltering, kPrefilterW, "prefiltering");
  for (const ChannelMeta& ch : r.channels) w.text(std::to_string(ch.samples_per_record), kNumberW, "samples per record");
  for (std::size_t c = 0; c < n; ++c) w.text("", kReservedW, "signal reserved");

  const auto records = static_cast<std::size_t>(r.num_records);
  for (std::size_t rec = 0; rec < records; ++rec) {
    for (std::size_t c = 0; c < n; ++c) {
      const ChannelMeta& ch = r.channels[c];
      const auto spr = static_cast<std::size_t>(ch.samples_per_record);
      for (std::size_t s = 0; s < spr; ++s) {
        const std::size_t index = rec * spr + s;
        const auto d = static_cast<std::uint16_t>(static_cast<std::int16_t>(to_digital(ch, r.signals[c][index], index)));
        out.push_back(static_cast<std::uint8_t>(d & 0xff));
        out.push_back(static_cast<std::uint8_t>(d >> 8));
      }
    }
  }
  return out;
}

Recording read_edf_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_edf(bytes);
}

void write_edf_file(const std::filesystem::path& path, const Recording& r) {
  const std::vector<std::uint8_t> bytes = write_edf(r);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace seizure
