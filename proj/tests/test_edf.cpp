#include <array>
#include <cmath>
#include <cstring>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "seizure/edf.hpp"
#include "seizure/error.hpp"
#include "seizure/rng.hpp"
#include "seizure/summary.hpp"

using namespace seizure;

namespace {

Recording one_channel(int records, int per_record) {
  Recording r;
  r.patient_id = "P1";
  r.recording_id = "R1";
  r.start = {3, 4, 2010, 12, 30, 15};
  r.record_duration_s = 1.0;
  r.num_records = records;
  ChannelMeta ch;
  ch.label = "FP1-F7";
  ch.physical_dimension = "uV";
  ch.physical_min = -100.0;
  ch.physical_max = 100.0;
  ch.samples_per_record = per_record;
  r.channels.push_back(ch);
  r.signals.emplace_back(static_cast<std::size_t>(records * per_record), 0.0);
  return r;
}

// Header field offsets in the fixed 256-byte block.
void put_field(std::vector<std::uint8_t>& bytes, std::size_t offset, std::size_t width, const std::string& text) {
  std::string padded = text;
  padded.resize(width, ' ');
  std::memcpy(bytes.data() + offset, padded.data(), width);
}

}  // namespace

TEST_CASE("calibration maps digital 0 of a symmetric 16-bit channel to about 0.0015259") {
  ChannelMeta ch;
  ch.physical_min = -100.0;
  ch.physical_max = 100.0;
  const double expected = -100.0 + 32768.0 * 200.0 / 65535.0;
  CHECK(to_physical(ch, 0) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(to_physical(ch, 0) == doctest::Approx(0.0015259).epsilon(1e-4));
  CHECK(to_physical(ch, -32768) == -100.0);
  CHECK(to_physical(ch, 32767) == 100.0);
}

TEST_CASE("calibration is monotone") {
  ChannelMeta ch;
  ch.physical_min = 5.0;
  ch.physical_max = -3.0;  // inverted ranges are legal
  ch.digital_min = -10;
  ch.digital_max = 10;
  CHECK(to_physical(ch, -10) == 5.0);
  CHECK(to_physical(ch, 10) == -3.0);
  for (int d = -10; d < 10; ++d) CHECK(to_physical(ch, d) > to_physical(ch, d + 1));
}

TEST_CASE("empty recording encodes to exactly 256 bytes and parses back") {
  Recording r;
  r.start = {1, 1, 2000, 0, 0, 0};
  const auto bytes = write_edf(r);
  CHECK(bytes.size() == 256);
  const Recording back = parse_edf(bytes);
  CHECK(back.channels.empty());
  CHECK(back.num_records == 0);
  CHECK(back == r);
}

TEST_CASE("one channel, 2 records of 4 samples is 528 bytes") {
  const Recording r = one_channel(2, 4);
  const auto bytes = write_edf(r);
  CHECK(bytes.size() == 256 + 256 + 2 * 4 * 2 * 1);
  CHECK(std::string(bytes.begin(), bytes.begin() + 8) == "0       ");
  CHECK(std::string(bytes.begin() + 184, bytes.begin() + 192) == "512     ");
}

TEST_CASE("data records are interleaved little-endian int16") {
  Recording r = one_channel(1, 2);
  r.channels[0].physical_min = -32768;
  r.channels[0].physical_max = 32767;
  r.signals[0] = {1.0, -2.0};
  const auto bytes = write_edf(r);
  REQUIRE(bytes.size() == 516);
  CHECK(bytes[512] == 0x01);
  CHECK(bytes[513] == 0x00);
  CHECK(bytes[514] == 0xFE);
  CHECK(bytes[515] == 0xFF);
}

TEST_CASE("round trip of 100 random recordings: exact headers, samples within one step") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Recording r = oracle::random_recording(seed);
    const Recording back = parse_edf(write_edf(r));
    CHECK(back.patient_id == r.patient_id);
    CHECK(back.recording_id == r.recording_id);
    CHECK(back.start == r.start);
    CHECK(back.record_duration_s == r.record_duration_s);
    CHECK(back.num_records == r.num_records);
    REQUIRE(back.channels == r.channels);
    for (std::size_t c = 0; c < r.channels.size(); ++c) {
      REQUIRE(back.signals[c].size() == r.signals[c].size());
      const double step = std::abs(r.channels[c].gain());
      for (std::size_t i = 0; i < r.signals[c].size(); ++i) {
        CHECK(std::abs(back.signals[c][i] - r.signals[c][i]) <= step * (1 + 1e-9));
      }
    }
    // Re-encoding the parsed recording is bit-identical.
    CHECK(write_edf(back) == write_edf(parse_edf(write_edf(back))));
  }
}

TEST_CASE("header text fields are trimmed of trailing spaces") {
  Recording r = one_channel(1, 1);
  r.patient_id = "X  Y";
  const Recording back = parse_edf(write_edf(r));
  CHECK(back.patient_id == "X  Y");
  CHECK(back.channels[0].label == "FP1-F7");
}

TEST_CASE("truncated input reports the byte offset") {
  const auto bytes = write_edf(one_channel(2, 4));
  SUBCASE("inside the fixed header") {
    std::vector<std::uint8_t> cut(bytes.begin(), bytes.begin() + 100);
    CHECK_THROWS_AS(parse_edf(cut), ParseError);
  }
  SUBCASE("inside the data records") {
    std::vector<std::uint8_t> cut(bytes.begin(), bytes.end() - 3);
    try {
      parse_edf(cut);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.offset() >= 512);
      CHECK(e.offset() <= cut.size());
    }
  }
}

TEST_CASE("non-numeric numeric field names the field") {
  auto bytes = write_edf(one_channel(2, 4));
  put_field(bytes, 236, 8, "abc");  // number of data records
  try {
    parse_edf(bytes);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 236);
    CHECK(e.field().find("records") != std::string::npos);
  }
}

TEST_CASE("digital_min >= digital_max is a calibration error naming the channel") {
  auto bytes = write_edf(one_channel(2, 4));
  // Signal header block starts at 256; digital min at 256 + 16+80+8+8+8 = 376,
  // digital max 8 bytes later.
  put_field(bytes, 376, 8, "100");
  put_field(bytes, 384, 8, "100");
  try {
    parse_edf(bytes);
    FAIL("expected CalibrationError");
  } catch (const CalibrationError& e) {
    CHECK(e.channel() == "FP1-F7");
  }
}

TEST_CASE("num_records of -1 is resolved from the data length") {
  auto bytes = write_edf(one_channel(3, 4));
  put_field(bytes, 236, 8, "-1");
  const Recording back = parse_edf(bytes);
  CHECK(back.num_records == 3);
  CHECK(back.signals[0].size() == 12);
}

TEST_CASE("non-ASCII header bytes are rejected") {
  auto bytes = write_edf(one_channel(1, 1));
  bytes[10] = 0xC3;
  CHECK_THROWS_AS(parse_edf(bytes), ParseError);
}

TEST_CASE("writing a value outside the physical range names channel and sample") {
  Recording r = one_channel(1, 4);
  r.signals[0][2] = 100.5;
  try {
    write_edf(r);
    FAIL("expected RangeError");
  } catch (const RangeError& e) {
    CHECK(e.channel() == "FP1-F7");
    CHECK(e.index() == 2);
  }
}

TEST_CASE("sample rate is samples per record over record duration") {
  Recording r = one_channel(2, 256);
  r.record_duration_s = 1.0;
  CHECK(r.sample_rate_hz(0) == 256.0);
  r.record_duration_s = 2.0;
  CHECK(r.sample_rate_hz(0) == 128.0);
}

TEST_CASE("summary: unnumbered seizure lines") {
  const auto s = parse_seizure_summary(
      "File Name: a.edf\nNumber of Seizures in File: 1\nSeizure Start Time: 10 seconds\nSeizure End Time: 30 seconds\n");
  REQUIRE(s.files.size() == 1);
  CHECK(s.files[0].file_name == "a.edf");
  REQUIRE(s.files[0].intervals.size() == 1);
  CHECK(s.files[0].intervals[0] == SeizureInterval{"a.edf", 10.0, 30.0});
}

TEST_CASE("summary: zero seizures maps to an empty list") {
  const auto s = parse_seizure_summary("File Name: b.edf\nFile Start Time: 11:42:54\nNumber of Seizures in File: 0\n");
  REQUIRE(s.find("b.edf") != nullptr);
  CHECK(s.find("b.edf")->intervals.empty());
  CHECK(s.find("c.edf") == nullptr);
}

TEST_CASE("summary: numbered seizure lines, banner and channel lists ignored") {
  const char* text =
      "Data Sampling Rate: 256 Hz\n"
      "*************************\n\n"
      "Channels in EDF Files:\n"
      "**********************\n"
      "Channel 1: FP1-F7\n"
      "Channel 2: F7-T7\n\n"
      "File Name: chb01_03.edf\n"
      "File Start Time: 13:43:04\n"
      "File End Time: 14:43:04\n"
      "Number of Seizures in File: 0\n\n"
      "File Name: chb06_01.edf\n"
      "Number of Seizures in File: 2\n"
      "Seizure 1 Start Time: 1724 seconds\n"
      "Seizure 1 End Time: 1738 seconds\n"
      "Seizure 2 Start Time: 7461 seconds\n"
      "Seizure 2 End Time: 7476 seconds\n";
  const auto s = parse_seizure_summary(text);
  REQUIRE(s.files.size() == 2);
  CHECK(s.files[0].file_name == "chb01_03.edf");
  const auto* f = s.find("chb06_01.edf");
  REQUIRE(f != nullptr);
  REQUIRE(f->intervals.size() == 2);
  CHECK(f->intervals[0] == SeizureInterval{"chb06_01.edf", 1724, 1738});
  CHECK(f->intervals[1] == SeizureInterval{"chb06_01.edf", 7461, 7476});
  CHECK(s.total_seizures() == 2);
}

TEST_CASE("summary: declared count mismatch names the file") {
  try {
    parse_seizure_summary(
        "File Name: x.edf\nNumber of Seizures in File: 2\nSeizure Start Time: 1 seconds\nSeizure End Time: 2 seconds\n");
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("x.edf") != std::string::npos);
  }
}

TEST_CASE("summary: end <= start is rejected") {
  CHECK_THROWS_AS(parse_seizure_summary("File Name: x.edf\nNumber of Seizures in File: 1\n"
                                        "Seizure Start Time: 20 seconds\nSeizure End Time: 20 seconds\n"),
                  DataError);
}
