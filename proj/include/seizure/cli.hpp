#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace seizure::cli {

enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_data = 2, exit_leakage = 3 };

/// Entry point of the `seizure` tool. Subcommands: synth, ingest, featurize,
/// train, eval, cv, predict. Returns the process exit code.
int run(int argc, const char* const* argv);

/// Same, with explicit arguments (without the program name) and streams.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Patient id of a recording file: the file stem up to the first '_'
/// ("chb01_03.edf" -> "chb01").
std::string patient_from_file_name(std::string_view file_name);

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::string& path);

}  // namespace seizure::cli
