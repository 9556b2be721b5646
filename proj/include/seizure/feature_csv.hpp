#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "seizure/feature_matrix.hpp"

namespace seizure {

// Feature table layout: header `patient,file,start_s,label,f0,...,f{d-1}`,
// UTF-8, LF line endings, numbers in shortest round-trip form.

void write_feature_csv(std::ostream& out, const Dataset& data);
Dataset read_feature_csv(std::istream& in);

void write_feature_csv(const std::filesystem::path& path, const Dataset& data);
Dataset read_feature_csv(const std::filesystem::path& path);

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

}  // namespace seizure
