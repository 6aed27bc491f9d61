#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace csphard {

// Canonical float formatting for CSV files and item labels: up to 6
// significant digits, '.' decimal separator, no trailing zeros, "inf" for
// infinity. All artifact writers go through this so byte-level determinism
// holds across the pipeline.
std::string format_number(double v);

// strtod with full-string validation; throws std::invalid_argument.
double parse_number(const std::string& s);

std::vector<std::string> split(const std::string& line, char sep);
std::string join(const std::vector<std::string>& parts, const std::string& sep);

// FNV-1a, used for config hashes in checkpoints.
std::uint64_t fnv1a(const std::string& data);

}  // namespace csphard
