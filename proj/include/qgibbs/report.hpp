#pragma once

#include <json.hpp>

#include <string>
#include <vector>

namespace qgibbs {

using Json = nlohmann::ordered_json;

struct Table {
    std::string name;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

struct Report {
    std::string experiment;
    bool pass = false;
    Json summary;               // raw statistics backing every pass flag
    std::vector<Table> tables;  // flat CSV views (one row per mode / time sample)
};

/// Shortest round-trip decimal form; identical across runs and thread counts.
std::string format_double(double x);

/// RFC 4180: comma separated, CRLF line endings, quoting when needed.
std::string to_csv(const Table& t);

/// FNV-1a 64-bit digest of a byte string (provenance hash, not cryptographic).
std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace qgibbs
