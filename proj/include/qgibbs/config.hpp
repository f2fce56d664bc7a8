#pragma once

#include "qgibbs/harness.hpp"

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

// Plain-text configuration: INI-style [section] / key = value lines, '#'
// comments. The [topography] section holds bare "j k re im" rows (reduced
// modes, j >= 0, real at j = 0); when the section is absent the bundled
// default topography {(1,1): 1, (2,1): 0.5} is used.

namespace qgibbs {

struct Diagnostic {
    enum class Severity { Error, Warning } severity;
    std::string field;
    std::string message;
};

struct RunConfig {
    // [params] (required)
    double alpha = 0, mu = 0, beta = 0;
    int cutoff = 0;
    // [topography]
    std::vector<std::array<double, 4>> topography;  // j k re im
    bool topography_given = false;
    // [run]
    std::uint64_t seed = 1;
    std::string experiment = "all";
    std::string out_dir = "runs";
    // experiment sections
    InvarianceConfig invariance;
    ConservationConfig conservation;
    ChaosConfig chaos;
    RegularityConfig regularity;
    ResidualConfig residual;
    // [output]
    bool grid_snapshots = false;
    int snapshot_nx = 64, snapshot_ny = 64;

    /// The resolved configuration re-serialized in canonical form (hashed into
    /// the run manifest).
    std::string canonical_text() const;

    GibbsParams make_params() const;
};

/// Key/value view of a parsed file, before semantic interpretation.
struct RawConfig {
    std::map<std::string, std::map<std::string, std::string>> sections;
    std::vector<std::array<double, 4>> topography;
    bool topography_given = false;
};

RawConfig parse_config_text(const std::string& text, std::vector<Diagnostic>& diags);

/// Apply a --set override "section.key=value".
void apply_override(RawConfig& raw, const std::string& spec, std::vector<Diagnostic>& diags);

/// Interpret and validate. Errors leave the returned config unusable; the
/// caller must check for Severity::Error. beta = 0 yields a warning only.
RunConfig interpret_config(const RawConfig& raw, std::vector<Diagnostic>& diags);

/// Built-in defaults (used when no config file is given).
RawConfig default_raw_config();

bool has_errors(const std::vector<Diagnostic>& diags);

}  // namespace qgibbs
