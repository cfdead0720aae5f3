#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "fdtruss/ground.hpp"
#include "fdtruss/pareto.hpp"

namespace fdtruss {

// Problem files are JSON:
//
//   {
//     "nodes":    [[x, y], ...],
//     "members":  [[a, b], ...],
//     "supports": [{"node": i, "fix_x": true, "fix_y": true}, ...],
//     "loads":    [{"node": i, "direction": "x" | "y", "magnitude": p}, ...],
//     "fixed":    [i, ...]
//   }
//
// Node indices are 0-based. "fix_x"/"fix_y" default to true and "fixed"
// (extra nodes pinned during form finding) is optional. Several loads on one
// node add up.

/// Throws ParseError on malformed input and ConfigError on an invalid structure.
GroundStructure parse_problem(std::string_view text);
GroundStructure read_problem(const std::filesystem::path& path);
std::string problem_json(const GroundStructure& g);

/// Header `index,Fx,Fy,beta,mu_ratio,r_est`; doubles carry 17 significant
/// digits, missing values are empty fields.
std::string front_csv(std::span<const ParetoPoint> points);

/// Inverse of front_csv. Genomes are not part of the format.
std::vector<ParetoPoint> parse_front_csv(std::string_view text);

/// One row per point: index followed by the genome.
std::string genome_csv(std::span<const ParetoPoint> points);

/// Rows of comma-separated doubles, optionally after a header line that does
/// not parse as numbers. Used for genome files and reference objective files.
std::vector<std::vector<double>> parse_numeric_csv(std::string_view text);

struct ComparisonRow {
    std::string method;
    double r = 0.0;
    double compliance = 0.0;
};

/// Header `method,r,compliance`.
std::string comparison_csv(std::span<const ComparisonRow> rows);

std::string format_double(double v);

std::string read_text(const std::filesystem::path& path);
/// Creates parent directories as needed. Throws IoError.
void write_text(const std::filesystem::path& path, std::string_view text);

} // namespace fdtruss
