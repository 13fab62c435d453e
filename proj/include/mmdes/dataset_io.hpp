#pragma once

#include "mmdes/types.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace mmdes {

/// Reads a JSON manifest plus the per-person CSV files it references.
/// Relative CSV paths resolve against the manifest's directory.
///
/// Manifest layout:
///   {"frame_rate_hz": 25,
///    "groups": [{"name": "mfcc", "modality": "audio", "dim": 5}, ...],
///    "persons": [{"id": "P01", "files": {"mfcc": "P01/mfcc.csv"}, "labels": "P01/labels.csv"}]}
MultimodalDataset load_dataset(const std::filesystem::path& manifest_path);

/// Writes `dataset` as `<dir>/manifest.json` and `<dir>/<person>/<group>.csv`.
/// Values are printed with 17 significant digits so a reload is exact.
/// Returns the manifest path.
std::filesystem::path write_dataset(const MultimodalDataset& dataset, const std::filesystem::path& dir);

/// Parses a numeric CSV whose header must equal `expected_header`.
/// `context` names the file and group in error messages.
Eigen::MatrixXd read_numeric_csv(const std::filesystem::path& path,
                                 const std::vector<std::string>& expected_header,
                                 const std::string& context);

void write_numeric_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                       const Eigen::MatrixXd& values);

/// Splits one CSV line on commas (no quoting).
std::vector<std::string> split_csv_line(const std::string& line);

/// Parses a full decimal number; throws DataError with `context` on failure.
double parse_double(const std::string& cell, const std::string& context);

/// Shortest text that parses back to exactly `v`.
std::string format_double(double v);

}  // namespace mmdes
