#pragma once

// Dense matrix files: CSV (one row per line, optional header line) and the
// JSON envelope {"dim": d, "data": [row-major entries]}.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "spdgeo/spd.hpp"

namespace spdgeo::io {

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double x);

/// Parses CSV text into a rows x cols matrix. A first line that does not
/// parse as numbers is treated as a header and returned through `header`.
Mat parse_csv(const std::string& text, std::vector<std::string>* header = nullptr);

std::string to_csv(const Mat& m, const std::vector<std::string>& header = {});

/// {"dim": d, "data": [...]} for square matrices.
std::string to_json_envelope(const Mat& m);
Mat parse_json_envelope(const std::string& text);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

/// Reads a square matrix; the format is chosen from the extension (.json)
/// or, failing that, from the first non-blank character.
Mat read_matrix(const std::filesystem::path& path);

/// Reads a symmetric matrix and validates it as SPD. Asymmetry beyond the
/// SpdMatrix tolerance raises InvalidInput, indefiniteness DomainError.
Spd read_spd(const std::filesystem::path& path);

/// Writes CSV or, for a .json extension, the JSON envelope.
void write_matrix(const std::filesystem::path& path, const Mat& m);

}  // namespace spdgeo::io
