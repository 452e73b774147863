#pragma once

#include "sgm/model.hpp"

#include <iosfwd>
#include <string>
#include <utility>

namespace sgm::cli {

/// Comma-separated numbers; a first row with any non-numeric cell is a header.
/// Throws DataError on blank cells, ragged rows or an empty table.
Matrix read_csv(std::istream& in);
Matrix read_csv_file(const std::string& path);

/// Header x1,...,xm then one row per sample at 17 significant digits.
void write_csv(std::ostream& out, const MatrixRef& data);

/// "standard" or "file:PATH"; PATH holds one frequency per line, integers
/// separated by commas or whitespace.
FrequencySet parse_freqs(const std::string& spec, int dim);

/// θ file: JSON object with "freqs" (integer arrays) and "theta" (numbers),
/// the same keys as the fit output.
std::pair<FrequencySet, Vector> read_theta_file(const std::string& path);

/// "0.1,0.2" → {0.1, 0.2}. Throws InvalidArgument on a malformed entry.
std::vector<double> parse_doubles(const std::string& text);

}  // namespace sgm::cli
