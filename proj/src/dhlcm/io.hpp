#pragma once

#include <string>

#include "model.hpp"
#include "types.hpp"

namespace dhlcm {

// Reads a dense numeric matrix: comma- or whitespace-delimited rows, an
// optional single header line, blank lines ignored. Throws IoError naming
// the path on any failure.
Matrix read_dense_matrix(const std::string& path);

// read_dense_matrix plus ObservationMatrix validation.
ObservationMatrix read_observation_matrix(const std::string& path,
                                          const ModelFamily& family);

// One label per line, 1-based in the file, 0-based in memory.
Labels read_labels(const std::string& path);

Vector read_vector(const std::string& path);

// Writers print floats with 17 significant digits.
void write_matrix_csv(const std::string& path, const Matrix& m);
void write_labels(const std::string& path, const Labels& labels);  // 1-based
void write_vector(const std::string& path, const Vector& v);
void write_text(const std::string& path, const std::string& text);

std::string format_double(double v);

}  // namespace dhlcm
