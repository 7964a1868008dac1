#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ltml/matrix.hpp"

namespace ltml::csv {

/// Shortest round-trip formatting of a double (via %.17g then trimming),
/// stable across runs so emitted files are byte-identical for equal inputs.
std::string format_double(double x);

void write_matrix(const std::filesystem::path& path, const Matrix& m,
                  const std::vector<std::string>& header);
void write_labels(const std::filesystem::path& path, const LabelMatrix& m,
                  const std::vector<std::string>& header);

Matrix read_matrix(const std::filesystem::path& path, std::vector<std::string>* header = nullptr);
LabelMatrix read_labels(const std::filesystem::path& path,
                        std::vector<std::string>* header = nullptr);

std::vector<std::string> default_header(const std::string& prefix, std::size_t n);

}  // namespace ltml::csv
