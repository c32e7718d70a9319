#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace lilbound {

/// Reads a numeric CSV with exactly `columns` columns. A first row that does
/// not parse as numbers is taken as the header. Returns column-major data.
std::vector<std::vector<double>> read_csv_columns(const std::filesystem::path& path,
                                                  std::size_t columns);

/// Shortest decimal text that parses back to the same double; "inf", "-inf", "nan".
std::string format_double(double value);
double parse_double(std::string_view text);

/// Writes to `path.tmp` and renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace lilbound
