#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace boostfold {

/// Scientific notation with 17 significant digits; "nan", "inf", "-inf" for non-finite values.
std::string format_number(double x);

/// Four significant digits for human-readable reports.
std::string format_short(double x);

/// Writes the whole file or throws IoError naming the path.
void write_text_file(const std::filesystem::path& path, std::string_view content);

}  // namespace boostfold
