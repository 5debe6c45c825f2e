#pragma once

#include <filesystem>
#include <string>

namespace kgl::csv {

/// 17 significant digits, '.' decimal separator, locale independent.
std::string fmt(double x);

void ensure_directory(const std::filesystem::path& dir);

}  // namespace kgl::csv
