#pragma once

#include <filesystem>
#include <string>

namespace gmmn {

// Writes via a temp file in the same directory followed by a rename, so a
// failure mid-write never leaves a torn file at the target path.
void atomic_write_text(const std::filesystem::path& path, const std::string& content);

// "%.17g" — shortest text that round-trips a double exactly.
std::string format_double(double v);

}  // namespace gmmn
