#pragma once

#include <filesystem>
#include <string>

namespace aomd {

// Shortest text that parses back to the same double.
std::string format_double(double v);

// Writes the bytes verbatim; throws LoadError if the file cannot be written.
void write_text_file(const std::filesystem::path& path, const std::string& contents);
// Throws LoadError if the file cannot be read.
std::string read_text_file(const std::filesystem::path& path);

}  // namespace aomd
