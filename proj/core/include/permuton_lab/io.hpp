#pragma once

#include <string>

namespace permuton_lab {

/// `git describe` of the source tree at build time, or "unknown".
std::string git_describe();

/// 64-bit FNV-1a of the text as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

/// Writes to a sibling temporary file and renames it over `path`, so readers
/// never observe a partially written file.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace permuton_lab
