#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>

namespace vdsr {

/// Writes through `fill` into a sibling temp file and renames it over `path`
/// once the stream is flushed without error.
void write_file_atomic(const std::filesystem::path& path,
                       const std::function<void(std::ostream&)>& fill);

void write_text_atomic(const std::filesystem::path& path, std::string_view text);

std::string read_file_bytes(const std::filesystem::path& path);

/// Lower-case hex SHA-256 of a byte string / of a file's contents.
std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace vdsr
