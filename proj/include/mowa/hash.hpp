#pragma once

#include <string>
#include <string_view>

namespace mowa {

// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view bytes);

// Writes via a sibling temp file and rename, so readers never see a torn file.
void write_file_atomic(const std::string& path, std::string_view bytes);
std::string read_file(const std::string& path);

std::string utc_timestamp();

}  // namespace mowa
