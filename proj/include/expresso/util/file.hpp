#pragma once

#include <filesystem>

#include "expresso/util/bytes.hpp"

namespace expresso {

Bytes read_file(const std::filesystem::path& path);
/// Writes via a temporary file and rename, so readers never observe a partial file.
void write_file_atomic(const std::filesystem::path& path, ByteView data);

}  // namespace expresso
