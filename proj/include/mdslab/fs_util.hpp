#pragma once

#include <string>
#include <string_view>

namespace mdslab {

// Writes to "<path>.tmp" and renames over path. Parent directories are created.
void write_file_atomic(const std::string& path, std::string_view bytes);

std::string read_file(const std::string& path);

}  // namespace mdslab
