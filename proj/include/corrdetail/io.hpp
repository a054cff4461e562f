#pragma once

#include <filesystem>
#include <functional>
#include <string>

namespace corrdetail::io {

// Writes via a temp file in the same directory plus rename, so interrupted
// runs never leave a truncated output behind.
void atomic_write(const std::filesystem::path& path,
                  const std::function<void(std::ostream&)>& writer);

std::string read_file(const std::filesystem::path& path);

} // namespace corrdetail::io
