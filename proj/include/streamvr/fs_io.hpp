#pragma once

#include <filesystem>
#include <string_view>

namespace streamvr {

// Writes via a temp file in the same directory plus rename, so a crashed
// run never leaves a partial artifact behind.
void atomic_write(const std::filesystem::path& path, std::string_view content);

}  // namespace streamvr
