#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace wavesim {

// 64-bit FNV-1a; used to fingerprint configs and artifacts.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t h);
// Hash of a file's bytes as hex; throws MissingFile.
std::string file_hash(const std::string& path);

}  // namespace wavesim
