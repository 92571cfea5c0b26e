#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace natalia::media {

struct ArchiveMember {
  std::string name;
  std::vector<std::uint8_t> data;
};

// POSIX ustar archives carry a frame directory as a single upload payload.
// Written archives are reproducible: members sorted by name, mtime 0,
// uid/gid 0.

std::vector<std::uint8_t> write_tar(std::span<const ArchiveMember> members);

/// Regular-file members only. Throws Error{CorruptStream} on a bad header
/// checksum or truncated member data.
std::vector<ArchiveMember> read_tar(std::span<const std::uint8_t> bytes);

bool looks_like_tar(std::span<const std::uint8_t> bytes) noexcept;

/// Packs every regular file directly inside `dir`.
std::vector<std::uint8_t> pack_directory(const std::filesystem::path& dir);

}  // namespace natalia::media
