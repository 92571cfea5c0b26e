#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>

#include "natalia/media/frame.hpp"

namespace natalia::media {

enum class ContainerKind { Mp4, FrameArchive, Unknown };

ContainerKind sniff_container(std::span<const std::uint8_t> head) noexcept;

/// Decodes a sweep into grayscale frames in presentation order.
///
/// `source` may be a frame directory (frame_%05d.png plus optional meta.json
/// with {"fps": ...}), an MP4 file or a frame archive (tar of a frame
/// directory). Frames are resized bilinearly when `target` is given.
///
/// Errors: NotFound (missing path), UnsupportedFormat, CorruptStream.
/// A stream that fails part way is an error; truncated sequences are never
/// returned.
FrameSequence decode_video(const std::filesystem::path& source,
                           std::optional<Size> target = std::nullopt);

/// Same as above for an in-memory MP4 or frame archive.
FrameSequence decode_video(std::span<const std::uint8_t> bytes,
                           const std::string& source_id,
                           std::optional<Size> target = std::nullopt);

}  // namespace natalia::media
