#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "natalia/media/frame.hpp"

namespace natalia::media {

/// Encodes an 8-bit single-channel PNG.
std::vector<std::uint8_t> encode_png(const GrayFrame& frame);

/// Decodes an 8-bit PNG (gray, gray+alpha, RGB or RGBA) to luma. Colour is
/// converted with bt601_luma; alpha is dropped.
GrayFrame decode_png(std::span<const std::uint8_t> bytes, std::size_t index);

void write_png(const std::filesystem::path& path, const GrayFrame& frame);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path,
                std::span<const std::uint8_t> bytes);

}  // namespace natalia::media
