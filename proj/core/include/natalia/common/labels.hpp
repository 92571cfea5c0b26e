#pragma once

#include <array>
#include <cstdint>
#include <cstddef>
#include <optional>
#include <string_view>

namespace natalia {

/// Fetal plane labels in canonical order. Every probability vector and
/// confusion-matrix axis in the project uses this order.
enum class PlaneLabel : std::uint8_t { AC = 0, BPD, HS, SS, FL, NoPlane };

inline constexpr std::size_t kLabelCount = 6;
inline constexpr std::size_t kPlaneCount = 5;  // NoPlane excluded

inline constexpr std::array<PlaneLabel, kLabelCount> kAllLabels = {
    PlaneLabel::AC, PlaneLabel::BPD, PlaneLabel::HS,
    PlaneLabel::SS, PlaneLabel::FL,  PlaneLabel::NoPlane};

inline constexpr std::array<PlaneLabel, kPlaneCount> kPlaneLabels = {
    PlaneLabel::AC, PlaneLabel::BPD, PlaneLabel::HS, PlaneLabel::SS,
    PlaneLabel::FL};

constexpr std::size_t index_of(PlaneLabel label) noexcept {
  return static_cast<std::size_t>(label);
}

constexpr PlaneLabel label_at(std::size_t index) noexcept {
  return static_cast<PlaneLabel>(index);
}

constexpr std::string_view to_string(PlaneLabel label) noexcept {
  constexpr std::array<std::string_view, kLabelCount> names = {
      "AC", "BPD", "HS", "SS", "FL", "NO_PLANE"};
  return names[index_of(label)];
}

/// Accepts the canonical names ("AC" ... "NO_PLANE").
std::optional<PlaneLabel> parse_label(std::string_view text) noexcept;

}  // namespace natalia
