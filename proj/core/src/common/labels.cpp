#include "natalia/common/labels.hpp"

namespace natalia {

std::optional<PlaneLabel> parse_label(std::string_view text) noexcept {
  for (PlaneLabel label : kAllLabels) {
    if (to_string(label) == text) return label;
  }
  return std::nullopt;
}

}  // namespace natalia
