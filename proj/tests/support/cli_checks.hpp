#pragma once

#include <chrono>
#include <filesystem>
#include <string>

namespace natalia::testing {

// Checks that drive the natalia executable. Each returns an empty string on
// success and a description of the first problem otherwise.

/// `simulate-sweep`, `process` and `dataset build` run twice with the same
/// arguments produce byte-identical files.
std::string check_cli_determinism(const std::filesystem::path& cli, const std::filesystem::path& work);

struct EndToEndTiming {
  std::chrono::milliseconds startup{0};
  std::chrono::milliseconds total{0};
};

/// Simulates AC@10-14,FL@40-42, starts `natalia serve` (mock backend, port
/// 0), uploads the sweep as an operator, waits for PROCESSED and checks the
/// key frames, counts and key-frame images against the planted truth.
std::string check_end_to_end(const std::filesystem::path& cli, const std::filesystem::path& work,
                             EndToEndTiming* timing = nullptr);

}  // namespace natalia::testing
