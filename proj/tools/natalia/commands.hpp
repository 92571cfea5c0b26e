#pragma once

#include <filesystem>
#include <functional>
#include <string>

#include <CLI11.hpp>

#include "natalia/common/error.hpp"

namespace natalia::cli {

enum Exit : int {
  kOk = 0,
  kInput = 2,
  kBackend = 3,
  kUsage = 64,
};

/// Thrown for flag combinations CLI11 cannot check on its own.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Writes `text` to `path`, creating parent directories.
void write_text(const std::filesystem::path& path, std::string_view text);

/// Backend errors map to 3, everything else raised while running to 2.
int exit_code_for(ErrorCode code) noexcept;

/// Each register_* adds a subcommand and stores the action to run after a
/// successful parse in `action`.
using Action = std::function<int()>;

void register_process(CLI::App& app, Action& action);
void register_dataset(CLI::App& app, Action& action);
void register_eval(CLI::App& app, Action& action);
void register_serve(CLI::App& app, Action& action);
void register_simulate(CLI::App& app, Action& action);

}  // namespace natalia::cli
