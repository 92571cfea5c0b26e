#include <cstdio>
#include <fstream>
#include <iostream>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "commands.hpp"

namespace natalia::cli {

void write_text(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw natalia::Error(natalia::ErrorCode::StorageFailure, "cannot write " + path.string());
}

int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ModelNotFound:
    case ErrorCode::ShapeMismatch:
    case ErrorCode::SizeMismatch:
    case ErrorCode::BackendFailure:
      return kBackend;
    default:
      return kInput;
  }
}

}  // namespace natalia::cli

int main(int argc, char** argv) {
  using namespace natalia::cli;

  spdlog::set_default_logger(spdlog::stderr_color_mt("natalia"));
  spdlog::set_pattern("%^%l%$: %v");
  spdlog::set_level(spdlog::level::warn);

  CLI::App app{"Fetal-plane key-frame pipeline, dataset builder, metrics and study service",
               "natalia"};
  app.require_subcommand(1);
  app.allow_extras(false);
  app.set_version_flag("--version", "natalia 0.1.0");
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Log progress to stderr")->configurable(false);

  Action action;
  register_process(app, action);
  register_dataset(app, action);
  register_eval(app, action);
  register_serve(app, action);
  register_simulate(app, action);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  if (verbose) spdlog::set_level(spdlog::level::info);

  try {
    return action ? action() : kUsage;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const natalia::Error& e) {
    std::cerr << "error [" << natalia::to_string(e.code()) << "]: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  }
}
