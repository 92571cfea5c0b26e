#include <csignal>
#include <iostream>

#include <pthread.h>

#include "commands.hpp"
#include "natalia/service/deployment.hpp"

namespace natalia::cli {

namespace {

int run_serve(const std::string& config_path) {
  auto vars = service::environment_variables();
  if (!config_path.empty()) {
    for (auto& [k, v] : service::read_config_file(config_path)) vars[k] = v;
  }
  service::DeploymentConfig config;
  try {
    config = service::DeploymentConfig::from_variables(vars);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  if (config.credentials.empty()) throw UsageError("NATALIA_CREDENTIALS is required");

  // Threads started below inherit this mask, so only sigwait sees the signal.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  service::Deployment deployment(config);
  const int port = deployment.start();
  std::cout << "listening on http://" << config.host << ":" << port << std::endl;

  int received = 0;
  sigwait(&signals, &received);
  std::cout << "shutting down" << std::endl;
  deployment.stop();
  return kOk;
}

}  // namespace

void register_serve(CLI::App& app, Action& action) {
  auto path = std::make_shared<std::string>();
  auto* cmd = app.add_subcommand(
      "serve", "Run the study service (settings from NATALIA_* variables and --config)");
  cmd->add_option("--config", *path, "KEY=VALUE file; entries override the environment");
  cmd->callback([path, &action] { action = [path] { return run_serve(*path); }; });
}

}  // namespace natalia::cli
