#include <cstdio>
#include <filesystem>
#include <iostream>

#include "commands.hpp"
#include "natalia/media/archive.hpp"
#include "natalia/media/codec.hpp"
#include "natalia/sim/sweep_generator.hpp"

namespace fs = std::filesystem;

namespace natalia::cli {

namespace {

struct SimulateArgs {
  std::string labels;
  sim::SweepSpec spec;
  std::string size = "224x224";
  fs::path out;
  fs::path archive;
};

media::Size parse_size(const std::string& text) {
  int w = 0, h = 0;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%dx%d%c", &w, &h, &tail) != 2 || w <= 0 || h <= 0) {
    throw UsageError("--size must look like 224x224");
  }
  return media::Size{w, h};
}

int run_simulate(SimulateArgs args) {
  args.spec.size = parse_size(args.size);
  sim::SyntheticSweep sweep;
  try {
    args.spec.spans = sim::parse_label_spans(args.labels);
    sweep = sim::generate_sweep(args.spec);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidArgument) throw UsageError(e.what());
    throw;
  }
  sim::write_frame_directory(sweep, args.out);
  if (!args.archive.empty()) {
    const auto tar = media::pack_directory(args.out);
    media::write_file(args.archive, tar);
  }
  std::cout << "wrote " << sweep.frames.size() << " frames to " << args.out.string() << "\n";
  for (const auto& s : sweep.truth.spans) {
    std::printf("  %-4s frames %zu-%zu, peak %zu (%.4f)\n",
                std::string(to_string(s.span.label)).c_str(), s.span.first, s.span.last,
                s.peak_index, s.peak_confidence);
  }
  return kOk;
}

}  // namespace

void register_simulate(CLI::App& app, Action& action) {
  auto args = std::make_shared<SimulateArgs>();
  auto* cmd = app.add_subcommand("simulate-sweep",
                                 "Generate a synthetic sweep carrying mock-backend markers");
  cmd->add_option("--labels", args->labels, "Planted spans, e.g. AC@10-14,FL@40-42")->required();
  cmd->add_option("--frames", args->spec.frame_count, "Frame count")->capture_default_str();
  cmd->add_option("--out", args->out, "Output frame directory")->required();
  cmd->add_option("--seed", args->spec.seed, "Texture seed")->capture_default_str();
  cmd->add_option("--size", args->size, "Frame size WxH")->capture_default_str();
  cmd->add_option("--fps", args->spec.fps, "Frame rate recorded in meta.json")->capture_default_str();
  cmd->add_option("--archive", args->archive, "Also pack the directory into this tar file");
  cmd->callback([args, &action] { action = [args] { return run_simulate(*args); }; });
}

}  // namespace natalia::cli
