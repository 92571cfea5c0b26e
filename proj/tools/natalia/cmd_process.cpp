#include <cstdio>
#include <filesystem>
#include <iostream>

#include <spdlog/spdlog.h>

#include "commands.hpp"
#include "natalia/classifier/backend.hpp"
#include "natalia/keyframes/json.hpp"
#include "natalia/media/codec.hpp"
#include "natalia/media/decode.hpp"

namespace fs = std::filesystem;

namespace natalia::cli {

namespace {

struct ProcessArgs {
  std::string video;
  std::string backend = "mock";
  fs::path out = "natalia-out";
  keyframes::SelectionConfig selection;
  std::size_t batch = 16;
};

int run_process(const ProcessArgs& args) {
  try {
    args.selection.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  if (args.batch == 0) throw UsageError("--batch must be >= 1");

  const auto video = media::decode_video(args.video);
  spdlog::info("decoded {} frames from {}", video.size(), args.video);
  auto backend = classifier::load_backend(args.backend);
  const auto out = keyframes::process_sweep_with_frames(video, *backend, args.selection, args.batch);

  const auto kf_dir = args.out / "keyframes";
  fs::create_directories(kf_dir);
  for (const auto& entry : fs::directory_iterator(kf_dir)) {
    if (entry.path().extension() == ".png") fs::remove(entry.path());
  }
  for (const auto& k : out.result.keyframes) {
    media::write_png(kf_dir / keyframes::keyframe_filename(k), out.frames[k.frame_index]);
  }
  const nlohmann::json j = out.result;
  write_text(args.out / "result.json", j.dump(2) + "\n");

  std::cout << "frames: " << out.result.frame_count << "\n";
  std::cout << "key frames: " << out.result.keyframes.size() << "\n";
  for (std::size_t i = 0; i < kPlaneCount; ++i) {
    std::printf("  %-4s %zu\n", std::string(to_string(kPlaneLabels[i])).c_str(), out.result.counts[i]);
  }
  std::cout << "wrote " << (args.out / "result.json").string() << "\n";
  return kOk;
}

}  // namespace

void register_process(CLI::App& app, Action& action) {
  auto args = std::make_shared<ProcessArgs>();
  auto* cmd = app.add_subcommand("process", "Classify a sweep and select key frames");
  cmd->add_option("video", args->video, "MP4 file, frame directory or frame archive")->required();
  cmd->add_option("--backend", args->backend, "mock, mock:<W>x<H> or model:<path.onnx>")
      ->capture_default_str();
  cmd->add_option("--out", args->out, "Output directory")->capture_default_str();
  cmd->add_option("--tau", args->selection.min_confidence, "Minimum confidence, in (0, 1)")
      ->capture_default_str();
  cmd->add_option("--gap", args->selection.max_gap, "Largest bridged gap in frames")
      ->capture_default_str();
  cmd->add_option("--max-per-label", args->selection.max_per_label, "Key frames kept per label")
      ->capture_default_str();
  cmd->add_option("--dedup-ssim", args->selection.dedup_ssim,
                  "Drop candidates more similar than this to a kept frame")
      ->capture_default_str();
  cmd->add_option("--batch", args->batch, "Classifier batch size")->capture_default_str();
  cmd->callback([args, &action] { action = [args] { return run_process(*args); }; });
}

}  // namespace natalia::cli
