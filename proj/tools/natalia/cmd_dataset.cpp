#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <regex>

#include <spdlog/spdlog.h>

#include "commands.hpp"
#include "natalia/dataset/builder.hpp"
#include "natalia/dataset/manifest.hpp"
#include "natalia/media/codec.hpp"
#include "natalia/media/decode.hpp"

namespace fs = std::filesystem;

namespace natalia::cli {

namespace {

struct DatasetArgs {
  fs::path seeds;
  fs::path frames;
  fs::path out = "manifest.json";
  dataset::BuildOptions options;
};

bool is_frame_directory(const fs::path& dir) {
  static const std::regex frame_name(R"(frame_\d{5,}\.png)");
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (std::regex_match(entry.path().filename().string(), frame_name)) return true;
  }
  return false;
}

/// A frame directory is one sequence; otherwise every sub-directory, MP4 or
/// frame archive inside `root` is one, named after its file stem.
std::vector<media::FrameSequence> load_sequences(const fs::path& root) {
  if (!fs::is_directory(root)) {
    throw Error(ErrorCode::NotFound, "frames directory not found: " + root.string());
  }
  std::vector<media::FrameSequence> out;
  if (is_frame_directory(root)) {
    out.push_back(media::decode_video(root));
    return out;
  }
  std::vector<fs::path> candidates;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) {
      if (is_frame_directory(entry.path())) candidates.push_back(entry.path());
    } else if (entry.is_regular_file()) {
      std::vector<std::uint8_t> head(512);
      std::ifstream in(entry.path(), std::ios::binary);
      in.read(reinterpret_cast<char*>(head.data()), static_cast<std::streamsize>(head.size()));
      head.resize(static_cast<std::size_t>(in.gcount()));
      if (media::sniff_container(head) != media::ContainerKind::Unknown) {
        candidates.push_back(entry.path());
      }
    }
  }
  std::sort(candidates.begin(), candidates.end());
  for (const auto& path : candidates) {
    out.push_back(media::decode_video(path));
    spdlog::info("loaded {} ({} frames)", out.back().source_id(), out.back().size());
  }
  if (out.empty()) throw Error(ErrorCode::NotFound, "no sequences found in " + root.string());
  return out;
}

void print_summary(const dataset::DatasetManifest& m) {
  std::array<std::size_t, kLabelCount> train{}, val{};
  for (const auto& e : m.entries) {
    if (e.split == dataset::Split::Train) ++train[index_of(e.label)];
    if (e.split == dataset::Split::Val) ++val[index_of(e.label)];
  }
  std::printf("%-9s %7s %7s %7s\n", "label", "total", "train", "val");
  std::size_t t_total = 0, t_train = 0, t_val = 0;
  for (auto label : kAllLabels) {
    const auto i = index_of(label);
    std::printf("%-9s %7zu %7zu %7zu\n", std::string(to_string(label)).c_str(), m.class_counts[i],
                train[i], val[i]);
    t_total += m.class_counts[i];
    t_train += train[i];
    t_val += val[i];
  }
  std::printf("%-9s %7zu %7zu %7zu\n", "all", t_total, t_train, t_val);
}

int run_dataset_build(const DatasetArgs& args) {
  const auto& o = args.options;
  if (!(o.thresholds.ssim_min > 0.0 && o.thresholds.ssim_min <= 1.0)) {
    throw UsageError("--ssim-min must be in (0, 1]");
  }
  if (!(o.thresholds.ncc_min > 0.0 && o.thresholds.ncc_min <= 1.0)) {
    throw UsageError("--ncc-min must be in (0, 1]");
  }
  if (!(o.negative_fraction > 0.0 && o.negative_fraction <= 1.0)) {
    throw UsageError("--neg-fraction must be in (0, 1]");
  }
  if (!(o.train_fraction > 0.0 && o.train_fraction < 1.0)) {
    throw UsageError("--train-fraction must be in (0, 1)");
  }

  const auto seeds = dataset::read_seed_csv(args.seeds);
  const auto sequences = load_sequences(args.frames);
  const auto manifest = dataset::build_manifest(sequences, seeds, o);
  dataset::write_manifest(manifest, args.out);
  // Round-trip through the reader so a manifest we cannot load is never left
  // looking valid.
  dataset::read_manifest(args.out);
  print_summary(manifest);
  std::cout << "wrote " << args.out.string() << " (" << manifest.entries.size() << " entries)\n";
  return kOk;
}

}  // namespace

void register_dataset(CLI::App& app, Action& action) {
  auto* group = app.add_subcommand("dataset", "Training-set construction");
  group->require_subcommand(1);

  auto args = std::make_shared<DatasetArgs>();
  auto* cmd = group->add_subcommand("build", "Propagate seed labels, sample negatives, split");
  cmd->add_option("--seeds", args->seeds, "CSV: source_id,frame_index,label")->required();
  cmd->add_option("--frames", args->frames,
                  "Frame directory, or a directory of sequences (sub-directories, MP4s, archives)")
      ->required();
  cmd->add_option("--out", args->out, "Manifest path")->capture_default_str();
  cmd->add_option("--ssim-min", args->options.thresholds.ssim_min, "SSIM threshold, in (0, 1]")
      ->capture_default_str();
  cmd->add_option("--ncc-min", args->options.thresholds.ncc_min, "NCC threshold, in (0, 1]")
      ->capture_default_str();
  cmd->add_option("--neg-fraction", args->options.negative_fraction,
                  "Fraction of unlabelled frames kept as NO_PLANE, in (0, 1]")
      ->capture_default_str();
  cmd->add_option("--train-fraction", args->options.train_fraction, "TRAIN share per label")
      ->capture_default_str();
  cmd->add_option("--seed", args->options.seed, "RNG seed")->capture_default_str();
  cmd->callback([args, &action] { action = [args] { return run_dataset_build(*args); }; });
}

}  // namespace natalia::cli
