#include <gtest/gtest.h>

#include <opencv2/core.hpp>
#include <opencv2/videoio.hpp>

#include "natalia/common/error.hpp"
#include "natalia/media/archive.hpp"
#include "natalia/media/codec.hpp"
#include "natalia/media/decode.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;

namespace natalia::media {
namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

std::string frame_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame_%05zu.png", i);
  return buf;
}

std::vector<GrayFrame> write_frames(const fs::path& dir, std::size_t n, std::uint64_t seed) {
  fs::create_directories(dir);
  std::mt19937_64 rng(seed);
  std::vector<GrayFrame> frames;
  for (std::size_t i = 0; i < n; ++i) {
    frames.push_back(testing::random_frame(rng, 32, 24, i));
    write_png(dir / frame_name(i), frames.back());
  }
  return frames;
}

bool write_mp4(const fs::path& path, int frames, cv::Size size) {
  cv::VideoWriter writer(path.string(), cv::CAP_FFMPEG, cv::VideoWriter::fourcc('m', 'p', '4', 'v'),
                         10.0, size, true);
  if (!writer.isOpened()) return false;
  for (int i = 0; i < frames; ++i) {
    cv::Mat m(size, CV_8UC3, cv::Scalar(10 * i % 255, 128, 60));
    writer.write(m);
  }
  writer.release();
  return true;
}

TEST(Png, RoundTrip) {
  std::mt19937_64 rng(1);
  const auto f = testing::random_frame(rng, 33, 17, 4);
  const auto bytes = encode_png(f);
  const auto back = decode_png(bytes, 4);
  EXPECT_TRUE(std::equal(f.pixels().begin(), f.pixels().end(), back.pixels().begin()));
  EXPECT_EQ(back.size(), f.size());
}

TEST(Png, GarbageIsCorrupt) {
  const std::vector<std::uint8_t> junk(100, 7);
  EXPECT_EQ(code_of([&] { decode_png(junk, 0); }), ErrorCode::CorruptStream);
}

TEST(FrameDirectory, DecodesInOrderWithFps) {
  testing::TempDir tmp;
  const auto frames = write_frames(tmp / "seq", 12, 2);
  media::write_file(tmp.path() / "seq" / "meta.json",
                    std::vector<std::uint8_t>{'{', '"', 'f', 'p', 's', '"', ':', '4', '}'});
  const auto seq = decode_video(tmp.path() / "seq");
  ASSERT_EQ(seq.size(), 12u);
  EXPECT_EQ(seq.source_id(), "seq");
  EXPECT_EQ(seq.fps(), 4.0);
  for (std::size_t i = 0; i < 12; ++i) {
    EXPECT_EQ(seq[i].index(), i);
    EXPECT_TRUE(std::equal(frames[i].pixels().begin(), frames[i].pixels().end(),
                           seq[i].pixels().begin()));
    EXPECT_DOUBLE_EQ(*seq[i].timestamp_ms(), 250.0 * static_cast<double>(i));
  }
}

TEST(FrameDirectory, GapIsCorrupt) {
  testing::TempDir tmp;
  write_frames(tmp / "seq", 5, 3);
  fs::remove(tmp.path() / "seq" / frame_name(2));
  EXPECT_EQ(code_of([&] { decode_video(tmp.path() / "seq"); }), ErrorCode::CorruptStream);
}

TEST(FrameDirectory, EmptyIsCorrupt) {
  testing::TempDir tmp;
  fs::create_directories(tmp / "empty");
  EXPECT_EQ(code_of([&] { decode_video(tmp.path() / "empty"); }), ErrorCode::CorruptStream);
}

TEST(FrameDirectory, ResizesToTarget) {
  testing::TempDir tmp;
  write_frames(tmp / "seq", 3, 4);
  const auto seq = decode_video(tmp.path() / "seq", Size{48, 48});
  EXPECT_EQ(seq.frame_size(), (Size{48, 48}));
}

TEST(Archive, TarRoundTripMatchesDirectory) {
  testing::TempDir tmp;
  write_frames(tmp / "seq", 7, 5);
  const auto tar = pack_directory(tmp.path() / "seq");
  EXPECT_TRUE(looks_like_tar(tar));
  EXPECT_EQ(sniff_container(tar), ContainerKind::FrameArchive);
  EXPECT_EQ(tar, pack_directory(tmp.path() / "seq"));

  const auto from_dir = decode_video(tmp.path() / "seq");
  const auto from_tar = decode_video(tar, "seq");
  ASSERT_EQ(from_tar.size(), from_dir.size());
  for (std::size_t i = 0; i < from_dir.size(); ++i) EXPECT_EQ(from_tar[i], from_dir[i]);

  media::write_file(tmp.path() / "seq.tar", tar);
  EXPECT_EQ(decode_video(tmp.path() / "seq.tar").size(), 7u);
}

TEST(Archive, MembersSortedAndChecked) {
  std::vector<ArchiveMember> members{{"b.txt", {1, 2, 3}}, {"a.txt", {4}}};
  const auto tar = write_tar(members);
  const auto back = read_tar(tar);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].name, "a.txt");
  EXPECT_EQ(back[1].data, (std::vector<std::uint8_t>{1, 2, 3}));

  auto bad = tar;
  bad[10] ^= 0xff;
  EXPECT_EQ(code_of([&] { read_tar(bad); }), ErrorCode::CorruptStream);

  const std::vector<std::uint8_t> cut(tar.begin(), tar.begin() + 600);
  EXPECT_EQ(code_of([&] { read_tar(cut); }), ErrorCode::CorruptStream);
}

TEST(Mp4, DecodesAllFrames) {
  testing::TempDir tmp;
  const auto path = tmp.path() / "clip.mp4";
  ASSERT_TRUE(write_mp4(path, 15, {64, 48})) << "FFmpeg writer unavailable";
  const auto seq = decode_video(path);
  EXPECT_EQ(seq.size(), 15u);
  EXPECT_EQ(seq.frame_size(), (Size{64, 48}));
  EXPECT_EQ(seq.source_id(), "clip");
  ASSERT_TRUE(seq.fps().has_value());
  EXPECT_NEAR(*seq.fps(), 10.0, 1e-6);

  const auto bytes = read_file(path);
  EXPECT_EQ(sniff_container(bytes), ContainerKind::Mp4);
  const auto in_memory = decode_video(bytes, "upload", Size{32, 32});
  EXPECT_EQ(in_memory.size(), 15u);
  EXPECT_EQ(in_memory.frame_size(), (Size{32, 32}));
}

TEST(Mp4, TruncatedIsCorrupt) {
  testing::TempDir tmp;
  const auto path = tmp.path() / "clip.mp4";
  ASSERT_TRUE(write_mp4(path, 30, {64, 48}));
  auto bytes = read_file(path);
  bytes.resize(bytes.size() / 2);
  EXPECT_EQ(code_of([&] { decode_video(bytes, "cut"); }), ErrorCode::CorruptStream);
}

TEST(DecodeVideo, UnknownAndMissing) {
  testing::TempDir tmp;
  media::write_file(tmp.path() / "x.bin", std::vector<std::uint8_t>(1024, 0x41));
  EXPECT_EQ(code_of([&] { decode_video(tmp.path() / "x.bin"); }), ErrorCode::UnsupportedFormat);
  EXPECT_EQ(code_of([&] { decode_video(tmp.path() / "nope.mp4"); }), ErrorCode::NotFound);
  const std::vector<std::uint8_t> junk(64, 1);
  EXPECT_EQ(code_of([&] { decode_video(junk, "j"); }), ErrorCode::UnsupportedFormat);
}

}  // namespace
}  // namespace natalia::media
