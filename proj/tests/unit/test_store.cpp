#include <gtest/gtest.h>

#include <fstream>
#include <thread>

#include "natalia/common/error.hpp"
#include "natalia/service/store.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace natalia::service {
namespace {

template <typename Store>
void exercise_cas(Store& store) {
  EXPECT_FALSE(store.get("things", "a").has_value());
  EXPECT_TRUE(store.commit(Write{"things", "a", 0, json{{"v", 1}}}));
  EXPECT_FALSE(store.commit(Write{"things", "a", 0, json{{"v", 2}}}));
  EXPECT_FALSE(store.commit(Write{"things", "a", 2, json{{"v", 2}}}));
  EXPECT_TRUE(store.commit(Write{"things", "a", 1, json{{"v", 2}}}));
  const auto doc = store.get("things", "a");
  ASSERT_TRUE(doc.has_value());
  EXPECT_EQ(doc->version, 2u);
  EXPECT_EQ(doc->body["v"], 2);

  // All-or-nothing: the stale second write voids the first.
  const std::vector<Write> batch{{"things", "b", 0, json{{"v", 1}}},
                                 {"things", "a", 1, json{{"v", 3}}}};
  EXPECT_FALSE(store.commit(batch));
  EXPECT_FALSE(store.get("things", "b").has_value());
  EXPECT_EQ(store.get("things", "a")->body["v"], 2);

  const std::vector<Write> good{{"things", "b", 0, json{{"v", 1}}},
                                {"other", "x", 0, json{{"v", 9}}},
                                {"things", "a", 2, json{{"v", 3}}}};
  EXPECT_TRUE(store.commit(good));
  const auto all = store.list("things");
  ASSERT_EQ(all.size(), 2u);
  EXPECT_EQ(all[0].id, "a");
  EXPECT_EQ(all[1].id, "b");
  EXPECT_TRUE(store.list("missing").empty());
}

TEST(MemoryDocumentStore, CompareAndSet) {
  MemoryDocumentStore store;
  exercise_cas(store);
}

TEST(MemoryDocumentStore, RejectsBadNamesAndDuplicateWrites) {
  MemoryDocumentStore store;
  EXPECT_THROW(store.commit(Write{"things", "../x", 0, json{}}), Error);
  EXPECT_THROW(store.commit(Write{"a/b", "x", 0, json{}}), Error);
  const std::vector<Write> twice{{"c", "x", 0, json{}}, {"c", "x", 0, json{}}};
  EXPECT_THROW(store.commit(twice), Error);
}

TEST(MemoryDocumentStore, ConcurrentIncrementsLoseNothing) {
  MemoryDocumentStore store;
  ASSERT_TRUE(store.commit(Write{"c", "n", 0, json{{"n", 0}}}));
  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&] {
      for (int i = 0; i < 200; ++i) {
        for (;;) {
          const auto d = *store.get("c", "n");
          if (store.commit(Write{"c", "n", d.version, json{{"n", d.body["n"].get<int>() + 1}}})) break;
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(store.get("c", "n")->body["n"], 1600);
  EXPECT_EQ(store.get("c", "n")->version, 1601u);
}

TEST(FileDocumentStore, CompareAndSetAndReload) {
  testing::TempDir tmp;
  {
    FileDocumentStore store(tmp.path());
    exercise_cas(store);
  }
  FileDocumentStore reopened(tmp.path());
  EXPECT_EQ(reopened.get("things", "a")->version, 3u);
  EXPECT_EQ(reopened.get("things", "a")->body["v"], 3);
  EXPECT_EQ(reopened.get("other", "x")->body["v"], 9);
  EXPECT_FALSE(fs::exists(tmp.path() / "journal.json"));
  EXPECT_TRUE(fs::exists(tmp.path() / "things" / "a.json"));
}

TEST(FileDocumentStore, ReplaysInterruptedCommit) {
  testing::TempDir tmp;
  {
    FileDocumentStore store(tmp.path());
    ASSERT_TRUE(store.commit(Write{"s", "a", 0, json{{"v", 1}}}));
  }
  // A commit that wrote its journal but crashed before updating the files.
  const json journal = json::array(
      {json{{"collection", "s"}, {"doc", json{{"id", "a"}, {"version", 2}, {"body", {{"v", 2}}}}}},
       json{{"collection", "e"}, {"doc", json{{"id", "b"}, {"version", 1}, {"body", {{"v", 7}}}}}}});
  std::ofstream(tmp.path() / "journal.json") << journal.dump();

  FileDocumentStore store(tmp.path());
  EXPECT_EQ(store.get("s", "a")->version, 2u);
  EXPECT_EQ(store.get("e", "b")->body["v"], 7);
  EXPECT_FALSE(fs::exists(tmp.path() / "journal.json"));
}

TEST(FileDocumentStore, CorruptDocumentIsStorageFailure) {
  testing::TempDir tmp;
  fs::create_directories(tmp.path() / "s");
  std::ofstream(tmp.path() / "s" / "a.json") << "{not json";
  try {
    FileDocumentStore store(tmp.path());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::StorageFailure);
  }
}

template <typename Store>
void exercise_blobs(Store& blobs) {
  const std::vector<std::uint8_t> bytes{1, 2, 3};
  blobs.put("videos/st-1", bytes);
  blobs.put("keyframes/st-1/12.png", std::vector<std::uint8_t>{9});
  EXPECT_TRUE(blobs.exists("videos/st-1"));
  EXPECT_EQ(blobs.get("videos/st-1"), bytes);
  EXPECT_EQ(blobs.keys(), (std::vector<std::string>{"keyframes/st-1/12.png", "videos/st-1"}));
  blobs.put("videos/st-1", std::vector<std::uint8_t>{4});
  EXPECT_EQ(blobs.get("videos/st-1"), (std::vector<std::uint8_t>{4}));
  blobs.remove("videos/st-1");
  blobs.remove("videos/st-1");
  EXPECT_FALSE(blobs.exists("videos/st-1"));
  EXPECT_FALSE(blobs.get("videos/st-1").has_value());
  EXPECT_THROW(blobs.put("videos/../x", bytes), Error);
  EXPECT_THROW(blobs.put("", bytes), Error);
  EXPECT_THROW(blobs.put("a//b", bytes), Error);
}

TEST(BlobStore, Memory) {
  MemoryBlobStore blobs;
  exercise_blobs(blobs);
}

TEST(BlobStore, File) {
  testing::TempDir tmp;
  FileBlobStore blobs(tmp.path());
  exercise_blobs(blobs);
  EXPECT_TRUE(fs::exists(tmp.path() / "keyframes" / "st-1" / "12.png"));
}

TEST(Names, Validation) {
  EXPECT_TRUE(is_valid_name("st-00ab.json_1"));
  EXPECT_FALSE(is_valid_name(""));
  EXPECT_FALSE(is_valid_name("."));
  EXPECT_FALSE(is_valid_name(".."));
  EXPECT_FALSE(is_valid_name("a b"));
  EXPECT_FALSE(is_valid_name("a/b"));
}

TEST(WriteFileAtomic, ReplacesContents) {
  testing::TempDir tmp;
  const auto p = tmp.path() / "sub" / "f.txt";
  write_file_atomic(p, "one");
  write_file_atomic(p, "two");
  EXPECT_EQ(testing::read_text(p), "two");
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(p.parent_path())) ++entries;
  EXPECT_EQ(entries, 1u);
}

}  // namespace
}  // namespace natalia::service
